#ifndef SWELLFLOW_CSV_HPP
#define SWELLFLOW_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "swellflow/errors.hpp"

namespace swellflow {

/// %.17g keeps doubles round-trip exact and the output byte-reproducible.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw ConfigError("cannot open output file '" + path + "'");
  }

  void comment(const std::string& text) { out_ << "# " << text << "\n"; }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

  void numeric_row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << format_double(cells[i]);
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

}  // namespace swellflow

#endif
