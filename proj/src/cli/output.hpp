#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace chiral::cli {

/// RFC 4180 writer: CRLF line ends, quoting only where needed, doubles with
/// 17 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& field(std::string_view s);
  CsvWriter& field(double x);
  CsvWriter& field(long long x);
  void end_row();
  void header(const std::vector<std::string>& names);

 private:
  void sep();
  std::ostream& os_;
  bool first_ = true;
};

std::string format_double(double x);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal self-contained SVG line chart.
std::string svg_chart(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series);

}  // namespace chiral::cli
