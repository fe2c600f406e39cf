#pragma once

#include <map>
#include <string>
#include <vector>

namespace wavekin {

/// CSV writer with full-precision numeric formatting (%.17g), so identical
/// data produces identical bytes.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;

  void header(const std::vector<std::string>& cols);
  void row(const std::vector<double>& values);
  void raw_line(const std::string& line);

 private:
  void* f_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int col(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void ensure_directory(const std::string& path);

/// Minimal static SVG plots.
struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

void svg_line_chart(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series, bool log_y = false);

void svg_heatmap(const std::string& path, const std::string& title,
                 const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::vector<std::vector<double>>& values);

}  // namespace wavekin
