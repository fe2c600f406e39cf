#include "io_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wavekin {

CsvWriter::CsvWriter(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("csv: cannot open " + path);
  f_ = f;
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(static_cast<FILE*>(f_));
}

void CsvWriter::header(const std::vector<std::string>& cols) {
  FILE* f = static_cast<FILE*>(f_);
  for (size_t i = 0; i < cols.size(); ++i)
    std::fprintf(f, "%s%s", cols[i].c_str(), i + 1 < cols.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  FILE* f = static_cast<FILE*>(f_);
  for (size_t i = 0; i < values.size(); ++i)
    std::fprintf(f, "%.17g%s", values[i], i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::raw_line(const std::string& line) {
  std::fprintf(static_cast<FILE*>(f_), "%s\n", line.c_str());
}

int CsvTable::col(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  throw std::runtime_error("csv: missing column " + name);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot read " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (first) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      first = false;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (!row.empty()) t.rows.push_back(std::move(row));
  }
  return t;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("io: cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("io: cannot create directory " + path);
}

namespace {

constexpr int kW = 760, kH = 480, kMl = 70, kMr = 20, kMt = 40, kMb = 55;

std::string color_for(size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[i % 8];
}

double nice_value(double v, bool log_scale) {
  if (!log_scale) return v;
  return v > 0.0 ? std::log10(v) : -300.0;
}

}  // namespace

void svg_line_chart(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series, bool log_y) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      const double yv = nice_value(s.y[i], log_y);
      if (yv <= -299.0) continue;
      ymin = std::min(ymin, yv);
      ymax = std::max(ymax, yv);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) {
    return kMl + (x - xmin) / (xmax - xmin) * (kW - kMl - kMr);
  };
  auto py = [&](double y) {
    return kH - kMb - (y - ymin) / (ymax - ymin) * (kH - kMt - kMb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
      << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << kW / 2 << "' y='22' text-anchor='middle' font-size='15'>"
      << title << "</text>\n";
  // axes
  svg << "<line x1='" << kMl << "' y1='" << kH - kMb << "' x2='" << kW - kMr
      << "' y2='" << kH - kMb << "' stroke='black'/>\n";
  svg << "<line x1='" << kMl << "' y1='" << kMt << "' x2='" << kMl << "' y2='"
      << kH - kMb << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + i * (xmax - xmin) / 5.0;
    const double yv = ymin + i * (ymax - ymin) / 5.0;
    svg << "<text x='" << px(xv) << "' y='" << kH - kMb + 18
        << "' text-anchor='middle' font-size='11'>";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    svg << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", log_y ? std::pow(10.0, yv) : yv);
    svg << "<text x='" << kMl - 6 << "' y='" << py(yv) + 4
        << "' text-anchor='end' font-size='11'>" << buf << "</text>\n";
  }
  svg << "<text x='" << (kMl + kW - kMr) / 2 << "' y='" << kH - 14
      << "' text-anchor='middle' font-size='12'>" << xlabel << "</text>\n";
  svg << "<text x='16' y='" << (kMt + kH - kMb) / 2
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
      << (kMt + kH - kMb) / 2 << ")'>" << ylabel << (log_y ? " (log)" : "")
      << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    svg << "<polyline fill='none' stroke='" << color_for(si) << "' stroke-width='1.6' points='";
    for (size_t i = 0; i < s.x.size(); ++i) {
      const double yv = nice_value(s.y[i], log_y);
      if (yv <= -299.0) continue;
      svg << px(s.x[i]) << "," << py(yv) << " ";
    }
    svg << "'/>\n";
    svg << "<text x='" << kW - kMr - 6 << "' y='" << kMt + 16 * (si + 1)
        << "' text-anchor='end' font-size='12' fill='" << color_for(si) << "'>" << s.name
        << "</text>\n";
  }
  svg << "</svg>\n";
  write_text_file(path, svg.str());
}

void svg_heatmap(const std::string& path, const std::string& title,
                 const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::vector<std::vector<double>>& values) {
  double vmax = 1e-300;
  for (const auto& row : values)
    for (double v : row) vmax = std::max(vmax, std::fabs(v));
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  const double cw = static_cast<double>(kW - kMl - kMr) / std::max(1, nx);
  const double ch = static_cast<double>(kH - kMt - kMb) / std::max(1, ny);

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
      << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << kW / 2 << "' y='22' text-anchor='middle' font-size='15'>"
      << title << " (|max| = " << vmax << ")</text>\n";
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = values[i][j] / vmax;  // [-1, 1]
      const int r = v > 0 ? 255 : static_cast<int>(255 * (1.0 + v));
      const int b = v < 0 ? 255 : static_cast<int>(255 * (1.0 - v));
      const int g = static_cast<int>(255 * (1.0 - std::fabs(v)));
      svg << "<rect x='" << kMl + i * cw << "' y='" << kH - kMb - (j + 1) * ch
          << "' width='" << cw + 0.5 << "' height='" << ch + 0.5 << "' fill='rgb(" << r
          << "," << g << "," << b << ")'/>\n";
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g..%.3g", xs.empty() ? 0.0 : xs.front(),
                xs.empty() ? 0.0 : xs.back());
  svg << "<text x='" << (kMl + kW - kMr) / 2 << "' y='" << kH - 14
      << "' text-anchor='middle' font-size='12'>K_x: " << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g..%.3g", ys.empty() ? 0.0 : ys.front(),
                ys.empty() ? 0.0 : ys.back());
  svg << "<text x='16' y='" << (kMt + kH - kMb) / 2
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
      << (kMt + kH - kMb) / 2 << ")'>K_y: " << buf << "</text>\n";
  svg << "</svg>\n";
  write_text_file(path, svg.str());
}

}  // namespace wavekin
