#include "allee/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace allee::io {

namespace {

constexpr double kW = 800.0, kH = 600.0;
constexpr double kLeft = 80.0, kRight = 160.0, kTop = 50.0, kBottom = 60.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

std::string tick(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

struct Frame {
  double xlo, xhi, ylo, yhi;
  double px(double x) const { return kLeft + (x - xlo) / (xhi - xlo) * (kW - kLeft - kRight); }
  double py(double y) const { return kH - kBottom - (y - ylo) / (yhi - ylo) * (kH - kTop - kBottom); }
};

Frame make_frame(double xlo, double xhi, double ylo, double yhi, bool pad) {
  if (!(xlo < xhi)) xlo -= 0.5, xhi += 0.5;
  if (!(ylo < yhi)) ylo -= 0.5, yhi += 0.5;
  if (pad) {
    const double dx = 0.03 * (xhi - xlo), dy = 0.03 * (yhi - ylo);
    xlo -= dx, xhi += dx, ylo -= dy, yhi += dy;
  }
  return {xlo, xhi, ylo, yhi};
}

void header(std::ostream& os, const Axes& a, const Frame& f) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
        "viewBox=\"0 0 800 600\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kW / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
     << esc(a.title) << "</text>\n";
  const double x0 = kLeft, x1 = kW - kRight, y0 = kTop, y1 = kH - kBottom;
  os << "<path d=\"M" << num(x0) << ' ' << num(y0) << " V" << num(y1) << " H" << num(x1)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = f.xlo + (f.xhi - f.xlo) * i / 5.0, yv = f.ylo + (f.yhi - f.ylo) * i / 5.0;
    const double px = f.px(xv), py = f.py(yv);
    os << "<path d=\"M" << num(px) << ' ' << num(y1) << " v5\" stroke=\"black\"/>"
       << "<text x=\"" << num(px) << "\" y=\"" << num(y1 + 18) << "\" text-anchor=\"middle\">"
       << tick(xv) << "</text>\n";
    os << "<path d=\"M" << num(x0) << ' ' << num(py) << " h-5\" stroke=\"black\"/>"
       << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
       << tick(yv) << "</text>\n";
  }
  os << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kH - 18)
     << "\" text-anchor=\"middle\">" << esc(a.xlabel) << "</text>\n";
  os << "<text x=\"20\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << num((y0 + y1) / 2) << ")\">" << esc(a.ylabel) << "</text>\n";
}

void legend(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& items) {
  double y = kTop + 10.0;
  const double x = kW - kRight + 20.0;
  for (const auto& [name, color] : items) {
    os << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"14\" height=\"10\" fill=\""
       << color << "\"/><text x=\"" << num(x + 20) << "\" y=\"" << num(y) << "\">" << esc(name)
       << "</text>\n";
    y += 18.0;
  }
}

}  // namespace

std::string svg_lines(const Axes& axes, const std::vector<Series>& series) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      xlo = std::min(xlo, s.x[i]), xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]), yhi = std::max(yhi, s.y[i]);
    }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  const Frame f = make_frame(xlo, xhi, ylo, yhi, true);
  std::ostringstream os;
  header(os, axes, f);
  std::vector<std::pair<std::string, std::string>> items;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string color = s.color.empty() ? kPalette[k % std::size(kPalette)] : s.color;
    items.emplace_back(s.name, color);
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (n == 0) continue;
    os << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" d=\"";
    for (std::size_t i = 0; i < n; ++i)
      os << (i ? " L" : "M") << num(f.px(s.x[i])) << ' ' << num(f.py(s.y[i]));
    os << "\"/>\n";
  }
  legend(os, items);
  os << "</svg>\n";
  return os.str();
}

std::string svg_rect_map(const Axes& axes, const std::vector<Rect>& rects,
                         const std::vector<std::pair<std::string, std::string>>& colors) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& r : rects) {
    xlo = std::min(xlo, r.x0), xhi = std::max(xhi, r.x1);
    ylo = std::min(ylo, r.y0), yhi = std::max(yhi, r.y1);
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  const Frame f = make_frame(xlo, xhi, ylo, yhi, false);
  const std::map<std::string, std::string> lut(colors.begin(), colors.end());
  std::ostringstream os;
  header(os, axes, f);
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& r : rects) {
    const auto it = lut.find(r.label);
    const std::string color = it == lut.end() ? "#cccccc" : it->second;
    if (std::none_of(items.begin(), items.end(), [&](const auto& p) { return p.first == r.label; }))
      items.emplace_back(r.label, color);
    const double x = f.px(r.x0), y = f.py(r.y1);
    os << "<path d=\"M" << num(x) << ' ' << num(y) << " H" << num(f.px(r.x1)) << " V"
       << num(f.py(r.y0)) << " H" << num(x) << " Z\" fill=\"" << color
       << "\" stroke=\"white\" stroke-width=\"0.5\"><title>" << esc(r.label) << "</title></path>\n";
  }
  legend(os, items);
  os << "</svg>\n";
  return os.str();
}

}  // namespace allee::io
