#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace corrscreen::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.5) * (kHeight - kTop - kBottom);
  }
};

void open(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
     << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const std::string& x_label, const std::string& y_label,
          bool x_ticks) {
  const double bottom = kHeight - kBottom;
  os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(kWidth - kRight)
     << "\" y2=\"" << num(bottom) << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
     << num(bottom) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = f.y0 + (f.y1 - f.y0) * k / 4.0;
    os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(f.py(y) + 4)
       << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
    if (x_ticks) {
      const double x = f.x0 + (f.x1 - f.x0) * k / 4.0;
      os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(bottom + 16)
         << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
    }
  }
  os << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 12)
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << num((kTop + bottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << num((kTop + bottom) / 2) << ")\">" << escape(y_label) << "</text>\n";
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string line_plot(const std::vector<Series>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label) {
  Frame f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : series) {
    for (double x : s.x) f.x0 = std::min(f.x0, x), f.x1 = std::max(f.x1, x);
    for (double y : s.y) f.y0 = std::min(f.y0, y), f.y1 = std::max(f.y1, y);
  }
  if (!std::isfinite(f.x0)) f = {0, 1, 0, 1};
  std::ostringstream os;
  open(os, title);
  axes(os, f, x_label, y_label, true);
  std::size_t colour = 0;
  for (const auto& s : series) {
    const char* stroke = kPalette[colour++ % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      os << (k ? " " : "") << num(f.px(s.x[k])) << ',' << num(f.py(s.y[k]));
    }
    os << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(colour);
    os << "<text x=\"" << num(kWidth - kRight - 4) << "\" y=\"" << num(ly) << "\" text-anchor=\"end\" fill=\""
       << stroke << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string box_plot(const std::vector<BoxGroup>& groups, const std::string& title,
                     const std::string& y_label) {
  Frame f{0.0, static_cast<double>(groups.size()), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};
  for (const auto& g : groups) {
    for (double v : g.values) f.y0 = std::min(f.y0, v), f.y1 = std::max(f.y1, v);
  }
  if (!std::isfinite(f.y0)) f.y0 = 0.0, f.y1 = 1.0;
  std::ostringstream os;
  open(os, title);
  axes(os, f, "", y_label, false);
  const double slot = (kWidth - kLeft - kRight) / std::max<double>(1.0, static_cast<double>(groups.size()));
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const double cx = f.px(static_cast<double>(k) + 0.5);
    os << "<text x=\"" << num(cx) << "\" y=\"" << num(kHeight - kBottom + 16)
       << "\" text-anchor=\"middle\" font-size=\"9\">" << escape(groups[k].label) << "</text>\n";
    if (groups[k].values.empty()) continue;
    auto v = groups[k].values;
    std::sort(v.begin(), v.end());
    const double q1 = quantile_sorted(v, 0.25);
    const double med = quantile_sorted(v, 0.5);
    const double q3 = quantile_sorted(v, 0.75);
    const double reach = 1.5 * (q3 - q1);
    const auto lo_it = std::lower_bound(v.begin(), v.end(), q1 - reach);
    const double lo = lo_it != v.end() ? *lo_it : v.front();
    const auto hi_it = std::upper_bound(v.begin(), v.end(), q3 + reach);
    const double hi = hi_it != v.begin() ? *(hi_it - 1) : v.back();
    const double half = 0.3 * slot;
    const char* stroke = kPalette[k % std::size(kPalette)];
    os << "<line x1=\"" << num(cx) << "\" y1=\"" << num(f.py(lo)) << "\" x2=\"" << num(cx) << "\" y2=\""
       << num(f.py(hi)) << "\" stroke=\"" << stroke << "\"/>\n"
       << "<rect x=\"" << num(cx - half) << "\" y=\"" << num(f.py(q3)) << "\" width=\"" << num(2 * half)
       << "\" height=\"" << num(f.py(q1) - f.py(q3)) << "\" fill=\"white\" stroke=\"" << stroke << "\"/>\n"
       << "<line x1=\"" << num(cx - half) << "\" y1=\"" << num(f.py(med)) << "\" x2=\"" << num(cx + half)
       << "\" y2=\"" << num(f.py(med)) << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
    for (double x : v) {
      if (x < lo || x > hi) {
        os << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(f.py(x)) << "\" r=\"2\" fill=\"none\" stroke=\""
           << stroke << "\"/>\n";
      }
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace corrscreen::svg
