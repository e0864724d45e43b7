#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

// Minimal line-chart writer for the CLI plots.
namespace svg {

struct Series {
  std::string name;
  std::vector<double> x, y;
};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

inline std::string line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<Series>& series, int width = 720, int height = 420) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (size_t k = 0; k < s.x.size(); ++k) {
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double left = 70, right = width - 150, top = 40, bottom = height - 50;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (right - left); };
  auto py = [&](double y) { return bottom - (y - y0) / (y1 - y0) * (bottom - top); };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + num(width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
       "</text>\n";
  o += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(right - left) + "\" height=\"" +
       num(bottom - top) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0, yv = y0 + (y1 - y0) * k / 5.0;
    char lx[32], ly[32];
    std::snprintf(lx, sizeof lx, "%.4g", xv);
    std::snprintf(ly, sizeof ly, "%.4g", yv);
    o += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(bottom + 16) + "\" text-anchor=\"middle\">" + lx + "</text>\n";
    o += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + ly + "</text>\n";
  }
  if (y0 < 0.0 && y1 > 0.0)
    o += "<line x1=\"" + num(left) + "\" x2=\"" + num(right) + "\" y1=\"" + num(py(0)) + "\" y2=\"" + num(py(0)) +
         "\" stroke=\"#999\" stroke-dasharray=\"4,3\"/>\n";
  o += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(height - 12.0) + "\" text-anchor=\"middle\">" +
       escape(xlabel) + "</text>\n";
  o += "<text transform=\"translate(16," + num((top + bottom) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       escape(ylabel) + "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % (sizeof colors / sizeof *colors)];
    o += "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" + std::string(c) + "\" points=\"";
    // Long traces keep the first, min, max and last point of each bucket.
    const auto& xs = series[s].x;
    const auto& ys = series[s].y;
    const size_t per = std::max<size_t>(1, xs.size() / 2000);
    for (size_t b = 0; b < xs.size(); b += per) {
      const size_t e = std::min(xs.size(), b + per);
      size_t lo = b, hi = b;
      for (size_t k = b; k < e; ++k) {
        if (ys[k] < ys[lo]) lo = k;
        if (ys[k] > ys[hi]) hi = k;
      }
      std::vector<size_t> keep{b, std::min(lo, hi), std::max(lo, hi), e - 1};
      keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
      for (size_t k : keep) o += num(px(xs[k])) + "," + num(py(ys[k])) + " ";
    }
    o += "\"/>\n";
    o += "<text x=\"" + num(right + 10) + "\" y=\"" + num(top + 16 + 16.0 * s) + "\" fill=\"" + c + "\">" +
         escape(series[s].name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace svg
