#include "polyrom/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "polyrom/errors.hpp"

namespace polyrom {

namespace {

constexpr double kW = 720, kH = 480;
constexpr double kL = 70, kR = 24, kT = 24, kB = 54;

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

struct Frame {
  double n0, n1, v0, v1;  // data ranges (v = log10 eps)
  double px(double n) const {
    const double t = n1 > n0 ? (n - n0) / (n1 - n0) : 0.5;
    return kL + t * (kW - kL - kR);
  }
  double py(double v) const {
    const double t = v1 > v0 ? (v - v0) / (v1 - v0) : 0.5;
    return kH - kB - t * (kH - kT - kB);
  }
};

void polyline(std::ostringstream& svg,
              const std::vector<std::pair<double, double>>& pts,
              const Frame& fr, const std::string& color, bool dashed,
              bool markers) {
  if (pts.empty()) return;
  svg << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\"";
  if (dashed) svg << " stroke-dasharray=\"6 4\"";
  svg << " points=\"";
  for (const auto& [n, v] : pts)
    svg << fmt(fr.px(n)) << "," << fmt(fr.py(v)) << " ";
  svg << "\"/>\n";
  if (markers)
    for (const auto& [n, v] : pts)
      svg << "<circle cx=\"" << fmt(fr.px(n)) << "\" cy=\"" << fmt(fr.py(v))
          << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
}

}  // namespace

std::string emit_plot(
    const std::vector<KnwPoint>& curve,
    const std::vector<std::pair<std::string, DecayFit>>& fits) {
  if (curve.empty()) throw ConfigError("emit_plot: empty curve");

  std::vector<std::pair<double, double>> pu, pp;
  double n0 = 1e300, n1 = -1e300, v0 = 1e300, v1 = -1e300;
  for (const auto& pt : curve) {
    n0 = std::min(n0, static_cast<double>(pt.n));
    n1 = std::max(n1, static_cast<double>(pt.n));
    if (pt.eps_u > 0) {
      const double v = std::log10(pt.eps_u);
      pu.push_back({static_cast<double>(pt.n), v});
      v0 = std::min(v0, v);
      v1 = std::max(v1, v);
    }
    if (pt.eps_p > 0) {
      const double v = std::log10(pt.eps_p);
      pp.push_back({static_cast<double>(pt.n), v});
      v0 = std::min(v0, v);
      v1 = std::max(v1, v);
    }
  }
  if (v0 > v1) {  // every value was nonpositive; degenerate but drawable
    v0 = -1;
    v1 = 1;
  }
  if (v1 - v0 < 1e-12) {
    v0 -= 1;
    v1 += 1;
  }
  const Frame fr{n0, n1, v0, v1};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
      << "\">\n";
  svg << "<rect width=\"" << kW << "\" height=\"" << kH
      << "\" fill=\"white\"/>\n";

  // Axes.
  svg << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR
      << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL
      << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";

  // x ticks: up to 8 integer positions.
  const int span = static_cast<int>(n1 - n0);
  const int step = std::max(1, (span + 7) / 8);
  for (int n = static_cast<int>(n0); n <= static_cast<int>(n1); n += step) {
    const double x = fr.px(n);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << kH - kB << "\" x2=\""
        << fmt(x) << "\" y2=\"" << kH - kB + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << kH - kB + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << n << "</text>\n";
  }
  // y ticks at integer log10 levels.
  const int l0 = static_cast<int>(std::ceil(v0));
  const int l1 = static_cast<int>(std::floor(v1));
  const int lstep = std::max(1, (l1 - l0 + 9) / 10);
  for (int l = l0; l <= l1; l += lstep) {
    const double y = fr.py(l);
    svg << "<line x1=\"" << kL - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << kL
        << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kL - 8 << "\" y=\"" << fmt(y + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">1e" << l << "</text>\n";
  }
  svg << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">n</text>\n";
  svg << "<text x=\"16\" y=\"" << (kT + kH - kB) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 "
         "16 "
      << (kT + kH - kB) / 2 << ")\">eps (log scale)</text>\n";

  polyline(svg, pu, fr, "#1f77b4", false, true);
  polyline(svg, pp, fr, "#d62728", false, true);

  const char* fit_colors[] = {"#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::vector<std::string> legend;
  legend.push_back("eps_u");
  if (!pp.empty()) legend.push_back("eps_p");
  int fi = 0;
  for (const auto& [label, fit] : fits) {
    // the dashed model line spans only the range the fit was made on
    const int lo = fit.used.empty() ? 1 : fit.used.front().first;
    const int hi = fit.used.empty()
                       ? (fit.n_cut > 0 ? fit.n_cut - 1
                                        : std::numeric_limits<int>::max())
                       : fit.used.back().first;
    std::vector<std::pair<double, double>> pf;
    for (const auto& pt : curve) {
      if (pt.n < lo || pt.n > hi) continue;
      const double v =
          (std::log(fit.C) - fit.b * std::pow(pt.n, fit.a)) / std::log(10.0);
      pf.push_back({static_cast<double>(pt.n), v});
    }
    const std::string color = fit_colors[fi % 4];
    polyline(svg, pf, fr, color, true, false);
    std::ostringstream lg;
    lg << label << ": a=" << fmt(fit.a) << " b=" << fmt(fit.b) << " R2=";
    if (fit.r2_defined)
      lg << fmt(fit.r2);
    else
      lg << "undefined";
    legend.push_back(lg.str());
    ++fi;
  }

  // Legend block, top right.
  const char* series_colors[] = {"#1f77b4", "#d62728"};
  double ly = kT + 14;
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const std::string color =
        i == 0 ? series_colors[0]
               : (i == 1 && !pp.empty()
                      ? series_colors[1]
                      : fit_colors[(i - (pp.empty() ? 1 : 2)) % 4]);
    svg << "<rect x=\"" << kW - kR - 300 << "\" y=\"" << fmt(ly - 9)
        << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << kW - kR - 282 << "\" y=\"" << fmt(ly)
        << "\" font-size=\"11\">" << xml_escape(legend[i]) << "</text>\n";
    ly += 16;
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace polyrom
