#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "matrixopt/errors.hpp"
#include "matrixopt/harness.hpp"

namespace matrixopt::harness {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

}  // namespace

std::vector<PlotPoint> convergence_points(const std::vector<double>& history) {
  std::vector<PlotPoint> pts;
  pts.reserve(history.size());
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double r = history[i];
    if (!std::isfinite(r)) continue;
    pts.push_back({static_cast<double>(i), std::log10(std::max(r, 1e-300))});
  }
  return pts;
}

void write_convergence_svg(std::ostream& out, const std::vector<double>& history,
                           std::optional<double> tolerance, const std::string& title) {
  const auto pts = convergence_points(history);
  if (pts.empty()) throw PreconditionError("plot: residual history is empty");

  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  double ymin = pts.front().log10_residual, ymax = ymin;
  for (const auto& p : pts) {
    ymin = std::min(ymin, p.log10_residual);
    ymax = std::max(ymax, p.log10_residual);
  }
  if (tolerance && *tolerance > 0) {
    const double lt = std::log10(*tolerance);
    ymin = std::min(ymin, lt);
    ymax = std::max(ymax, lt);
  }
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax <= ymin) ymax = ymin + 1;
  const double xmax = std::max(1.0, pts.back().x);
  auto sx = [&](double x) { return L + (W - L - R) * x / xmax; };
  auto sy = [&](double y) { return T + (H - T - B) * (ymax - y) / (ymax - ymin); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << escape(title) << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  const int step = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / 10)));
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); e += step) {
    const double y = sy(e);
    out << "<line x1=\"" << L - 4 << "\" y1=\"" << fmt(y) << "\" x2=\"" << W - R << "\" y2=\""
        << fmt(y) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << L - 8 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
        << "</text>\n";
  }
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">iteration (0.."
      << static_cast<long>(xmax) << ")</text>\n";
  out << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">residual</text>\n";
  if (tolerance && *tolerance > 0) {
    const double y = sy(std::log10(*tolerance));
    out << "<line class=\"tolerance\" x1=\"" << L << "\" y1=\"" << fmt(y) << "\" x2=\"" << W - R
        << "\" y2=\"" << fmt(y) << "\" stroke=\"red\" stroke-dasharray=\"6 4\"/>\n";
  }
  out << "<polyline class=\"residual\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << (i ? " " : "") << fmt(sx(pts[i].x)) << ',' << fmt(sy(pts[i].log10_residual));
  }
  out << "\"/>\n</svg>\n";
}

void write_convergence_svg(const std::filesystem::path& path, const std::vector<double>& history,
                           std::optional<double> tolerance, const std::string& title) {
  if (convergence_points(history).empty()) throw PreconditionError("plot: residual history is empty");
  std::ofstream f(path);
  if (!f) throw Error("plot: cannot open " + path.string() + " for writing");
  write_convergence_svg(f, history, tolerance, title);
  if (!f) throw Error("plot: write to " + path.string() + " failed");
}

}  // namespace matrixopt::harness
