#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "calband/io.hpp"

namespace calband {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

struct Segment {
  double a;
  double b;
  double level;
};

class Frame {
 public:
  Frame(double lo, double hi) : lo_(lo), hi_(hi) {}
  double px(double x) const { return kLeft + (x - lo_) / (hi_ - lo_) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - lo_) / (hi_ - lo_) * (kHeight - kTop - kBottom); }

 private:
  double lo_;
  double hi_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// Step pieces of each bound over [dom_lo, dom_hi], left to right.
std::vector<Segment> upper_segments(const StepBand& band, double dom_lo, double dom_hi) {
  std::vector<Segment> out;
  double start = dom_lo;
  for (std::size_t i = 0; i < band.size(); ++i) {
    out.push_back({start, band.knots[i], band.upper[i]});
    start = band.knots[i];
  }
  if (dom_hi > start) out.push_back({start, dom_hi, 1.0});
  return out;
}

std::vector<Segment> lower_segments(const StepBand& band, double dom_lo, double dom_hi) {
  std::vector<Segment> out;
  if (band.knots.front() > dom_lo) out.push_back({dom_lo, band.knots.front(), 0.0});
  for (std::size_t i = 0; i < band.size(); ++i) {
    const double end = i + 1 < band.size() ? band.knots[i + 1] : dom_hi;
    out.push_back({band.knots[i], std::max(end, band.knots[i]), band.lower[i]});
  }
  return out;
}

void append_steps(std::ostringstream& path, const Frame& f, const std::vector<Segment>& segs, bool reverse) {
  const auto emit = [&](double x, double y) { path << ' ' << fmt(f.px(x)) << ',' << fmt(f.py(y)); };
  if (!reverse) {
    for (const auto& s : segs) {
      emit(s.a, s.level);
      emit(s.b, s.level);
    }
  } else {
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
      emit(it->b, it->level);
      emit(it->a, it->level);
    }
  }
}

}  // namespace

std::string render_svg(const AnalysisResult& result, const SvgOptions& options) {
  const double lo = options.zoom_lo;
  const double hi = options.zoom_hi;
  const Frame f(lo, hi);
  const StepBand& band = result.band;
  const double dom_lo = options.extrapolate ? std::min(0.0, band.knots.front()) : band.knots.front();
  const double dom_hi = options.extrapolate ? std::max(1.0, band.knots.back()) : band.knots.back();

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  svg << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  svg << "<defs><clipPath id=\"plot\"><rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\""
      << fmt(kWidth - kLeft - kRight) << "\" height=\"" << fmt(kHeight - kTop - kBottom)
      << "\"/></clipPath></defs>\n";

  // Axes and ticks.
  svg << "<g stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(kWidth - kLeft - kRight)
      << "\" height=\"" << fmt(kHeight - kTop - kBottom) << "\" fill=\"none\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = lo + (hi - lo) * t / 5.0;
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", v);
    svg << "<line x1=\"" << fmt(f.px(v)) << "\" y1=\"" << fmt(kHeight - kBottom) << "\" x2=\"" << fmt(f.px(v))
        << "\" y2=\"" << fmt(kHeight - kBottom + 5) << "\"/>";
    svg << "<text x=\"" << fmt(f.px(v)) << "\" y=\"" << fmt(kHeight - kBottom + 20)
        << "\" text-anchor=\"middle\" stroke=\"none\">" << label << "</text>\n";
    svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(f.py(v)) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
        << fmt(f.py(v)) << "\"/>";
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(f.py(v) + 4)
        << "\" text-anchor=\"end\" stroke=\"none\">" << label << "</text>\n";
  }
  svg << "<text x=\"" << fmt((kLeft + kWidth - kRight) / 2) << "\" y=\"" << fmt(kHeight - 15)
      << "\" text-anchor=\"middle\" stroke=\"none\">Predicted probability</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt((kTop + kHeight - kBottom) / 2) << "\" text-anchor=\"middle\" stroke=\"none\" "
      << "transform=\"rotate(-90 18 " << fmt((kTop + kHeight - kBottom) / 2) << ")\">Calibration curve</text>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"25\" text-anchor=\"middle\" stroke=\"none\" font-size=\"15\">"
        << escape(options.title) << "</text>\n";
  }
  svg << "</g>\n";

  svg << "<g clip-path=\"url(#plot)\">\n";
  // Band ribbon: upper left to right, then lower right to left.
  std::ostringstream ribbon;
  ribbon << 'M';
  append_steps(ribbon, f, upper_segments(band, dom_lo, dom_hi), false);
  append_steps(ribbon, f, lower_segments(band, dom_lo, dom_hi), true);
  svg << "<path d=\"" << ribbon.str() << " Z\" fill=\"#4a7fc1\" fill-opacity=\"0.35\" stroke=\"#2b5c9a\" "
      << "stroke-width=\"1\"/>\n";

  // Isotonic fit, right-continuous steps between knots.
  std::vector<Segment> fit;
  for (std::size_t i = 0; i < band.size(); ++i) {
    const double end = i + 1 < band.size() ? band.knots[i + 1] : band.knots[i];
    fit.push_back({band.knots[i], end, result.fit.level_at_group(i)});
  }
  std::ostringstream fit_path;
  fit_path << 'M';
  append_steps(fit_path, f, fit, false);
  svg << "<path d=\"" << fit_path.str() << "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1.5\"/>\n";

  // Diagonal, red where it leaves the band.
  const double diag_lo = std::max(dom_lo, 0.0);
  const double diag_hi = std::min(dom_hi, 1.0);
  std::vector<std::pair<Segment, bool>> diagonal;
  double cursor = diag_lo;
  if (result.verdict) {
    for (const auto& region : result.verdict->miscalibrated_regions) {
      const double a = std::max(region.lo, diag_lo);
      const double b = std::min(region.hi, diag_hi);
      if (a > cursor) diagonal.push_back({{cursor, a, 0.0}, false});
      if (b >= a) diagonal.push_back({{a, b, 0.0}, true});
      cursor = std::max(cursor, b);
    }
  }
  if (diag_hi > cursor) diagonal.push_back({{cursor, diag_hi, 0.0}, false});
  for (const auto& [seg, excluded] : diagonal) {
    svg << "<line x1=\"" << fmt(f.px(seg.a)) << "\" y1=\"" << fmt(f.py(seg.a)) << "\" x2=\"" << fmt(f.px(seg.b))
        << "\" y2=\"" << fmt(f.py(seg.b)) << "\" stroke=\"" << (excluded ? "#d62728" : "black")
        << "\" stroke-width=\"" << (excluded ? "2.5" : "1") << "\" stroke-linecap=\"round\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace calband
