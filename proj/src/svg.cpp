#include "uplift/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "uplift/dataset.hpp"
#include "uplift/errors.hpp"

namespace uplift::svg {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 70.0, kRight = 25.0, kTop = 45.0, kBottom = 55.0;

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Scale {
  double lo = 0.0, hi = 1.0, plot_lo = 0.0, plot_hi = 1.0;
  double operator()(double v) const {
    return plot_lo + (v - lo) / (hi - lo) * (plot_hi - plot_lo);
  }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  double first = std::ceil(lo / step) * step;
  if (first == -0.0) first = 0.0;
  for (double v = first; v <= hi + 1e-9 * span; v += step) {
    ticks.push_back(v == -0.0 ? 0.0 : v);
  }
  return ticks;
}

void pad_range(double& lo, double& hi) {
  if (hi <= lo) {
    const double bump = lo == 0.0 ? 1.0 : std::abs(lo) * 0.5;
    lo -= bump;
    hi += bump;
  } else {
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
  }
}

std::string header(const std::string& title) {
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  out += "<rect width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\" fill=\"#222222\">" +
         escape(title) + "</text>\n";
  return out;
}

void axes(std::string& out, const Scale& sx, const Scale& sy,
          const std::string& x_label, const std::string& y_label) {
  const double x0 = kLeft, x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom, y1 = kTop;
  for (double t : nice_ticks(sx.lo, sx.hi)) {
    const double x = sx(t);
    out += "<line x1=\"" + px(x) + "\" y1=\"" + px(y0) + "\" x2=\"" + px(x) +
           "\" y2=\"" + px(y1) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + px(x) + "\" y=\"" + px(y0 + 18.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
           "fill=\"#444444\">" +
           escape(format_double(t)) + "</text>\n";
  }
  for (double t : nice_ticks(sy.lo, sy.hi)) {
    const double y = sy(t);
    out += "<line x1=\"" + px(x0) + "\" y1=\"" + px(y) + "\" x2=\"" + px(x1) +
           "\" y2=\"" + px(y) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + px(x0 - 8.0) + "\" y=\"" + px(y + 4.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
           "fill=\"#444444\">" +
           escape(format_double(t)) + "</text>\n";
  }
  out += "<line x1=\"" + px(x0) + "\" y1=\"" + px(y0) + "\" x2=\"" + px(x1) +
         "\" y2=\"" + px(y0) + "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
  out += "<line x1=\"" + px(x0) + "\" y1=\"" + px(y0) + "\" x2=\"" + px(x0) +
         "\" y2=\"" + px(y1) + "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
  out += "<text x=\"" + px((x0 + x1) / 2.0) + "\" y=\"" + px(kHeight - 12.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "fill=\"#222222\">" +
         escape(x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + px((y0 + y1) / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "fill=\"#222222\" transform=\"rotate(-90 18 " +
         px((y0 + y1) / 2.0) + ")\">" + escape(y_label) + "</text>\n";
}

std::string hsv_to_hex(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c; g = x;
  } else if (hp < 2) {
    r = x; g = c;
  } else if (hp < 3) {
    g = c; b = x;
  } else if (hp < 4) {
    g = x; b = c;
  } else if (hp < 5) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = v - c;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround((r + m) * 255.0)),
                static_cast<int>(std::lround((g + m) * 255.0)),
                static_cast<int>(std::lround((b + m) * 255.0)));
  return buf;
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series) {
  double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
  bool first = true;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        xlo = xhi = x;
        ylo = yhi = y;
        first = false;
      }
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  pad_range(ylo, yhi);
  if (xhi <= xlo) pad_range(xlo, xhi);

  Scale sx{xlo, xhi, kLeft, kWidth - kRight};
  Scale sy{ylo, yhi, kHeight - kBottom, kTop};
  std::string out = header(title);
  axes(out, sx, sy, x_label, y_label);
  for (const Series& s : series) {
    std::string pts;
    for (const auto& [x, y] : s.points) {
      if (!pts.empty()) pts += ' ';
      pts += px(sx(x)) + "," + px(sy(y));
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"2\"" +
           (s.dashed ? " stroke-dasharray=\"6 4\"" : std::string()) + "/>\n";
    if (!s.dashed) {
      for (const auto& [x, y] : s.points) {
        out += "<circle cx=\"" + px(sx(x)) + "\" cy=\"" + px(sy(y)) +
               "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
      }
    }
  }
  out += "</svg>\n";
  return out;
}

std::string bar_chart(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<double>& values) {
  double ylo = 0.0, yhi = 0.0;
  for (double v : values) {
    ylo = std::min(ylo, v);
    yhi = std::max(yhi, v);
  }
  pad_range(ylo, yhi);
  const double n = static_cast<double>(values.size());
  Scale sx{0.0, n, kLeft, kWidth - kRight};
  Scale sy{ylo, yhi, kHeight - kBottom, kTop};

  std::string out = header(title);
  axes(out, sx, sy, x_label, y_label);
  const double zero = sy(0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double x0 = sx(static_cast<double>(k) + 0.15);
    const double x1 = sx(static_cast<double>(k) + 0.85);
    const double y = sy(values[k]);
    const double top = std::min(y, zero);
    const double h = std::abs(y - zero);
    out += "<rect x=\"" + px(x0) + "\" y=\"" + px(top) + "\" width=\"" + px(x1 - x0) +
           "\" height=\"" + px(h) + "\" fill=\"" +
           (values[k] >= 0.0 ? "#1f6fb4" : "#c0504d") + "\"/>\n";
    out += "<text x=\"" + px((x0 + x1) / 2.0) + "\" y=\"" +
           px(kHeight - kBottom + 32.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
           "fill=\"#444444\">" +
           std::to_string(k + 1) + "</text>\n";
  }
  out += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(zero) + "\" x2=\"" +
         px(kWidth - kRight) + "\" y2=\"" + px(zero) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  out += "</svg>\n";
  return out;
}

std::string heatmap(const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<double>& x_edges,
                    const std::vector<double>& y_edges,
                    const std::vector<double>& values, const std::vector<bool>& valid) {
  const std::size_t b = x_edges.size() - 1;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!valid[k]) continue;
    if (!any) {
      lo = hi = values[k];
      any = true;
    }
    lo = std::min(lo, values[k]);
    hi = std::max(hi, values[k]);
  }

  Scale sx{x_edges.front(), x_edges.back(), kLeft, kWidth - kRight};
  Scale sy{y_edges.front(), y_edges.back(), kHeight - kBottom, kTop};
  std::string out = header(title);
  axes(out, sx, sy, x_label, y_label);
  for (std::size_t ix = 0; ix < b; ++ix) {
    for (std::size_t iy = 0; iy < b; ++iy) {
      const std::size_t idx = ix * b + iy;
      std::string color = "#d8d8d8";
      if (valid[idx] && any) {
        const double t = hi > lo ? (values[idx] - lo) / (hi - lo) : 0.5;
        color = hsv_to_hex(240.0 * t, 0.8, 0.92);
      }
      const double px0 = sx(x_edges[ix]);
      const double px1 = sx(x_edges[ix + 1]);
      const double py0 = sy(y_edges[iy]);
      const double py1 = sy(y_edges[iy + 1]);
      out += "<rect x=\"" + px(px0) + "\" y=\"" + px(py1) + "\" width=\"" +
             px(px1 - px0) + "\" height=\"" + px(py0 - py1) + "\" fill=\"" + color +
             "\" stroke=\"#ffffff\" stroke-width=\"1\"/>\n";
    }
  }
  out += "<text x=\"" + px(kWidth - kRight) + "\" y=\"" + px(kTop - 8.0) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
         "fill=\"#444444\">red = lowest uplift, blue = highest; gray = below "
         "n_min</text>\n";
  out += "</svg>\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace uplift::svg
