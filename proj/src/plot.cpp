#include "psd/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "psd/error.hpp"
#include "psd/io.hpp"

namespace psd {
namespace {

constexpr double kWidth = 640, kHeight = 400, kMargin = 50;

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

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

void open_svg(std::ostringstream& s, const std::string& title, const Frame& f, const std::string& xlabel,
              const std::string& ylabel) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  s << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
    << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin << "\"/><line x1=\"" << kMargin << "\" y1=\"" << kMargin
    << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin << "\"/></g>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"11\">";
  s << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\">" << num(f.x0) << "</text>";
  s << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"end\">"
    << num(f.x1) << "</text>";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(xlabel)
    << "</text>";
  s << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin << "\" text-anchor=\"end\">" << num(f.y1) << "</text>";
  s << "<text x=\"14\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 14 " << kHeight / 2
    << ")\" text-anchor=\"middle\">" << escape(ylabel) << "</text></g>\n";
}

}  // namespace

std::string histogram_csv(const Histogram& hist) {
  std::string out = "bin_center,count\n";
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    out += format_double(hist.center(i)) + "," + std::to_string(hist.counts[i]) + "\n";
  }
  return out;
}

std::string roc_csv(const RocCurve& roc) {
  std::string out = "fpr,tpr\n";
  for (std::size_t i = 0; i < roc.fpr.size(); ++i) out += format_double(roc.fpr[i]) + "," + format_double(roc.tpr[i]) + "\n";
  return out;
}

std::string histogram_svg(const Histogram& hist, const GaussianPairFit* fit, const std::string& title) {
  const long long peak = hist.counts.empty() ? 1 : std::max(1LL, *std::max_element(hist.counts.begin(), hist.counts.end()));
  const Frame f{hist.edges.front(), hist.edges.back(), 0.0, static_cast<double>(peak) * 1.1};
  std::ostringstream s;
  open_svg(s, title, f, "PSD factor", "count");
  s << "<g fill=\"steelblue\" stroke=\"none\">\n";
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double x = f.px(hist.edges[i]);
    const double w = f.px(hist.edges[i + 1]) - x;
    const double y = f.py(static_cast<double>(hist.counts[i]));
    s << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\""
      << num(f.py(0) - y) << "\"/>\n";
  }
  s << "</g>\n";
  if (fit && fit->converged) {
    s << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\" points=\"";
    const int steps = 200;
    for (int k = 0; k <= steps; ++k) {
      const double x = f.x0 + (f.x1 - f.x0) * k / steps;
      auto g = [&](double a, double mu, double sd) {
        const double z = (x - mu) / sd;
        return a * std::exp(-0.5 * z * z) / (sd * std::sqrt(2 * std::numbers::pi));
      };
      const double y = std::min(g(fit->a1, fit->mu1, fit->sigma1) + g(fit->a2, fit->mu2, fit->sigma2), f.y1);
      s << num(f.px(x)) << ',' << num(f.py(y)) << ' ';
    }
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string roc_svg(const RocCurve& roc, const std::string& title) {
  const Frame f{0, 1, 0, 1};
  std::ostringstream s;
  open_svg(s, title + " (AUC " + num(roc.auc) + ")", f, "false positive rate", "true positive rate");
  s << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(1) << "\" y2=\"" << f.py(1)
    << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  s << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < roc.fpr.size(); ++i) s << num(f.px(roc.fpr[i])) << ',' << num(f.py(roc.tpr[i])) << ' ';
  s << "\"/>\n</svg>\n";
  return s.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace psd
