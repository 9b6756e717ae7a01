#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "conjloc/cli.hpp"

namespace conjloc::cli {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
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

}  // namespace

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SvgPlot::SvgPlot(double width, double height, double xmin, double xmax, double ymin, double ymax,
                 bool equal_aspect)
    : w_(width), h_(height), xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {
    // Degenerate ranges (e.g. a locus collapsed to a point) get a unit box.
    if (!(xmax_ - xmin_ > 1e-12)) {
        xmin_ -= 0.5;
        xmax_ += 0.5;
    }
    if (!(ymax_ - ymin_ > 1e-12)) {
        ymin_ -= 0.5;
        ymax_ += 0.5;
    }
    const double padx = 0.05 * (xmax_ - xmin_), pady = 0.05 * (ymax_ - ymin_);
    xmin_ -= padx;
    xmax_ += padx;
    ymin_ -= pady;
    ymax_ += pady;
    if (equal_aspect) {
        const double sx = (xmax_ - xmin_) / (w_ - 2 * margin_);
        const double sy = (ymax_ - ymin_) / (h_ - 2 * margin_);
        const double s = std::max(sx, sy);
        const double cx = 0.5 * (xmin_ + xmax_), cy = 0.5 * (ymin_ + ymax_);
        xmin_ = cx - 0.5 * s * (w_ - 2 * margin_);
        xmax_ = cx + 0.5 * s * (w_ - 2 * margin_);
        ymin_ = cy - 0.5 * s * (h_ - 2 * margin_);
        ymax_ = cy + 0.5 * s * (h_ - 2 * margin_);
    }
}

double SvgPlot::px(double x) const { return margin_ + (x - xmin_) / (xmax_ - xmin_) * (w_ - 2 * margin_); }
double SvgPlot::py(double y) const { return h_ - margin_ - (y - ymin_) / (ymax_ - ymin_) * (h_ - 2 * margin_); }

void SvgPlot::polyline(const std::vector<std::array<double, 2>>& pts, const std::string& color,
                       double stroke, bool closed) {
    if (pts.size() < 2) return;
    std::ostringstream os;
    os << "<" << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"" << num(stroke) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) os << ' ';
        os << num(px(pts[i][0])) << ',' << num(py(pts[i][1]));
    }
    os << "\"/>";
    body_.push_back(os.str());
}

void SvgPlot::marker(double x, double y, const std::string& color, double radius,
                     const std::string& css_class) {
    body_.push_back("<circle class=\"" + css_class + "\" cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) +
                    "\" r=\"" + num(radius) + "\" fill=\"" + color + "\"/>");
}

void SvgPlot::rect(double x0, double y0, double x1, double y1, const std::string& fill,
                   const std::string& stroke) {
    const double a = px(std::min(x0, x1)), b = py(std::max(y0, y1));
    const double w = std::abs(px(x1) - px(x0)), h = std::abs(py(y1) - py(y0));
    body_.push_back("<rect x=\"" + num(a) + "\" y=\"" + num(b) + "\" width=\"" + num(w) + "\" height=\"" +
                    num(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>");
}

void SvgPlot::axes(const std::string& xlabel, const std::string& ylabel) {
    std::ostringstream os;
    os << "<rect x=\"" << num(margin_) << "\" y=\"" << num(margin_) << "\" width=\"" << num(w_ - 2 * margin_)
       << "\" height=\"" << num(h_ - 2 * margin_) << "\" fill=\"none\" stroke=\"#888\"/>";
    body_.push_back(os.str());
    if (ymin_ < 0.0 && ymax_ > 0.0)
        body_.push_back("<line x1=\"" + num(margin_) + "\" y1=\"" + num(py(0.0)) + "\" x2=\"" + num(w_ - margin_) +
                        "\" y2=\"" + num(py(0.0)) + "\" stroke=\"#bbb\"/>");
    text(w_ / 2 - 20, h_ - 10, xlabel);
    text(6, margin_ - 10, ylabel);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", xmin_);
    text(margin_, h_ - margin_ + 14, buf, 10);
    std::snprintf(buf, sizeof buf, "%.4g", xmax_);
    text(w_ - margin_ - 30, h_ - margin_ + 14, buf, 10);
    std::snprintf(buf, sizeof buf, "%.4g", ymax_);
    text(2, margin_ + 4, buf, 10);
    std::snprintf(buf, sizeof buf, "%.4g", ymin_);
    text(2, h_ - margin_, buf, 10);
}

void SvgPlot::text(double x, double y, const std::string& s, double size) {
    body_.push_back("<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"monospace\" font-size=\"" +
                    num(size) + "\">" + escape(s) + "</text>");
}

std::string SvgPlot::str() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_) << "\" height=\"" << num(h_)
       << "\" viewBox=\"0 0 " << num(w_) << ' ' << num(h_) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& e : body_) os << e << '\n';
    os << "</svg>\n";
    return os.str();
}

}  // namespace conjloc::cli
