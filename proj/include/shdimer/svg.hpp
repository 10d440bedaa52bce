#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shdimer {

// Minimal SVG emitter: polyline paths for curves, rect grids for heatmaps.
class SvgCanvas {
  public:
    SvgCanvas(double xMin, double xMax, double yMin, double yMax, int widthPx = 640,
              int heightPx = 480)
        : xMin_(xMin), xMax_(xMax), yMin_(yMin), yMax_(yMax), w_(widthPx), h_(heightPx) {
        if (!(xMax > xMin) || !(yMax > yMin)) throw std::invalid_argument("svg: empty data range");
    }

    void path(const std::vector<std::pair<double, double>>& pts, const std::string& color,
              double strokeWidth = 1.5) {
        if (pts.size() < 2) return;
        std::string d;
        char buf[64];
        for (size_t i = 0; i < pts.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%c%.2f %.2f", i == 0 ? 'M' : 'L', px(pts[i].first),
                          py(pts[i].second));
            d += buf;
        }
        body_ += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                 fmt(strokeWidth) + "\"/>\n";
    }

    void dots(const std::vector<std::pair<double, double>>& pts, const std::string& color,
              double r = 1.2) {
        for (auto& p : pts)
            body_ += "<circle cx=\"" + fmt(px(p.first)) + "\" cy=\"" + fmt(py(p.second)) +
                     "\" r=\"" + fmt(r) + "\" fill=\"" + color + "\"/>\n";
    }

    // heatmap cell covering [x0,x1] x [y0,y1], value in [0,1] rendered on a
    // blue-to-red ramp
    void cell(double x0, double x1, double y0, double y1, double value) {
        value = std::min(1.0, std::max(0.0, value));
        int r = static_cast<int>(255 * value);
        int b = static_cast<int>(255 * (1.0 - value));
        int g = static_cast<int>(80 * (1.0 - std::abs(2 * value - 1)));
        char col[16];
        std::snprintf(col, sizeof(col), "#%02x%02x%02x", r, g, b);
        body_ += "<rect x=\"" + fmt(px(x0)) + "\" y=\"" + fmt(py(y1)) + "\" width=\"" +
                 fmt(px(x1) - px(x0)) + "\" height=\"" + fmt(py(y0) - py(y1)) + "\" fill=\"" +
                 std::string(col) + "\"/>\n";
    }

    void frame(const std::string& color = "#333333") {
        body_ += "<rect x=\"" + fmt(px(xMin_)) + "\" y=\"" + fmt(py(yMax_)) + "\" width=\"" +
                 fmt(px(xMax_) - px(xMin_)) + "\" height=\"" + fmt(py(yMin_) - py(yMax_)) +
                 "\" fill=\"none\" stroke=\"" + color + "\"/>\n";
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
            << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_ << "</svg>\n";
    }

  private:
    double xMin_, xMax_, yMin_, yMax_;
    int w_, h_;
    static constexpr double margin_ = 30.0;
    std::string body_;

    double px(double x) const { return margin_ + (x - xMin_) / (xMax_ - xMin_) * (w_ - 2 * margin_); }
    double py(double y) const {
        return h_ - margin_ - (y - yMin_) / (yMax_ - yMin_) * (h_ - 2 * margin_);
    }
    static std::string fmt(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return buf;
    }
};

} // namespace shdimer
