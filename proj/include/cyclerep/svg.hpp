#pragma once

// Minimal self-contained SVG writer. The canvas is a fixed 1000x1000
// viewBox showing the square (-extent, extent)^2 with y pointing up.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "cyclerep/ode.hpp"

namespace cyclerep::svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

class Canvas {
public:
    explicit Canvas(double extent = 1.1) : extent_(extent) {}

    double px(double x) const { return (x + extent_) / (2.0 * extent_) * 1000.0; }
    double py(double y) const { return (extent_ - y) / (2.0 * extent_) * 1000.0; }

    void rect(double x0, double y0, double x1, double y1, const std::string& fill, double opacity,
              const std::string& stroke = "none") {
        body_ << "<rect x=\"" << num(px(x0)) << "\" y=\"" << num(py(y1)) << "\" width=\"" << num(px(x1) - px(x0))
              << "\" height=\"" << num(py(y0) - py(y1)) << "\" fill=\"" << fill << "\" fill-opacity=\"" << num(opacity)
              << "\" stroke=\"" << stroke << "\"/>\n";
    }

    void line(double x0, double y0, double x1, double y1, const std::string& stroke, double width,
              const std::string& dash = "") {
        body_ << "<line x1=\"" << num(px(x0)) << "\" y1=\"" << num(py(y0)) << "\" x2=\"" << num(px(x1)) << "\" y2=\""
              << num(py(y1)) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"";
        if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
        body_ << "/>\n";
    }

    /// Polyline clipped to the visible square; runs outside it are dropped.
    void polyline(const std::vector<State>& pts, const std::string& stroke, double width) {
        std::vector<State> run;
        auto flush = [&] {
            if (run.size() >= 2) {
                body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width)
                      << "\" points=\"";
                for (std::size_t k = 0; k < run.size(); ++k)
                    body_ << (k ? " " : "") << num(px(run[k][0])) << ',' << num(py(run[k][1]));
                body_ << "\"/>\n";
            }
            run.clear();
        };
        for (const auto& p : pts) {
            if (std::abs(p[0]) <= extent_ && std::abs(p[1]) <= extent_)
                run.push_back(p);
            else
                flush();
        }
        flush();
    }

    void circle(double x, double y, double r_px, const std::string& fill) {
        body_ << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"" << num(r_px) << "\" fill=\""
              << fill << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 24) {
        body_ << "<text x=\"" << num(px(x)) << "\" y=\"" << num(py(y)) << "\" font-family=\"sans-serif\" font-size=\""
              << size << "\">" << s << "</text>\n";
    }

    void axes() {
        line(-extent_, 0, extent_, 0, "#999999", 1.0);
        line(0, -extent_, 0, extent_, "#999999", 1.0);
        rect(-1, -1, 1, 1, "none", 0.0, "#cccccc");
    }

    std::string str() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n"
               "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n" +
               body_.str() + "</svg>\n";
    }

private:
    double extent_;
    std::ostringstream body_;
};

/// Samples a dense trajectory at n + 1 equally spaced times.
inline std::vector<State> sample(const Trajectory& tr, int n) {
    std::vector<State> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) pts.push_back(tr.at(tr.t_end() * k / n));
    return pts;
}

} // namespace cyclerep::svg
