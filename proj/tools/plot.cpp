#include "plot.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace fairdyn::cli {

namespace {

constexpr double kSize = 480.0;
constexpr double kMargin = 48.0;

double px(double a) { return kMargin + a * kSize; }
double py(double b) { return kMargin + (1.0 - b) * kSize; }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void header(std::ostream& os, const std::string& title) {
    const double w = kSize + 2 * kMargin;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\""
       << num(w) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
          "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#444\"/></marker></defs>\n";
    os << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(kSize)
       << "\" height=\"" << num(kSize) << "\" fill=\"white\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(w / 2) << "\" y=\"24\" text-anchor=\"middle\">" << title << "</text>\n";
    os << "<text x=\"" << num(w / 2) << "\" y=\"" << num(w - 12) << "\" text-anchor=\"middle\">alpha_a</text>\n";
    os << "<text x=\"14\" y=\"" << num(w / 2) << "\" transform=\"rotate(-90 14 " << num(w / 2)
       << ")\" text-anchor=\"middle\">alpha_b</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = k / 4.0;
        os << "<text x=\"" << num(px(v)) << "\" y=\"" << num(py(0) + 16) << "\" text-anchor=\"middle\">"
           << num(v) << "</text>\n";
        os << "<text x=\"" << num(px(0) - 6) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">"
           << num(v) << "</text>\n";
    }
}

void star(std::ostream& os, const QualState& q, const std::string& fill) {
    os << "<polygon fill=\"" << fill << "\" stroke=\"black\" points=\"";
    for (int k = 0; k < 10; ++k) {
        const double r = k % 2 == 0 ? 9.0 : 4.0;
        const double t = -std::numbers::pi / 2 + k * std::numbers::pi / 5;
        os << num(px(q.alpha_a) + r * std::cos(t)) << ',' << num(py(q.alpha_b) + r * std::sin(t)) << ' ';
    }
    os << "\"/>\n";
}

}  // namespace

void write_phase_svg(std::ostream& os, const std::string& title, const BalancedFunctions& bf,
                     const std::vector<Trajectory>& trajectories,
                     const std::vector<EquilibriumPoint>& equilibria) {
    header(os, title);
    // psi_a maps alpha_b to alpha_a, psi_b the reverse
    for (std::size_t i = 0; i < bf.grid_b.size(); ++i)
        for (double v : bf.psi_a[i])
            os << "<circle cx=\"" << num(px(v)) << "\" cy=\"" << num(py(bf.grid_b[i]))
               << "\" r=\"1.2\" fill=\"#1f77b4\"/>\n";
    for (std::size_t i = 0; i < bf.grid_a.size(); ++i)
        for (double v : bf.psi_b[i])
            os << "<circle cx=\"" << num(px(bf.grid_a[i])) << "\" cy=\"" << num(py(v))
               << "\" r=\"1.2\" fill=\"#d62728\"/>\n";
    for (const Trajectory& t : trajectories) {
        os << "<polyline fill=\"none\" stroke=\"#555\" stroke-width=\"1\" points=\"";
        for (const QualState& q : t.states) os << num(px(q.alpha_a)) << ',' << num(py(q.alpha_b)) << ' ';
        os << "\"/>\n";
        os << "<circle cx=\"" << num(px(t.states.front().alpha_a)) << "\" cy=\""
           << num(py(t.states.front().alpha_b)) << "\" r=\"3\" fill=\"#555\"/>\n";
    }
    for (const EquilibriumPoint& e : equilibria) star(os, e.state, e.stable ? "gold" : "white");
    os << "</svg>\n";
}

void write_scatter_svg(std::ostream& os, const std::string& title,
                       const std::vector<ScatterSeries>& series) {
    header(os, title);
    double ly = kMargin + 16;
    for (const ScatterSeries& s : series) {
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const QualState& q = s.points[i];
            os << "<circle cx=\"" << num(px(q.alpha_a)) << "\" cy=\"" << num(py(q.alpha_b))
               << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
            if (i + 1 < s.points.size()) {
                const QualState& n = s.points[i + 1];
                os << "<line x1=\"" << num(px(q.alpha_a)) << "\" y1=\"" << num(py(q.alpha_b))
                   << "\" x2=\"" << num(px(n.alpha_a)) << "\" y2=\"" << num(py(n.alpha_b))
                   << "\" stroke=\"" << s.color << "\" marker-end=\"url(#arrow)\"/>\n";
            }
        }
        os << "<text x=\"" << num(kMargin + 8) << "\" y=\"" << num(ly) << "\" fill=\"" << s.color
           << "\">" << s.label << "</text>\n";
        ly += 14;
    }
    os << "</svg>\n";
}

}  // namespace fairdyn::cli
