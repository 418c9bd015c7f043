#include "iforge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace iforge {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 520.0;
constexpr double kMarginX = 60.0;
constexpr double kMarginY = 40.0;

const char* kBandColors[] = {"#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5"};

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(2);
    ss << std::fixed << v;
    return ss.str();
}

}  // namespace

std::string render_interval_plot(const std::vector<std::vector<PredictionInterval>>& per_alpha,
                                 const std::vector<double>& targets) {
    if (per_alpha.empty() || per_alpha.front().empty())
        throw std::invalid_argument("render_interval_plot: no intervals");
    const std::size_t n = per_alpha.front().size();
    for (const auto& series : per_alpha)
        if (series.size() != n)
            throw std::invalid_argument("render_interval_plot: ragged interval series");
    if (!targets.empty() && targets.size() != n)
        throw std::invalid_argument("render_interval_plot: target length mismatch");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return per_alpha.front()[a].center < per_alpha.front()[b].center;
    });

    double lo = per_alpha.front().front().lower;
    double hi = per_alpha.front().front().upper;
    for (const auto& series : per_alpha)
        for (const auto& pi : series) {
            lo = std::min(lo, pi.lower);
            hi = std::max(hi, pi.upper);
        }
    for (double t : targets) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (hi <= lo) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    auto sx = [&](std::size_t rank) {
        if (n == 1) return kMarginX + (kWidth - 2 * kMarginX) / 2.0;
        return kMarginX +
               (kWidth - 2 * kMarginX) * static_cast<double>(rank) / static_cast<double>(n - 1);
    };
    auto sy = [&](double v) {
        return kHeight - kMarginY - (kHeight - 2 * kMarginY) * (v - lo) / (hi - lo);
    };

    // Widest band (smallest alpha) first so narrower bands paint on top.
    std::vector<std::size_t> band_order(per_alpha.size());
    std::iota(band_order.begin(), band_order.end(), std::size_t{0});
    std::sort(band_order.begin(), band_order.end(), [&](std::size_t a, std::size_t b) {
        return per_alpha[a].front().alpha < per_alpha[b].front().alpha;
    });

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t bi = 0; bi < band_order.size(); ++bi) {
        const auto& series = per_alpha[band_order[bi]];
        const char* color = kBandColors[std::min<std::size_t>(bi, 4)];
        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.8\" stroke=\"none\" points=\"";
        for (std::size_t r = 0; r < n; ++r)
            svg << fmt(sx(r)) << "," << fmt(sy(series[order[r]].upper)) << " ";
        for (std::size_t r = n; r-- > 0;)
            svg << fmt(sx(r)) << "," << fmt(sy(series[order[r]].lower)) << " ";
        svg << "\"/>\n";
    }

    svg << "<polyline fill=\"none\" stroke=\"#08306b\" stroke-width=\"1.5\" points=\"";
    for (std::size_t r = 0; r < n; ++r)
        svg << fmt(sx(r)) << "," << fmt(sy(per_alpha.front()[order[r]].center)) << " ";
    svg << "\"/>\n";

    for (std::size_t r = 0; r < n && !targets.empty(); ++r)
        svg << "<circle cx=\"" << fmt(sx(r)) << "\" cy=\"" << fmt(sy(targets[order[r]]))
            << "\" r=\"2.2\" fill=\"#d94801\"/>\n";

    // Axis frame and labels.
    svg << "<rect x=\"" << kMarginX << "\" y=\"" << kMarginY << "\" width=\""
        << (kWidth - 2 * kMarginX) << "\" height=\"" << (kHeight - 2 * kMarginY)
        << "\" fill=\"none\" stroke=\"#555\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 8
        << "\" font-size=\"12\" text-anchor=\"middle\">test points (sorted by prediction)</text>\n";
    svg << "<text x=\"14\" y=\"" << kHeight / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << kHeight / 2 << ")\">response</text>\n";
    for (std::size_t bi = 0; bi < band_order.size(); ++bi) {
        const double alpha = per_alpha[band_order[bi]].front().alpha;
        svg << "<rect x=\"" << kWidth - kMarginX - 150 << "\" y=\"" << (kMarginY + 8 + 18 * bi)
            << "\" width=\"12\" height=\"12\" fill=\"" << kBandColors[std::min<std::size_t>(bi, 4)]
            << "\"/>\n";
        svg << "<text x=\"" << kWidth - kMarginX - 132 << "\" y=\"" << (kMarginY + 18 + 18 * bi)
            << "\" font-size=\"11\">alpha = " << alpha << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace iforge
