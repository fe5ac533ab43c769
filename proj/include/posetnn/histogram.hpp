#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "posetnn/error.hpp"
#include "posetnn/filters.hpp"

namespace posetnn {

using Point4 = std::array<double, 4>;

/// Points (a, b, c, d) / den with integer a..d and a^2 + b^2 + c^2 + d^2 <= den^2,
/// i.e. the lattice of step 1/den inside the closed unit 4-ball.
inline std::vector<Point4> lattice_ball_points(int den = 25)
{
    if (den <= 0)
        throw SizeError("lattice step denominator must be positive");
    const long r2 = static_cast<long>(den) * den;
    const double s = static_cast<double>(den);
    std::vector<Point4> pts;
    for (int a = -den; a <= den; ++a)
        for (int b = -den; b <= den; ++b) {
            const long ab = static_cast<long>(a) * a + static_cast<long>(b) * b;
            if (ab > r2)
                continue;
            for (int c = -den; c <= den; ++c) {
                const long abc = ab + static_cast<long>(c) * c;
                if (abc > r2)
                    continue;
                for (int d = -den; d <= den; ++d)
                    if (abc + static_cast<long>(d) * d <= r2)
                        pts.push_back({a / s, b / s, c / s, d / s});
            }
        }
    return pts;
}

struct HistogramOptions {
    int denominator = 25;
    std::size_t bins = 50;
    double hi = 2.0; ///< bins partition (0, hi]; larger values land in the last bin
};

struct LatticeHistogram {
    std::string name;
    double bin_width = 0.0;
    std::vector<std::size_t> counts;
    std::size_t samples = 0;
    std::size_t positive = 0;
    double mean = 0.0; ///< of the positive outputs
    double std = 0.0;  ///< sample standard deviation of the positive outputs
};

inline LatticeHistogram histogram_of_values(const std::string& name, const std::vector<double>& values,
                                            const HistogramOptions& opt)
{
    if (opt.bins == 0 || !(opt.hi > 0.0))
        throw SizeError("histogram needs at least one bin and a positive range");
    LatticeHistogram h;
    h.name = name;
    h.bin_width = opt.hi / static_cast<double>(opt.bins);
    h.counts.assign(opt.bins, 0);
    h.samples = values.size();
    double sum = 0.0;
    for (double v : values) {
        if (!(v > 0.0))
            continue;
        ++h.positive;
        sum += v;
        auto k = static_cast<std::size_t>(std::ceil(v / h.bin_width));
        k = k == 0 ? 0 : k - 1;
        if (k >= opt.bins)
            k = opt.bins - 1;
        ++h.counts[k];
    }
    if (h.positive > 0)
        h.mean = sum / static_cast<double>(h.positive);
    if (h.positive > 1) {
        double ss = 0.0;
        for (double v : values)
            if (v > 0.0)
                ss += (v - h.mean) * (v - h.mean);
        h.std = std::sqrt(ss / static_cast<double>(h.positive - 1));
    }
    return h;
}

/// Evaluates every filter on the lattice ball and histograms the positive outputs.
inline std::vector<LatticeHistogram> lattice_histogram(const std::vector<PoolingFilter>& filters,
                                                       const std::vector<std::string>& names,
                                                       const HistogramOptions& opt = {})
{
    if (names.size() != filters.size())
        throw ArityError("need one name per filter");
    const auto pts = lattice_ball_points(opt.denominator);
    std::vector<LatticeHistogram> out;
    std::vector<double> values(pts.size());
    for (std::size_t f = 0; f < filters.size(); ++f) {
        if (filters[f].m != 4)
            throw ShapeError("lattice histogram needs filters over 4 inputs");
        for (std::size_t i = 0; i < pts.size(); ++i)
            values[i] = forward(filters[f], pts[i]).value;
        out.push_back(histogram_of_values(names[f], values, opt));
    }
    return out;
}

} // namespace posetnn
