#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "posetnn/error.hpp"
#include "posetnn/polytope.hpp"
#include "posetnn/poset.hpp"

namespace posetnn {

/// Poset point i sits at window position map[i] (row-major for 2x2 windows).
using IndexMap = std::vector<std::size_t>;

inline IndexMap identity_map(std::size_t m)
{
    IndexMap id(m);
    for (std::size_t i = 0; i < m; ++i)
        id[i] = i;
    return id;
}

struct FilterProvenance {
    enum class Kind { Poset, Random, Custom } kind = Kind::Custom;
    std::optional<Poset> poset;
    IndexMap map;
    std::optional<std::uint64_t> seed;
};

/// max over terms of <term, window>. Terms are sorted by support size, then
/// lexicographically, so the first strict maximum is the tie-rule winner.
struct PoolingFilter {
    std::size_t m = 4;
    std::vector<std::vector<double>> terms;
    FilterProvenance provenance;
};

namespace detail {

inline std::size_t support(const std::vector<double>& t)
{
    std::size_t s = 0;
    for (double c : t)
        s += c != 0.0 ? 1 : 0;
    return s;
}

inline void sort_terms(std::vector<std::vector<double>>& terms)
{
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
        const auto sa = support(a), sb = support(b);
        if (sa != sb)
            return sa < sb;
        return a < b;
    });
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
}

} // namespace detail

/// Builds a filter from explicit terms; the zero term is added if missing.
inline PoolingFilter make_filter(std::size_t m, std::vector<std::vector<double>> terms,
                                 FilterProvenance prov = {})
{
    for (const auto& t : terms)
        if (t.size() != m)
            throw ArityError("filter term of length " + std::to_string(t.size()) +
                             " in a window of size " + std::to_string(m));
    terms.emplace_back(m, 0.0);
    detail::sort_terms(terms);
    return PoolingFilter{m, std::move(terms), std::move(prov)};
}

inline void check_index_map(const IndexMap& map, std::size_t m)
{
    if (map.size() != m)
        throw ArityError("index map has " + std::to_string(map.size()) + " entries, expected " +
                         std::to_string(m));
    std::vector<std::uint8_t> seen(m, 0);
    for (auto p : map) {
        if (p >= m || seen[p])
            throw IndexError("index map is not a bijection onto window positions");
        seen[p] = 1;
    }
}

/// The poset filter of P: one term per up-set indicator, placed by `map`.
inline PoolingFilter filter_from_poset(const Poset& p, const IndexMap& map)
{
    const std::size_t m = p.size();
    check_index_map(map, m);
    std::vector<std::vector<double>> terms;
    for (const auto& v : order_polytope_vertices(p).vertices) {
        std::vector<double> t(m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            t[map[i]] = static_cast<double>(v[i]);
        terms.push_back(std::move(t));
    }
    FilterProvenance prov;
    prov.kind = FilterProvenance::Kind::Poset;
    prov.poset = p;
    prov.map = map;
    return make_filter(m, std::move(terms), std::move(prov));
}

inline PoolingFilter filter_from_poset(const Poset& p)
{
    return filter_from_poset(p, identity_map(p.size()));
}

/// Zero term plus k terms with i.i.d. entries uniform on [0, 1), drawn from
/// mt19937_64(seed) as 53-bit fractions in row order.
inline PoolingFilter random_filter(std::size_t m, std::size_t k, std::uint64_t seed)
{
    if (k == 0)
        throw SizeError("random_filter needs k >= 1");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> terms;
    for (std::size_t r = 0; r < k; ++r) {
        std::vector<double> t(m);
        for (auto& c : t)
            c = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        terms.push_back(std::move(t));
    }
    FilterProvenance prov;
    prov.kind = FilterProvenance::Kind::Random;
    prov.seed = seed;
    return make_filter(m, std::move(terms), std::move(prov));
}

// ---------------------------------------------------------------------------
// Forward and backward

struct FilterValue {
    double value = 0.0;
    std::size_t term = 0;
};

/// <term, window> summed in window order, skipping zero coefficients.
inline double term_value(const std::vector<double>& term, std::span<const double> w)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < term.size(); ++i) {
        const double c = term[i];
        if (c == 0.0)
            continue;
        if (c == 1.0)
            acc += w[i];
        else
            acc += c * w[i];
    }
    return acc;
}

inline FilterValue forward(const PoolingFilter& f, std::span<const double> window)
{
    if (window.size() != f.m)
        throw ArityError("window of size " + std::to_string(window.size()) + ", filter expects " +
                         std::to_string(f.m));
    FilterValue best{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t k = 0; k < f.terms.size(); ++k) {
        const double v = term_value(f.terms[k], window);
        if (v > best.value) {
            best.value = v;
            best.term = k;
        }
    }
    return best;
}

/// upstream times the coefficients of the winning term.
inline std::vector<double> backward(const PoolingFilter& f, std::span<const double> window,
                                    double upstream)
{
    const auto fv = forward(f, window);
    std::vector<double> g(f.m);
    for (std::size_t i = 0; i < f.m; ++i)
        g[i] = upstream * f.terms[fv.term][i];
    return g;
}

/// Best value minus the best value of any other term (0 at a tie).
inline double tie_gap(const PoolingFilter& f, std::span<const double> window)
{
    const auto fv = forward(f, window);
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < f.terms.size(); ++k)
        if (k != fv.term)
            second = std::max(second, term_value(f.terms[k], window));
    return fv.value - second;
}

// ---------------------------------------------------------------------------
// Finite-difference check

struct GradCheckOptions {
    std::size_t windows = 10000;
    std::uint64_t seed = 0;
    double step = 1e-4;
    double rtol = 1e-4;
    double tie_margin = 1e-6;
    double lo = -1.0;
    double hi = 1.0;
};

struct GradCheckReport {
    std::size_t checked = 0;
    std::size_t near_ties = 0; ///< skipped: best and runner-up within tie_margin
    std::size_t kinks = 0;     ///< skipped: argmax changes inside the stencil
    std::size_t failures = 0;
    double max_error = 0.0;    ///< |fd - g| / max(1, |g|)
};

/**
 * Central differences against backward() on random windows. A window is
 * skipped when it is within tie_margin of a tie, or when some +-step probe
 * selects a different term, since the difference quotient then mixes two
 * linear pieces.
 */
inline GradCheckReport gradient_check(const PoolingFilter& f, const GradCheckOptions& opt)
{
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> dist(opt.lo, opt.hi);
    GradCheckReport rep;
    std::vector<double> w(f.m), probe(f.m);
    const double upstream = 1.0;
    for (std::size_t s = 0; s < opt.windows; ++s) {
        for (auto& c : w)
            c = dist(rng);
        if (tie_gap(f, w) < opt.tie_margin) {
            ++rep.near_ties;
            continue;
        }
        const auto base = forward(f, w);
        const auto g = backward(f, w, upstream);
        bool kink = false;
        std::vector<double> fd(f.m);
        for (std::size_t i = 0; i < f.m && !kink; ++i) {
            probe = w;
            probe[i] = w[i] + opt.step;
            const auto up = forward(f, probe);
            probe[i] = w[i] - opt.step;
            const auto dn = forward(f, probe);
            if (up.term != base.term || dn.term != base.term)
                kink = true;
            fd[i] = (up.value - dn.value) / (2.0 * opt.step);
        }
        if (kink) {
            ++rep.kinks;
            continue;
        }
        ++rep.checked;
        bool ok = true;
        for (std::size_t i = 0; i < f.m; ++i) {
            const double err = std::abs(fd[i] - g[i]) / std::max(1.0, std::abs(g[i]));
            rep.max_error = std::max(rep.max_error, err);
            if (err > opt.rtol)
                ok = false;
        }
        if (!ok)
            ++rep.failures;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// 2x2 pooling on B x C x H x W tensors

struct Tensor4 {
    std::size_t b = 0, c = 0, h = 0, w = 0;
    std::vector<double> data;

    Tensor4() = default;
    Tensor4(std::size_t b_, std::size_t c_, std::size_t h_, std::size_t w_, double fill = 0.0)
        : b(b_), c(c_), h(h_), w(w_), data(b_ * c_ * h_ * w_, fill)
    {
    }

    std::size_t index(std::size_t i, std::size_t j, std::size_t y, std::size_t x) const
    {
        return ((i * c + j) * h + y) * w + x;
    }
    double& at(std::size_t i, std::size_t j, std::size_t y, std::size_t x) { return data[index(i, j, y, x)]; }
    double at(std::size_t i, std::size_t j, std::size_t y, std::size_t x) const { return data[index(i, j, y, x)]; }

    void validate() const
    {
        if (data.size() != b * c * h * w)
            throw ShapeError("tensor data does not match its shape");
    }
};

struct PoolResult {
    Tensor4 output;
    std::vector<std::uint32_t> argmax; ///< winning term per output cell
    bool prefilter_relu = false;
    Tensor4 input; ///< kept for the backward pass
};

namespace detail {

/// Window values (row-major), zero outside the input, optionally ReLU'd.
inline void gather_window(const Tensor4& in, std::size_t i, std::size_t j, std::size_t oy,
                          std::size_t ox, bool relu, double* out)
{
    for (std::size_t dy = 0; dy < 2; ++dy)
        for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t y = 2 * oy + dy, x = 2 * ox + dx;
            double v = (y < in.h && x < in.w) ? in.at(i, j, y, x) : 0.0;
            if (relu && v < 0.0)
                v = 0.0;
            out[dy * 2 + dx] = v;
        }
}

} // namespace detail

/// Non-overlapping 2x2 pooling, stride 2, ceil output shape; odd edges are
/// zero-padded at the bottom and right.
inline PoolResult pool2d(const PoolingFilter& f, const Tensor4& input, bool prefilter_relu = false)
{
    if (f.m != 4)
        throw ShapeError("pool2d needs a filter over 2x2 windows");
    input.validate();
    const std::size_t oh = (input.h + 1) / 2, ow = (input.w + 1) / 2;
    PoolResult r;
    r.output = Tensor4(input.b, input.c, oh, ow);
    r.argmax.assign(r.output.data.size(), 0);
    r.prefilter_relu = prefilter_relu;
    r.input = input;
    double win[4];
    for (std::size_t i = 0; i < input.b; ++i)
        for (std::size_t j = 0; j < input.c; ++j)
            for (std::size_t oy = 0; oy < oh; ++oy)
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    detail::gather_window(input, i, j, oy, ox, prefilter_relu, win);
                    const auto fv = forward(f, std::span<const double>(win, 4));
                    const std::size_t o = r.output.index(i, j, oy, ox);
                    r.output.data[o] = fv.value;
                    r.argmax[o] = static_cast<std::uint32_t>(fv.term);
                }
    return r;
}

/// Scatters grad_output through the saved argmax terms.
inline Tensor4 pool2d_backward(const PoolingFilter& f, const PoolResult& saved, const Tensor4& grad_output)
{
    const Tensor4& in = saved.input;
    const Tensor4& out = saved.output;
    if (grad_output.b != out.b || grad_output.c != out.c || grad_output.h != out.h ||
        grad_output.w != out.w)
        throw ShapeError("gradient shape does not match the pooled output");
    grad_output.validate();
    Tensor4 g(in.b, in.c, in.h, in.w);
    for (std::size_t i = 0; i < out.b; ++i)
        for (std::size_t j = 0; j < out.c; ++j)
            for (std::size_t oy = 0; oy < out.h; ++oy)
                for (std::size_t ox = 0; ox < out.w; ++ox) {
                    const std::size_t o = out.index(i, j, oy, ox);
                    const auto& term = f.terms.at(saved.argmax[o]);
                    const double up = grad_output.data[o];
                    for (std::size_t dy = 0; dy < 2; ++dy)
                        for (std::size_t dx = 0; dx < 2; ++dx) {
                            const std::size_t y = 2 * oy + dy, x = 2 * ox + dx;
                            if (y >= in.h || x >= in.w)
                                continue;
                            if (saved.prefilter_relu && !(in.at(i, j, y, x) > 0.0))
                                continue;
                            g.at(i, j, y, x) += up * term[dy * 2 + dx];
                        }
                }
    return g;
}

} // namespace posetnn
