#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "posetnn/error.hpp"
#include "posetnn/polytope.hpp"
#include "posetnn/poset.hpp"

namespace posetnn {

/// ReLU_t threshold; nullopt is t = -inf (the node passes its value through).
using Threshold = std::optional<double>;

inline constexpr Threshold kNoThreshold = std::nullopt;

/// Affine map with integer weights, then per-node ReLU_t(v) = max(v, t).
struct IvnnLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<std::int64_t> weights; ///< in x out, row-major: weights[i * out + j]
    std::vector<double> bias;
    std::vector<Threshold> thresholds;

    IvnnLayer() = default;
    IvnnLayer(std::size_t in_dim, std::size_t out_dim)
        : in(in_dim), out(out_dim), weights(in_dim * out_dim, 0), bias(out_dim, 0.0),
          thresholds(out_dim, kNoThreshold)
    {
    }

    std::int64_t& w(std::size_t i, std::size_t j) { return weights.at(i * out + j); }
    std::int64_t w(std::size_t i, std::size_t j) const { return weights.at(i * out + j); }

    void validate() const
    {
        if (weights.size() != in * out || bias.size() != out || thresholds.size() != out)
            throw ArityError("layer storage does not match its " + std::to_string(in) + "x" +
                             std::to_string(out) + " shape");
    }

    friend bool operator==(const IvnnLayer&, const IvnnLayer&) = default;
};

/// Pre-activation of output j: w*x summed over inputs in index order,
/// skipping zero weights, then the bias.
inline double preactivation(const IvnnLayer& l, std::span<const double> x, std::size_t j)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < l.in; ++i) {
        const std::int64_t w = l.weights[i * l.out + j];
        if (w == 0)
            continue;
        if (w == 1)
            acc += x[i];
        else if (w == -1)
            acc -= x[i];
        else
            acc += static_cast<double>(w) * x[i];
    }
    if (l.bias[j] != 0.0)
        acc += l.bias[j];
    return acc;
}

inline bool relu_active(const Threshold& t, double v) { return !t || v > *t; }

inline std::vector<double> apply_layer(const IvnnLayer& l, std::span<const double> x)
{
    if (x.size() != l.in)
        throw ArityError("layer expects " + std::to_string(l.in) + " inputs, got " +
                         std::to_string(x.size()));
    std::vector<double> y(l.out);
    for (std::size_t j = 0; j < l.out; ++j) {
        const double v = preactivation(l, x, j);
        y[j] = relu_active(l.thresholds[j], v) ? v : *l.thresholds[j];
    }
    return y;
}

/// Integer-valued network: layers applied in order.
struct Ivnn {
    std::size_t input_dim = 0;
    std::vector<IvnnLayer> layers;

    std::size_t output_dim() const { return layers.empty() ? input_dim : layers.back().out; }
    std::size_t depth() const { return layers.size(); }

    void validate() const
    {
        std::size_t d = input_dim;
        for (std::size_t k = 0; k < layers.size(); ++k) {
            layers[k].validate();
            if (layers[k].in != d)
                throw ArityError("layer " + std::to_string(k) + " expects " +
                                 std::to_string(layers[k].in) + " inputs but receives " +
                                 std::to_string(d));
            d = layers[k].out;
        }
    }

    friend bool operator==(const Ivnn&, const Ivnn&) = default;
};

inline std::vector<double> eval_nn(const Ivnn& net, std::span<const double> x)
{
    if (x.size() != net.input_dim)
        throw ArityError("network expects " + std::to_string(net.input_dim) + " inputs, got " +
                         std::to_string(x.size()));
    std::vector<double> v(x.begin(), x.end());
    for (const auto& l : net.layers)
        v = apply_layer(l, v);
    return v;
}

inline double eval_scalar(const Ivnn& net, std::span<const double> x)
{
    auto v = eval_nn(net, x);
    if (v.size() != 1)
        throw ArityError("network has " + std::to_string(v.size()) + " outputs, expected 1");
    return v[0];
}

// ---------------------------------------------------------------------------
// Chain networks

/// Identity matrix of size k with its first row repeated: (k+1) x k.
inline IvnnLayer merge_first_layer(std::size_t k)
{
    IvnnLayer l(k + 1, k);
    l.w(0, 0) = 1;
    for (std::size_t j = 0; j < k; ++j)
        l.w(j + 1, j) = 1;
    return l;
}

/**
 * Network of Tr(n) on inputs (x_1, ..., x_n), x_1 at the bottom of the chain.
 * Layer 1 is the identity with thresholds (0, -inf, ..., -inf); layer k > 1
 * adds the running value into the next input and applies the same pattern,
 * so the last layer is ReLU_0(x_n + ...). n layers in total.
 */
inline Ivnn chain_nn(std::size_t n)
{
    if (n == 0)
        throw SizeError("chain_nn needs at least one point");
    Ivnn net;
    net.input_dim = n;
    IvnnLayer first(n, n);
    for (std::size_t i = 0; i < n; ++i)
        first.w(i, i) = 1;
    first.thresholds[0] = 0.0;
    net.layers.push_back(std::move(first));
    for (std::size_t k = n - 1; k >= 1; --k) {
        IvnnLayer l = merge_first_layer(k);
        l.thresholds[0] = 0.0;
        net.layers.push_back(std::move(l));
    }
    return net;
}

// ---------------------------------------------------------------------------
// Poset networks (inception bundles of chain networks)

/// One branch per linear extension (lexicographic order); branch k feeds
/// (x_{perm[0]}, ..., x_{perm[n-1]}) to a shared chain network.
struct PosetNN {
    std::optional<Poset> source;
    std::size_t input_dim = 0;
    std::vector<LinearExtension> branches;
    Ivnn chain;

    std::size_t branch_count() const { return branches.size(); }
    std::size_t depth() const { return chain.depth(); }
};

inline PosetNN poset_nn(const Poset& p)
{
    if (p.size() == 0)
        throw SizeError("poset_nn needs a non-empty poset");
    PosetNN net;
    net.source = p;
    net.input_dim = p.size();
    net.branches = linear_extensions(p);
    net.chain = chain_nn(p.size());
    return net;
}

inline std::vector<double> branch_input(const LinearExtension& ext, std::span<const double> x)
{
    std::vector<double> u(ext.perm.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        u[k] = x[ext.perm[k]];
    return u;
}

/// Raw mode: the e(P)-vector of branch outputs.
inline std::vector<double> eval_branches(const PosetNN& net, std::span<const double> x)
{
    if (x.size() != net.input_dim)
        throw ArityError("poset network expects " + std::to_string(net.input_dim) +
                         " inputs, got " + std::to_string(x.size()));
    std::vector<double> out;
    out.reserve(net.branches.size());
    for (const auto& ext : net.branches)
        out.push_back(eval_scalar(net.chain, branch_input(ext, x)));
    return out;
}

/// Combined mode: the maximum over branches.
inline double eval_combined(const PosetNN& net, std::span<const double> x)
{
    double best = -std::numeric_limits<double>::infinity();
    for (double v : eval_branches(net, x))
        if (v > best)
            best = v;
    return best;
}

inline std::vector<double> eval_nn(const PosetNN& net, std::span<const double> x, bool combine)
{
    if (combine)
        return {eval_combined(net, x)};
    return eval_branches(net, x);
}

/// A branch as a standalone network: the permutation folded into layer 1.
inline Ivnn branch_ivnn(const PosetNN& net, std::size_t k)
{
    const auto& ext = net.branches.at(k);
    Ivnn out = net.chain;
    IvnnLayer& first = out.layers.front();
    IvnnLayer permuted(first.in, first.out);
    permuted.bias = first.bias;
    permuted.thresholds = first.thresholds;
    // Input x_{perm[r]} plays the role of chain input r.
    for (std::size_t r = 0; r < first.in; ++r)
        for (std::size_t j = 0; j < first.out; ++j)
            permuted.w(ext.perm[r], j) = first.w(r, j);
    first = std::move(permuted);
    return out;
}

// ---------------------------------------------------------------------------
// Tropical operations on networks

enum class TropicalOp { Product, Quotient, Sum };

/// Which of the two equivalent gadgets realizes the tropical sum.
enum class SumChoice { FirstMinusSecond, SecondMinusFirst };

namespace detail {

inline Ivnn pad_identity(Ivnn net, std::size_t depth)
{
    const std::size_t d = net.output_dim();
    while (net.layers.size() < depth) {
        IvnnLayer l(d, d);
        for (std::size_t i = 0; i < d; ++i)
            l.w(i, i) = 1;
        net.layers.push_back(std::move(l));
    }
    return net;
}

/// Runs both networks side by side on the same input; outputs (M(x), N(x)).
inline Ivnn parallel(const Ivnn& m0, const Ivnn& n0)
{
    const std::size_t depth = std::max(m0.depth(), n0.depth());
    const Ivnn m = pad_identity(m0, depth);
    const Ivnn n = pad_identity(n0, depth);
    Ivnn out;
    out.input_dim = m.input_dim;
    for (std::size_t k = 0; k < depth; ++k) {
        const IvnnLayer& a = m.layers[k];
        const IvnnLayer& b = n.layers[k];
        const bool first = k == 0;
        IvnnLayer l(first ? a.in : a.in + b.in, a.out + b.out);
        for (std::size_t i = 0; i < a.in; ++i)
            for (std::size_t j = 0; j < a.out; ++j)
                l.w(i, j) = a.w(i, j);
        const std::size_t row = first ? 0 : a.in;
        for (std::size_t i = 0; i < b.in; ++i)
            for (std::size_t j = 0; j < b.out; ++j)
                l.w(row + i, a.out + j) = b.w(i, j);
        std::copy(a.bias.begin(), a.bias.end(), l.bias.begin());
        std::copy(b.bias.begin(), b.bias.end(), l.bias.begin() + static_cast<std::ptrdiff_t>(a.out));
        std::copy(a.thresholds.begin(), a.thresholds.end(), l.thresholds.begin());
        std::copy(b.thresholds.begin(), b.thresholds.end(),
                  l.thresholds.begin() + static_cast<std::ptrdiff_t>(a.out));
        out.layers.push_back(std::move(l));
    }
    return out;
}

} // namespace detail

/**
 * M (x) N, M / N or M (+) N as a single integer-weight network.
 *
 * The sum uses max(f, g) = max(f - g, 0) + max(g, 0) - max(-g, 0), or the
 * same with f and g exchanged for SumChoice::SecondMinusFirst.
 */
inline Ivnn nn_tropical_op(TropicalOp op, const Ivnn& m, const Ivnn& n,
                           SumChoice choice = SumChoice::FirstMinusSecond)
{
    m.validate();
    n.validate();
    if (m.input_dim != n.input_dim)
        throw ArityError("networks have different input dimensions");
    if (m.output_dim() != 1 || n.output_dim() != 1)
        throw ArityError("tropical operations need single-output networks");
    Ivnn out = detail::parallel(m, n);
    if (out.layers.empty()) {
        // Two identity maps on a one-dimensional input: duplicate it first.
        IvnnLayer dup(1, 2);
        dup.w(0, 0) = 1;
        dup.w(0, 1) = 1;
        out.layers.push_back(std::move(dup));
    }
    switch (op) {
    case TropicalOp::Product:
    case TropicalOp::Quotient: {
        IvnnLayer l(2, 1);
        l.w(0, 0) = 1;
        l.w(1, 0) = op == TropicalOp::Product ? 1 : -1;
        out.layers.push_back(std::move(l));
        break;
    }
    case TropicalOp::Sum: {
        // Rows: f, g.
        IvnnLayer l(2, 3);
        const std::size_t keep = choice == SumChoice::FirstMinusSecond ? 0 : 1;
        const std::size_t other = 1 - keep;
        l.w(keep, 0) = 1;
        l.w(other, 0) = -1;
        l.w(other, 1) = 1;
        l.w(other, 2) = -1;
        l.thresholds = {0.0, 0.0, 0.0};
        out.layers.push_back(std::move(l));
        IvnnLayer s(3, 1);
        s.w(0, 0) = 1;
        s.w(1, 0) = 1;
        s.w(2, 0) = -1;
        out.layers.push_back(std::move(s));
        break;
    }
    }
    return out;
}

/// The whole inception bundle as one network, folding branches with the
/// tropical-sum gadget.
inline Ivnn materialize(const PosetNN& net, SumChoice choice = SumChoice::FirstMinusSecond)
{
    if (net.branches.empty())
        throw ArityError("network has no branches");
    Ivnn acc = branch_ivnn(net, 0);
    for (std::size_t k = 1; k < net.branches.size(); ++k)
        acc = nn_tropical_op(TropicalOp::Sum, acc, branch_ivnn(net, k), choice);
    return acc;
}

// ---------------------------------------------------------------------------
// Operad action and geometric complexity

/// P(nn(Q_1), ..., nn(Q_n)) = nn(P(Q_1, ..., Q_n)).
inline PosetNN act_on_nn(const Poset& p, const std::vector<PosetNN>& nets)
{
    if (nets.size() != p.size())
        throw ArityError("act_on_nn: poset has " + std::to_string(p.size()) + " points but " +
                         std::to_string(nets.size()) + " networks were given");
    std::vector<Poset> qs;
    for (std::size_t i = 0; i < nets.size(); ++i) {
        if (!nets[i].source)
            throw SourceMissingError("network " + std::to_string(i) + " has no source poset");
        qs.push_back(*nets[i].source);
    }
    return poset_nn(lex_sum(p, qs));
}

/// Gradient of one branch with respect to the original inputs. At a ReLU
/// tie the derivative is taken from the flat side.
inline std::vector<std::int64_t> branch_gradient(const PosetNN& net, std::size_t k,
                                                 std::span<const double> x)
{
    const auto& ext = net.branches.at(k);
    std::vector<double> v = branch_input(ext, x);
    const std::size_t n = v.size();
    // g[j] = d(value_j)/d(chain input), one row per node.
    std::vector<std::vector<std::int64_t>> g(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        g[i][i] = 1;
    for (const auto& l : net.chain.layers) {
        std::vector<std::vector<std::int64_t>> h(l.out, std::vector<std::int64_t>(n, 0));
        std::vector<double> y = apply_layer(l, v);
        for (std::size_t j = 0; j < l.out; ++j) {
            if (!relu_active(l.thresholds[j], preactivation(l, v, j)))
                continue;
            for (std::size_t i = 0; i < l.in; ++i) {
                const std::int64_t w = l.w(i, j);
                if (w != 0)
                    for (std::size_t c = 0; c < n; ++c)
                        h[j][c] += w * g[i][c];
            }
        }
        g = std::move(h);
        v = std::move(y);
    }
    std::vector<std::int64_t> out(n, 0);
    for (std::size_t r = 0; r < n; ++r)
        out[ext.perm[r]] = g.at(0)[r];
    return out;
}

/// Gradient of the combined output. Ties between branches go to the
/// gradient of smallest support, then the lexicographically smallest.
inline std::vector<std::int64_t> combined_gradient(const PosetNN& net, std::span<const double> x)
{
    const auto vals = eval_branches(net, x);
    double best = -std::numeric_limits<double>::infinity();
    for (double v : vals)
        best = std::max(best, v);
    std::optional<std::vector<std::int64_t>> pick;
    std::size_t pick_support = 0;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        if (vals[k] != best)
            continue;
        auto gk = branch_gradient(net, k, x);
        std::size_t support = 0;
        for (auto c : gk)
            support += c != 0 ? 1 : 0;
        if (!pick || support < pick_support || (support == pick_support && gk < *pick)) {
            pick = std::move(gk);
            pick_support = support;
        }
    }
    return pick.value_or(std::vector<std::int64_t>(net.input_dim, 0));
}

/// Regular grid [lo, hi]^n with `points` samples per axis (endpoints included).
struct GridSpec {
    double lo = -2.0;
    double hi = 2.0;
    std::size_t points = 21;
};

struct PieceCount {
    std::size_t pieces = 0; ///< distinct gradients observed
    std::size_t bound = 0;  ///< vertex count of Poly(P)
    std::size_t samples = 0;
};

inline PieceCount count_affine_pieces_sampled(const PosetNN& net, const GridSpec& grid)
{
    if (grid.points < 2 || !(grid.lo < grid.hi))
        throw ArityError("grid needs at least two points per axis and lo < hi");
    const std::size_t n = net.input_dim;
    std::set<std::vector<std::int64_t>> seen;
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    const double step = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
    PieceCount pc;
    while (true) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = grid.lo + step * static_cast<double>(idx[i]);
        seen.insert(combined_gradient(net, x));
        ++pc.samples;
        std::size_t i = 0;
        while (i < n && ++idx[i] == grid.points)
            idx[i++] = 0;
        if (i == n)
            break;
    }
    pc.pieces = seen.size();
    pc.bound = net.source ? order_polytope_vertices(*net.source).size() : 0;
    return pc;
}

} // namespace posetnn
