#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posetnn/error.hpp"
#include "posetnn/poset.hpp"
#include "posetnn/rational.hpp"

namespace posetnn {

using LatticePoint = std::vector<std::int64_t>;

/// V-representation of a polytope: a deduplicated, lexicographically sorted
/// vertex list in a fixed ambient dimension.
template <class Scalar>
struct Polytope {
    using Point = std::vector<Scalar>;

    std::size_t dim = 0;
    std::vector<Point> vertices;

    Polytope() = default;
    Polytope(std::size_t d, std::vector<Point> v) : dim(d), vertices(std::move(v))
    {
        for (const auto& p : vertices)
            if (p.size() != dim)
                throw DimensionError("vertex of length " + std::to_string(p.size()) +
                                     " in a polytope of dimension " + std::to_string(dim));
        std::sort(vertices.begin(), vertices.end());
        vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    }

    std::size_t size() const noexcept { return vertices.size(); }
    bool contains_vertex(const Point& p) const
    {
        return std::binary_search(vertices.begin(), vertices.end(), p);
    }

    friend bool operator==(const Polytope&, const Polytope&) = default;
};

using LatticePolytope = Polytope<std::int64_t>;
using RationalPolytope = Polytope<Rational>;

inline RationalPolytope to_rational(const LatticePolytope& p)
{
    std::vector<RationalPoint> v;
    v.reserve(p.size());
    for (const auto& x : p.vertices)
        v.push_back(to_rational_point(x));
    return RationalPolytope(p.dim, std::move(v));
}

/// Throws OverflowError if some coordinate is not a 64-bit integer.
inline LatticePolytope to_lattice(const RationalPolytope& p)
{
    std::vector<LatticePoint> v;
    v.reserve(p.size());
    for (const auto& x : p.vertices) {
        LatticePoint q;
        q.reserve(x.size());
        for (const auto& c : x)
            q.push_back(to_int64(c));
        v.push_back(std::move(q));
    }
    return LatticePolytope(p.dim, std::move(v));
}

// ---------------------------------------------------------------------------
// Order polytopes

/// Indicator vectors of the up-sets of P, i.e. the vertices of Poly(P).
inline LatticePolytope order_polytope_vertices(const Poset& p)
{
    const std::size_t n = p.size();
    if (n > 64)
        throw SizeError("order_polytope_vertices supports at most 64 points");
    if (n == 0)
        return LatticePolytope(0, {LatticePoint{}});

    // Decide points top-down along one linear extension; a point may join the
    // up-set only once everything above it already has.
    const std::vector<std::size_t> order = first_linear_extension(p).perm;
    std::vector<std::uint64_t> above(n);
    for (std::size_t i = 0; i < n; ++i)
        above[i] = p.strict_up_mask(i);

    std::vector<LatticePoint> out;
    auto rec = [&](auto&& self, std::size_t k, std::uint64_t up) -> void {
        if (k == 0) {
            LatticePoint v(n, 0);
            for (std::size_t i = 0; i < n; ++i)
                v[i] = (up >> i) & 1;
            out.push_back(std::move(v));
            return;
        }
        const std::size_t x = order[k - 1];
        self(self, k - 1, up);
        if ((above[x] & ~up) == 0)
            self(self, k - 1, up | (std::uint64_t{1} << x));
    };
    rec(rec, n, 0);
    return LatticePolytope(n, std::move(out));
}

/// Up-sets of P; same count as order_polytope_vertices(P).size().
inline std::size_t count_up_sets(const Poset& p) { return order_polytope_vertices(p).size(); }

/// One simplex of the canonical triangulation of Poly(P).
struct Simplex {
    LinearExtension extension;
    std::vector<LatticePoint> vertices; ///< v_k has 1s exactly on the top k points.
};

inline Simplex simplex_of_extension(const LinearExtension& ext)
{
    const std::size_t n = ext.perm.size();
    Simplex s{ext, {}};
    LatticePoint v(n, 0);
    s.vertices.push_back(v);
    for (std::size_t k = 0; k < n; ++k) {
        v[ext.perm[n - 1 - k]] = 1;
        s.vertices.push_back(v);
    }
    return s;
}

inline std::vector<Simplex> triangulate(const Poset& p)
{
    std::vector<Simplex> out;
    for (const auto& ext : linear_extensions(p))
        out.push_back(simplex_of_extension(ext));
    return out;
}

/// Inverse of order_polytope_vertices.
inline Poset poset_from_vertices(const LatticePolytope& v)
{
    const std::size_t n = v.dim;
    if (v.vertices.empty())
        throw NotOrderPolytopeError("empty vertex set");
    for (const auto& x : v.vertices)
        for (auto c : x)
            if (c != 0 && c != 1)
                throw NotOrderPolytopeError("vertex coordinates must be 0 or 1");
    std::vector<std::uint8_t> m(n * n, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (const auto& x : v.vertices)
                if (x[i] > x[j]) {
                    m[i * n + j] = 0;
                    break;
                }
    Poset p;
    try {
        p = Poset::from_matrix(n, m);
    } catch (const CycleError&) {
        throw NotOrderPolytopeError("two coordinates agree on every vertex");
    }
    if (!(order_polytope_vertices(p) == v))
        throw NotOrderPolytopeError("vertex set is not the vertex set of an order polytope");
    return p;
}

// ---------------------------------------------------------------------------
// Exact convex hull (V-representation reduction)

inline constexpr std::size_t kMaxHullDim = 12;
inline constexpr std::size_t kMaxHullPoints = 5000;

namespace detail {

/// Exact phase-1 simplex (Bland's rule): is p a convex combination of pts?
inline bool in_convex_hull(const RationalPoint& p, const std::vector<const RationalPoint*>& pts)
{
    const std::size_t d = p.size();
    const std::size_t k = pts.size();
    if (k == 0)
        return false;
    const std::size_t m = d + 1;
    const std::size_t cols = k + 1; // last column is the right-hand side

    // Rows: sum_j lambda_j s_j[i] = p[i]; sum_j lambda_j = 1.
    std::vector<std::vector<Rational>> t(m, std::vector<Rational>(cols));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            t[i][j] = (*pts[j])[i];
        t[i][k] = p[i];
    }
    for (std::size_t j = 0; j < k; ++j)
        t[d][j] = 1;
    t[d][k] = 1;
    for (auto& row : t)
        if (row[k] < 0)
            for (auto& c : row)
                c = -c;

    // Artificial variable r+k is basic in row r. Leaving artificials are
    // dropped, so they never need a column.
    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r)
        basis[r] = k + r;

    // obj[j] = reduced cost of minimizing the sum of artificials.
    std::vector<Rational> obj(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        Rational s = 0;
        for (std::size_t r = 0; r < m; ++r)
            s += t[r][j];
        obj[j] = -s;
    }

    Rational ratio, best;
    while (true) {
        if (obj[k] == 0)
            return true;
        std::size_t enter = cols;
        for (std::size_t j = 0; j < k; ++j)
            if (obj[j] < 0) {
                enter = j;
                break;
            }
        if (enter == cols)
            return false;
        std::size_t leave = m;
        for (std::size_t r = 0; r < m; ++r) {
            if (t[r][enter] <= 0)
                continue;
            ratio = t[r][k] / t[r][enter];
            if (leave == m || ratio < best || (ratio == best && basis[r] < basis[leave])) {
                leave = r;
                best = ratio;
            }
        }
        if (leave == m)
            return false; // unbounded cannot happen with the sum row; defensive
        const Rational piv = t[leave][enter];
        for (auto& c : t[leave])
            c /= piv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == leave || t[r][enter] == 0)
                continue;
            const Rational f = t[r][enter];
            for (std::size_t j = 0; j < cols; ++j)
                t[r][j] -= f * t[leave][j];
        }
        if (obj[enter] != 0) {
            const Rational f = obj[enter];
            for (std::size_t j = 0; j < cols; ++j)
                obj[j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }
}

} // namespace detail

/// Extreme points of conv(points), deduplicated and sorted.
inline std::vector<RationalPoint> hull_vertices(std::vector<RationalPoint> points)
{
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() > kMaxHullPoints)
        throw SizeError("hull_vertices supports at most " + std::to_string(kMaxHullPoints) +
                        " points");
    if (points.empty())
        return points;
    const std::size_t d = points.front().size();
    for (const auto& p : points)
        if (p.size() != d)
            throw DimensionError("hull_vertices: points of mixed dimension");
    if (d > kMaxHullDim)
        throw SizeError("hull_vertices supports dimension at most " + std::to_string(kMaxHullDim));
    if (points.size() <= 2)
        return points;

    std::vector<Rational> lo = points.front(), hi = points.front();
    for (const auto& p : points)
        for (std::size_t i = 0; i < d; ++i) {
            if (p[i] < lo[i])
                lo[i] = p[i];
            if (hi[i] < p[i])
                hi[i] = p[i];
        }

    std::vector<std::uint8_t> alive(points.size(), 1);
    for (std::size_t a = 0; a < points.size(); ++a) {
        const auto& p = points[a];
        // A corner of the bounding box cannot be a combination of other points.
        bool corner = true;
        for (std::size_t i = 0; i < d && corner; ++i)
            corner = p[i] == lo[i] || p[i] == hi[i];
        if (corner)
            continue;
        std::vector<const RationalPoint*> others;
        for (std::size_t b = 0; b < points.size(); ++b)
            if (b != a && alive[b])
                others.push_back(&points[b]);
        // Dropping known non-extreme points keeps the hull unchanged.
        if (detail::in_convex_hull(p, others))
            alive[a] = 0;
    }
    std::vector<RationalPoint> out;
    for (std::size_t a = 0; a < points.size(); ++a)
        if (alive[a])
            out.push_back(std::move(points[a]));
    return out;
}

inline std::vector<LatticePoint> hull_vertices(const std::vector<LatticePoint>& points)
{
    std::vector<RationalPoint> q;
    q.reserve(points.size());
    for (const auto& p : points)
        q.push_back(to_rational_point(p));
    std::vector<LatticePoint> out;
    for (const auto& p : hull_vertices(std::move(q))) {
        LatticePoint v;
        for (const auto& c : p)
            v.push_back(to_int64(c));
        out.push_back(std::move(v));
    }
    return out;
}

/// Membership of p in conv(points), exact.
inline bool in_hull(const RationalPoint& p, const std::vector<RationalPoint>& points)
{
    std::vector<const RationalPoint*> ptrs;
    for (const auto& q : points) {
        if (q.size() != p.size())
            throw DimensionError("in_hull: dimension mismatch");
        ptrs.push_back(&q);
    }
    return detail::in_convex_hull(p, ptrs);
}

template <class Scalar>
Polytope<Scalar> hull(std::size_t dim, const std::vector<std::vector<Scalar>>& points)
{
    for (const auto& p : points)
        if (p.size() != dim)
            throw DimensionError("point of length " + std::to_string(p.size()) +
                                 " in dimension " + std::to_string(dim));
    return Polytope<Scalar>(dim, hull_vertices(points));
}

// ---------------------------------------------------------------------------
// Elementary constructions

/// Block i of a polytope placed at coordinate offset within total_dim zeros.
inline LatticePolytope embed(const LatticePolytope& a, std::size_t offset, std::size_t total_dim)
{
    if (offset + a.dim > total_dim)
        throw DimensionError("embedding does not fit the ambient dimension");
    std::vector<LatticePoint> v;
    for (const auto& x : a.vertices) {
        LatticePoint y(total_dim, 0);
        std::copy(x.begin(), x.end(), y.begin() + static_cast<std::ptrdiff_t>(offset));
        v.push_back(std::move(y));
    }
    return LatticePolytope(total_dim, std::move(v));
}

inline LatticePolytope cartesian_product(const LatticePolytope& a, const LatticePolytope& b)
{
    std::vector<LatticePoint> v;
    for (const auto& x : a.vertices)
        for (const auto& y : b.vertices) {
            LatticePoint z = x;
            z.insert(z.end(), y.begin(), y.end());
            v.push_back(std::move(z));
        }
    return LatticePolytope(a.dim + b.dim, std::move(v));
}

/// The single point (c, ..., c) in dimension d.
inline LatticePolytope constant_point(std::size_t d, std::int64_t c)
{
    return LatticePolytope(d, {LatticePoint(d, c)});
}

/// The segment 0^{offset} x [0,1] x 0^{...} in dimension d.
inline LatticePolytope unit_segment(std::size_t offset, std::size_t d)
{
    LatticePoint e(d, 0);
    e.at(offset) = 1;
    return LatticePolytope(d, {LatticePoint(d, 0), e});
}

inline LatticePolytope minkowski_sum(const LatticePolytope& a, const LatticePolytope& b)
{
    if (a.dim != b.dim)
        throw DimensionError("minkowski_sum: dimensions " + std::to_string(a.dim) + " and " +
                             std::to_string(b.dim) + " differ");
    std::vector<LatticePoint> v;
    for (const auto& x : a.vertices)
        for (const auto& y : b.vertices) {
            LatticePoint z(a.dim);
            for (std::size_t i = 0; i < a.dim; ++i)
                z[i] = x[i] + y[i];
            v.push_back(std::move(z));
        }
    return hull(a.dim, v);
}

inline LatticePolytope convex_envelope(const LatticePolytope& a, const LatticePolytope& b)
{
    if (a.dim != b.dim)
        throw DimensionError("convex_envelope: dimensions " + std::to_string(a.dim) + " and " +
                             std::to_string(b.dim) + " differ");
    std::vector<LatticePoint> v = a.vertices;
    v.insert(v.end(), b.vertices.begin(), b.vertices.end());
    return hull(a.dim, v);
}

// ---------------------------------------------------------------------------
// Action of posets on polytopes

namespace detail {

inline void check_action_inputs(const Poset& p, std::size_t count)
{
    if (count != p.size())
        throw ArityError("poset has " + std::to_string(p.size()) + " points but " +
                         std::to_string(count) + " polytopes were given");
}

template <class Scalar>
void check_nonempty(const std::vector<Polytope<Scalar>>& cs)
{
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (cs[i].vertices.empty())
            throw DimensionError("input polytope " + std::to_string(i) + " has no vertices");
}

/// Calls emit(a, choice) for every vertex a of Poly(P) and every choice of
/// one vertex index per block with a_i = 1 (blocks with a_i = 0 get choice 0).
template <class Sizes, class Emit>
void for_each_corner(const Poset& p, const Sizes& sizes, Emit&& emit)
{
    const auto verts = order_polytope_vertices(p);
    const std::size_t n = p.size();
    std::vector<std::size_t> choice(n, 0);
    for (const auto& a : verts.vertices) {
        auto rec = [&](auto&& self, std::size_t i) -> void {
            if (i == n) {
                emit(a, choice);
                return;
            }
            if (a[i] == 0) {
                choice[i] = 0;
                self(self, i + 1);
                return;
            }
            for (std::size_t c = 0; c < sizes[i]; ++c) {
                choice[i] = c;
                self(self, i + 1);
            }
        };
        rec(rec, 0);
    }
}

} // namespace detail

/**
 * Images (a_1 v_1, ..., a_n v_n) of the vertices: a ranges over Poly(P)'s
 * vertices, v_i over the vertices of C_i, block i occupying its own
 * coordinates. Every extreme point of P(C_1, ..., C_n) is among these.
 */
template <class Scalar>
Polytope<Scalar> action_image(const Poset& p, const std::vector<Polytope<Scalar>>& cs)
{
    detail::check_action_inputs(p, cs.size());
    detail::check_nonempty(cs);
    std::size_t total = 0;
    std::vector<std::size_t> offset, sizes;
    for (const auto& c : cs) {
        offset.push_back(total);
        sizes.push_back(c.size());
        total += c.dim;
    }
    std::vector<std::vector<Scalar>> pts;
    detail::for_each_corner(p, sizes, [&](const LatticePoint& a, const std::vector<std::size_t>& ch) {
        std::vector<Scalar> z(total, Scalar(0));
        for (std::size_t i = 0; i < cs.size(); ++i)
            if (a[i])
                std::copy(cs[i].vertices[ch[i]].begin(), cs[i].vertices[ch[i]].end(),
                          z.begin() + static_cast<std::ptrdiff_t>(offset[i]));
        pts.push_back(std::move(z));
    });
    return Polytope<Scalar>(total, std::move(pts));
}

/// Same as action_image, with every C_i in one shared ambient space:
/// the image point is sum_i a_i v_i.
template <class Scalar>
Polytope<Scalar> action_image_shared(const Poset& p, const std::vector<Polytope<Scalar>>& cs)
{
    detail::check_action_inputs(p, cs.size());
    detail::check_nonempty(cs);
    const std::size_t d = cs.empty() ? 0 : cs.front().dim;
    std::vector<std::size_t> sizes;
    for (const auto& c : cs) {
        if (c.dim != d)
            throw DimensionError("shared action needs inputs of equal dimension");
        sizes.push_back(c.size());
    }
    std::vector<std::vector<Scalar>> pts;
    detail::for_each_corner(p, sizes, [&](const LatticePoint& a, const std::vector<std::size_t>& ch) {
        std::vector<Scalar> z(d, Scalar(0));
        for (std::size_t i = 0; i < cs.size(); ++i)
            if (a[i])
                for (std::size_t k = 0; k < d; ++k)
                    z[k] += cs[i].vertices[ch[i]][k];
        pts.push_back(std::move(z));
    });
    return Polytope<Scalar>(d, std::move(pts));
}

/// P(C_1, ..., C_n) as a V-polytope (extreme points only).
template <class Scalar>
Polytope<Scalar> act_on_polytopes(const Poset& p, const std::vector<Polytope<Scalar>>& cs)
{
    auto img = action_image(p, cs);
    return hull(img.dim, img.vertices);
}

template <class Scalar>
Polytope<Scalar> act_on_polytopes_shared(const Poset& p, const std::vector<Polytope<Scalar>>& cs)
{
    auto img = action_image_shared(p, cs);
    return hull(img.dim, img.vertices);
}

} // namespace posetnn
