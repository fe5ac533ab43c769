#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "posetnn/polytope.hpp"

using namespace posetnn;

namespace {

LatticePolytope lp(std::size_t dim, std::vector<LatticePoint> v) { return LatticePolytope(dim, std::move(v)); }

std::vector<Poset> upto(std::size_t max_n)
{
    std::vector<Poset> all;
    for (std::size_t n = 1; n <= max_n; ++n)
        for (const auto& p : enumerate_posets(n))
            all.push_back(p);
    return all;
}

Rational det3(const std::array<std::array<Rational, 3>, 3>& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// p lies in the closed tetrahedron abcd (non-degenerate), by Cramer's rule.
bool in_tetrahedron(const LatticePoint& p, const LatticePoint& a, const LatticePoint& b,
                    const LatticePoint& c, const LatticePoint& d)
{
    std::array<std::array<Rational, 3>, 3> m;
    const LatticePoint* cols[3] = {&b, &c, &d};
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k)
            m[r][k] = Rational((*cols[k])[r] - a[r]);
    const Rational D = det3(m);
    if (D == 0)
        return false;
    Rational sum = 0;
    for (int k = 0; k < 3; ++k) {
        auto mk = m;
        for (int r = 0; r < 3; ++r)
            mk[r][k] = Rational(p[r] - a[r]);
        const Rational lam = det3(mk) / D;
        if (lam < 0)
            return false;
        sum += lam;
    }
    return sum <= 1;
}

// Extreme points by Caratheodory: p is dropped iff some tetrahedron of the
// others contains it. Valid when the others span R^3.
std::vector<LatticePoint> hull_oracle(const std::vector<LatticePoint>& pts)
{
    std::vector<LatticePoint> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<const LatticePoint*> rest;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (j != i && pts[j] != pts[i])
                rest.push_back(&pts[j]);
        bool inside = false;
        const std::size_t r = rest.size();
        for (std::size_t a = 0; a < r && !inside; ++a)
            for (std::size_t b = a + 1; b < r && !inside; ++b)
                for (std::size_t c = b + 1; c < r && !inside; ++c)
                    for (std::size_t d = c + 1; d < r && !inside; ++d)
                        inside = in_tetrahedron(pts[i], *rest[a], *rest[b], *rest[c], *rest[d]);
        if (!inside)
            out.push_back(pts[i]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

TEST(OrderPolytope, NPosetVertices)
{
    const auto v = order_polytope_vertices(parse_poset("4; 0<2, 1<2, 1<3"));
    const std::vector<LatticePoint> expected{{0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, 0, 1, 1},
                                             {0, 1, 1, 1}, {1, 0, 1, 0}, {1, 0, 1, 1}, {1, 1, 1, 1}};
    EXPECT_EQ(v.vertices, expected);
    EXPECT_EQ(v.dim, 4u);
}

TEST(OrderPolytope, MatchesCubeFilterUpToSix)
{
    for (const auto& p : upto(6)) {
        const auto v = order_polytope_vertices(p);
        EXPECT_EQ(v.vertices, oracle::upset_vertices(p)) << format_poset(p);
        EXPECT_EQ(count_up_sets(p), v.size());
    }
}

TEST(OrderPolytope, EmptyPoset)
{
    const auto v = order_polytope_vertices(Poset(0));
    EXPECT_EQ(v.dim, 0u);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_TRUE(v.vertices[0].empty());
}

TEST(OrderPolytope, RoundTripThroughVertices)
{
    for (std::size_t n = 3; n <= 4; ++n)
        for (const auto& p : enumerate_posets(n))
            EXPECT_EQ(poset_from_vertices(order_polytope_vertices(p)), p);
    EXPECT_EQ(poset_from_vertices(lp(2, {{0, 0}, {0, 1}, {1, 1}})), chain(2));
    std::vector<LatticePoint> cube;
    for (int m = 0; m < 8; ++m)
        cube.push_back({m & 1, (m >> 1) & 1, (m >> 2) & 1});
    EXPECT_EQ(poset_from_vertices(lp(3, cube)), antichain(3));
}

TEST(OrderPolytope, RejectsOtherVertexSets)
{
    EXPECT_THROW(poset_from_vertices(lp(2, {{1, 0}, {0, 1}})), NotOrderPolytopeError);
    EXPECT_THROW(poset_from_vertices(lp(2, {{0, 0}, {2, 1}})), NotOrderPolytopeError);
}

TEST(Triangulation, OneUnimodularSimplexPerExtension)
{
    for (const auto& p : upto(4)) {
        const auto simplices = triangulate(p);
        EXPECT_EQ(simplices.size(), count_linear_extensions(p));
        const std::size_t n = p.size();
        for (const auto& s : simplices) {
            ASSERT_EQ(s.vertices.size(), n + 1);
            for (std::size_t k = 0; k <= n; ++k) {
                std::int64_t ones = 0;
                for (auto c : s.vertices[k])
                    ones += c;
                EXPECT_EQ(ones, static_cast<std::int64_t>(k));
                for (std::size_t t = 0; t < k; ++t)
                    EXPECT_EQ(s.vertices[k][s.extension.perm[n - 1 - t]], 1);
                EXPECT_TRUE(order_polytope_vertices(p).contains_vertex(s.vertices[k]));
            }
        }
    }
}

TEST(Triangulation, VolumeAgreesWithLatticeSampling)
{
    // Kronecker lattice rule: x_k = frac(idx * sqrt(prime_k)).
    const double alpha[] = {std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0), std::sqrt(7.0)};
    const std::size_t total = 400000;
    for (const auto& p : upto(4)) {
        const std::size_t n = p.size();
        double factorial = 1;
        for (std::size_t k = 2; k <= n; ++k)
            factorial *= static_cast<double>(k);
        const double vol = static_cast<double>(triangulate(p).size()) / factorial;

        std::vector<double> x(n);
        std::size_t inside = 0;
        for (std::size_t idx = 1; idx <= total; ++idx) {
            for (std::size_t k = 0; k < n; ++k) {
                const double t = static_cast<double>(idx) * alpha[k];
                x[k] = t - std::floor(t);
            }
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i)
                for (std::size_t j = 0; j < n && ok; ++j)
                    if (p.less(i, j) && x[i] > x[j])
                        ok = false;
            inside += ok ? 1 : 0;
        }
        const double est = static_cast<double>(inside) / static_cast<double>(total);
        EXPECT_NEAR(est / vol, 1.0, 0.02) << format_poset(p);
    }
}

TEST(Hull, MidpointEliminated)
{
    std::vector<RationalPoint> pts{{Rational(0), Rational(0)}, {Rational(1), Rational(1)},
                                   {Rational(1, 2), Rational(1, 2)}};
    const auto h = hull_vertices(pts);
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h[0], (RationalPoint{Rational(0), Rational(0)}));
}

TEST(Hull, MatchesCaratheodoryOracleInDimThree)
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> coord(-6, 6);
    for (int rep = 0; rep < 4; ++rep) {
        std::vector<LatticePoint> pts;
        for (int k = 0; k < 16; ++k)
            pts.push_back({coord(rng), coord(rng), coord(rng)});
        pts.push_back({pts[0][0] + pts[1][0] - pts[2][0], 0, 1});
        pts.push_back(pts[2]);
        pts.push_back({0, 0, 0});
        pts.push_back({coord(rng), coord(rng), coord(rng)});
        ASSERT_EQ(pts.size(), 20u);
        EXPECT_EQ(hull_vertices(pts), hull_oracle(pts)) << "rep " << rep;
    }
}

TEST(Hull, CubeCandidatesForNPoset)
{
    // The 2^4 products (a_i * 1) with a ranging over {0,1}^4, filtered by the
    // order constraints, then hulled.
    const Poset n = parse_poset("4; 0<2, 1<2, 1<3");
    std::vector<LatticePoint> cand = oracle::upset_vertices(n);
    cand.push_back({0, 0, 1, 1});
    EXPECT_EQ(hull_vertices(cand), order_polytope_vertices(n).vertices);
}

TEST(Hull, Limits)
{
    std::vector<RationalPoint> big(3, RationalPoint(13, Rational(0)));
    EXPECT_THROW(hull_vertices(big), SizeError);
}

TEST(Minkowski, Examples)
{
    const auto sq = minkowski_sum(lp(2, {{0, 0}, {1, 0}}), lp(2, {{0, 0}, {0, 1}}));
    EXPECT_EQ(sq.vertices, (std::vector<LatticePoint>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
    const auto c2 = order_polytope_vertices(chain(2));
    EXPECT_EQ(minkowski_sum(c2, constant_point(2, 0)), c2);
    EXPECT_THROW(minkowski_sum(c2, constant_point(3, 0)), DimensionError);
}

TEST(Minkowski, DisjointUnionIsMinkowskiSum)
{
    for (const auto& p : upto(3))
        for (const auto& q : upto(3)) {
            const std::size_t d = p.size() + q.size();
            const auto a = embed(order_polytope_vertices(p), 0, d);
            const auto b = embed(order_polytope_vertices(q), p.size(), d);
            const std::vector<Poset> pq{p, q};
            EXPECT_EQ(minkowski_sum(a, b), order_polytope_vertices(lex_sum(antichain(2), pq)));
        }
}

TEST(ConvexEnvelope, Examples)
{
    const auto lifted = lp(2, {{0, 1}});
    const auto pt = lp(2, {{0, 0}, {1, 1}});
    EXPECT_EQ(convex_envelope(lifted, pt), order_polytope_vertices(chain(2)));
    const auto c = order_polytope_vertices(chain(3));
    EXPECT_EQ(convex_envelope(c, c), c);
}

TEST(ConvexEnvelope, OrdinalSumIsConvexEnvelope)
{
    for (const auto& p : upto(3))
        for (const auto& q : upto(3)) {
            const std::size_t d = p.size() + q.size();
            const auto lower = cartesian_product(order_polytope_vertices(p), constant_point(q.size(), 1));
            const auto upper = cartesian_product(constant_point(p.size(), 0), order_polytope_vertices(q));
            ASSERT_EQ(lower.dim, d);
            const std::vector<Poset> pq{p, q};
            EXPECT_EQ(convex_envelope(lower, upper), order_polytope_vertices(lex_sum(chain(2), pq)));
        }
}

TEST(Action, PointGeneratorsGiveOrderPolytope)
{
    for (const auto& p : upto(4)) {
        std::vector<LatticePolytope> ones(p.size(), constant_point(1, 1));
        EXPECT_EQ(act_on_polytopes(p, ones), order_polytope_vertices(p));
    }
}

TEST(Action, UnitSegmentsFillTheCube)
{
    // With c_i free in [0, 1], a = (1, ..., 1) alone sweeps [0, 1]^n.
    for (const auto& p : upto(3)) {
        std::vector<LatticePolytope> segs(p.size(), unit_segment(0, 1));
        EXPECT_EQ(act_on_polytopes(p, segs).size(), std::size_t{1} << p.size());
    }
}

TEST(Action, AntichainIsMinkowskiSum)
{
    for (const auto& p : upto(2))
        for (const auto& q : upto(3)) {
            const std::vector<LatticePolytope> cs{order_polytope_vertices(p), order_polytope_vertices(q)};
            const std::size_t d = p.size() + q.size();
            EXPECT_EQ(act_on_polytopes(antichain(2), cs),
                      minkowski_sum(embed(cs[0], 0, d), embed(cs[1], p.size(), d)));
        }
    const std::vector<LatticePolytope> pts{order_polytope_vertices(point()), order_polytope_vertices(point())};
    EXPECT_EQ(act_on_polytopes(antichain(2), pts).size(), 4u);
}

TEST(Action, IntegerOutputsAndConvexity)
{
    // Every candidate lies in the hull of the returned vertices.
    const Poset v = parse_poset("3; 0<2, 1<2");
    const std::vector<LatticePolytope> cs{lp(2, {{1, 0}, {2, 3}}), lp(1, {{2}}), lp(2, {{0, 0}, {1, 1}, {3, 0}})};
    const auto img = action_image(v, cs);
    const auto res = act_on_polytopes(v, cs);
    std::vector<RationalPoint> hullpts;
    for (const auto& x : res.vertices)
        hullpts.push_back(to_rational_point(x));
    for (const auto& x : img.vertices)
        EXPECT_TRUE(in_hull(to_rational_point(x), hullpts));
    for (const auto& x : res.vertices)
        EXPECT_TRUE(img.contains_vertex(x));
}

TEST(Action, Errors)
{
    const std::vector<LatticePolytope> one{constant_point(1, 1)};
    EXPECT_THROW(act_on_polytopes(chain(2), one), ArityError);
    EXPECT_THROW(LatticePolytope(2, {{1}}), DimensionError);
}
