#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "posetnn/tropical.hpp"

using namespace posetnn;

namespace {

const char* kN = "4; 0<2, 1<2, 1<3";

Rational R(long a, long b)
{
    Rational r(a, b);
    r.canonicalize();
    return r;
}

TropicalPolynomial P(const std::string& s, std::size_t nvars) { return parse_tropical(s, nvars); }

std::set<std::string> terms(const std::string& s)
{
    std::set<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(" + ", pos);
        out.insert(s.substr(pos, next - pos));
        if (next == std::string::npos)
            break;
        pos = next + 3;
    }
    return out;
}

TropicalPolynomial random_poly(std::size_t nvars, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> e(0, 3), c(-6, 6), k(1, 4);
    std::vector<Monomial> t;
    const int count = k(rng);
    for (int i = 0; i < count; ++i) {
        Exponent x(nvars);
        for (auto& v : x)
            v = static_cast<std::uint32_t>(e(rng));
        t.push_back(Monomial{x, R(c(rng), 2)});
    }
    return TropicalPolynomial(nvars, std::move(t));
}

std::vector<Rational> random_point(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> v(-40, 40);
    std::vector<Rational> x;
    for (std::size_t i = 0; i < n; ++i)
        x.push_back(R(v(rng), 7));
    return x;
}

std::vector<Poset> upto(std::size_t max_n)
{
    std::vector<Poset> all;
    for (std::size_t n = 1; n <= max_n; ++n)
        for (const auto& p : enumerate_posets(n))
            all.push_back(p);
    return all;
}

} // namespace

TEST(TropicalText, FormatAndParse)
{
    const auto f = P("x*y + 0 + y", 2);
    EXPECT_EQ(format_tropical(f), "0 + y + x*y");
    EXPECT_EQ(format_tropical(P("4*x^2*y + 1", 2)), "1 + 4*x^2*y");
    EXPECT_EQ(format_tropical(P("-1/2*z", 3)), "-1/2*z");
    EXPECT_EQ(format_tropical(TropicalPolynomial(2)), "-inf");
    EXPECT_EQ(P("-inf", 2), TropicalPolynomial(2));
    EXPECT_EQ(P(format_tropical(f), 2), f);
    EXPECT_THROW(P("x + q", 2), ParseError);
    EXPECT_THROW(P("x +", 2), ParseError);
}

TEST(TropicalText, VariableNames)
{
    EXPECT_EQ(variable_names(2), (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(variable_names(4), (std::vector<std::string>{"w", "x", "y", "z"}));
    EXPECT_EQ(variable_names(5).back(), "x5");
}

TEST(TropicalPolynomial, ReductionKeepsLargestCoefficient)
{
    const auto f = P("1*x + 3*x + 2*x + -inf*y", 2);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f.monomials()[0].coef, Rational(3));
}

TEST(TropicalPolynomial, GradedLexOrder)
{
    const auto f = P("x*y + y^2 + x + 0 + x^2 + y", 2);
    EXPECT_EQ(format_tropical(f), "0 + y + x + y^2 + x*y + x^2");
}

TEST(TropicalEval, HandValues)
{
    const double c2[] = {1.0, 2.0};
    EXPECT_EQ(eval_tropical(tr_of_poset(chain(2)), c2), 3.0);
    const double one[] = {1.0, 1.0};
    EXPECT_EQ(eval_tropical(P("4*x^2*y + 1", 2), one), 7.0);
    const double zero[] = {0.0, 0.0};
    EXPECT_EQ(eval_tropical(P("3*x + -2 + 5/2*y", 2), zero), 3.0);
    EXPECT_EQ(eval_tropical(TropicalPolynomial(2), zero), -std::numeric_limits<double>::infinity());
    const double bad[] = {1.0};
    EXPECT_THROW(eval_tropical(P("x", 2), bad), ArityError);
}

TEST(TropicalEval, MatchesMonomialOracle)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int rep = 0; rep < 200; ++rep) {
        const auto f = random_poly(3, rng);
        std::vector<double> x{u(rng), u(rng), u(rng)};
        EXPECT_NEAR(eval_tropical(f, x), oracle::eval_poly(f, x), 1e-12);
    }
}

TEST(TropicalArith, AddAndMulPointwise)
{
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 100; ++rep) {
        const auto f = random_poly(2, rng), g = random_poly(2, rng);
        const auto x = random_point(2, rng);
        const Rational a = *eval_exact(f, x), b = *eval_exact(g, x);
        EXPECT_EQ(*eval_exact(tropical_add(f, g), x), std::max(a, b));
        EXPECT_EQ(*eval_exact(tropical_mul(f, g), x), a + b);
    }
}

TEST(TropicalArith, RationalFunctionFormulas)
{
    std::mt19937_64 rng(22);
    for (int rep = 0; rep < 100; ++rep) {
        const auto a = make_rational_function(random_poly(2, rng), random_poly(2, rng));
        const auto b = make_rational_function(random_poly(2, rng), random_poly(2, rng));
        const auto x = random_point(2, rng);
        const Rational va = *eval_exact(a, x), vb = *eval_exact(b, x);
        EXPECT_EQ(*eval_exact(tropical_mul(a, b), x), va + vb);
        EXPECT_EQ(*eval_exact(tropical_add(a, b), x), std::max(va, vb));
    }
    EXPECT_THROW(make_rational_function(P("x", 1), TropicalPolynomial(1)), ArityError);
}

TEST(TrOfPoset, Examples)
{
    EXPECT_EQ(format_tropical(tr_of_poset(chain(3))), "0 + z + y*z + x*y*z");
    EXPECT_EQ(format_tropical(tr_of_poset(antichain(2))), "0 + y + x + x*y");
    EXPECT_EQ(terms(format_tropical(tr_of_poset(parse_poset("4; 0<2, 0<3, 1<2")))),
              terms("0 + z + y + y*z + x*y + w*y*z + x*y*z + w*x*y*z"));
    EXPECT_EQ(format_tropical(tr_of_poset(point())), "0 + x");
}

TEST(ExpandedPresentation, NPosetSummands)
{
    const auto ep = expanded_presentation(parse_poset(kN));
    ASSERT_EQ(ep.summands.size(), 5u);
    std::set<std::set<std::string>> got, want;
    for (const auto& s : ep.summands)
        got.insert(terms(format_tropical(s)));
    for (const char* s : {"0 + z + y*z + x*y*z + w*x*y*z", "0 + y + y*z + x*y*z + w*x*y*z",
                          "0 + z + y*z + w*y*z + w*x*y*z", "0 + y + w*y + w*y*z + w*x*y*z",
                          "0 + y + y*z + w*y*z + w*x*y*z"})
        want.insert(terms(s));
    EXPECT_EQ(got, want);
    EXPECT_EQ(ep.sum(), tr_of_poset(parse_poset(kN)));
}

TEST(ExpandedPresentation, SmallCases)
{
    const auto a2 = expanded_presentation(antichain(2));
    EXPECT_EQ(a2.factored(), "(0 + y*(0 + x)) + (0 + x*(0 + y))");
    const auto c = expanded_presentation(chain(4));
    ASSERT_EQ(c.summands.size(), 1u);
    EXPECT_EQ(c.summands[0], chain_polynomial(4));
}

TEST(ExpandedPresentation, EvaluationEqualsReducedForm)
{
    std::mt19937_64 rng(4);
    for (const auto& p : upto(4)) {
        const auto ep = expanded_presentation(p);
        EXPECT_EQ(ep.sum(), tr_of_poset(p));
        for (int rep = 0; rep < 10; ++rep) {
            const auto x = random_point(p.size(), rng);
            Rational best = *eval_exact(ep.summands[0], x);
            for (const auto& s : ep.summands)
                best = std::max(best, *eval_exact(s, x));
            EXPECT_EQ(best, *eval_exact(tr_of_poset(p), x));
        }
    }
}

TEST(NewtonPolytope, ExampleSegment)
{
    const auto f = P("4*x^2*y + 1", 2);
    const auto c = polytope_of_polynomial(f);
    const std::vector<RationalPoint> want{{Rational(0), Rational(0), Rational(1)},
                                          {Rational(2), Rational(1), Rational(4)}};
    EXPECT_EQ(c.vertices, want);
    EXPECT_EQ(polynomial_of_polytope(c), f);
}

TEST(NewtonPolytope, ConstantAndChain)
{
    const auto c0 = polytope_of_polynomial(TropicalPolynomial::constant(3, 0));
    ASSERT_EQ(c0.size(), 1u);
    EXPECT_EQ(c0.vertices[0], RationalPoint(4, Rational(0)));
    EXPECT_EQ(polynomial_of_polytope(LatticePolytope(1, {{0}})), TropicalPolynomial::constant(0, 0));

    const auto lifted = cartesian_product(order_polytope_vertices(chain(2)), constant_point(1, 0));
    EXPECT_EQ(to_lattice(polytope_of_polynomial(tr_of_poset(chain(2)))), lifted);
}

TEST(NewtonPolytope, RoundTripOnPosetPolynomials)
{
    for (const auto& p : upto(4)) {
        const auto f = tr_of_poset(p);
        EXPECT_EQ(polynomial_of_polytope(polytope_of_polynomial(f)), f);
    }
    const auto nlift = cartesian_product(order_polytope_vertices(parse_poset("4; 0<2, 0<3, 1<2")),
                                         constant_point(1, 0));
    EXPECT_EQ(terms(format_tropical(polynomial_of_polytope(nlift))),
              terms("0 + z + y + y*z + x*y + w*y*z + x*y*z + w*x*y*z"));
}

TEST(NewtonPolytope, Errors)
{
    EXPECT_THROW(polynomial_of_polytope(LatticePolytope(2, {{-1, 0}})), NegativeExponentError);
    RationalPolytope half(2, {{Rational(1, 2), Rational(0)}});
    EXPECT_THROW(polynomial_of_polytope(half), NegativeExponentError);
    EXPECT_THROW(polynomial_of_polytope(LatticePolytope(0, {{}})), DimensionError);
}

TEST(PosetFromTropical, RoundTripAndInjectivity)
{
    for (std::size_t n = 1; n <= 4; ++n) {
        std::set<std::string> seen;
        const auto ps = enumerate_posets(n);
        for (const auto& p : ps) {
            const auto f = tr_of_poset(p);
            seen.insert(format_tropical(f));
            EXPECT_EQ(poset_from_tropical(f), p);
        }
        EXPECT_EQ(seen.size(), ps.size());
    }
    EXPECT_EQ(poset_from_tropical(P("0 + x", 1)), point());
    EXPECT_EQ(poset_from_tropical(P("0 + z + y + y*z + x*y + w*y*z + x*y*z + w*x*y*z", 4)),
              parse_poset("4; 0<2, 0<3, 1<2"));
}

TEST(PosetFromTropical, RoundTripOnLabeledPosets)
{
    for (const auto& p : oracle::labeled_posets(4))
        EXPECT_EQ(poset_from_tropical(tr_of_poset(p)), p);
}

TEST(PosetFromTropical, Rejects)
{
    EXPECT_THROW(poset_from_tropical(P("0 + x + y", 2)), NotPosetPolynomialError);
    EXPECT_THROW(poset_from_tropical(P("0 + 1*x", 1)), NotPosetPolynomialError);
    EXPECT_THROW(poset_from_tropical(P("0 + x^2", 1)), NotPosetPolynomialError);
    EXPECT_THROW(poset_from_tropical(P("0 + x + y + x*y*z", 3)), NotPosetPolynomialError);
    EXPECT_EQ(poset_from_tropical(P("0 + x + y + x*y + x*y*z", 3)), parse_poset("3; 2<0, 2<1"));
}

TEST(Action, SharedRingExamples)
{
    const Poset v = parse_poset("3; 0<2, 1<2");
    const auto r13 = act_on_tropical_shared(v, {P("x", 3), P("x^2", 3), P("z", 3)});
    EXPECT_EQ(terms(format_tropical(r13)), terms("0 + z + x*z + x^2*z + x^3*z"));
    const auto r14 = act_on_tropical_shared(v, {P("x", 3), P("x^2 + y", 3), P("z", 3)});
    EXPECT_EQ(terms(format_tropical(r14)), terms("0 + z + x*z + x^2*z + x^3*z + y*z + x*y*z"));
}

TEST(Action, UnitOnPolynomialsWithConstantTerm)
{
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 30; ++rep) {
        auto f = tropical_add(random_poly(2, rng), TropicalPolynomial::constant(2, 0));
        f = polynomial_of_polytope(polytope_of_polynomial(f));
        EXPECT_EQ(act_on_tropical(point(), {f}), tropical_add(f, TropicalPolynomial::constant(2, 0)));
    }
    const auto g = tr_of_poset(parse_poset(kN));
    EXPECT_EQ(act_on_tropical(point(), {g}), g);
}

TEST(Action, EvaluatesAsComposition)
{
    // Summing over each block separately: P(f)(x) = Tr(P)(f_1(x^1), ..., f_n(x^n)).
    std::mt19937_64 rng(31);
    for (const auto& p : upto(3)) {
        for (int rep = 0; rep < 4; ++rep) {
            std::vector<TropicalPolynomial> fs;
            std::size_t total = 0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                fs.push_back(random_poly(1 + rng() % 2, rng));
                total += fs.back().nvars();
            }
            const auto r = act_on_tropical(p, fs);
            ASSERT_EQ(r.nvars(), total);
            for (int k = 0; k < 5; ++k) {
                const auto x = random_point(total, rng);
                std::vector<Rational> inner;
                std::size_t off = 0;
                for (const auto& f : fs) {
                    std::vector<Rational> xi(x.begin() + static_cast<long>(off),
                                             x.begin() + static_cast<long>(off + f.nvars()));
                    inner.push_back(*eval_exact(f, xi));
                    off += f.nvars();
                }
                EXPECT_EQ(*eval_exact(r, x), *eval_exact(tr_of_poset(p), inner));
            }
        }
    }
}

TEST(Action, BlockConventionNegInf)
{
    const auto r = act_on_tropical(antichain(2), {P("x", 1), TropicalPolynomial(2)});
    EXPECT_TRUE(r.is_neg_inf());
    EXPECT_EQ(r.nvars(), 3u);
    EXPECT_THROW(act_on_tropical(chain(2), {P("x", 1)}), ArityError);
}

TEST(Action, OnPosetPolynomialsIsTrOfLexSum)
{
    for (const auto& p : upto(2))
        for (const auto& q : upto(2)) {
            std::vector<Poset> qs(p.size(), q);
            std::vector<TropicalPolynomial> fs(p.size(), tr_of_poset(q));
            EXPECT_EQ(act_on_poset_polynomials(p, fs), tr_of_poset(lex_sum(p, qs)));
        }
}

TEST(SubstituteChain, AgreesWithChainAction)
{
    for (std::size_t n = 1; n <= 5; ++n)
        for (std::size_t m = 1; n + m <= 6; ++m)
            for (std::size_t i = 1; i <= n; ++i) {
                std::vector<TropicalPolynomial> fs;
                for (std::size_t k = 1; k <= n; ++k)
                    fs.push_back(k == i ? chain_polynomial(m) : P("x", 1));
                EXPECT_EQ(substitute_chain(n, i, chain_polynomial(m)), act_on_tropical(chain(n), fs))
                    << n << " " << m << " " << i;
            }
}

TEST(SubstituteChain, BottomSlotGivesLongerChain)
{
    EXPECT_EQ(substitute_chain(2, 1, chain_polynomial(2)), chain_polynomial(3));
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::size_t m = 1; m <= 3; ++m)
            EXPECT_EQ(substitute_chain(n, 1, chain_polynomial(m)), chain_polynomial(n + m - 1));
    const auto g = P("1 + 2*x*y + y^3", 2);
    EXPECT_EQ(substitute_chain(1, 1, g), tropical_add(TropicalPolynomial::constant(2, 0), g));
    EXPECT_THROW(substitute_chain(2, 3, g), IndexError);
}

TEST(SubstituteChain, EvaluationDiffersFromAction)
{
    const std::vector<TropicalPolynomial> fs{chain_polynomial(2), chain_polynomial(1)};
    EXPECT_EQ(evaluate_expanded(antichain(2), fs).size(), 2u);
    const std::vector<Poset> qs{chain(2), point()};
    EXPECT_EQ(expanded_presentation(lex_sum(antichain(2), qs)).summands.size(), 3u);
}
