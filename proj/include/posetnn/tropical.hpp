#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posetnn/error.hpp"
#include "posetnn/polytope.hpp"
#include "posetnn/poset.hpp"
#include "posetnn/rational.hpp"

namespace posetnn {

using Exponent = std::vector<std::uint32_t>;

/// coef + <exp, x> in max-plus semantics.
struct Monomial {
    Exponent exp;
    Rational coef;

    std::uint64_t degree() const
    {
        std::uint64_t d = 0;
        for (auto e : exp)
            d += e;
        return d;
    }

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded lexicographic order on exponents: by degree, then ascending lex.
inline bool grlex_less(const Exponent& a, const Exponent& b)
{
    std::uint64_t da = 0, db = 0;
    for (auto e : a)
        da += e;
    for (auto e : b)
        db += e;
    if (da != db)
        return da < db;
    return a < b;
}

/**
 * Tropical (max-plus) polynomial in reduced form.
 *
 * Monomials have distinct exponents and are kept in graded lexicographic
 * order. The tropical zero (-inf) is the polynomial with no monomials;
 * monomials with coefficient -inf are dropped on construction.
 */
class TropicalPolynomial {
public:
    TropicalPolynomial() = default;
    explicit TropicalPolynomial(std::size_t nvars) : nvars_(nvars) {}

    /// Reduces: for equal exponents the largest coefficient wins.
    TropicalPolynomial(std::size_t nvars, std::vector<Monomial> terms) : nvars_(nvars)
    {
        std::map<Exponent, Rational, bool (*)(const Exponent&, const Exponent&)> best(grlex_less);
        for (auto& t : terms) {
            if (t.exp.size() != nvars)
                throw ArityError("monomial with " + std::to_string(t.exp.size()) +
                                 " exponents in a polynomial of " + std::to_string(nvars) +
                                 " variables");
            auto [it, fresh] = best.emplace(t.exp, t.coef);
            if (!fresh && it->second < t.coef)
                it->second = t.coef;
        }
        for (auto& [e, c] : best)
            monomials_.push_back(Monomial{e, c});
    }

    static TropicalPolynomial constant(std::size_t nvars, const Rational& c)
    {
        return TropicalPolynomial(nvars, {Monomial{Exponent(nvars, 0), c}});
    }

    static TropicalPolynomial variable(std::size_t nvars, std::size_t i)
    {
        Exponent e(nvars, 0);
        e.at(i) = 1;
        return TropicalPolynomial(nvars, {Monomial{e, Rational(0)}});
    }

    std::size_t nvars() const noexcept { return nvars_; }
    const std::vector<Monomial>& monomials() const noexcept { return monomials_; }
    std::size_t size() const noexcept { return monomials_.size(); }
    bool is_neg_inf() const noexcept { return monomials_.empty(); }

    std::vector<Exponent> exponents() const
    {
        std::vector<Exponent> out;
        for (const auto& m : monomials_)
            out.push_back(m.exp);
        return out;
    }

    friend bool operator==(const TropicalPolynomial&, const TropicalPolynomial&) = default;

private:
    std::size_t nvars_ = 0;
    std::vector<Monomial> monomials_;
};

// ---------------------------------------------------------------------------
// Names and text form

/// w,x,y,z for four variables; x,y,z (prefix) for up to three; else x1..xn.
inline std::vector<std::string> variable_names(std::size_t nvars)
{
    static const char* const four[] = {"w", "x", "y", "z"};
    static const char* const three[] = {"x", "y", "z"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < nvars; ++i) {
        if (nvars == 4)
            out.emplace_back(four[i]);
        else if (nvars <= 3)
            out.emplace_back(three[i]);
        else
            out.push_back("x" + std::to_string(i + 1));
    }
    return out;
}

inline std::string format_monomial(const Monomial& m, const std::vector<std::string>& names)
{
    std::string vars;
    for (std::size_t i = 0; i < m.exp.size(); ++i) {
        if (m.exp[i] == 0)
            continue;
        if (!vars.empty())
            vars += "*";
        vars += names[i];
        if (m.exp[i] > 1)
            vars += "^" + std::to_string(m.exp[i]);
    }
    if (vars.empty())
        return to_string(m.coef);
    if (m.coef == 0)
        return vars;
    return to_string(m.coef) + "*" + vars;
}

/// "0 + y + x*y"; the tropical zero prints as "-inf".
inline std::string format_tropical(const TropicalPolynomial& f,
                                   const std::vector<std::string>& names)
{
    if (names.size() != f.nvars())
        throw ArityError("need one name per variable");
    if (f.is_neg_inf())
        return "-inf";
    std::string out;
    for (const auto& m : f.monomials()) {
        if (!out.empty())
            out += " + ";
        out += format_monomial(m, names);
    }
    return out;
}

inline std::string format_tropical(const TropicalPolynomial& f)
{
    return format_tropical(f, variable_names(f.nvars()));
}

/// Parses the text form: terms joined by '+', factors joined by '*'. A factor
/// is a rational, "-inf", or a variable with optional "^k". Several factors
/// multiply tropically (coefficients add, exponents add).
inline TropicalPolynomial parse_tropical(std::string_view text, const std::vector<std::string>& names)
{
    const std::size_t n = names.size();
    std::size_t pos = 0;
    auto fail = [&](const std::string& what) -> void {
        throw ParseError("polynomial '" + std::string(text) + "': " + what + " at offset " +
                         std::to_string(pos));
    };
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    auto is_name_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };

    std::vector<Monomial> terms;
    bool any = false;
    while (true) {
        skip();
        Monomial m{Exponent(n, 0), Rational(0)};
        bool neg_inf = false;
        while (true) {
            skip();
            if (pos >= text.size())
                fail("expected a factor");
            const char c = text[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
                if (text.substr(pos, 4) == "-inf") {
                    neg_inf = true;
                    pos += 4;
                } else {
                    std::size_t start = pos;
                    if (text[pos] == '-')
                        ++pos;
                    while (pos < text.size() &&
                           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
                        ++pos;
                    if (pos == start || (pos == start + 1 && text[start] == '-'))
                        fail("expected a number");
                    m.coef += parse_rational(text.substr(start, pos - start));
                }
            } else if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t start = pos;
                while (pos < text.size() && is_name_char(text[pos]))
                    ++pos;
                std::string name(text.substr(start, pos - start));
                auto it = std::find(names.begin(), names.end(), name);
                if (it == names.end())
                    fail("unknown variable '" + name + "'");
                std::uint32_t k = 1;
                skip();
                if (pos < text.size() && text[pos] == '^') {
                    ++pos;
                    skip();
                    std::size_t s = pos;
                    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                        ++pos;
                    if (s == pos)
                        fail("expected an exponent");
                    k = static_cast<std::uint32_t>(std::stoul(std::string(text.substr(s, pos - s))));
                }
                m.exp[static_cast<std::size_t>(it - names.begin())] += k;
            } else {
                fail(std::string("unexpected character '") + c + "'");
            }
            skip();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
                continue;
            }
            break;
        }
        if (!neg_inf)
            terms.push_back(std::move(m));
        any = true;
        skip();
        if (pos >= text.size())
            break;
        if (text[pos] != '+')
            fail("expected '+'");
        ++pos;
    }
    if (!any)
        fail("empty polynomial");
    return TropicalPolynomial(n, std::move(terms));
}

inline TropicalPolynomial parse_tropical(std::string_view text, std::size_t nvars)
{
    return parse_tropical(text, variable_names(nvars));
}

// ---------------------------------------------------------------------------
// Evaluation

/// max over monomials of coef + sum_i exp_i * x_i. Each monomial is summed in
/// variable-index order, starting from its coefficient.
inline double eval_tropical(const TropicalPolynomial& f, std::span<const double> x)
{
    if (x.size() != f.nvars())
        throw ArityError("eval_tropical: expected " + std::to_string(f.nvars()) + " inputs, got " +
                         std::to_string(x.size()));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& m : f.monomials()) {
        double acc = m.coef.get_d();
        for (std::size_t i = 0; i < m.exp.size(); ++i) {
            const auto e = m.exp[i];
            if (e == 0)
                continue;
            if (e == 1)
                acc += x[i];
            else
                acc += static_cast<double>(e) * x[i];
        }
        if (acc > best)
            best = acc;
    }
    return best;
}

/// Exact evaluation; nullopt stands for -inf.
inline std::optional<Rational> eval_exact(const TropicalPolynomial& f, std::span<const Rational> x)
{
    if (x.size() != f.nvars())
        throw ArityError("eval_exact: expected " + std::to_string(f.nvars()) + " inputs");
    std::optional<Rational> best;
    for (const auto& m : f.monomials()) {
        Rational acc = m.coef;
        for (std::size_t i = 0; i < m.exp.size(); ++i)
            if (m.exp[i] != 0)
                acc += Rational(static_cast<unsigned long>(m.exp[i])) * x[i];
        if (!best || *best < acc)
            best = acc;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Semiring operations

inline TropicalPolynomial tropical_add(const TropicalPolynomial& f, const TropicalPolynomial& g)
{
    if (f.nvars() != g.nvars())
        throw ArityError("tropical_add: variable counts differ");
    std::vector<Monomial> t = f.monomials();
    t.insert(t.end(), g.monomials().begin(), g.monomials().end());
    return TropicalPolynomial(f.nvars(), std::move(t));
}

inline TropicalPolynomial tropical_mul(const TropicalPolynomial& f, const TropicalPolynomial& g)
{
    if (f.nvars() != g.nvars())
        throw ArityError("tropical_mul: variable counts differ");
    std::vector<Monomial> t;
    for (const auto& a : f.monomials())
        for (const auto& b : g.monomials()) {
            Monomial m{a.exp, a.coef + b.coef};
            for (std::size_t i = 0; i < m.exp.size(); ++i)
                m.exp[i] += b.exp[i];
            t.push_back(std::move(m));
        }
    return TropicalPolynomial(f.nvars(), std::move(t));
}

/// Variable i of f becomes variable map[i] of the result; merged variables
/// add their exponents.
inline TropicalPolynomial relabel(const TropicalPolynomial& f, std::span<const std::size_t> map,
                                  std::size_t new_nvars)
{
    if (map.size() != f.nvars())
        throw ArityError("relabel: need one target per variable");
    for (auto t : map)
        if (t >= new_nvars)
            throw IndexError("relabel: target variable out of range");
    std::vector<Monomial> t;
    for (const auto& m : f.monomials()) {
        Monomial r{Exponent(new_nvars, 0), m.coef};
        for (std::size_t i = 0; i < m.exp.size(); ++i)
            r.exp[map[i]] += m.exp[i];
        t.push_back(std::move(r));
    }
    return TropicalPolynomial(new_nvars, std::move(t));
}

/// f placed in variables [offset, offset + f.nvars()) of a larger ring.
inline TropicalPolynomial shift(const TropicalPolynomial& f, std::size_t offset, std::size_t new_nvars)
{
    std::vector<std::size_t> map(f.nvars());
    for (std::size_t i = 0; i < map.size(); ++i)
        map[i] = offset + i;
    return relabel(f, map, new_nvars);
}

/// f(x) - g(x).
struct TropicalRational {
    TropicalPolynomial num;
    TropicalPolynomial den;

    std::size_t nvars() const { return num.nvars(); }
};

inline TropicalRational make_rational_function(TropicalPolynomial num, TropicalPolynomial den)
{
    if (num.nvars() != den.nvars())
        throw ArityError("numerator and denominator must share variables");
    if (den.is_neg_inf())
        throw ArityError("denominator is the tropical zero");
    return TropicalRational{std::move(num), std::move(den)};
}

/// (a/b) (x) (c/d) = (a (x) c) / (b (x) d)
inline TropicalRational tropical_mul(const TropicalRational& p, const TropicalRational& q)
{
    return make_rational_function(tropical_mul(p.num, q.num), tropical_mul(p.den, q.den));
}

/// (a/b) (+) (c/d) = (a (x) d (+) b (x) c) / (b (x) d)
inline TropicalRational tropical_add(const TropicalRational& p, const TropicalRational& q)
{
    return make_rational_function(tropical_add(tropical_mul(p.num, q.den), tropical_mul(p.den, q.num)),
                                  tropical_mul(p.den, q.den));
}

inline double eval_tropical(const TropicalRational& r, std::span<const double> x)
{
    return eval_tropical(r.num, x) - eval_tropical(r.den, x);
}

inline std::optional<Rational> eval_exact(const TropicalRational& r, std::span<const Rational> x)
{
    auto a = eval_exact(r.num, x);
    auto b = eval_exact(r.den, x);
    if (!a)
        return std::nullopt;
    return *a - *b;
}

// ---------------------------------------------------------------------------
// Posets and chains

/// Tr(P): one coefficient-0 monomial per vertex of Poly(P).
inline TropicalPolynomial tr_of_poset(const Poset& p)
{
    const auto poly = order_polytope_vertices(p);
    std::vector<Monomial> t;
    for (const auto& v : poly.vertices) {
        Exponent e(v.begin(), v.end());
        t.push_back(Monomial{std::move(e), Rational(0)});
    }
    return TropicalPolynomial(p.size(), std::move(t));
}

/// 0 (+) x_{p[n-1]} (x) (0 (+) x_{p[n-2]} (x) (... (0 (+) x_{p[0]}))) in nvars
/// variables; `perm` lists the chain bottom to top.
inline TropicalPolynomial chain_polynomial(std::span<const std::size_t> perm, std::size_t nvars)
{
    std::vector<Monomial> t;
    Exponent e(nvars, 0);
    t.push_back(Monomial{e, Rational(0)});
    for (std::size_t k = perm.size(); k-- > 0;) {
        e.at(perm[k]) = 1;
        t.push_back(Monomial{e, Rational(0)});
    }
    return TropicalPolynomial(nvars, std::move(t));
}

/// Tr(n) with x_1 at the bottom.
inline TropicalPolynomial chain_polynomial(std::size_t n)
{
    std::vector<std::size_t> id(n);
    for (std::size_t i = 0; i < n; ++i)
        id[i] = i;
    return chain_polynomial(id, n);
}

/// Nested text "0 + z*(0 + y*(0 + x))" of a chain listed bottom to top.
inline std::string format_chain_factored(std::span<const std::size_t> perm,
                                         const std::vector<std::string>& names)
{
    std::string s = "0";
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (k == 0)
            s = "0 + " + names.at(perm[k]);
        else
            s = "0 + " + names.at(perm[k]) + "*(" + s + ")";
    }
    return s;
}

/// Tr(P) written as the tropical sum of one chain polynomial per linear
/// extension.
struct ExpandedPresentation {
    std::size_t nvars = 0;
    std::vector<LinearExtension> extensions;
    std::vector<TropicalPolynomial> summands;

    TropicalPolynomial sum() const
    {
        TropicalPolynomial acc(nvars);
        for (const auto& s : summands)
            acc = tropical_add(acc, s);
        return acc;
    }

    std::string factored(const std::vector<std::string>& names) const
    {
        std::string out;
        for (const auto& ext : extensions) {
            if (!out.empty())
                out += " + ";
            out += "(" + format_chain_factored(ext.perm, names) + ")";
        }
        return out.empty() ? "-inf" : out;
    }
    std::string factored() const { return factored(variable_names(nvars)); }
};

inline ExpandedPresentation expanded_presentation(const Poset& p)
{
    ExpandedPresentation ep;
    ep.nvars = p.size();
    ep.extensions = linear_extensions(p);
    for (const auto& ext : ep.extensions)
        ep.summands.push_back(chain_polynomial(ext.perm, p.size()));
    return ep;
}

// ---------------------------------------------------------------------------
// Newton polytopes

/// Hull of the points (exp, coef) in dimension nvars + 1.
inline RationalPolytope polytope_of_polynomial(const TropicalPolynomial& f)
{
    std::vector<RationalPoint> pts;
    for (const auto& m : f.monomials()) {
        RationalPoint p;
        for (auto e : m.exp)
            p.push_back(Rational(static_cast<unsigned long>(e)));
        p.push_back(m.coef);
        pts.push_back(std::move(p));
    }
    return hull(f.nvars() + 1, pts);
}

/// Inverse of polytope_of_polynomial: the last coordinate is the coefficient.
inline TropicalPolynomial polynomial_of_polytope(const RationalPolytope& c)
{
    if (c.dim == 0)
        throw DimensionError("a polytope of a polynomial needs a coefficient coordinate");
    const std::size_t n = c.dim - 1;
    std::vector<Monomial> t;
    for (const auto& v : c.vertices) {
        Monomial m{Exponent(n, 0), v[n]};
        for (std::size_t i = 0; i < n; ++i) {
            if (v[i] < 0 || !is_integer(v[i]))
                throw NegativeExponentError("coordinate " + std::to_string(i) + " of vertex is " +
                                            to_string(v[i]) +
                                            ", not a non-negative integer exponent");
            if (!v[i].get_num().fits_uint_p())
                throw OverflowError("exponent too large");
            m.exp[i] = static_cast<std::uint32_t>(v[i].get_num().get_ui());
        }
        t.push_back(std::move(m));
    }
    return TropicalPolynomial(n, std::move(t));
}

inline TropicalPolynomial polynomial_of_polytope(const LatticePolytope& c)
{
    return polynomial_of_polytope(to_rational(c));
}

/// Recovers P from Tr(P) by intersecting the linear orders read off the
/// maximal divisibility chains 0 | m_1 | ... | m_n = x_1...x_n.
inline Poset poset_from_tropical(const TropicalPolynomial& f)
{
    const std::size_t n = f.nvars();
    if (n > 64)
        throw SizeError("poset_from_tropical supports at most 64 variables");
    std::vector<std::uint64_t> masks;
    for (const auto& m : f.monomials()) {
        if (m.coef != 0)
            throw NotPosetPolynomialError("coefficient " + to_string(m.coef) + " is not 0");
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (m.exp[i] > 1)
                throw NotPosetPolynomialError("exponent larger than 1");
            if (m.exp[i] == 1)
                mask |= std::uint64_t{1} << i;
        }
        masks.push_back(mask);
    }
    std::sort(masks.begin(), masks.end());
    const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    auto has = [&](std::uint64_t m) { return std::binary_search(masks.begin(), masks.end(), m); };
    if (!has(0) || !has(full))
        throw NotPosetPolynomialError("the constant and the full product must both be present");

    // geq[i*n+j] stays set while every chain places i at or above j.
    std::vector<std::uint8_t> leq(n * n, 1);
    std::vector<std::size_t> added; // points in the order they join, top first
    bool found = false;
    auto rec = [&](auto&& self, std::uint64_t cur) -> void {
        if (cur == full) {
            found = true;
            // added[0] is the top point; rank grows downwards.
            std::vector<std::size_t> rank(n);
            for (std::size_t k = 0; k < n; ++k)
                rank[added[k]] = k;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (rank[i] < rank[j])
                        leq[i * n + j] = 0;
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t bit = std::uint64_t{1} << i;
            if ((cur & bit) || !has(cur | bit))
                continue;
            added.push_back(i);
            self(self, cur | bit);
            added.pop_back();
        }
    };
    rec(rec, 0);
    if (!found)
        throw NotPosetPolynomialError("no maximal divisibility chain");
    Poset p;
    try {
        p = Poset::from_matrix(n, leq);
    } catch (const CycleError&) {
        throw NotPosetPolynomialError("chains do not determine an order");
    }
    if (!(tr_of_poset(p) == f))
        throw NotPosetPolynomialError("polynomial is not the polynomial of a poset");
    return p;
}

// ---------------------------------------------------------------------------
// Action of posets on tropical polynomials

namespace detail {

/// Monomials of f whose points (exp, coef) are vertices of its Newton polytope.
inline std::vector<Monomial> newton_vertices(const TropicalPolynomial& f)
{
    return polynomial_of_polytope(polytope_of_polynomial(f)).monomials();
}

} // namespace detail

/**
 * P(f_1, ..., f_n), each f_i in its own block of variables (block offsets in
 * input order). The result collects the images (a_1 v_1, ..., a_n v_n) of the
 * Newton-polytope vertices, a ranging over the vertices of Poly(P): exponents
 * are concatenated and coefficients add. Images are kept even when they are
 * not extreme, since every one of them is a corner of the action.
 */
inline TropicalPolynomial act_on_tropical(const Poset& p, const std::vector<TropicalPolynomial>& fs)
{
    if (fs.size() != p.size())
        throw ArityError("act_on_tropical: poset has " + std::to_string(p.size()) + " points but " +
                         std::to_string(fs.size()) + " polynomials were given");
    std::size_t total = 0;
    std::vector<std::size_t> offset;
    std::vector<std::vector<Monomial>> verts;
    std::vector<std::size_t> sizes;
    for (const auto& f : fs) {
        offset.push_back(total);
        total += f.nvars();
        verts.push_back(detail::newton_vertices(f));
        sizes.push_back(verts.back().size());
    }
    for (auto s : sizes)
        if (s == 0)
            return TropicalPolynomial(total);
    std::vector<Monomial> t;
    detail::for_each_corner(p, sizes, [&](const LatticePoint& a, const std::vector<std::size_t>& ch) {
        Monomial m{Exponent(total, 0), Rational(0)};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (!a[i])
                continue;
            const Monomial& v = verts[i][ch[i]];
            std::copy(v.exp.begin(), v.exp.end(), m.exp.begin() + static_cast<std::ptrdiff_t>(offset[i]));
            m.coef += v.coef;
        }
        t.push_back(std::move(m));
    });
    return TropicalPolynomial(total, std::move(t));
}

/// As act_on_tropical, with all f_i in one shared ring: exponents add.
inline TropicalPolynomial act_on_tropical_shared(const Poset& p,
                                                 const std::vector<TropicalPolynomial>& fs)
{
    if (fs.size() != p.size())
        throw ArityError("act_on_tropical_shared: poset has " + std::to_string(p.size()) +
                         " points but " + std::to_string(fs.size()) + " polynomials were given");
    const std::size_t n = fs.empty() ? 0 : fs.front().nvars();
    std::vector<std::vector<Monomial>> verts;
    std::vector<std::size_t> sizes;
    for (const auto& f : fs) {
        if (f.nvars() != n)
            throw ArityError("act_on_tropical_shared: inputs must share their variables");
        verts.push_back(detail::newton_vertices(f));
        sizes.push_back(verts.back().size());
    }
    for (auto s : sizes)
        if (s == 0)
            return TropicalPolynomial(n);
    std::vector<Monomial> t;
    detail::for_each_corner(p, sizes, [&](const LatticePoint& a, const std::vector<std::size_t>& ch) {
        Monomial m{Exponent(n, 0), Rational(0)};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (!a[i])
                continue;
            const Monomial& v = verts[i][ch[i]];
            for (std::size_t k = 0; k < n; ++k)
                m.exp[k] += v.exp[k];
            m.coef += v.coef;
        }
        t.push_back(std::move(m));
    });
    return TropicalPolynomial(n, std::move(t));
}

/// P(Tr(Q_1), ..., Tr(Q_n)) := Tr(P(Q_1, ..., Q_n)) on polynomials of posets.
inline TropicalPolynomial act_on_poset_polynomials(const Poset& p,
                                                   const std::vector<TropicalPolynomial>& fs)
{
    if (fs.size() != p.size())
        throw ArityError("act_on_poset_polynomials: arity mismatch");
    std::vector<Poset> qs;
    for (const auto& f : fs)
        qs.push_back(poset_from_tropical(f));
    return tr_of_poset(lex_sum(p, qs));
}

namespace detail {

/// 0 (+) F_k (x) (... (0 (+) F_1 (x) 0)) for F listed bottom to top.
inline TropicalPolynomial nest_chain(const std::vector<TropicalPolynomial>& slots, std::size_t nvars)
{
    TropicalPolynomial h = TropicalPolynomial::constant(nvars, 0);
    const TropicalPolynomial zero = h;
    for (const auto& f : slots)
        h = tropical_add(zero, tropical_mul(f, h));
    return h;
}

} // namespace detail

/**
 * Tr(n)(x_1, ..., x_{i-1}, g, x_{i+1}, ..., x_n) evaluated in its nested form,
 * 1 <= i <= n, x_1 at the bottom. Variables follow the block-offset
 * convention: x_1..x_{i-1} first, then g's variables, then the rest.
 */
inline TropicalPolynomial substitute_chain(std::size_t n, std::size_t i, const TropicalPolynomial& g)
{
    if (i < 1 || i > n)
        throw IndexError("substitute_chain: slot " + std::to_string(i) + " outside 1.." +
                         std::to_string(n));
    const std::size_t total = n - 1 + g.nvars();
    std::vector<TropicalPolynomial> slots;
    std::size_t next = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (k == i) {
            slots.push_back(shift(g, next, total));
            next += g.nvars();
        } else {
            slots.push_back(TropicalPolynomial::variable(total, next));
            ++next;
        }
    }
    return detail::nest_chain(slots, total);
}

/**
 * Tr(P)(f_1, ..., f_n) computed summand by summand from the expanded
 * presentation: each extension's chain is nested with the f's (block
 * offsets in input order). One polynomial per linear extension of P.
 */
inline std::vector<TropicalPolynomial> evaluate_expanded(const Poset& p,
                                                         const std::vector<TropicalPolynomial>& fs)
{
    if (fs.size() != p.size())
        throw ArityError("evaluate_expanded: arity mismatch");
    std::size_t total = 0;
    std::vector<std::size_t> offset;
    for (const auto& f : fs) {
        offset.push_back(total);
        total += f.nvars();
    }
    std::vector<TropicalPolynomial> out;
    for (const auto& ext : linear_extensions(p)) {
        std::vector<TropicalPolynomial> slots;
        for (auto pt : ext.perm)
            slots.push_back(shift(fs[pt], offset[pt], total));
        out.push_back(detail::nest_chain(slots, total));
    }
    return out;
}

} // namespace posetnn
