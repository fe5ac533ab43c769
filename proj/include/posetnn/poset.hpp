#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "posetnn/error.hpp"

namespace posetnn {

/**
 * A finite partial order on the points {0, ..., n-1}.
 *
 * The full reflexive-transitive closure is stored as an n x n matrix, so
 * `leq(i, j)` is O(1). Covers (the Hasse diagram) are recomputed on demand.
 * Equality compares the order only; labels are presentation data.
 */
class Poset {
public:
    using Relation = std::pair<std::size_t, std::size_t>;

    Poset() = default;

    /// Antichain on n points.
    explicit Poset(std::size_t n) : n_(n), leq_(n * n, 0)
    {
        for (std::size_t i = 0; i < n; ++i)
            leq_[i * n + i] = 1;
    }

    /// Closure of the strict relations `less` (pairs i<j).
    static Poset from_relations(std::size_t n, std::span<const Relation> less)
    {
        Poset p(n);
        for (auto [i, j] : less) {
            if (i >= n || j >= n)
                throw IndexError("relation " + std::to_string(i) + "<" + std::to_string(j) +
                                 " out of range for " + std::to_string(n) + " points");
            if (i == j)
                throw CycleError("relation " + std::to_string(i) + "<" + std::to_string(i) +
                                 " is not strict");
            p.leq_[i * n + j] = 1;
        }
        p.close();
        return p;
    }

    /// Builds from a full relation matrix (row-major, leq[i*n+j] <=> i <= j).
    /// The matrix is closed first; antisymmetry is then required.
    static Poset from_matrix(std::size_t n, std::span<const std::uint8_t> leq)
    {
        if (leq.size() != n * n)
            throw ArityError("relation matrix must have n*n entries");
        Poset p(n);
        for (std::size_t k = 0; k < n * n; ++k)
            p.leq_[k] = p.leq_[k] || leq[k];
        p.close();
        return p;
    }

    std::size_t size() const noexcept { return n_; }
    bool empty() const noexcept { return n_ == 0; }

    bool leq(std::size_t i, std::size_t j) const { return leq_[i * n_ + j] != 0; }
    bool less(std::size_t i, std::size_t j) const { return i != j && leq(i, j); }
    bool comparable(std::size_t i, std::size_t j) const { return leq(i, j) || leq(j, i); }

    const std::vector<std::uint8_t>& matrix() const noexcept { return leq_; }

    /// Cover relations i <. j, sorted lexicographically.
    std::vector<Relation> covers() const
    {
        std::vector<Relation> out;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                if (!less(i, j))
                    continue;
                bool direct = true;
                for (std::size_t k = 0; k < n_ && direct; ++k)
                    if (less(i, k) && less(k, j))
                        direct = false;
                if (direct)
                    out.emplace_back(i, j);
            }
        return out;
    }

    /// Bitmask of points strictly above i. Requires n <= 64.
    std::uint64_t strict_up_mask(std::size_t i) const
    {
        std::uint64_t m = 0;
        for (std::size_t j = 0; j < n_; ++j)
            if (less(i, j))
                m |= std::uint64_t{1} << j;
        return m;
    }

    /// Bitmask of points strictly below i. Requires n <= 64.
    std::uint64_t strict_down_mask(std::size_t i) const
    {
        std::uint64_t m = 0;
        for (std::size_t j = 0; j < n_; ++j)
            if (less(j, i))
                m |= std::uint64_t{1} << j;
        return m;
    }

    std::size_t relation_count() const
    {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                c += less(i, j) ? 1 : 0;
        return c;
    }

    const std::vector<std::string>& labels() const noexcept { return labels_; }

    Poset with_labels(std::vector<std::string> labels) const
    {
        if (!labels.empty() && labels.size() != n_)
            throw ArityError("expected " + std::to_string(n_) + " labels, got " +
                             std::to_string(labels.size()));
        Poset p = *this;
        p.labels_ = std::move(labels);
        return p;
    }

    friend bool operator==(const Poset& a, const Poset& b)
    {
        return a.n_ == b.n_ && a.leq_ == b.leq_;
    }

    friend bool operator<(const Poset& a, const Poset& b)
    {
        if (a.n_ != b.n_)
            return a.n_ < b.n_;
        return a.leq_ < b.leq_;
    }

private:
    void close()
    {
        const std::size_t n = n_;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) {
                if (!leq_[i * n + k])
                    continue;
                for (std::size_t j = 0; j < n; ++j)
                    if (leq_[k * n + j])
                        leq_[i * n + j] = 1;
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (leq_[i * n + j] && leq_[j * n + i])
                    throw CycleError("points " + std::to_string(i) + " and " + std::to_string(j) +
                                     " lie on a cycle");
    }

    std::size_t n_ = 0;
    std::vector<std::uint8_t> leq_;
    std::vector<std::string> labels_;
};

inline Poset chain(std::size_t n)
{
    std::vector<Poset::Relation> rel;
    for (std::size_t i = 0; i + 1 < n; ++i)
        rel.emplace_back(i, i + 1);
    return Poset::from_relations(n, rel);
}

inline Poset antichain(std::size_t n) { return Poset(n); }

// ---------------------------------------------------------------------------
// Literal format: "<n>; i<j, k<l, ..."

namespace detail {

class LiteralScanner {
public:
    explicit LiteralScanner(std::string_view s) : s_(s) {}

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }
    bool done()
    {
        skip_ws();
        return pos_ >= s_.size();
    }
    bool accept(char c)
    {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c)
    {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }
    std::size_t number()
    {
        skip_ws();
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
        if (ec != std::errc{})
            fail("expected a non-negative integer");
        pos_ = static_cast<std::size_t>(ptr - s_.data());
        return v;
    }
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError("poset literal '" + std::string(s_) + "': " + what + " at offset " +
                         std::to_string(pos_));
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses "<n>; i<j, ..." into the closure of the listed relations.
inline Poset parse_poset(std::string_view text)
{
    detail::LiteralScanner sc(text);
    const std::size_t n = sc.number();
    sc.expect(';');
    std::vector<Poset::Relation> rel;
    if (!sc.done()) {
        do {
            std::size_t i = sc.number();
            sc.expect('<');
            std::size_t j = sc.number();
            rel.emplace_back(i, j);
        } while (sc.accept(','));
        if (!sc.done())
            sc.fail("unexpected trailing input");
    }
    return Poset::from_relations(n, rel);
}

/// Hasse-diagram literal; parse_poset(format_poset(p)) == p.
inline std::string format_poset(const Poset& p)
{
    std::string out = std::to_string(p.size()) + ";";
    bool first = true;
    for (auto [i, j] : p.covers()) {
        out += first ? " " : ", ";
        out += std::to_string(i) + "<" + std::to_string(j);
        first = false;
    }
    return out;
}

/// Point i of `p` becomes point sigma[i] of the result.
inline Poset relabel(const Poset& p, std::span<const std::size_t> sigma)
{
    const std::size_t n = p.size();
    if (sigma.size() != n)
        throw ArityError("relabeling must have one entry per point");
    std::vector<std::uint8_t> seen(n, 0);
    for (auto s : sigma) {
        if (s >= n || seen[s])
            throw IndexError("relabeling is not a permutation");
        seen[s] = 1;
    }
    std::vector<std::uint8_t> m(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m[sigma[i] * n + sigma[j]] = p.matrix()[i * n + j];
    return Poset::from_matrix(n, m);
}

// ---------------------------------------------------------------------------
// Linear extensions

/// A total order compatible with a poset; perm[k] is the k-th smallest point.
struct LinearExtension {
    std::vector<std::size_t> perm;

    std::vector<std::size_t> positions() const
    {
        std::vector<std::size_t> pos(perm.size());
        for (std::size_t k = 0; k < perm.size(); ++k)
            pos[perm[k]] = k;
        return pos;
    }

    friend bool operator==(const LinearExtension&, const LinearExtension&) = default;
    friend auto operator<=>(const LinearExtension&, const LinearExtension&) = default;
};

inline bool is_linear_extension(const Poset& p, const LinearExtension& ext)
{
    const std::size_t n = p.size();
    if (ext.perm.size() != n)
        return false;
    std::vector<std::size_t> pos(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (ext.perm[k] >= n || pos[ext.perm[k]] != n)
            return false;
        pos[ext.perm[k]] = k;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (p.leq(i, j) && pos[i] > pos[j])
                return false;
    return true;
}

/// The lexicographically first linear extension (smallest available point first).
inline LinearExtension first_linear_extension(const Poset& p)
{
    const std::size_t n = p.size();
    LinearExtension ext;
    std::vector<std::uint8_t> placed(n, 0);
    while (ext.perm.size() < n) {
        for (std::size_t i = 0; i < n; ++i) {
            if (placed[i])
                continue;
            bool ready = true;
            for (std::size_t j = 0; j < n && ready; ++j)
                if (!placed[j] && p.less(j, i))
                    ready = false;
            if (ready) {
                placed[i] = 1;
                ext.perm.push_back(i);
                break;
            }
        }
    }
    return ext;
}

/// All linear extensions, in lexicographic order of `perm`.
inline std::vector<LinearExtension> linear_extensions(const Poset& p)
{
    const std::size_t n = p.size();
    std::vector<LinearExtension> out;
    std::vector<std::size_t> perm;
    std::vector<std::size_t> missing_below(n, 0);
    std::vector<std::uint8_t> placed(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (p.less(j, i))
                ++missing_below[i];

    auto rec = [&](auto&& self) -> void {
        if (perm.size() == n) {
            out.push_back(LinearExtension{perm});
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (placed[i] || missing_below[i] != 0)
                continue;
            placed[i] = 1;
            perm.push_back(i);
            for (std::size_t j = 0; j < n; ++j)
                if (p.less(i, j))
                    --missing_below[j];
            self(self);
            for (std::size_t j = 0; j < n; ++j)
                if (p.less(i, j))
                    ++missing_below[j];
            perm.pop_back();
            placed[i] = 0;
        }
    };
    rec(rec);
    return out;
}

/// e(P). Counts by dynamic programming over down-sets, never listing extensions.
inline std::uint64_t count_linear_extensions(const Poset& p)
{
    const std::size_t n = p.size();
    if (n > 64)
        throw SizeError("count_linear_extensions supports at most 64 points");
    if (n == 0)
        return 1;
    std::vector<std::uint64_t> below(n);
    for (std::size_t i = 0; i < n; ++i)
        below[i] = p.strict_down_mask(i);
    const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;

    // memo[D] = number of ways to linearly order the complement of down-set D.
    std::unordered_map<std::uint64_t, std::uint64_t> memo;
    auto rec = [&](auto&& self, std::uint64_t done) -> std::uint64_t {
        if (done == full)
            return 1;
        if (auto it = memo.find(done); it != memo.end())
            return it->second;
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t bit = std::uint64_t{1} << i;
            if ((done & bit) || (below[i] & ~done))
                continue;
            const std::uint64_t sub = self(self, done | bit);
            if (__builtin_add_overflow(total, sub, &total))
                throw OverflowError("linear extension count exceeds 64 bits");
        }
        memo.emplace(done, total);
        return total;
    };
    return rec(rec, 0);
}

// ---------------------------------------------------------------------------
// Operad of posets

/**
 * Lexicographic sum P(Q_1, ..., Q_n).
 *
 * Block i occupies the consecutive points [offset_i, offset_i + |Q_i|) in input
 * order. x < y iff both lie in block i with x <_{Q_i} y, or x lies in block i,
 * y in block j and i <_P j.
 */
inline Poset lex_sum(const Poset& outer, std::span<const Poset> inner)
{
    if (inner.size() != outer.size())
        throw ArityError("lex_sum: outer poset has " + std::to_string(outer.size()) +
                         " points but " + std::to_string(inner.size()) + " inputs were given");
    std::vector<std::size_t> block, local;
    for (std::size_t b = 0; b < inner.size(); ++b)
        for (std::size_t k = 0; k < inner[b].size(); ++k) {
            block.push_back(b);
            local.push_back(k);
        }
    const std::size_t n = block.size();
    std::vector<std::uint8_t> m(n * n, 0);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            const bool same = block[x] == block[y];
            m[x * n + y] = same ? inner[block[x]].leq(local[x], local[y])
                                : outer.less(block[x], block[y]);
        }
    return Poset::from_matrix(n, m);
}

/// Unit of the operad.
inline Poset point() { return Poset(1); }

// ---------------------------------------------------------------------------
// Isomorphism classes

inline constexpr std::size_t kMaxCanonicalPoints = 10;

/// Relabeling of `p` whose row-major relation matrix is lexicographically
/// smallest. Two posets are isomorphic iff their canonical forms are equal.
inline Poset canonical_form(const Poset& p)
{
    const std::size_t n = p.size();
    if (n > kMaxCanonicalPoints)
        throw SizeError("canonical_form supports at most " + std::to_string(kMaxCanonicalPoints) +
                        " points");
    const auto& src = p.matrix();
    // tau[a] = old point placed at new position a.
    std::vector<std::size_t> tau(n);
    std::iota(tau.begin(), tau.end(), 0);
    std::vector<std::uint8_t> best = src;
    do {
        // Compare lazily; stop at the first differing entry.
        int cmp = 0;
        for (std::size_t a = 0; a < n && cmp == 0; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const std::uint8_t v = src[tau[a] * n + tau[b]];
                const std::uint8_t w = best[a * n + b];
                if (v != w) {
                    cmp = v < w ? -1 : 1;
                    break;
                }
            }
        if (cmp < 0)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    best[a * n + b] = src[tau[a] * n + tau[b]];
    } while (std::next_permutation(tau.begin(), tau.end()));
    return Poset::from_matrix(n, best);
}

inline bool isomorphic(const Poset& a, const Poset& b)
{
    return a.size() == b.size() && a.relation_count() == b.relation_count() &&
           canonical_form(a) == canonical_form(b);
}

inline constexpr std::size_t kMaxEnumeratedPoints = 6;

/// All posets on n points up to isomorphism, as canonical forms sorted by
/// their relation matrices.
inline std::vector<Poset> enumerate_posets(std::size_t n)
{
    if (n > kMaxEnumeratedPoints)
        throw SizeError("enumerate_posets supports at most " +
                        std::to_string(kMaxEnumeratedPoints) + " points");
    std::vector<Poset> level{Poset(0)};
    for (std::size_t m = 1; m <= n; ++m) {
        // Every poset arises from a smaller one by adding a maximal point
        // above some down-set.
        std::set<Poset> next;
        for (const Poset& q : level) {
            const std::size_t k = q.size();
            std::vector<std::uint64_t> below(k);
            for (std::size_t i = 0; i < k; ++i)
                below[i] = q.strict_down_mask(i);
            for (std::uint64_t down = 0; down < (std::uint64_t{1} << k); ++down) {
                bool closed = true;
                for (std::size_t i = 0; i < k && closed; ++i)
                    if ((down >> i & 1) && (below[i] & ~down))
                        closed = false;
                if (!closed)
                    continue;
                std::vector<std::uint8_t> mat(m * m, 0);
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j)
                        mat[i * m + j] = q.leq(i, j);
                for (std::size_t i = 0; i < k; ++i)
                    mat[i * m + k] = (down >> i) & 1;
                mat[k * m + k] = 1;
                next.insert(canonical_form(Poset::from_matrix(m, mat)));
            }
        }
        level.assign(next.begin(), next.end());
    }
    return level;
}

} // namespace posetnn
