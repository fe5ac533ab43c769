#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "posetnn/error.hpp"

namespace posetnn {

using Rational = mpq_class;
using RationalPoint = std::vector<Rational>;

inline Rational make_rational(std::int64_t v)
{
    Rational r;
    r = static_cast<long>(v);
    return r;
}

// Accepts "3", "-7/2", " 1/4 ". Result is canonicalized.
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    if (b == std::string::npos)
        throw ParseError("empty rational literal");
    s = s.substr(b, e - b + 1);
    if (!s.empty() && s.front() == '+')
        s.erase(0, 1);
    Rational r;
    if (s.empty() || r.set_str(s, 10) != 0)
        throw ParseError("invalid rational literal '" + std::string(text) + "'");
    if (r.get_den() == 0)
        throw ParseError("zero denominator in '" + std::string(text) + "'");
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r)
{
    return r.get_str();
}

inline bool is_integer(const Rational& r)
{
    return r.get_den() == 1;
}

inline std::int64_t to_int64(const Rational& r)
{
    if (!is_integer(r) || !r.get_num().fits_slong_p())
        throw OverflowError("rational " + r.get_str() + " is not a 64-bit integer");
    return r.get_num().get_si();
}

template <class Int>
RationalPoint to_rational_point(const std::vector<Int>& p)
{
    RationalPoint out;
    out.reserve(p.size());
    for (auto v : p)
        out.push_back(make_rational(static_cast<std::int64_t>(v)));
    return out;
}

} // namespace posetnn
