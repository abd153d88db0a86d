#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "cyclerep/errors.hpp"

namespace cyclerep {

// Expression templates off: values are stored and copied freely, and `auto`
// must never bind to a lazy expression.
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;

inline BigInt numerator_of(const Rat& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rat& r) { return boost::multiprecision::denominator(r); }

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw InvalidParameter("zero denominator");
    return Rat(BigInt(num), BigInt(den));
}

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

/// Canonical "num/den" text; integers keep the "/1" suffix.
inline std::string to_string(const Rat& r) {
    return numerator_of(r).str() + "/" + denominator_of(r).str();
}

namespace detail {

inline bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

inline BigInt parse_integer(std::string_view s) {
    if (!is_integer_literal(s)) throw ParseError("not an integer literal: '" + std::string(s) + "'");
    if (s[0] == '+') s.remove_prefix(1);
    return BigInt(std::string(s));
}

} // namespace detail

/// Parses "num/den" or a bare integer. The result is canonical.
inline Rat parse_rat(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rat(detail::parse_integer(s));
    BigInt num = detail::parse_integer(s.substr(0, slash));
    auto den_text = s.substr(slash + 1);
    if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+'))
        throw ParseError("denominator must be an unsigned integer: '" + std::string(s) + "'");
    BigInt den = detail::parse_integer(den_text);
    if (den == 0) throw ParseError("zero denominator: '" + std::string(s) + "'");
    return Rat(num, den);
}

/// Accepts "num/den", an integer, or a plain decimal such as "0.3" (read
/// exactly as 3/10). Used for command-line rationals.
inline Rat parse_rat_or_decimal(std::string_view s) {
    auto dot = s.find('.');
    if (dot == std::string_view::npos) return parse_rat(s);
    std::string digits(s.substr(0, dot));
    std::string frac(s.substr(dot + 1));
    bool negative = !digits.empty() && digits[0] == '-';
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) digits.erase(0, 1);
    if (digits.empty()) digits = "0";
    if (frac.empty() || !detail::is_integer_literal(digits) || !detail::is_integer_literal(frac) ||
        frac[0] == '-' || frac[0] == '+')
        throw ParseError("malformed decimal: '" + std::string(s) + "'");
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    BigInt num = BigInt(digits) * scale + BigInt(frac);
    if (negative) num = -num;
    return Rat(num, scale);
}

} // namespace cyclerep
