#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <sstream>
#include <string>

#include "detkit/errors.hpp"

namespace detkit {

// Exact rational scalar used by the exact-arithmetic instantiations.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& x) { return x.template convert_to<double>(); }
inline double to_double(double x) { return x; }

// Parses "a/b", "a", or a plain decimal literal ("0.25", "-1.5e2") into an
// exact rational.  Decimal literals are taken at face value (0.2 -> 1/5),
// not as the nearest binary double.
inline Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw input_error("empty rational literal");

    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        try {
            BigInt num(s.substr(0, slash));
            BigInt den(s.substr(slash + 1));
            if (den == 0) throw input_error("rational with zero denominator: " + text);
            return Rational(num, den);
        } catch (const std::exception&) {
            throw input_error("unparsable rational: " + text);
        }
    }

    // Decimal / scientific literal.
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = (s[i++] == '-');
    std::string digits;
    long long frac_digits = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
        if (s[i] == '.') {
            if (seen_dot) throw input_error("unparsable rational: " + text);
            seen_dot = true;
        } else {
            digits.push_back(s[i]);
            seen_digit = true;
            if (seen_dot) ++frac_digits;
        }
    }
    long long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        try {
            std::size_t used = 0;
            exp10 = std::stoll(s.substr(i + 1), &used);
            if (used != s.size() - i - 1) throw input_error("unparsable rational: " + text);
        } catch (const std::exception&) {
            throw input_error("unparsable rational: " + text);
        }
        i = s.size();
    }
    if (!seen_digit || i != s.size()) throw input_error("unparsable rational: " + text);

    BigInt num(digits.empty() ? "0" : digits);
    if (neg) num = -num;
    const long long shift = exp10 - frac_digits;
    BigInt pow10 = 1;
    for (long long k = 0; k < (shift < 0 ? -shift : shift); ++k) pow10 *= 10;
    return shift >= 0 ? Rational(num * pow10) : Rational(num, pow10);
}

inline std::string to_string(const Rational& x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

// Formats a double with 15 significant digits, the precision used everywhere
// a decimal companion value is printed next to an exact rational.
inline std::string format_double(double x) {
    std::ostringstream os;
    os.precision(15);
    os << x;
    return os.str();
}

}  // namespace detkit
