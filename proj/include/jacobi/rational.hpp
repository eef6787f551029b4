#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jacobi {

/// Exact rational number used for all exponent arithmetic. Criterion
/// verdicts hinge on strict inequalities between exponents, so exponents are
/// never represented as floating point.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Parses "p", "p/q" or a plain decimal like "4.25" into an exact rational.
inline Rational parse_rational(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    const std::string str(s);
    if (auto slash = str.find('/'); slash != std::string::npos) {
        const std::int64_t num = std::stoll(str.substr(0, slash));
        const std::int64_t den = std::stoll(str.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rational with zero denominator: " + str);
        return {num, den};
    }
    if (auto dot = str.find('.'); dot != std::string::npos) {
        const std::string whole = str.substr(0, dot);
        const std::string frac = str.substr(dot + 1);
        if (frac.size() > 15) throw std::invalid_argument("decimal literal too long: " + str);
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        std::int64_t num = std::stoll(whole.empty() || whole == "-" ? whole + "0" : whole);
        const bool neg = !whole.empty() && whole[0] == '-';
        std::int64_t fnum = frac.empty() ? 0 : std::stoll(frac);
        num = num * den + (neg ? -fnum : fnum);
        return {num, den};
    }
    return {std::stoll(str), 1};
}

}  // namespace jacobi
