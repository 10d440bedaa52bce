#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace shdimer {

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

// Parse "p", "p/q" or a plain decimal like "0.25" into an exact rational.
inline Rat parse_rat(const std::string& raw) {
    auto b = raw.find_first_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty rational");
    std::string s = raw.substr(b, raw.find_last_not_of(" \t") - b + 1);
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int p(s.substr(0, slash));
        Int q(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("rational with zero denominator: " + s);
        return Rat(p, q);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        bool neg = false;
        if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
            neg = digits[0] == '-';
            digits = digits.substr(1);
        }
        if (digits.empty()) throw std::invalid_argument("bad rational: " + s);
        Int p(digits);
        Int q = 1;
        for (size_t i = dot + 1; i < s.size(); ++i) q *= 10;
        Rat r(p, q);
        return neg ? -r : r;
    }
    return Rat(Int(s));
}

inline std::string rat_to_string(const Rat& r) {
    std::string num = numerator(r).str();
    if (denominator(r) == 1) return num;
    return num + "/" + denominator(r).str();
}

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

} // namespace shdimer
