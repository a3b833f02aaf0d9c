#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stv {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational vote quantity. All tallies, ballot values and transfer
/// values are kept as arbitrary-precision rationals so that counts never
/// drift; decimal rounding is applied only where a counting rule asks for it.
using VoteValue = boost::multiprecision::cpp_rational;

inline BigInt vv_floor(const VoteValue& v) {
    BigInt q = numerator(v) / denominator(v);  // truncates toward zero
    if (v < 0 && q * denominator(v) != numerator(v)) --q;
    return q;
}

inline BigInt vv_ceil(const VoteValue& v) { return -vv_floor(VoteValue(-v)); }

/// Smallest whole number of ballots >= v, clamped at zero.
inline std::int64_t ceil_ballots(const VoteValue& v) {
    if (v <= 0) return 0;
    return vv_ceil(v).convert_to<std::int64_t>();
}

inline VoteValue positive_part(const VoteValue& v) { return v > 0 ? v : VoteValue(0); }

/// Truncate toward zero to `digits` decimal places.
inline VoteValue truncate_decimals(const VoteValue& v, int digits) {
    if (digits < 0) throw std::invalid_argument("truncate_decimals: negative digit count");
    BigInt scale = pow(BigInt(10), static_cast<unsigned>(digits));
    VoteValue scaled = v * VoteValue(scale);
    BigInt t = numerator(scaled) / denominator(scaled);  // toward zero
    return VoteValue(t, scale);
}

/// Fixed-point decimal rendering, round half away from zero.
inline std::string decimal_string(const VoteValue& v, int digits, bool trim = false) {
    if (digits < 0) digits = 0;
    bool neg = v < 0;
    BigInt n = neg ? BigInt(-numerator(v)) : numerator(v);
    BigInt d = denominator(v);
    BigInt scale = pow(BigInt(10), static_cast<unsigned>(digits));
    BigInt q = (n * scale) / d;
    BigInt r = (n * scale) % d;
    if (2 * r >= d) ++q;
    std::string digits_str = q.str();
    std::string out;
    if (digits == 0) {
        out = digits_str;
    } else {
        if (static_cast<int>(digits_str.size()) <= digits)
            digits_str.insert(0, digits + 1 - digits_str.size(), '0');
        out = digits_str.substr(0, digits_str.size() - digits) + "." +
              digits_str.substr(digits_str.size() - digits);
        if (trim) {
            while (out.back() == '0') out.pop_back();
            if (out.back() == '.') out.pop_back();
        }
    }
    if (neg && out != "0") out.insert(out.begin(), '-');
    return out;
}

/// Transfer-value rounding rule. Negative digit count means exact
/// arithmetic; otherwise transfer values are truncated toward zero to the
/// given number of decimal places before being applied, which is how most
/// jurisdictions publish their counts.
struct Rounding {
    int transfer_decimals = -1;

    bool exact() const { return transfer_decimals < 0; }
    VoteValue apply(const VoteValue& tv) const {
        return exact() ? tv : truncate_decimals(tv, transfer_decimals);
    }
};

}  // namespace stv
