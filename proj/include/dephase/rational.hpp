#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

#include "dephase/errors.hpp"

namespace dephase {

/// Exact rational number, normalized (den > 0, gcd(num, den) = 1).
///
/// Revival and recurrence logic rests on exact commensurability of coupling
/// frequencies and integrality of exponents, which floating point cannot
/// express. All dynamics are still evaluated in double via value().
struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational of(long long n, long long d) {
        if (d == 0) throw PreconditionError("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        const long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        return Rational{n, d};
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
    bool is_zero() const { return num == 0; }
    bool is_positive() const { return num > 0; }
    Rational abs() const { return Rational{num < 0 ? -num : num, den}; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }

    /// a / b as an exact rational.
    static Rational divide(const Rational& a, const Rational& b) {
        if (b.num == 0) throw PreconditionError("rational division by zero");
        return of(a.num * b.den, a.den * b.num);
    }

    static Rational multiply(const Rational& a, const Rational& b) {
        return of(a.num * b.num, a.den * b.den);
    }

    /// Parses "p/q" or "p". Returns nullopt on malformed input.
    static std::optional<Rational> parse(std::string_view text) {
        auto parse_ll = [](std::string_view s, long long& out) -> bool {
            if (s.empty()) return false;
            errno = 0;
            char* end = nullptr;
            const std::string buf(s);
            const long long v = std::strtoll(buf.c_str(), &end, 10);
            if (errno != 0 || end != buf.c_str() + buf.size()) return false;
            out = v;
            return true;
        };
        const auto slash = text.find('/');
        long long n = 0, d = 1;
        if (slash == std::string_view::npos) {
            if (!parse_ll(text, n)) return std::nullopt;
        } else {
            if (!parse_ll(text.substr(0, slash), n)) return std::nullopt;
            if (!parse_ll(text.substr(slash + 1), d)) return std::nullopt;
            if (d == 0) return std::nullopt;
        }
        return of(n, d);
    }

    std::string str() const {
        return den == 1 ? std::to_string(num)
                        : std::to_string(num) + "/" + std::to_string(den);
    }

    /// Finds a small rational whose real value IS the double v.
    ///
    /// Every double is dyadic, so v is exactly p/2^k; the fraction is
    /// accepted only when the reduced denominator stays small. 0.5, 2 and
    /// -3/4 are recovered; 0.1 and sqrt(2) are rejected (their doubles are
    /// p/2^55-scale fractions, not the decimals they print as). Rejected
    /// values stay float-only and get no commensurability analysis unless
    /// the caller annotates them explicitly.
    static std::optional<Rational> from_double_exact(double v, long long max_den = 1'000'000) {
        if (!std::isfinite(v)) return std::nullopt;
        if (v == 0.0) return Rational{0, 1};
        int exp2 = 0;
        const double mant = std::frexp(v, &exp2);         // v = mant * 2^exp2
        const double scaled = std::ldexp(mant, 53);       // integer magnitude < 2^53
        long long num = static_cast<long long>(scaled);
        if (static_cast<double>(num) != scaled) return std::nullopt;
        long long k = 53 - exp2;                          // v = num / 2^k
        while (k > 0 && num % 2 == 0) {
            num /= 2;
            --k;
        }
        if (k < 0) {  // large even integer
            if (-k > 9) return std::nullopt;
            return of(num << -k, 1);
        }
        if (k > 62) return std::nullopt;
        const long long den = 1LL << k;
        if (den > max_den) return std::nullopt;
        return of(num, den);
    }
};

/// Largest rational L such that a/L and b/L are integers.
inline Rational rational_gcd(const Rational& a, const Rational& b) {
    if (a.num == 0) return b.abs();
    if (b.num == 0) return a.abs();
    const long long an = a.num < 0 ? -a.num : a.num;
    const long long bn = b.num < 0 ? -b.num : b.num;
    const long long n = std::gcd(an, bn);
    const long long d = std::lcm(a.den, b.den);
    return Rational::of(n, d);
}

}  // namespace dephase
