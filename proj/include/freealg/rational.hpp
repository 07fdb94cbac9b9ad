#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace freealg {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Exact binary value of a finite double.
inline Rational rational_from_double(double v) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite value cannot be made rational");
    return Rational(v);
}

// Continued-fraction approximation with bounded denominator.
inline Rational rational_approx(double v, long max_den = 1000000, double tol = 1e-12) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite value cannot be made rational");
    long sign = v < 0 ? -1 : 1;
    double x = std::fabs(v);
    mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double rest = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(rest);
        mpz_class ai(a);
        mpz_class h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        double approx = h1.get_d() / k1.get_d();
        if (std::fabs(approx - x) <= tol * std::max(1.0, x)) break;
        double frac = rest - a;
        if (frac <= 0) break;
        rest = 1.0 / frac;
    }
    Rational r(h1 * sign, k1);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (dot != std::string::npos && slash == std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        std::string digits = ip + fp;
        if (digits.empty() || digits == "-") throw std::invalid_argument("bad decimal literal: " + s);
        mpz_class num(digits.empty() ? "0" : digits, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

}  // namespace freealg
