#ifndef MVHG_SPECIALFUN_HPP
#define MVHG_SPECIALFUN_HPP

#include <cmath>
#include <limits>
#include <sstream>

#include "mvhg/common.hpp"
#include "mvhg/partitions.hpp"

namespace mvhg {

// A signed value carried as (sign, log magnitude). Gamma_m and beta_m
// overflow double range quickly for m >= 4, so all constants are combined
// in this representation and exponentiated only at the outermost boundary.
struct LogValue {
    double log_magnitude = -std::numeric_limits<double>::infinity();
    int sign = 0;  // -1, 0, +1; sign == 0 iff the value is exactly zero

    static LogValue zero() { return LogValue{}; }
    static LogValue one() { return LogValue{0.0, +1}; }

    static LogValue from_log(double lm, int s = +1) {
        if (s == 0) return zero();
        return LogValue{lm, s > 0 ? +1 : -1};
    }

    static LogValue from_value(double v) {
        if (v == 0.0) return zero();
        return LogValue{std::log(std::fabs(v)), v > 0 ? +1 : -1};
    }

    double value() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_magnitude);
    }

    bool is_zero() const { return sign == 0; }

    friend LogValue operator*(const LogValue& a, const LogValue& b) {
        if (a.sign == 0 || b.sign == 0) return zero();
        return LogValue{a.log_magnitude + b.log_magnitude, a.sign * b.sign};
    }
    friend LogValue operator/(const LogValue& a, const LogValue& b) {
        if (b.sign == 0) throw DomainError("LogValue: division by zero");
        if (a.sign == 0) return zero();
        return LogValue{a.log_magnitude - b.log_magnitude, a.sign * b.sign};
    }
    LogValue& operator*=(const LogValue& b) { return *this = *this * b; }
    LogValue& operator/=(const LogValue& b) { return *this = *this / b; }

    LogValue pow(double e) const {
        if (sign == 0) return zero();
        if (sign < 0)
            throw DomainError("LogValue::pow: negative base with real exponent");
        return LogValue{log_magnitude * e, +1};
    }
};

namespace detail {
inline std::string bound_message(const char* fn, const char* param, double value,
                                 const char* bound_desc, double bound) {
    std::ostringstream os;
    os << fn << ": parameter " << param << " = " << value
       << " violates the bound " << param << " > " << bound_desc
       << " (= " << bound << ")";
    return os.str();
}
}  // namespace detail

// Scalar rising factorial (x)_n = x (x+1) ... (x+n-1), (x)_0 = 1.
// Iterated multiplication keeps integer-like factors exact and gets the
// sign right at and below poles, which gamma ratios mishandle.
inline double rising_factorial(double x, int n) {
    if (n < 0) throw DomainError("rising_factorial: n must be >= 0");
    if (n <= 30) {
        double r = 1.0;
        for (int i = 0; i < n; ++i) r *= (x + i);
        return r;
    }
    // Large n: gamma ratio when safely positive, otherwise keep multiplying.
    if (x > 0.0) {
        double lg = std::lgamma(x + n) - std::lgamma(x);
        if (lg < 700.0) return std::exp(lg);
    }
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= (x + i);
    return r;
}

// Generalized Pochhammer symbol (a)_kappa = prod_i (a - (i-1)/2)_{k_i}.
// May be zero or negative; no domain restriction.
inline double gen_pochhammer(int m, double a, const Partition& kappa) {
    if (kappa.size() > m)
        throw DomainError("gen_pochhammer: kappa has more than m parts");
    double r = 1.0;
    for (int i = 1; i <= kappa.size(); ++i)
        r *= rising_factorial(a - 0.5 * (i - 1), kappa.part(i));
    return r;
}

// Same product in (sign, log) form, exact zero preserved. Used by the
// series evaluator where magnitudes can be extreme.
inline LogValue gen_pochhammer_ln(int m, double a, const Partition& kappa) {
    if (kappa.size() > m)
        throw DomainError("gen_pochhammer_ln: kappa has more than m parts");
    LogValue r = LogValue::one();
    for (int i = 1; i <= kappa.size(); ++i) {
        double x = a - 0.5 * (i - 1);
        for (int j = 0; j < kappa.part(i); ++j) {
            double f = x + j;
            if (f == 0.0) return LogValue::zero();
            r *= LogValue::from_value(f);
        }
    }
    return r;
}

// log Gamma_m[a] = log( pi^{m(m-1)/4} prod_i Gamma[a - (i-1)/2] ),
// valid for a > (m-1)/2.
inline LogValue mv_gamma_ln(int m, double a) {
    if (m < 1) throw DomainError("mv_gamma_ln: m must be >= 1");
    double bound = 0.5 * (m - 1);
    if (!(a > bound))
        throw DomainError(detail::bound_message("mv_gamma_ln", "a", a, "(m-1)/2", bound));
    double lg = 0.25 * m * (m - 1) * std::log(M_PI);
    for (int i = 1; i <= m; ++i) lg += std::lgamma(a - 0.5 * (i - 1));
    return LogValue::from_log(lg, +1);
}

// log |Gamma_m[a, +kappa]| = log( (a)_kappa Gamma_m[a] ) for negate = false;
// log |Gamma_m[a, -kappa]| = log( pi^{m(m-1)/4} prod_i Gamma[a - k_{m+1-i} - (i-1)/2] )
// for negate = true, which also equals (-1)^k Gamma_m[a] / (-a + (m+1)/2)_kappa.
inline LogValue mv_gamma_partition_ln(int m, double a, const Partition& kappa,
                                      bool negate) {
    if (m < 1) throw DomainError("mv_gamma_partition_ln: m must be >= 1");
    if (kappa.size() > m)
        throw DomainError("mv_gamma_partition_ln: kappa has more than m parts");
    double bound = 0.5 * (m - 1) + (negate ? kappa.first() : 0.0);
    if (!(a > bound))
        throw DomainError(detail::bound_message(
            "mv_gamma_partition_ln", "a", a,
            negate ? "(m-1)/2 + k1" : "(m-1)/2", bound));
    if (!negate) {
        LogValue p = gen_pochhammer_ln(m, a, kappa);
        return p * mv_gamma_ln(m, a);
    }
    double lg = 0.25 * m * (m - 1) * std::log(M_PI);
    for (int i = 1; i <= m; ++i) {
        double arg = a - kappa.part(m + 1 - i) - 0.5 * (i - 1);
        if (arg <= 0.0 && arg == std::floor(arg))
            throw PoleError("mv_gamma_partition_ln: gamma argument is a non-positive integer");
        lg += std::lgamma(arg);
    }
    return LogValue::from_log(lg, +1);
}

// log beta_m[a, b] = log( Gamma_m[a] Gamma_m[b] / Gamma_m[a+b] ),
// a, b > (m-1)/2.
inline LogValue mv_beta_ln(int m, double a, double b) {
    double bound = 0.5 * (m - 1);
    if (!(a > bound))
        throw DomainError(detail::bound_message("mv_beta_ln", "a", a, "(m-1)/2", bound));
    if (!(b > bound))
        throw DomainError(detail::bound_message("mv_beta_ln", "b", b, "(m-1)/2", bound));
    return mv_gamma_ln(m, a) * mv_gamma_ln(m, b) / mv_gamma_ln(m, a + b);
}

}  // namespace mvhg

#endif
