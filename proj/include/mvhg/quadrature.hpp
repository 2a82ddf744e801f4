#ifndef MVHG_QUADRATURE_HPP
#define MVHG_QUADRATURE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "mvhg/common.hpp"

namespace mvhg {
namespace quad {

// Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline const GaussRule& gauss_legendre(int n) {
    static std::vector<GaussRule> cache(65);
    GaussRule& rule = cache.at(static_cast<std::size_t>(n));
    if (!rule.nodes.empty()) return rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

using Fn = std::function<double(double)>;

namespace detail {

inline double apply_rule(const Fn& f, double a, double b, const GaussRule& rule,
                         std::int64_t& evals) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
        ++evals;
    }
    return half * sum;
}

struct Segment {
    double a, b, value, error;
};

}  // namespace detail

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_segments = 4000;
};

// Globally adaptive bisection: the segment with the largest error estimate
// (GL24 vs GL12 difference) is split until the summed error meets the
// tolerance.
inline double integrate_finite(const Fn& f, double a, double b, const Options& opt,
                               std::int64_t* eval_count = nullptr) {
    std::int64_t evals = 0;
    const GaussRule& lo = gauss_legendre(12);
    const GaussRule& hi = gauss_legendre(24);
    auto estimate = [&](double x0, double x1) {
        double v = detail::apply_rule(f, x0, x1, hi, evals);
        double w = detail::apply_rule(f, x0, x1, lo, evals);
        return detail::Segment{x0, x1, v, std::fabs(v - w)};
    };
    std::vector<detail::Segment> segs{estimate(a, b)};
    for (;;) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        double target = std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
        if (err <= target) {
            if (eval_count) *eval_count += evals;
            return total;
        }
        if (static_cast<int>(segs.size()) >= opt.max_segments)
            throw OracleError("integrate_finite: segment budget exhausted (error " +
                              std::to_string(err) + ", target " + std::to_string(target) + ")");
        detail::Segment s = segs[worst];
        double mid = 0.5 * (s.a + s.b);
        segs[worst] = estimate(s.a, mid);
        segs.push_back(estimate(mid, s.b));
    }
}

// (0, inf) with the tail map y = t / (1 - t).
inline double integrate_semi_infinite(const Fn& f, const Options& opt,
                                      std::int64_t* eval_count = nullptr) {
    auto g = [&f](double t) {
        double om = 1.0 - t;
        double y = t / om;
        return f(y) / (om * om);
    };
    return integrate_finite(g, 0.0, 1.0, opt, eval_count);
}

// (-inf, inf), split at zero into two mapped halves.
inline double integrate_real_line(const Fn& f, const Options& opt,
                                  std::int64_t* eval_count = nullptr) {
    auto fp = [&f](double y) { return f(y); };
    auto fm = [&f](double y) { return f(-y); };
    return integrate_semi_infinite(fp, opt, eval_count) +
           integrate_semi_infinite(fm, opt, eval_count);
}

}  // namespace quad
}  // namespace mvhg

#endif
