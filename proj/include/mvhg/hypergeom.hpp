#ifndef MVHG_HYPERGEOM_HPP
#define MVHG_HYPERGEOM_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvhg/common.hpp"
#include "mvhg/matrixops.hpp"
#include "mvhg/specialfun.hpp"
#include "mvhg/zonal.hpp"

namespace mvhg {

// Truncation policy for the zonal series. The early-stopping rule requires
// three consecutive sub-tolerance degree contributions because zonal series
// terms are non-monotone across degrees; single-term tests under-truncate.
struct TruncationPolicy {
    int max_degree = 30;
    double tail_tol = 1e-10;
    double growth_guard = 10.0;   // max permitted growth ratio of successive degree sums
    int table_ceiling = 40;
    bool allow_asymptotic = false;  // smallest-term truncation for zero-radius series

    void validate() const {
        if (max_degree < 0) throw DomainError("TruncationPolicy: max_degree must be >= 0");
        if (!(tail_tol > 0)) throw DomainError("TruncationPolicy: tail_tol must be > 0");
    }
};

struct HypergeomSpec {
    std::vector<double> upper;  // a_1..a_p
    std::vector<double> lower;  // b_1..b_q
    TruncationPolicy truncation{};

    int p() const { return static_cast<int>(upper.size()); }
    int q() const { return static_cast<int>(lower.size()); }
};

enum class SeriesTermination {
    converged,     // three consecutive sub-tolerance degrees
    terminated,    // a numerator parameter made every further term vanish
    max_degree,    // ran out of degrees without meeting the tolerance
    asymptotic,    // zero-radius series truncated at its smallest degree term
};

inline const char* to_string(SeriesTermination t) {
    switch (t) {
        case SeriesTermination::converged: return "converged";
        case SeriesTermination::terminated: return "terminated";
        case SeriesTermination::max_degree: return "max_degree";
        case SeriesTermination::asymptotic: return "asymptotic";
    }
    return "?";
}

struct ConvergenceReport {
    SeriesTermination reason = SeriesTermination::converged;
    int degrees_used = 0;
    double last_degree_magnitude = 0.0;
    bool converged() const {
        return reason == SeriesTermination::converged ||
               reason == SeriesTermination::terminated;
    }
};

struct HypergeomResult {
    double value = 0.0;
    ConvergenceReport report{};
};

namespace detail {

// Neumaier compensated accumulator: thousands of signed series terms.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Rising-factorial product with a termination snap: factors within snap_tol
// of zero are taken as exact zeros, so parameters within 1e-9 of the
// negative-integer grid terminate the series cleanly.
inline LogValue pochhammer_ln_snapped(int m, double a, const Partition& kappa,
                                      double snap_tol) {
    LogValue r = LogValue::one();
    for (int i = 1; i <= kappa.size() && i <= m; ++i) {
        double x = a - 0.5 * (i - 1);
        for (int j = 0; j < kappa.part(i); ++j) {
            double f = x + j;
            if (std::fabs(f) <= snap_tol) return LogValue::zero();
            r *= LogValue::from_value(f);
        }
    }
    return r;
}

// Plain-double variant of the same product. Overflows only for extreme
// parameters; callers fall back to the log form when the result is not
// finite.
inline double pochhammer_snapped(int m, double a, const Partition& kappa,
                                 double snap_tol) {
    double r = 1.0;
    for (int i = 1; i <= kappa.size() && i <= m; ++i) {
        double x = a - 0.5 * (i - 1);
        for (int j = 0; j < kappa.part(i); ++j) {
            double f = x + j;
            if (std::fabs(f) <= snap_tol) return 0.0;
            r *= f;
        }
    }
    return r;
}

// Degree past which every numerator vanishes, if a (snapped) upper parameter
// sits on the non-positive integer grid: kappa survives only while
// k_1 <= -a_i, so the series stops at m * (-a_i).
inline std::optional<int> termination_degree(const std::vector<double>& upper, int m,
                                             double snap_tol = 1e-9) {
    std::optional<int> d;
    for (double a : upper) {
        double r = std::round(a);
        if (std::fabs(a - r) <= snap_tol && r <= 0.0) {
            int cap = m * static_cast<int>(-r);
            if (!d || cap < *d) d = cap;
        }
    }
    return d;
}

}  // namespace detail

// pFq of matrix argument through the eigenvalues of Y, truncated per policy:
//
//   pFq(a; b; Y) = sum_k sum_{kappa |- k} [(a_1)_kappa ... / (b_1)_kappa ...]
//                  C_kappa(Y) / k!
//
// Stops early once the absolute degree-k contribution falls below
// tail_tol * |accumulated sum| for three consecutive degrees.
inline HypergeomResult hyperg_matrix_eigs(const HypergeomSpec& spec,
                                          std::span<const double> eigenvalues) {
    spec.truncation.validate();
    const int m = static_cast<int>(eigenvalues.size());
    if (m < 1) throw DimensionError("hyperg_matrix: empty eigenvalue list");
    const auto& policy = spec.truncation;
    if (policy.max_degree > policy.table_ceiling)
        throw ResourceError("hyperg_matrix: max_degree " + std::to_string(policy.max_degree) +
                            " exceeds the table ceiling " + std::to_string(policy.table_ceiling));

    double rho = 0.0;
    for (double ev : eigenvalues) rho = std::max(rho, std::fabs(ev));

    auto term_degree = detail::termination_degree(spec.upper, m);
    const bool terminating = term_degree.has_value();
    if (spec.p() == spec.q() + 1 && rho >= 1.0 && !terminating)
        throw DivergenceError("hyperg_matrix: p = q+1 series requires spectral radius < 1 "
                              "(got " + std::to_string(rho) + ")");
    if (spec.p() > spec.q() + 1 && !terminating && !policy.allow_asymptotic)
        throw DivergenceError("hyperg_matrix: p > q+1 series has zero convergence radius; "
                              "only terminating or asymptotic evaluation is supported");

    const ZonalTable& table =
        zonal_table_cache(policy.max_degree, m, policy.table_ceiling);

    detail::CompensatedSum total;
    total.add(1.0);  // degree 0
    int sub_tol_streak = 0;
    int guard_streak = 0;
    ConvergenceReport report;
    report.degrees_used = 0;

    // asymptotic mode bookkeeping: keep the best (smallest-degree-term) prefix
    double best_tail = std::numeric_limits<double>::infinity();
    double best_value = 1.0;
    int best_degree = 0;

    double prev_degree_mag = 1.0;
    for (int k = 1; k <= policy.max_degree; ++k) {
        if (terminating && k > *term_degree) {
            report.reason = SeriesTermination::terminated;
            report.degrees_used = k - 1;
            report.last_degree_magnitude = 0.0;
            return {total.value(), report};
        }
        auto czonal = zonal_eval_degree(table, k, eigenvalues);
        const auto& kappas = table.partitions_of(k);
        detail::CompensatedSum degree_sum;
        bool any_numerator = false;
        const double kfact = std::exp(std::lgamma(static_cast<double>(k) + 1.0));
        for (std::size_t i = 0; i < kappas.size(); ++i) {
            const Partition& kappa = kappas[i];
            double num = 1.0;
            for (double a : spec.upper)
                num *= detail::pochhammer_snapped(m, a, kappa, 1e-9);
            if (num == 0.0) continue;
            any_numerator = true;
            double den = 1.0;
            bool pole = false;
            for (double b : spec.lower) {
                double d = detail::pochhammer_snapped(m, b, kappa, 0.0);
                if (d == 0.0) { pole = true; break; }
                den *= d;
            }
            double c = czonal[i];
            if (pole) {
                if (c != 0.0)
                    throw PoleError("hyperg_matrix: lower parameter Pochhammer vanished at " +
                                    kappa.to_string() + " with nonzero numerator");
                continue;
            }
            if (c == 0.0) continue;
            double t;
            if (std::isfinite(num) && std::isfinite(den) && den != 0.0) {
                t = (num / den) * (c / kfact);
            } else {
                // extreme parameters: redo the coefficient in log space
                LogValue lnum = LogValue::one();
                for (double a : spec.upper)
                    lnum *= detail::pochhammer_ln_snapped(m, a, kappa, 1e-9);
                LogValue lden = LogValue::one();
                for (double b : spec.lower)
                    lden *= detail::pochhammer_ln_snapped(m, b, kappa, 0.0);
                LogValue coeff = lnum / lden;
                t = coeff.sign * std::exp(coeff.log_magnitude + std::log(std::fabs(c)) -
                                          std::lgamma(static_cast<double>(k) + 1.0));
                if (c < 0.0) t = -t;
            }
            degree_sum.add(t);
        }
        double dmag = std::fabs(degree_sum.value());
        total.add(degree_sum.value());
        report.degrees_used = k;
        report.last_degree_magnitude = dmag;

        if (!std::isfinite(total.value()))
            throw DivergenceError("hyperg_matrix: series overflowed at degree " +
                                  std::to_string(k));

        if (!any_numerator) {
            report.reason = SeriesTermination::terminated;
            return {total.value(), report};
        }

        double scale = std::max(std::fabs(total.value()), 1e-300);
        if (dmag <= policy.tail_tol * scale) {
            if (++sub_tol_streak >= 3) {
                report.reason = SeriesTermination::converged;
                return {total.value(), report};
            }
        } else {
            sub_tol_streak = 0;
        }

        if (spec.p() > spec.q() && !terminating && k > 5) {
            if (dmag > policy.growth_guard * std::max(prev_degree_mag, 1e-300)) {
                if (++guard_streak >= 3) {
                    if (policy.allow_asymptotic && spec.p() > spec.q() + 1) break;
                    throw DivergenceError(
                        "hyperg_matrix: divergence guard tripped at degree " +
                        std::to_string(k) + " (degree sums growing by more than " +
                        std::to_string(policy.growth_guard) + "x)");
                }
            } else {
                guard_streak = 0;
            }
        }
        if (policy.allow_asymptotic && dmag < best_tail) {
            best_tail = dmag;
            best_value = total.value();
            best_degree = k;
        }
        prev_degree_mag = std::max(dmag, 1e-300);
    }

    if (policy.allow_asymptotic && spec.p() > spec.q() + 1 && !terminating) {
        // smallest-term truncation of the formally divergent series
        double scale = std::max(std::fabs(best_value), 1e-300);
        if (best_tail > 1e-4 * scale)
            throw DivergenceError("hyperg_matrix: asymptotic truncation cannot reach "
                                  "tolerance (smallest degree term " +
                                  std::to_string(best_tail / scale) + " relative)");
        report.reason = SeriesTermination::asymptotic;
        report.degrees_used = best_degree;
        report.last_degree_magnitude = best_tail;
        return {best_value, report};
    }

    report.reason = SeriesTermination::max_degree;
    return {total.value(), report};
}

inline HypergeomResult hyperg_matrix(const HypergeomSpec& spec, const Matrix& y) {
    auto eigs = symmetric_eigenvalues(y);
    return hyperg_matrix_eigs(spec, eigs);
}

// Scalar pFq by direct term recursion. Independent of the zonal machinery;
// the matrix path at m = 1 must agree with this to 1e-12.
inline HypergeomResult hyperg_scalar(const HypergeomSpec& spec, double x) {
    spec.truncation.validate();
    const auto& policy = spec.truncation;
    auto term_degree = detail::termination_degree(spec.upper, 1);
    const bool terminating = term_degree.has_value();
    if (spec.p() == spec.q() + 1 && std::fabs(x) >= 1.0 && !terminating)
        throw DivergenceError("hyperg_scalar: p = q+1 series requires |x| < 1 (got " +
                              std::to_string(std::fabs(x)) + ")");
    if (spec.p() > spec.q() + 1 && !terminating && !policy.allow_asymptotic)
        throw DivergenceError("hyperg_scalar: p > q+1 series has zero convergence radius");

    detail::CompensatedSum total;
    double term = 1.0;
    total.add(term);
    ConvergenceReport report;
    int sub_tol_streak = 0, guard_streak = 0;
    double best_tail = std::numeric_limits<double>::infinity();
    double best_value = 1.0;
    int best_degree = 0;
    double prev_mag = 1.0;

    for (int k = 0; k < policy.max_degree; ++k) {
        double num = 1.0;
        for (double a : spec.upper) {
            double f = a + k;
            if (std::fabs(f) <= 1e-9) { num = 0.0; break; }
            num *= f;
        }
        if (num == 0.0) {
            report.reason = SeriesTermination::terminated;
            report.degrees_used = k;
            report.last_degree_magnitude = 0.0;
            return {total.value(), report};
        }
        double den = 1.0;
        for (double b : spec.lower) {
            double f = b + k;
            if (f == 0.0)
                throw PoleError("hyperg_scalar: lower parameter " + std::to_string(b) +
                                " hit a pole at degree " + std::to_string(k + 1));
            den *= f;
        }
        term *= num / den * x / (k + 1);
        total.add(term);
        report.degrees_used = k + 1;
        report.last_degree_magnitude = std::fabs(term);
        if (!std::isfinite(total.value()))
            throw DivergenceError("hyperg_scalar: series overflowed at degree " +
                                  std::to_string(k + 1));

        double scale = std::max(std::fabs(total.value()), 1e-300);
        if (std::fabs(term) <= policy.tail_tol * scale) {
            if (++sub_tol_streak >= 3) {
                report.reason = SeriesTermination::converged;
                return {total.value(), report};
            }
        } else {
            sub_tol_streak = 0;
        }
        if (spec.p() > spec.q() && !terminating && k > 5) {
            if (std::fabs(term) > policy.growth_guard * std::max(prev_mag, 1e-300)) {
                if (++guard_streak >= 3) {
                    if (policy.allow_asymptotic && spec.p() > spec.q() + 1) break;
                    throw DivergenceError("hyperg_scalar: divergence guard tripped at degree " +
                                          std::to_string(k + 1));
                }
            } else {
                guard_streak = 0;
            }
        }
        if (policy.allow_asymptotic && std::fabs(term) < best_tail) {
            best_tail = std::fabs(term);
            best_value = total.value();
            best_degree = k + 1;
        }
        prev_mag = std::max(std::fabs(term), 1e-300);
    }

    if (policy.allow_asymptotic && spec.p() > spec.q() + 1 && !terminating) {
        double scale = std::max(std::fabs(best_value), 1e-300);
        if (best_tail > 1e-4 * scale)
            throw DivergenceError("hyperg_scalar: asymptotic truncation cannot reach tolerance");
        report.reason = SeriesTermination::asymptotic;
        report.degrees_used = best_degree;
        report.last_degree_magnitude = best_tail;
        return {best_value, report};
    }

    report.reason = SeriesTermination::max_degree;
    return {total.value(), report};
}

struct HypergeomLogResult {
    LogValue value;
    ConvergenceReport report{};
};

// Scalar pFq accumulated in log space. Exact for series whose terms become
// single-signed (the Kummer-transformed confluent kernels); mixed signs are
// combined through a rescaled accumulator, so extreme cancellation is still
// limited by double precision.
inline HypergeomLogResult hyperg_scalar_ln(const HypergeomSpec& spec, double x) {
    spec.truncation.validate();
    const auto& policy = spec.truncation;
    auto term_degree = detail::termination_degree(spec.upper, 1);
    const bool terminating = term_degree.has_value();
    if (spec.p() == spec.q() + 1 && std::fabs(x) >= 1.0 && !terminating)
        throw DivergenceError("hyperg_scalar_ln: p = q+1 series requires |x| < 1");
    if (spec.p() > spec.q() + 1 && !terminating)
        throw DivergenceError("hyperg_scalar_ln: p > q+1 series has zero convergence radius");

    // accumulator acc = acc_mant * exp(acc_log)
    double acc_mant = 1.0, acc_log = 0.0;
    double term_log = 0.0;
    int term_sign = 1;
    ConvergenceReport report;
    int sub_tol_streak = 0;
    for (int k = 0; k < policy.max_degree; ++k) {
        double num = 1.0;
        for (double a : spec.upper) {
            double f = a + k;
            if (std::fabs(f) <= 1e-9) { num = 0.0; break; }
            num *= f;
        }
        if (num == 0.0) {
            report.reason = SeriesTermination::terminated;
            report.degrees_used = k;
            return {LogValue::from_log(acc_log + std::log(std::fabs(acc_mant)),
                                       acc_mant >= 0 ? +1 : -1),
                    report};
        }
        double den = 1.0;
        for (double b : spec.lower) {
            double f = b + k;
            if (f == 0.0)
                throw PoleError("hyperg_scalar_ln: lower parameter pole at degree " +
                                std::to_string(k + 1));
            den *= f;
        }
        double ratio = num / den * x / (k + 1);
        if (ratio == 0.0) {
            report.reason = SeriesTermination::terminated;
            report.degrees_used = k;
            return {LogValue::from_log(acc_log + std::log(std::fabs(acc_mant)),
                                       acc_mant >= 0 ? +1 : -1),
                    report};
        }
        term_log += std::log(std::fabs(ratio));
        if (ratio < 0.0) term_sign = -term_sign;
        // bring the term onto the accumulator's scale
        double rel = std::exp(term_log - acc_log);
        acc_mant += term_sign * rel;
        if (std::fabs(acc_mant) > 1e100 || (acc_mant != 0.0 && std::fabs(acc_mant) < 1e-100)) {
            acc_log += std::log(std::fabs(acc_mant));
            acc_mant = acc_mant >= 0 ? 1.0 : -1.0;
        }
        report.degrees_used = k + 1;
        report.last_degree_magnitude = rel;
        if (rel <= policy.tail_tol * std::fabs(acc_mant)) {
            if (++sub_tol_streak >= 3) {
                report.reason = SeriesTermination::converged;
                return {LogValue::from_log(acc_log + std::log(std::fabs(acc_mant)),
                                           acc_mant >= 0 ? +1 : -1),
                        report};
            }
        } else {
            sub_tol_streak = 0;
        }
    }
    report.reason = SeriesTermination::max_degree;
    if (acc_mant == 0.0) return {LogValue::zero(), report};
    return {LogValue::from_log(acc_log + std::log(std::fabs(acc_mant)),
                               acc_mant >= 0 ? +1 : -1),
            report};
}

// Matrix-argument pFq in log space, same accumulator idea as the scalar
// version with whole degrees as the unit of work.
inline HypergeomLogResult hyperg_matrix_ln(const HypergeomSpec& spec,
                                           std::span<const double> eigenvalues) {
    spec.truncation.validate();
    const int m = static_cast<int>(eigenvalues.size());
    const auto& policy = spec.truncation;
    if (policy.max_degree > policy.table_ceiling)
        throw ResourceError("hyperg_matrix_ln: max_degree exceeds the table ceiling");
    double rho = 0.0;
    for (double ev : eigenvalues) rho = std::max(rho, std::fabs(ev));
    auto term_degree = detail::termination_degree(spec.upper, m);
    const bool terminating = term_degree.has_value();
    if (spec.p() == spec.q() + 1 && rho >= 1.0 && !terminating)
        throw DivergenceError("hyperg_matrix_ln: p = q+1 series requires spectral radius < 1");
    if (spec.p() > spec.q() + 1 && !terminating)
        throw DivergenceError("hyperg_matrix_ln: p > q+1 series has zero convergence radius");

    const ZonalTable& table = zonal_table_cache(policy.max_degree, m, policy.table_ceiling);
    double acc_mant = 1.0, acc_log = 0.0;
    ConvergenceReport report;
    int sub_tol_streak = 0;
    for (int k = 1; k <= policy.max_degree; ++k) {
        if (terminating && k > *term_degree) {
            report.reason = SeriesTermination::terminated;
            report.degrees_used = k - 1;
            break;
        }
        auto czonal = zonal_eval_degree(table, k, eigenvalues);
        const auto& kappas = table.partitions_of(k);
        const double log_kfact = std::lgamma(static_cast<double>(k) + 1.0);
        // degree contribution, accumulated on its own scale
        double deg_mant = 0.0, deg_log = 0.0;
        bool deg_empty = true;
        bool any_numerator = false;
        for (std::size_t i = 0; i < kappas.size(); ++i) {
            const Partition& kappa = kappas[i];
            LogValue num = LogValue::one();
            for (double a : spec.upper)
                num *= detail::pochhammer_ln_snapped(m, a, kappa, 1e-9);
            if (num.is_zero()) continue;
            any_numerator = true;
            LogValue den = LogValue::one();
            bool pole = false;
            for (double b : spec.lower) {
                LogValue d = detail::pochhammer_ln_snapped(m, b, kappa, 0.0);
                if (d.is_zero()) { pole = true; break; }
                den *= d;
            }
            double c = czonal[i];
            if (pole) {
                if (c != 0.0)
                    throw PoleError("hyperg_matrix_ln: lower parameter pole at " +
                                    kappa.to_string());
                continue;
            }
            if (c == 0.0) continue;
            LogValue coeff = num / den;
            double tl = coeff.log_magnitude + std::log(std::fabs(c)) - log_kfact;
            int ts = coeff.sign * (c > 0 ? 1 : -1);
            if (deg_empty) {
                deg_log = tl;
                deg_mant = ts;
                deg_empty = false;
            } else {
                if (tl > deg_log) {
                    deg_mant = deg_mant * std::exp(deg_log - tl) + ts;
                    deg_log = tl;
                } else {
                    deg_mant += ts * std::exp(tl - deg_log);
                }
            }
        }
        report.degrees_used = k;
        if (!any_numerator) {
            report.reason = SeriesTermination::terminated;
            break;
        }
        if (!deg_empty && deg_mant != 0.0) {
            double rel = std::exp(deg_log + std::log(std::fabs(deg_mant)) - acc_log);
            acc_mant += (deg_mant >= 0 ? 1.0 : -1.0) * rel;
            report.last_degree_magnitude = rel;
            if (std::fabs(acc_mant) > 1e100 ||
                (acc_mant != 0.0 && std::fabs(acc_mant) < 1e-100)) {
                acc_log += std::log(std::fabs(acc_mant));
                acc_mant = acc_mant >= 0 ? 1.0 : -1.0;
            }
            if (rel <= policy.tail_tol * std::fabs(acc_mant)) {
                if (++sub_tol_streak >= 3) {
                    report.reason = SeriesTermination::converged;
                    break;
                }
            } else {
                sub_tol_streak = 0;
            }
        } else {
            report.last_degree_magnitude = 0.0;
            if (++sub_tol_streak >= 3) {
                report.reason = SeriesTermination::converged;
                break;
            }
        }
        if (k == policy.max_degree) report.reason = SeriesTermination::max_degree;
    }
    if (acc_mant == 0.0) return {LogValue::zero(), report};
    return {LogValue::from_log(acc_log + std::log(std::fabs(acc_mant)),
                               acc_mant >= 0 ? +1 : -1),
            report};
}

// 2F1 of matrix argument with an Euler-transformed fallback: when the
// argument leaves the unit ball the transformed upper parameters
// (c-a, c-b) sometimes terminate, making the value an exact polynomial
// times |I - Y|^{c-a-b}. Returns a signed log value.
inline HypergeomLogResult gauss_2f1_ln(double a, double b, double c,
                                       std::span<const double> eigenvalues,
                                       const TruncationPolicy& policy) {
    double rho = 0.0;
    for (double ev : eigenvalues) rho = std::max(rho, std::fabs(ev));
    HypergeomSpec direct{{a, b}, {c}, policy};
    auto direct_term = detail::termination_degree(direct.upper,
                                                  static_cast<int>(eigenvalues.size()));
    if (rho < 1.0 || direct_term.has_value()) {
        TruncationPolicy p = policy;
        if (!direct_term.has_value() && rho > 0.0 && rho < 1.0) {
            int needed = static_cast<int>(std::ceil(std::log(1e-13) / std::log(rho))) + 8;
            p.max_degree = std::clamp(needed, policy.max_degree, policy.table_ceiling);
        }
        direct.truncation = p;
        return hyperg_matrix_ln(direct, eigenvalues);
    }
    // Euler fallback
    HypergeomSpec transformed{{c - a, c - b}, {c}, policy};
    auto term = detail::termination_degree(transformed.upper,
                                           static_cast<int>(eigenvalues.size()));
    if (!term.has_value())
        throw DivergenceError("gauss_2f1_ln: argument outside the unit ball and the "
                              "Euler-transformed series does not terminate");
    double e = c - a - b;
    bool negative_base = false;
    double log_pref = 0.0;
    int sign_pref = 1;
    for (double ev : eigenvalues) {
        double f = 1.0 - ev;
        if (f == 0.0)
            throw DivergenceError("gauss_2f1_ln: unit eigenvalue in I - Y");
        if (f < 0.0) negative_base = true;
        log_pref += std::log(std::fabs(f));
    }
    if (negative_base) {
        if (std::fabs(e - std::round(e)) > 1e-9)
            throw DivergenceError("gauss_2f1_ln: negative |I - Y| with non-integer "
                                  "Euler exponent");
        int ei = static_cast<int>(std::round(e));
        int negs = 0;
        for (double ev : eigenvalues)
            if (1.0 - ev < 0.0) ++negs;
        bool det_negative = (negs % 2 == 1);
        sign_pref = (det_negative && (ei % 2 != 0)) ? -1 : +1;
    }
    auto poly = hyperg_matrix_ln(transformed, eigenvalues);
    HypergeomLogResult out;
    out.report = poly.report;
    out.value = LogValue::from_log(e * log_pref, sign_pref) * poly.value;
    return out;
}

namespace detail {

// Policy sized from the argument's spectral radius so the transformation
// checks are not starved of degrees inside their contract domain.
inline TruncationPolicy policy_for_radius(double rho, const TruncationPolicy& base) {
    TruncationPolicy p = base;
    if (rho > 0.0 && rho < 1.0) {
        int needed = static_cast<int>(std::ceil(std::log(1e-12) / std::log(rho))) + 8;
        p.max_degree = std::clamp(needed, base.max_degree, base.table_ceiling);
    } else {
        p.max_degree = base.table_ceiling;
    }
    return p;
}

}  // namespace detail

// Relative residual of the Kummer relation
//   1F1(b; c; -Y) = etr(-Y) 1F1(c-b; c; Y).
inline double kummer_transform_check(double b, double c, const Matrix& y,
                                     TruncationPolicy policy = {}) {
    auto eigs = symmetric_eigenvalues(y);
    policy.max_degree = policy.table_ceiling;  // 1F1 is entire; use all degrees
    HypergeomSpec lhs_spec{{b}, {c}, policy};
    HypergeomSpec rhs_spec{{c - b}, {c}, policy};
    std::vector<double> neg(eigs);
    for (auto& e : neg) e = -e;
    double lhs = hyperg_matrix_eigs(lhs_spec, neg).value;
    double tr = 0.0;
    for (double e : eigs) tr += e;
    double rhs = std::exp(-tr) * hyperg_matrix_eigs(rhs_spec, eigs).value;
    double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    return std::fabs(lhs - rhs) / scale;
}

// Relative residual of the Euler relation
//   2F1(a, b; c; Y) = |I - Y|^{c-a-b} 2F1(c-a, c-b; c; Y),
// for spectral radius of Y below one.
inline double euler_transform_check(double a, double b, double c, const Matrix& y,
                                    TruncationPolicy base_policy = {}) {
    auto eigs = symmetric_eigenvalues(y);
    double rho = 0.0;
    for (double e : eigs) rho = std::max(rho, std::fabs(e));
    if (rho >= 1.0)
        throw DivergenceError("euler_transform_check: spectral radius must be < 1");
    TruncationPolicy policy = detail::policy_for_radius(rho, base_policy);
    HypergeomSpec lhs_spec{{a, b}, {c}, policy};
    HypergeomSpec rhs_spec{{c - a, c - b}, {c}, policy};
    double lhs = hyperg_matrix_eigs(lhs_spec, eigs).value;
    double logdet_imy = 0.0;
    for (double e : eigs) logdet_imy += std::log1p(-e);
    double rhs = std::exp((c - a - b) * logdet_imy) * hyperg_matrix_eigs(rhs_spec, eigs).value;
    double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    return std::fabs(lhs - rhs) / scale;
}

}  // namespace mvhg

#endif
