#ifndef MVHG_DENSITIES_HPP
#define MVHG_DENSITIES_HPP

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mvhg/common.hpp"
#include "mvhg/hypergeom.hpp"
#include "mvhg/matrixops.hpp"
#include "mvhg/specialfun.hpp"

// Log-density evaluation for the hypergeometric-type families and the
// compound / scale-mixture laws built from them. Three printed constants in
// the source theorems fail the quadrature oracle and are shipped in their
// derived (oracle-validated) form instead; see the notes on
// logpdf_gen_hg, logpdf_compound_thm2 and logpdf_compound_thm3.

namespace mvhg {

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

// Eigenvalues of S^{1/2} A S^{1/2} for symmetric A and SPD S; these are the
// eigenvalues of A S, all real.
inline std::vector<double> product_eigenvalues(const Matrix& a, const SpdMatrix& s) {
    Matrix r = s.sqrt_spd().matrix();
    Matrix sym = r * 0.5 * (a + a.transpose()) * r;
    return symmetric_eigenvalues(sym);
}

// Eigenvalues of A S^{-1}.
inline std::vector<double> product_eigenvalues_inv(const Matrix& a, const SpdMatrix& s) {
    Matrix r = s.inverse_sqrt();
    Matrix sym = r * 0.5 * (a + a.transpose()) * r;
    return symmetric_eigenvalues(sym);
}

inline double spectral_radius(std::span<const double> eigs) {
    double rho = 0.0;
    for (double e : eigs) rho = std::max(rho, std::fabs(e));
    return rho;
}

// Entire series (p <= q) at m = 1 may need many more degrees than the
// matrix-path table ceiling; scalar degrees are cheap.
inline TruncationPolicy scalar_policy_for(double z, const TruncationPolicy& base,
                                          bool entire) {
    TruncationPolicy p = base;
    if (entire) {
        int needed = static_cast<int>(2.0 * std::sqrt(std::fabs(z)) + std::fabs(z)) + 80;
        p.max_degree = std::max(p.max_degree, std::min(needed, 2000000));
    }
    return p;
}

// log pFq(spec; arg) for an argument given by eigenvalues, dispatching to
// the scalar path at m = 1. Throws if the value is not strictly positive.
inline double log_hyperg(const HypergeomSpec& spec, std::span<const double> eigs,
                         const char* where) {
    if (spec.p() == 0 && spec.q() == 0) {  // 0F0 = etr, exact
        double tr = 0.0;
        for (double e : eigs) tr += e;
        return tr;
    }
    LogValue v;
    if (eigs.size() == 1) {
        HypergeomSpec s = spec;
        s.truncation = scalar_policy_for(eigs[0], spec.truncation, spec.p() <= spec.q());
        v = hyperg_scalar_ln(s, eigs[0]).value;
    } else {
        v = hyperg_matrix_ln(spec, eigs).value;
    }
    if (v.sign <= 0)
        throw Error(std::string(where) + ": hypergeometric factor is not positive");
    return v.log_magnitude;
}

inline double log_hyperg(const HypergeomSpec& spec, const Matrix& sym_arg,
                         const char* where) {
    auto eigs = symmetric_eigenvalues(sym_arg);
    return log_hyperg(spec, eigs, where);
}

inline HypergeomSpec augment_upper(const HypergeomSpec& spec, double extra) {
    HypergeomSpec s = spec;
    s.upper.push_back(extra);
    return s;
}

inline HypergeomSpec augment_both(const HypergeomSpec& spec, double extra_upper,
                                  double extra_lower) {
    HypergeomSpec s = spec;
    s.upper.push_back(extra_upper);
    s.lower.push_back(extra_lower);
    return s;
}

inline double log_det_from_eigs(std::span<const double> eigs, const char* where) {
    double s = 0.0;
    for (double e : eigs) {
        if (e <= 0.0) throw DomainError(std::string(where) + ": singular kernel matrix");
        s += std::log(e);
    }
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elliptical base families
// ---------------------------------------------------------------------------

// Matrix normal: (2 pi)^{-mn/2} |Sigma|^{-n/2} |Theta|^{-m/2}
//                etr{ -1/2 Sigma^{-1}(X-mu)' Theta^{-1}(X-mu) }.
inline double logpdf_matrix_normal(const EllipticalParams& params, const Matrix& x) {
    const int n = params.n(), m = params.m();
    double tr = quad_form_trace(params, x);
    return -0.5 * m * n * std::log(2.0 * M_PI) - 0.5 * n * params.sigma.logdet() -
           0.5 * m * params.theta.logdet() - 0.5 * tr;
}

// Matricvariate T with nu > m - 1:
//   Gamma_m[(n+nu)/2] / (pi^{mn/2} Gamma_m[nu/2] |Sigma|^{n/2} |Theta|^{m/2})
//   |I + Sigma^{-1}(X-mu)' Theta^{-1}(X-mu)|^{-(n+nu)/2}.
inline double logpdf_matricvariate_t(double nu, const EllipticalParams& params,
                                     const Matrix& x) {
    const int n = params.n(), m = params.m();
    detail::require(nu > m - 1, "logpdf_matricvariate_t: parameter nu = " +
                                    std::to_string(nu) + " violates the bound nu > m - 1");
    Matrix delta = quad_form(params, x);
    auto eigs = symmetric_eigenvalues(delta);
    double logdet_iplus = 0.0;
    for (double e : eigs) logdet_iplus += std::log1p(e);
    double lc = mv_gamma_ln(m, 0.5 * (n + nu)).log_magnitude -
                0.5 * m * n * std::log(M_PI) - mv_gamma_ln(m, 0.5 * nu).log_magnitude -
                0.5 * n * params.sigma.logdet() - 0.5 * m * params.theta.logdet();
    return lc - 0.5 * (n + nu) * logdet_iplus;
}

// ---------------------------------------------------------------------------
// Hypergeometric gamma family (and its inverse)
// ---------------------------------------------------------------------------

namespace detail {

inline double hg_gamma_log_constant(int m, double a, const SpdMatrix& xi,
                                    const Matrix& upsilon, const HypergeomSpec& spec) {
    require(a > 0.5 * (m - 1), "hg_gamma: parameter a = " + std::to_string(a) +
                                   " violates the bound a > (m-1)/2");
    auto arg = product_eigenvalues_inv(upsilon, xi);  // Upsilon Xi^{-1}
    HypergeomSpec aug = augment_upper(spec, a);
    double log_f = log_hyperg(aug, arg, "hg_gamma constant");
    return a * xi.logdet() - mv_gamma_ln(m, a).log_magnitude - log_f;
}

}  // namespace detail

// Density of Y > 0:  etr{-Xi Y} |Y|^{a-(m+1)/2} pFq(a;b; Upsilon Y) times
// |Xi|^a / (Gamma_m[a] p+1Fq(a_1..a_p, a; b_1..b_q; Upsilon Xi^{-1})).
inline double logpdf_hg_gamma(double a, const SpdMatrix& xi, const Matrix& upsilon,
                              const HypergeomSpec& spec, const SpdMatrix& y) {
    const int m = xi.dim();
    if (y.dim() != m || upsilon.rows() != m)
        throw DimensionError("logpdf_hg_gamma: dimension mismatch");
    double lc = detail::hg_gamma_log_constant(m, a, xi, upsilon, spec);
    double tr_xy = (xi.matrix() * y.matrix()).trace();
    double log_kernel_f;
    if (upsilon.isZero(0.0)) {
        log_kernel_f = 0.0;
    } else {
        auto arg = detail::product_eigenvalues(upsilon, y);
        log_kernel_f = detail::log_hyperg(spec, arg, "hg_gamma kernel");
    }
    return lc - tr_xy + (a - 0.5 * (m + 1)) * y.logdet() + log_kernel_f;
}

// Density of P = Y^{-1}:  etr{-Xi P^{-1}} |P|^{-a-(m+1)/2} pFq(Upsilon P^{-1}),
// same constant as the direct family.
inline double logpdf_hg_gamma_inv(double a, const SpdMatrix& xi, const Matrix& upsilon,
                                  const HypergeomSpec& spec, const SpdMatrix& p) {
    const int m = xi.dim();
    if (p.dim() != m || upsilon.rows() != m)
        throw DimensionError("logpdf_hg_gamma_inv: dimension mismatch");
    double lc = detail::hg_gamma_log_constant(m, a, xi, upsilon, spec);
    Matrix pinv = p.inverse();
    double tr = (xi.matrix() * pinv).trace();
    double log_kernel_f;
    if (upsilon.isZero(0.0)) {
        log_kernel_f = 0.0;
    } else {
        auto arg = detail::product_eigenvalues_inv(upsilon, p);
        log_kernel_f = detail::log_hyperg(spec, arg, "hg_gamma_inv kernel");
    }
    return lc - tr - (a + 0.5 * (m + 1)) * p.logdet() + log_kernel_f;
}

// ---------------------------------------------------------------------------
// Hypergeometric beta type II family (and its inverse)
// ---------------------------------------------------------------------------

namespace detail {

// The constant's p+1Fq+1 has lower parameter -b + (m+1)/2, so its term-wise
// validity needs b > (m-1)/2 + k1 for every degree that actually enters;
// with an infinite kernel series the truncation degree K stands in for k1.
inline int beta2_k1_surrogate(const HypergeomSpec& spec, int m, bool xi_zero) {
    if (xi_zero) return 0;
    if (spec.p() == 0 && spec.q() == 0) {
        // 0F0 kernel: the augmented constant series 1F1(a; -b+(m+1)/2; -Xi)
        // still runs through all degrees of the truncation policy
        return spec.truncation.max_degree;
    }
    auto term = termination_degree(spec.upper, m);
    if (term) return std::min(*term, spec.truncation.max_degree);
    return spec.truncation.max_degree;
}

inline double hg_beta2_log_constant(int m, double a, double b, const Matrix& xi,
                                    const HypergeomSpec& spec) {
    bool xi_zero = xi.isZero(0.0);
    require(a > 0.5 * (m - 1), "hg_beta2: parameter a = " + std::to_string(a) +
                                   " violates the bound a > (m-1)/2");
    int k1 = beta2_k1_surrogate(spec, m, xi_zero);
    require(b > 0.5 * (m - 1) + k1,
            "hg_beta2: parameter b = " + std::to_string(b) +
                " violates the bound b > (m-1)/2 + k1 (k1 surrogate " +
                std::to_string(k1) + ")");
    double log_f = 0.0;
    if (!xi_zero) {
        HypergeomSpec aug = augment_both(spec, a, -b + 0.5 * (m + 1));
        auto eigs = symmetric_eigenvalues(Matrix(-xi));
        log_f = log_hyperg(aug, eigs, "hg_beta2 constant");
    }
    return -mv_beta_ln(m, a, b).log_magnitude - log_f;
}

}  // namespace detail

// Density of Y > 0:  |Y|^{a-(m+1)/2} |I+Y|^{-(a+b)} pFq(Xi Y) /
// (beta_m[a,b] p+1Fq+1(a_1..a_p, a; b_1..b_q, -b+(m+1)/2; -Xi)).
inline double logpdf_hg_beta2(double a, double b, const Matrix& xi,
                              const HypergeomSpec& spec, const SpdMatrix& y) {
    const int m = y.dim();
    if (xi.rows() != m) throw DimensionError("logpdf_hg_beta2: dimension mismatch");
    double lc = detail::hg_beta2_log_constant(m, a, b, xi, spec);
    auto eigs_y = y.eigenvalues();
    double logdet_iplus = 0.0;
    for (double e : eigs_y) logdet_iplus += std::log1p(e);
    double log_kernel_f = 0.0;
    if (!xi.isZero(0.0)) {
        auto arg = detail::product_eigenvalues(xi, y);
        log_kernel_f = detail::log_hyperg(spec, arg, "hg_beta2 kernel");
    }
    return lc + (a - 0.5 * (m + 1)) * y.logdet() - (a + b) * logdet_iplus + log_kernel_f;
}

// Density of P = Y^{-1}:  |P|^{b-(m+1)/2} |I+P|^{-(a+b)} pFq(Xi P^{-1}),
// same constant.
inline double logpdf_hg_beta2_inv(double a, double b, const Matrix& xi,
                                  const HypergeomSpec& spec, const SpdMatrix& p) {
    const int m = p.dim();
    if (xi.rows() != m) throw DimensionError("logpdf_hg_beta2_inv: dimension mismatch");
    double lc = detail::hg_beta2_log_constant(m, a, b, xi, spec);
    auto eigs_p = p.eigenvalues();
    double logdet_iplus = 0.0;
    for (double e : eigs_p) logdet_iplus += std::log1p(e);
    double log_kernel_f = 0.0;
    if (!xi.isZero(0.0)) {
        auto arg = detail::product_eigenvalues_inv(xi, p);
        log_kernel_f = detail::log_hyperg(spec, arg, "hg_beta2_inv kernel");
    }
    return lc + (b - 0.5 * (m + 1)) * p.logdet() - (a + b) * logdet_iplus + log_kernel_f;
}

// ---------------------------------------------------------------------------
// Generalised hypergeometric family (and its inverse)
// ---------------------------------------------------------------------------

enum class GenHgForm { gauss, confluent };

inline const char* to_string(GenHgForm f) {
    return f == GenHgForm::gauss ? "gauss" : "confluent";
}

namespace detail {

// Shared constant. Both forms integrate to one against the corrected Mellin
// value; the gauss form's printed constant uses beta_m[a-alpha, c-alpha]
// where the defining integral produces beta_m[a-alpha, c-a], and the
// corrected version is the one the quadrature oracle confirms.
inline double gen_hg_log_constant(int m, GenHgForm form, double alpha, double a,
                                  double b, double c, const SpdMatrix& xi) {
    const double bound = 0.5 * (m - 1);
    require(alpha > bound, "gen_hg: parameter alpha = " + std::to_string(alpha) +
                               " violates the bound alpha > (m-1)/2");
    require(b - alpha > bound, "gen_hg: b - alpha = " + std::to_string(b - alpha) +
                                   " violates the bound b - alpha > (m-1)/2");
    require(c - alpha > bound, "gen_hg: c - alpha = " + std::to_string(c - alpha) +
                                   " violates the bound c - alpha > (m-1)/2");
    if (form == GenHgForm::gauss) {
        require(a - alpha > bound, "gen_hg: a - alpha = " + std::to_string(a - alpha) +
                                       " violates the bound a - alpha > (m-1)/2");
        require(c - a > bound, "gen_hg: c - a = " + std::to_string(c - a) +
                                   " violates the bound c - a > (m-1)/2");
        return alpha * xi.logdet() + mv_beta_ln(m, a, c - a).log_magnitude -
               mv_beta_ln(m, alpha, b - alpha).log_magnitude -
               mv_beta_ln(m, a - alpha, c - a).log_magnitude;
    }
    return alpha * xi.logdet() + mv_gamma_ln(m, b).log_magnitude +
           mv_gamma_ln(m, c - alpha).log_magnitude - mv_gamma_ln(m, alpha).log_magnitude -
           mv_gamma_ln(m, c).log_magnitude - mv_gamma_ln(m, b - alpha).log_magnitude;
}

// Kernel factor at argument -Z (Z with non-negative eigenvalues):
// gauss: 2F1(a, b; c; -Z); confluent: 1F1(b; c; -Z) through the Kummer
// relation so the series has non-negative terms.
inline double gen_hg_log_kernel(GenHgForm form, double a, double b, double c,
                                std::span<const double> z_eigs,
                                const TruncationPolicy& policy) {
    if (form == GenHgForm::gauss) {
        std::vector<double> neg(z_eigs.begin(), z_eigs.end());
        for (auto& e : neg) e = -e;
        auto r = gauss_2f1_ln(a, b, c, neg, policy);
        if (r.value.sign <= 0)
            throw Error("gen_hg kernel: 2F1 factor is not positive");
        return r.value.log_magnitude;
    }
    double tr = 0.0;
    for (double e : z_eigs) tr += e;
    HypergeomSpec kummer{{c - b}, {c}, policy};
    double log_f;
    if (z_eigs.size() == 1) {
        kummer.truncation = scalar_policy_for(z_eigs[0], policy, true);
        auto r = hyperg_scalar_ln(kummer, z_eigs[0]);
        if (r.value.sign <= 0) throw Error("gen_hg kernel: 1F1 factor is not positive");
        log_f = r.value.log_magnitude;
    } else {
        auto r = hyperg_matrix_ln(kummer, z_eigs);
        if (r.value.sign <= 0) throw Error("gen_hg kernel: 1F1 factor is not positive");
        log_f = r.value.log_magnitude;
    }
    return -tr + log_f;
}

}  // namespace detail

// Density of Y > 0:
//   gauss:     const |Y|^{alpha-(m+1)/2} 2F1(a, b; c; -Xi Y)
//   confluent: const |Y|^{alpha-(m+1)/2} 1F1(b; c; -Xi Y)
inline double logpdf_gen_hg(GenHgForm form, double alpha, double a, double b, double c,
                            const SpdMatrix& xi, const SpdMatrix& y,
                            TruncationPolicy policy = {}) {
    const int m = xi.dim();
    if (y.dim() != m) throw DimensionError("logpdf_gen_hg: dimension mismatch");
    double lc = detail::gen_hg_log_constant(m, form, alpha, a, b, c, xi);
    auto z = detail::product_eigenvalues(xi.matrix(), y);  // eigs of Xi Y, >= 0
    double log_f = detail::gen_hg_log_kernel(form, a, b, c, z, policy);
    return lc + (alpha - 0.5 * (m + 1)) * y.logdet() + log_f;
}

// Density of P = Y^{-1}: const |P|^{-alpha-(m+1)/2} F(-Xi P^{-1}).
inline double logpdf_gen_hg_inv(GenHgForm form, double alpha, double a, double b,
                                double c, const SpdMatrix& xi, const SpdMatrix& p,
                                TruncationPolicy policy = {}) {
    const int m = xi.dim();
    if (p.dim() != m) throw DimensionError("logpdf_gen_hg_inv: dimension mismatch");
    double lc = detail::gen_hg_log_constant(m, form, alpha, a, b, c, xi);
    auto z = detail::product_eigenvalues_inv(xi.matrix(), p);  // eigs of Xi P^{-1}
    double log_f = detail::gen_hg_log_kernel(form, a, b, c, z, policy);
    return lc - (alpha + 0.5 * (m + 1)) * p.logdet() + log_f;
}

// ---------------------------------------------------------------------------
// Compound families
// ---------------------------------------------------------------------------

// Normal conditional with inverted hypergeometric gamma mixing:
//   f(X) = C  p+1Fq(a_1..a_p, a+n/2; b_1..b_q; Upsilon (Xi + Delta/2)^{-1})
//              / |Xi + Delta/2|^{a+n/2},
//   C = Gamma_m[a+n/2] |Xi|^a / ((2 pi)^{mn/2} Gamma_m[a] |Sigma|^{n/2}
//       |Theta|^{m/2} p+1Fq(a_1..a_p, a; b_1..b_q; Upsilon Xi^{-1})),
// with Delta the symmetrized kernel of (X - mu).
inline double logpdf_compound_thm1(double a, const SpdMatrix& xi, const Matrix& upsilon,
                                   const HypergeomSpec& spec,
                                   const EllipticalParams& params, const Matrix& x) {
    const int n = params.n(), m = params.m();
    if (xi.dim() != m || upsilon.rows() != m)
        throw DimensionError("logpdf_compound_thm1: dimension mismatch");
    detail::require(a > 0.5 * (m - 1),
                    "compound_thm1: parameter a = " + std::to_string(a) +
                        " violates the bound a > (m-1)/2");
    const double an = a + 0.5 * n;
    Matrix delta = quad_form(params, x);
    SpdMatrix shifted(xi.matrix() + 0.5 * delta);
    double log_fden, log_fnum;
    if (upsilon.isZero(0.0)) {
        log_fden = 0.0;
        log_fnum = 0.0;
    } else {
        HypergeomSpec den_spec = detail::augment_upper(spec, a);
        HypergeomSpec num_spec = detail::augment_upper(spec, an);
        log_fden = detail::log_hyperg(den_spec, detail::product_eigenvalues_inv(upsilon, xi),
                                      "compound_thm1 constant");
        log_fnum = detail::log_hyperg(num_spec,
                                      detail::product_eigenvalues_inv(upsilon, shifted),
                                      "compound_thm1 kernel");
    }
    double lc = mv_gamma_ln(m, an).log_magnitude + a * xi.logdet() -
                0.5 * m * n * std::log(2.0 * M_PI) - mv_gamma_ln(m, a).log_magnitude -
                0.5 * n * params.sigma.logdet() - 0.5 * m * params.theta.logdet() -
                log_fden;
    return lc + log_fnum - an * shifted.logdet();
}

// Normal conditional with inverted hypergeometric beta type II mixing.
// The closed form is a single hypergeometric only when the mixing series
// is the p = q = 0 one (the 0F0 kernel merges with the normal's etr);
// the derived form, confirmed by the m = 1 mixture oracle, is
//   f(X) = C 1F1(a+n/2; -b+(m+n+1)/2; Delta/2 - Xi),
//   C = beta_m[a+n/2, b-n/2] / ((2 pi)^{mn/2} beta_m[a,b] |Sigma|^{n/2}
//       |Theta|^{m/2} 1F1(a; -b+(m+1)/2; -Xi)).
// The printed constant carries the kernel's shifted parameters in the
// denominator series; that reading fails the oracle. See
// thm2_log_constant_printed for the rejected alternative.
inline double logpdf_compound_thm2(double a, double b, const Matrix& xi,
                                   const HypergeomSpec& spec,
                                   const EllipticalParams& params, const Matrix& x) {
    const int n = params.n(), m = params.m();
    if (xi.rows() != m) throw DimensionError("logpdf_compound_thm2: dimension mismatch");
    if (spec.p() != 0 || spec.q() != 0)
        throw DomainError("compound_thm2: the compound closed form requires the "
                          "p = q = 0 mixing series (got p = " + std::to_string(spec.p()) +
                          ", q = " + std::to_string(spec.q()) + ")");
    detail::require(a > 0.5 * (m - 1),
                    "compound_thm2: parameter a = " + std::to_string(a) +
                        " violates the bound a > (m-1)/2");
    int k1 = spec.truncation.max_degree;
    detail::require(b > 0.5 * (m + n - 1) + k1,
                    "compound_thm2: parameter b = " + std::to_string(b) +
                        " violates the bound b > (m+n-1)/2 + k1 (k1 surrogate " +
                        std::to_string(k1) + ")");
    const double an = a + 0.5 * n;
    Matrix delta = quad_form(params, x);
    Matrix z = 0.5 * delta - xi;
    double log_fconst = 0.0;
    if (!xi.isZero(0.0)) {
        HypergeomSpec cs{{a}, {-b + 0.5 * (m + 1)}, spec.truncation};
        auto eigs = symmetric_eigenvalues(Matrix(-xi));
        log_fconst = detail::log_hyperg(cs, eigs, "compound_thm2 constant");
    }
    HypergeomSpec ks{{an}, {-b + 0.5 * (m + n + 1)}, spec.truncation};
    double log_fker = detail::log_hyperg(ks, z, "compound_thm2 kernel");
    double lc = -0.5 * m * n * std::log(2.0 * M_PI) +
                mv_beta_ln(m, an, b - 0.5 * n).log_magnitude -
                mv_beta_ln(m, a, b).log_magnitude - 0.5 * n * params.sigma.logdet() -
                0.5 * m * params.theta.logdet() - log_fconst;
    return lc + log_fker;
}

// The theorem's printed constant (denominator series with the kernel's
// shifted parameters). Kept so the verification suite can run both readings
// and report which one the mixture oracle confirms.
inline double thm2_log_constant_printed_minus_derived(double a, double b,
                                                      const Matrix& xi, int m, int n,
                                                      const TruncationPolicy& policy) {
    if (xi.isZero(0.0)) return 0.0;
    HypergeomSpec printed{{a + 0.5 * n}, {-b + 0.5 * (m + n + 1)}, policy};
    HypergeomSpec derived{{a}, {-b + 0.5 * (m + 1)}, policy};
    auto eigs = symmetric_eigenvalues(Matrix(-xi));
    // density_printed = density_derived + (log_fconst_derived - log_fconst_printed)
    return detail::log_hyperg(derived, eigs, "thm2 constant (derived)") -
           detail::log_hyperg(printed, eigs, "thm2 constant (printed)");
}

// Normal conditional with inverted generalised hypergeometric mixing.
// Requires a nonsingular kernel (n >= m and X - mu of full rank). The
// hypergeometric factor has argument -2 Xi Delta^{-1}; the gauss form's
// 3F1 is a zero-radius series evaluated by smallest-term truncation.
//   gauss:     C3 |Delta|^{-(alpha+n/2)} 3F1(a, b, alpha+n/2; c; -2 Xi Delta^{-1})
//   confluent: C3' |Delta|^{-(alpha+n/2)} 2F1(b, alpha+n/2; c; -2 Xi Delta^{-1})
// with C3 = 2^{m alpha} |Xi|^alpha Gamma_m[alpha+n/2] beta_m[a, c-a] /
//   (pi^{mn/2} beta_m[alpha, b-alpha] beta_m[a-alpha, c-a] |Sigma|^{n/2} |Theta|^{m/2})
// (the corrected constant; the confluent constant carries |Xi|^alpha once).
inline double logpdf_compound_thm3(GenHgForm form, double alpha, double a, double b,
                                   double c, const SpdMatrix& xi,
                                   const EllipticalParams& params, const Matrix& x,
                                   TruncationPolicy policy = {}) {
    const int n = params.n(), m = params.m();
    if (xi.dim() != m) throw DimensionError("logpdf_compound_thm3: dimension mismatch");
    if (n < m)
        throw DomainError("compound_thm3: kernel requires n >= m so Delta is nonsingular");
    double lc_mixing = detail::gen_hg_log_constant(m, form, alpha, a, b, c, xi);
    const double an = alpha + 0.5 * n;
    Matrix delta = quad_form(params, x);
    auto delta_eigs = symmetric_eigenvalues(delta);
    double logdet_delta = detail::log_det_from_eigs(delta_eigs, "compound_thm3");
    SpdMatrix delta_spd(delta);
    auto arg = detail::product_eigenvalues_inv(Matrix(-2.0 * xi.matrix()), delta_spd);
    double log_f;
    if (form == GenHgForm::gauss) {
        // zero-radius series: smallest-term truncation, or exact when it
        // happens to terminate
        TruncationPolicy p = policy;
        p.allow_asymptotic = true;
        HypergeomSpec s{{a, b, an}, {c}, p};
        double v = (m == 1) ? hyperg_scalar(s, arg[0]).value
                            : hyperg_matrix_eigs(s, arg).value;
        if (!(v > 0.0)) throw Error("compound_thm3: 3F1 factor is not positive");
        log_f = std::log(v);
    } else {
        auto r = gauss_2f1_ln(b, an, c, arg, policy);
        if (r.value.sign <= 0) throw Error("compound_thm3: 2F1 factor is not positive");
        log_f = r.value.log_magnitude;
    }
    // lc_mixing carries |Xi|^alpha and the beta/gamma ratios; compounding
    // adds 2^{m alpha} Gamma_m[alpha + n/2] / pi^{mn/2} and the Sigma/Theta
    // determinants.
    double lc = m * alpha * std::log(2.0) + lc_mixing +
                mv_gamma_ln(m, an).log_magnitude - 0.5 * m * n * std::log(M_PI) -
                0.5 * n * params.sigma.logdet() - 0.5 * m * params.theta.logdet();
    return lc - an * logdet_delta + log_f;
}

// Matricvariate T conditional with central inverted beta type II mixing
// (Xi = 0):
//   f(X) = C4 2F1((n+nu)/2, a+n/2; -b+(m+n+1)/2; Delta),
//   C4 = Gamma_m[(n+nu)/2] beta_m[a+n/2, b-n/2] /
//        (pi^{mn/2} Gamma_m[nu/2] beta_m[a,b] |Sigma|^{n/2} |Theta|^{m/2}).
// Inside the unit ball the series is summed directly; outside it the
// Euler-transformed form is used where it terminates, otherwise the point
// is outside the evaluable domain and an error is raised.
inline double logpdf_compound_thm4(double nu, double a, double b,
                                   const EllipticalParams& params, const Matrix& x,
                                   TruncationPolicy policy = {}) {
    const int n = params.n(), m = params.m();
    detail::require(nu > m - 1, "compound_thm4: parameter nu = " + std::to_string(nu) +
                                    " violates the bound nu > m - 1");
    detail::require(a > 0.5 * (m - 1),
                    "compound_thm4: parameter a = " + std::to_string(a) +
                        " violates the bound a > (m-1)/2");
    int k1 = policy.max_degree;
    detail::require(b > 0.5 * (m + n - 1) + k1,
                    "compound_thm4: parameter b = " + std::to_string(b) +
                        " violates the bound b > (m+n-1)/2 + k1 (k1 surrogate " +
                        std::to_string(k1) + ")");
    Matrix delta = quad_form(params, x);
    auto eigs = symmetric_eigenvalues(delta);
    auto r = gauss_2f1_ln(0.5 * (n + nu), a + 0.5 * n, -b + 0.5 * (m + n + 1), eigs,
                          policy);
    if (r.value.sign <= 0)
        throw Error("compound_thm4: 2F1 kernel is not positive");
    double lc = mv_gamma_ln(m, 0.5 * (n + nu)).log_magnitude +
                mv_beta_ln(m, a + 0.5 * n, b - 0.5 * n).log_magnitude -
                0.5 * m * n * std::log(M_PI) - mv_gamma_ln(m, 0.5 * nu).log_magnitude -
                mv_beta_ln(m, a, b).log_magnitude - 0.5 * n * params.sigma.logdet() -
                0.5 * m * params.theta.logdet();
    return lc + r.value.log_magnitude;
}

// Euler-transformed expression of the same density; agrees with the direct
// form where both converge.
inline double logpdf_compound_thm4_euler(double nu, double a, double b,
                                         const EllipticalParams& params, const Matrix& x,
                                         TruncationPolicy policy = {}) {
    const int n = params.n(), m = params.m();
    const double A = 0.5 * (n + nu), B = a + 0.5 * n, C = -b + 0.5 * (m + n + 1);
    Matrix delta = quad_form(params, x);
    auto eigs = symmetric_eigenvalues(delta);
    double log_pref = 0.0;
    for (double e : eigs) {
        double f = 1.0 - e;
        if (f <= 0.0)
            throw DivergenceError("compound_thm4_euler: |I - Delta| not positive");
        log_pref += std::log(f);
    }
    HypergeomSpec ts{{C - A, C - B}, {C}, policy};
    double rho = detail::spectral_radius(eigs);
    if (rho < 1.0 && !detail::termination_degree(ts.upper, m)) {
        int needed = static_cast<int>(std::ceil(std::log(1e-13) / std::log(std::max(rho, 1e-6)))) + 8;
        ts.truncation.max_degree = std::clamp(needed, policy.max_degree, policy.table_ceiling);
    }
    double log_f = detail::log_hyperg(ts, eigs, "compound_thm4 euler kernel");
    double lc = mv_gamma_ln(m, A).log_magnitude +
                mv_beta_ln(m, B, b - 0.5 * n).log_magnitude -
                0.5 * m * n * std::log(M_PI) - mv_gamma_ln(m, 0.5 * nu).log_magnitude -
                mv_beta_ln(m, a, b).log_magnitude - 0.5 * n * params.sigma.logdet() -
                0.5 * m * params.theta.logdet();
    return lc + (C - A - B) * log_pref + log_f;
}

// Scale mixture (m = 1 mixing law applied to an n x m normal):
//   f(X) = C5 p+1Fq(a_1..a_p, a+mn/2; b_1..b_q; upsilon / (xi + tr/2))
//              / (xi + tr/2)^{a+mn/2},
//   C5 = Gamma[a+mn/2] xi^a / ((2 pi)^{mn/2} Gamma[a] |Sigma|^{n/2}
//        |Theta|^{m/2} p+1Fq(a_1..a_p, a; b_1..b_q; upsilon/xi)),
// with tr = tr Sigma^{-1}(X-mu)' Theta^{-1}(X-mu).
inline double logpdf_scale_mixture_thm5(double a, double xi, double upsilon,
                                        const HypergeomSpec& spec,
                                        const EllipticalParams& params, const Matrix& x) {
    const int n = params.n(), m = params.m();
    detail::require(a > 0.0, "scale_mixture_thm5: parameter a = " + std::to_string(a) +
                                 " violates the bound a > 0");
    detail::require(xi > 0.0, "scale_mixture_thm5: parameter xi = " + std::to_string(xi) +
                                  " violates the bound xi > 0");
    detail::require(upsilon >= 0.0,
                    "scale_mixture_thm5: parameter upsilon = " + std::to_string(upsilon) +
                        " violates the bound upsilon >= 0");
    const double amn = a + 0.5 * m * n;
    double tr = quad_form_trace(params, x);
    double shifted = xi + 0.5 * tr;
    double log_fden = 0.0, log_fnum = 0.0;
    if (upsilon > 0.0) {
        HypergeomSpec den_spec = detail::augment_upper(spec, a);
        HypergeomSpec num_spec = detail::augment_upper(spec, amn);
        double zden = upsilon / xi, znum = upsilon / shifted;
        std::vector<double> e1{zden}, e2{znum};
        log_fden = detail::log_hyperg(den_spec, e1, "scale_mixture constant");
        log_fnum = detail::log_hyperg(num_spec, e2, "scale_mixture kernel");
    }
    double lc = std::lgamma(amn) + a * std::log(xi) - 0.5 * m * n * std::log(2.0 * M_PI) -
                std::lgamma(a) - 0.5 * n * params.sigma.logdet() -
                0.5 * m * params.theta.logdet() - log_fden;
    return lc + log_fnum - amn * std::log(shifted);
}

// ---------------------------------------------------------------------------
// Tagged union over all families
// ---------------------------------------------------------------------------

struct MatrixNormalSpec {
    EllipticalParams params;
};
struct MatricvariateTSpec {
    double nu;
    EllipticalParams params;
};
struct HgGammaSpec {
    double a;
    SpdMatrix xi;
    Matrix upsilon;
    HypergeomSpec series;
    bool inverted = false;
};
struct HgBeta2Spec {
    double a, b;
    Matrix xi;
    HypergeomSpec series;
    bool inverted = false;
};
struct GenHgSpec {
    GenHgForm form;
    double alpha, a, b, c;
    SpdMatrix xi;
    TruncationPolicy truncation{};
    bool inverted = false;
};
struct CompoundThm1Spec {
    double a;
    SpdMatrix xi;
    Matrix upsilon;
    HypergeomSpec series;
    EllipticalParams params;
};
struct CompoundThm2Spec {
    double a, b;
    Matrix xi;
    HypergeomSpec series;
    EllipticalParams params;
};
struct CompoundThm3Spec {
    GenHgForm form;
    double alpha, a, b, c;
    SpdMatrix xi;
    TruncationPolicy truncation{};
    EllipticalParams params;
};
struct CompoundThm4Spec {
    double nu, a, b;
    TruncationPolicy truncation{};
    EllipticalParams params;
};
struct ScaleMixThm5Spec {
    double a, xi, upsilon;
    HypergeomSpec series;
    EllipticalParams params;
};

using DistributionSpec =
    std::variant<MatrixNormalSpec, MatricvariateTSpec, HgGammaSpec, HgBeta2Spec,
                 GenHgSpec, CompoundThm1Spec, CompoundThm2Spec, CompoundThm3Spec,
                 CompoundThm4Spec, ScaleMixThm5Spec>;

// Log density of a point under a family spec. Matrix-domain families take
// the point as an m x m SPD matrix; matrix-variate families as an n x m
// observation.
inline double logpdf(const DistributionSpec& spec, const Matrix& point) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MatrixNormalSpec>) {
                return logpdf_matrix_normal(s.params, point);
            } else if constexpr (std::is_same_v<T, MatricvariateTSpec>) {
                return logpdf_matricvariate_t(s.nu, s.params, point);
            } else if constexpr (std::is_same_v<T, HgGammaSpec>) {
                SpdMatrix p(point);
                return s.inverted ? logpdf_hg_gamma_inv(s.a, s.xi, s.upsilon, s.series, p)
                                  : logpdf_hg_gamma(s.a, s.xi, s.upsilon, s.series, p);
            } else if constexpr (std::is_same_v<T, HgBeta2Spec>) {
                SpdMatrix p(point);
                return s.inverted ? logpdf_hg_beta2_inv(s.a, s.b, s.xi, s.series, p)
                                  : logpdf_hg_beta2(s.a, s.b, s.xi, s.series, p);
            } else if constexpr (std::is_same_v<T, GenHgSpec>) {
                SpdMatrix p(point);
                return s.inverted
                           ? logpdf_gen_hg_inv(s.form, s.alpha, s.a, s.b, s.c, s.xi, p,
                                               s.truncation)
                           : logpdf_gen_hg(s.form, s.alpha, s.a, s.b, s.c, s.xi, p,
                                           s.truncation);
            } else if constexpr (std::is_same_v<T, CompoundThm1Spec>) {
                return logpdf_compound_thm1(s.a, s.xi, s.upsilon, s.series, s.params,
                                            point);
            } else if constexpr (std::is_same_v<T, CompoundThm2Spec>) {
                return logpdf_compound_thm2(s.a, s.b, s.xi, s.series, s.params, point);
            } else if constexpr (std::is_same_v<T, CompoundThm3Spec>) {
                return logpdf_compound_thm3(s.form, s.alpha, s.a, s.b, s.c, s.xi,
                                            s.params, point, s.truncation);
            } else if constexpr (std::is_same_v<T, CompoundThm4Spec>) {
                return logpdf_compound_thm4(s.nu, s.a, s.b, s.params, point,
                                            s.truncation);
            } else {
                return logpdf_scale_mixture_thm5(s.a, s.xi, s.upsilon, s.series,
                                                 s.params, point);
            }
        },
        spec);
}

}  // namespace mvhg

#endif
