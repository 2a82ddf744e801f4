#ifndef MVHG_SAMPLERS_HPP
#define MVHG_SAMPLERS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include "mvhg/common.hpp"
#include "mvhg/matrixops.hpp"

namespace mvhg {

// Reproducible random stream. The (seed, stream) pair is hashed through
// SplitMix64 into the engine state, so distinct stream ids give independent
// sequences and equal pairs give byte-identical ones regardless of thread
// count. The variate transformations below are hand-rolled so the sequence
// is pinned by this library, not by the standard library vendor.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {
        std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        engine_.seed(splitmix64(s));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // uniform on (0, 1), endpoints excluded
    double uniform() {
        std::uint64_t r = engine_();
        return (static_cast<double>(r >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
    double gamma(double shape, double scale = 1.0) {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw DomainError("RngStream::gamma: shape and scale must be > 0");
        if (shape < 1.0) {
            double u = uniform();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
        }
    }

    double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

  private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_, stream_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Draw from the matrix normal with kernel etr{-1/2 Sigma^{-1}(X-mu)'Theta^{-1}(X-mu)}:
// X = mu + L_theta Z L_sigma', Z iid standard normal, so vec(X) has
// covariance Sigma (x) Theta under column-major stacking of the n x m draw.
inline Matrix sample_matrix_normal(const EllipticalParams& params, RngStream& rng) {
    const int n = params.n(), m = params.m();
    Matrix z(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) z(i, j) = rng.normal();
    return params.mu + params.theta.cholesky_lower() * z *
                           params.sigma.cholesky_lower().transpose();
}

// Bartlett construction: W = L T T' L' with T lower triangular,
// T_ii^2 ~ chi^2(dof - i + 1), T_ij ~ N(0,1). Valid for real dof > m - 1.
inline SpdMatrix sample_wishart(double dof, const SpdMatrix& scale, RngStream& rng) {
    const int m = scale.dim();
    if (!(dof > m - 1))
        throw DomainError("sample_wishart: dof must exceed m - 1");
    Matrix t = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        t(i, i) = std::sqrt(rng.chi_squared(dof - i));
        for (int j = 0; j < i; ++j) t(i, j) = rng.normal();
    }
    Matrix l = scale.cholesky_lower() * t;
    return SpdMatrix(l * l.transpose());
}

// Matrix gamma draw with density etr{-Xi A} |A|^{a-(m+1)/2} |Xi|^a / Gamma_m[a];
// equivalently Wishart with dof 2a and scale (2 Xi)^{-1}.
inline SpdMatrix sample_matrix_gamma(double a, const SpdMatrix& xi, RngStream& rng) {
    const int m = xi.dim();
    if (!(2.0 * a > m - 1))
        throw DomainError("sample_matrix_gamma: requires 2a > m - 1");
    SpdMatrix scale(0.5 * xi.inverse());
    return sample_wishart(2.0 * a, scale, rng);
}

// Central inverted hypergeometric gamma draw (the Upsilon = 0 special case):
// P = W^{-1} with W the matrix gamma above.
inline SpdMatrix sample_inv_hg_gamma_special(double a, const SpdMatrix& xi,
                                             RngStream& rng) {
    SpdMatrix w = sample_matrix_gamma(a, xi, rng);
    return SpdMatrix(w.inverse());
}

// Matrix beta type II draw, density |Y|^{a-(m+1)/2} |I+Y|^{-(a+b)} / beta_m[a,b]:
// Y = B^{-1/2} A B^{-1/2} from independent matrix gammas A ~ (a, I), B ~ (b, I).
inline SpdMatrix sample_matrix_beta2(double a, double b, int m, RngStream& rng) {
    SpdMatrix id = SpdMatrix::identity(m);
    SpdMatrix ga = sample_matrix_gamma(a, id, rng);
    SpdMatrix gb = sample_matrix_gamma(b, id, rng);
    Matrix bis = gb.inverse_sqrt();
    Matrix y = bis * ga.matrix() * bis;
    return SpdMatrix(0.5 * (y + y.transpose()));
}

// Central inverted beta type II draw (the Xi = 0 special case of the
// inverted family), density |P|^{b-(m+1)/2} |I+P|^{-(a+b)} / beta_m[a,b].
inline SpdMatrix sample_inv_hg_beta2_special(double a, double b, int m,
                                             RngStream& rng) {
    SpdMatrix y = sample_matrix_beta2(a, b, m, rng);
    return SpdMatrix(y.inverse());
}

// Matricvariate T draw via its gamma-mixture representation: P inverted
// gamma with a = nu/2, Xi = I/2 gives scale Sigma^{1/2}(2 Xi)Sigma^{1/2} = Sigma.
inline Matrix sample_matricvariate_t(double nu, const EllipticalParams& params,
                                     RngStream& rng) {
    const int m = params.m();
    if (!(nu > m - 1))
        throw DomainError("sample_matricvariate_t: nu must exceed m - 1");
    SpdMatrix half_id(0.5 * Matrix::Identity(m, m));
    SpdMatrix p = sample_inv_hg_gamma_special(0.5 * nu, half_id, rng);
    Matrix root = params.sigma.sqrt_spd().matrix();
    SpdMatrix scaled(root * p.matrix() * root);
    EllipticalParams cond(params.mu, std::move(scaled), params.theta);
    return sample_matrix_normal(cond, rng);
}

using MixingSampler = std::function<SpdMatrix(RngStream&)>;
using ConditionalSampler = std::function<Matrix(const SpdMatrix&, RngStream&)>;

// Compound construction: draw P from the mixing law, then X | P from the
// conditional with column scale Sigma^{1/2} P Sigma^{1/2}.
inline Matrix sample_compound(const MixingSampler& mixing,
                              const ConditionalSampler& conditional, RngStream& rng) {
    SpdMatrix p = mixing(rng);
    return conditional(p, rng);
}

// Conditional matrix normal X | P for the theorem compounds.
inline ConditionalSampler normal_conditional(const EllipticalParams& params) {
    return [params](const SpdMatrix& p, RngStream& rng) {
        Matrix root = params.sigma.sqrt_spd().matrix();
        SpdMatrix scaled(root * p.matrix() * root);
        EllipticalParams cond(params.mu, std::move(scaled), params.theta);
        return sample_matrix_normal(cond, rng);
    };
}

// Conditional matricvariate T X | P.
inline ConditionalSampler t_conditional(double nu, const EllipticalParams& params) {
    return [nu, params](const SpdMatrix& p, RngStream& rng) {
        Matrix root = params.sigma.sqrt_spd().matrix();
        SpdMatrix scaled(root * p.matrix() * root);
        EllipticalParams cond(params.mu, std::move(scaled), params.theta);
        return sample_matricvariate_t(nu, cond, rng);
    };
}

}  // namespace mvhg

#endif
