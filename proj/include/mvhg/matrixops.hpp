#ifndef MVHG_MATRIXOPS_HPP
#define MVHG_MATRIXOPS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mvhg/common.hpp"

namespace mvhg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Real symmetric positive definite matrix. Validates at construction
// (symmetry to 1e-12 relative, positive definiteness via Cholesky; on
// failure the smallest eigenvalue is reported). Factorization, eigenvalues
// and log-determinant are computed once and immutable afterwards, so
// instances are freely shareable across threads.
class SpdMatrix {
  public:
    explicit SpdMatrix(Matrix a) : mat_(std::move(a)) {
        if (mat_.rows() != mat_.cols())
            throw DimensionError("SpdMatrix: matrix is not square");
        const double scale = std::max(1.0, mat_.cwiseAbs().maxCoeff());
        if ((mat_ - mat_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw NotSpdError("SpdMatrix: matrix is not symmetric", 0.0);
        mat_ = 0.5 * (mat_ + mat_.transpose());
        llt_.compute(mat_);
        Eigen::SelfAdjointEigenSolver<Matrix> es(mat_);
        eigs_ = es.eigenvalues().reverse();  // descending
        if (llt_.info() != Eigen::Success || eigs_.minCoeff() <= 0.0) {
            std::ostringstream os;
            os << "SpdMatrix: matrix is not positive definite (smallest eigenvalue "
               << eigs_.minCoeff() << ")";
            throw NotSpdError(os.str(), eigs_.minCoeff());
        }
        eigvecs_ = es.eigenvectors();
        logdet_ = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
    }

    static SpdMatrix identity(int m) { return SpdMatrix(Matrix::Identity(m, m)); }

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& matrix() const { return mat_; }
    double logdet() const { return logdet_; }

    // Eigenvalues sorted descending.
    std::vector<double> eigenvalues() const {
        return {eigs_.data(), eigs_.data() + eigs_.size()};
    }

    Matrix inverse() const {
        return llt_.solve(Matrix::Identity(dim(), dim()));
    }

    SpdMatrix inverse_spd() const { return SpdMatrix(inverse()); }

    // Symmetric positive definite square root (eigendecomposition, not
    // Cholesky: the theorems use Sigma^{1/2} P Sigma^{1/2} with the
    // symmetric root).
    SpdMatrix sqrt_spd() const {
        Matrix r = eigvecs_ *
                   eigs_.reverse().array().sqrt().matrix().asDiagonal() *
                   eigvecs_.transpose();
        return SpdMatrix(std::move(r));
    }

    Matrix inverse_sqrt() const {
        return eigvecs_ *
               eigs_.reverse().array().rsqrt().matrix().asDiagonal() *
               eigvecs_.transpose();
    }

    Matrix cholesky_lower() const { return llt_.matrixL(); }

  private:
    Matrix mat_;
    Eigen::LLT<Matrix> llt_;
    Vector eigs_;
    Matrix eigvecs_;
    double logdet_ = 0.0;
};

inline SpdMatrix spd_sqrt(const SpdMatrix& a) { return a.sqrt_spd(); }
inline Matrix spd_inverse(const SpdMatrix& a) { return a.inverse(); }
inline double logdet(const SpdMatrix& a) { return a.logdet(); }
inline std::vector<double> eigenvalues(const SpdMatrix& a) { return a.eigenvalues(); }

// Eigenvalues of a plain symmetric matrix, descending.
inline std::vector<double> symmetric_eigenvalues(const Matrix& a) {
    if (a.rows() != a.cols())
        throw DimensionError("symmetric_eigenvalues: matrix is not square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
    Vector v = es.eigenvalues().reverse();
    return {v.data(), v.data() + v.size()};
}

// Location/scale triple shared by all matrix-variate families. The paper's
// symbol shapes only conform under one reading, which this library adopts
// throughout: the observation X and location mu are n x m, Theta (n x n)
// scales rows, Sigma (m x m) scales columns, and the density kernel is
// Sigma^{-1} (X-mu)' Theta^{-1} (X-mu), an m x m matrix.
struct EllipticalParams {
    Matrix mu;        // n x m
    SpdMatrix sigma;  // m x m
    SpdMatrix theta;  // n x n

    EllipticalParams(Matrix mu_, SpdMatrix sigma_, SpdMatrix theta_)
        : mu(std::move(mu_)), sigma(std::move(sigma_)), theta(std::move(theta_)) {
        if (mu.cols() != sigma.dim() || mu.rows() != theta.dim()) {
            std::ostringstream os;
            os << "EllipticalParams: mu is " << mu.rows() << "x" << mu.cols()
               << " but theta is " << theta.dim() << "x" << theta.dim()
               << " and sigma is " << sigma.dim() << "x" << sigma.dim();
            throw DimensionError(os.str());
        }
    }

    int n() const { return static_cast<int>(mu.rows()); }
    int m() const { return static_cast<int>(mu.cols()); }

    void check_point(const Matrix& x) const {
        if (x.rows() != mu.rows() || x.cols() != mu.cols()) {
            std::ostringstream os;
            os << "point is " << x.rows() << "x" << x.cols() << " but mu is "
               << mu.rows() << "x" << mu.cols();
            throw DimensionError(os.str());
        }
    }
};

// Symmetrized density kernel Sigma^{-1/2} (X-mu)' Theta^{-1} (X-mu) Sigma^{-1/2}.
// Symmetric positive semi-definite, with the same eigenvalues as the
// unsymmetrized Sigma^{-1} (X-mu)' Theta^{-1} (X-mu).
inline Matrix quad_form(const EllipticalParams& params, const Matrix& x) {
    params.check_point(x);
    Matrix d = x - params.mu;                                   // n x m
    Matrix w = params.theta.cholesky_lower().triangularView<Eigen::Lower>().solve(d);
    Matrix core = w.transpose() * w;                            // (X-mu)' Theta^{-1} (X-mu)
    Matrix si = params.sigma.inverse_sqrt();
    Matrix out = si * core * si;
    return 0.5 * (out + out.transpose());
}

// tr Sigma^{-1} (X-mu)' Theta^{-1} (X-mu), the scalar kernel of the scale
// mixture construction.
inline double quad_form_trace(const EllipticalParams& params, const Matrix& x) {
    return quad_form(params, x).trace();
}

}  // namespace mvhg

#endif
