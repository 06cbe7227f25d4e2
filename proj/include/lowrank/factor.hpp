#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lowrank {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Relative singular-value cutoff used everywhere a numerical rank is needed.
inline double rank_threshold(Eigen::Index rows, Eigen::Index cols) {
    return static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon();
}

/// An n-by-r factor, the variable X or the ground truth Z of the
/// low-rank sensing problem min_X ||A(XX^T - ZZ^T)||^2.
class FactorMatrix {
public:
    explicit FactorMatrix(MatrixXd entries) : entries_(std::move(entries)) {
        if (entries_.rows() < 1 || entries_.cols() < 1)
            throw std::invalid_argument("FactorMatrix: empty matrix");
        if (entries_.cols() > entries_.rows())
            throw std::invalid_argument("FactorMatrix: requires r <= n");
        if (!entries_.allFinite())
            throw std::invalid_argument("FactorMatrix: non-finite entries");
    }

    static FactorMatrix zero(Eigen::Index n, Eigen::Index r) {
        return FactorMatrix(MatrixXd::Zero(n, r));
    }

    Eigen::Index n() const { return entries_.rows(); }
    Eigen::Index r() const { return entries_.cols(); }
    const MatrixXd& data() const { return entries_; }

    MatrixXd gram() const { return entries_ * entries_.transpose(); }
    double norm() const { return entries_.norm(); }

    /// Numerical rank with singular values below max(n,r)*eps*sigma_max
    /// treated as zero.
    Eigen::Index numerical_rank() const {
        Eigen::JacobiSVD<MatrixXd> svd(entries_);
        const double tol = rank_threshold(n(), r()) * svd.singularValues()(0);
        Eigen::Index q = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > tol) ++q;
        return q;
    }

    /// Smallest singular value (of the full r columns, zero if rank deficient).
    double sigma_min() const {
        Eigen::JacobiSVD<MatrixXd> svd(entries_);
        return svd.singularValues()(svd.singularValues().size() - 1);
    }

private:
    MatrixXd entries_;
};

/// Column-major stacking; preserves the Frobenius norm.
inline VectorXd vectorize(const MatrixXd& M) {
    return Eigen::Map<const VectorXd>(M.data(), M.size());
}

/// Inverse of vectorize for square n-by-n inputs.
inline MatrixXd unvectorize(const VectorXd& v, Eigen::Index n) {
    if (v.size() != n * n)
        throw std::invalid_argument("unvectorize: length is not n^2");
    return Eigen::Map<const MatrixXd>(v.data(), n, n);
}

/// e = vec(XX^T - ZZ^T).
inline VectorXd error_vector(const FactorMatrix& X, const FactorMatrix& Z) {
    if (X.n() != Z.n())
        throw std::invalid_argument("error_vector: row dimension mismatch");
    return vectorize(X.gram() - Z.gram());
}

/// XY^T + YX^T without materializing the Jacobian.
inline MatrixXd jacobian_apply(const FactorMatrix& X, const MatrixXd& Y) {
    if (Y.rows() != X.n() || Y.cols() != X.r())
        throw std::invalid_argument("jacobian_apply: direction shape mismatch");
    MatrixXd S = X.data() * Y.transpose();
    return S + S.transpose();
}

/// The n^2-by-nr matrix J with J vec(Y) = vec(XY^T + YX^T), assembled
/// column by column from the basis matrices E_ij.
inline MatrixXd jacobian_matrix(const FactorMatrix& X) {
    const Eigen::Index n = X.n(), r = X.r();
    MatrixXd J(n * n, n * r);
    for (Eigen::Index j = 0; j < r; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            // Y = E_ij: X E_ij^T + E_ij X^T = (col_j X) e_i^T + e_i (col_j X)^T
            MatrixXd col = MatrixXd::Zero(n, n);
            col.col(i) = X.data().col(j);
            col.row(i) += X.data().col(j).transpose();
            J.col(j * n + i) = vectorize(col);
        }
    }
    return J;
}

struct Rank2Eigvals {
    double lambda_max;
    double lambda_min;
    double cos_angle;
};

/// Nonzero eigenvalues of ab^T + ba^T: ||a||*||b||*(cos(angle) +/- 1).
inline Rank2Eigvals rank2_eigvals(const VectorXd& a, const VectorXd& b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("rank2_eigvals: zero input vector");
    if (a.size() != b.size())
        throw std::invalid_argument("rank2_eigvals: length mismatch");
    double c = a.dot(b) / (na * nb);
    c = std::clamp(c, -1.0, 1.0);
    return {na * nb * (1.0 + c), -na * nb * (1.0 - c), c};
}

/// Moore-Penrose pseudo-inverse via SVD with the shared rank threshold.
inline MatrixXd pseudo_inverse(const FactorMatrix& X) {
    Eigen::JacobiSVD<MatrixXd> svd(X.data(),
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0)
        return MatrixXd::Zero(X.r(), X.n());
    const double tol = rank_threshold(X.n(), X.r()) * s(0);
    VectorXd inv = VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Orthonormal basis of range(X); columns = numerical rank.
inline MatrixXd range_basis(const FactorMatrix& X) {
    Eigen::JacobiSVD<MatrixXd> svd(X.data(), Eigen::ComputeThinU);
    const VectorXd& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return MatrixXd(X.n(), 0);
    const double tol = rank_threshold(X.n(), X.r()) * s(0);
    Eigen::Index q = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol) ++q;
    return svd.matrixU().leftCols(q);
}

/// Geometry of a candidate/ground-truth pair: error vector, Jacobian,
/// least-squares residual and the incidence angle between them.
struct CriticalPointGeometry {
    VectorXd e;            // vec(XX^T - ZZ^T)
    MatrixXd jac;          // n^2 x nr
    VectorXd y_star;       // argmin_y ||e - jac*y||
    double residual_norm;  // ||e - jac*y_star||
    double sin_theta;
    double cos_theta;
};

inline CriticalPointGeometry critical_point_geometry(const FactorMatrix& X,
                                                     const FactorMatrix& Z) {
    CriticalPointGeometry g;
    g.e = error_vector(X, Z);
    g.jac = jacobian_matrix(X);
    Eigen::JacobiSVD<MatrixXd> svd(g.jac,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rank_threshold(g.jac.rows(), g.jac.cols()));
    g.y_star = svd.solve(g.e);
    VectorXd w = g.e - g.jac * g.y_star;
    g.residual_norm = w.norm();
    const double en = g.e.norm();
    if (en == 0.0) {
        g.sin_theta = 0.0;
        g.cos_theta = 1.0;
    } else {
        g.sin_theta = std::clamp(g.residual_norm / en, 0.0, 1.0);
        g.cos_theta = std::clamp((g.jac * g.y_star).norm() / en, 0.0, 1.0);
    }
    return g;
}

}  // namespace lowrank
