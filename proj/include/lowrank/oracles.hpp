#pragma once

// Independent reference computations used by the verification suite and the
// tests. Nothing here calls the closed-form threshold path it is meant to
// check.

#include <cmath>
#include <functional>

#include "lowrank/factor.hpp"
#include "lowrank/sensing.hpp"

namespace lowrank::oracles {

/// Grid oracle for the eigen-splitting program: for a fixed alpha the
/// minimal feasible objective is 1 - alpha*tr(M) provided tr([alpha M]_+)
/// does not exceed 1. Scans alpha and refines around the best point.
inline double alpha_grid_split_value(const MatrixXd& M, int points = 4001,
                                     int stages = 4) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const VectorXd lam = es.eigenvalues();
    double pos = 0.0, neg = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        (lam(i) > 0.0 ? pos : neg) += std::abs(lam(i));
    if (pos == 0.0 || neg == 0.0) return 0.0;

    const double trace = lam.sum();
    auto pos_part = [&](double alpha) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            s += std::max(0.0, alpha * lam(i));
        return s;
    };

    double lo = -2.0 / neg, hi = 2.0 / pos;
    double best = 1.0, best_alpha = 0.0;
    for (int stage = 0; stage < stages; ++stage) {
        const double step = (hi - lo) / (points - 1);
        for (int i = 0; i < points; ++i) {
            const double alpha = lo + i * step;
            if (pos_part(alpha) > 1.0) continue;
            const double value = 1.0 - alpha * trace;
            if (value < best) {
                best = value;
                best_alpha = alpha;
            }
        }
        lo = best_alpha - step;
        hi = best_alpha + step;
    }
    return best;
}

/// Central finite differences of the sensing objective, entry by entry.
inline MatrixXd fd_gradient(const SensingOperator& A, const FactorMatrix& X,
                            const VectorXd& b, double h) {
    MatrixXd out(X.n(), X.r());
    for (Eigen::Index j = 0; j < X.r(); ++j)
        for (Eigen::Index i = 0; i < X.n(); ++i) {
            MatrixXd Xp = X.data(), Xm = X.data();
            Xp(i, j) += h;
            Xm(i, j) -= h;
            out(i, j) = (objective(A, FactorMatrix(Xp), b) -
                         objective(A, FactorMatrix(Xm), b)) /
                        (2.0 * h);
        }
    return out;
}

/// Second central difference of the objective along direction Y.
inline double fd_second_difference(const SensingOperator& A,
                                   const FactorMatrix& X, const VectorXd& b,
                                   const MatrixXd& Y, double h) {
    const double fp = objective(A, FactorMatrix(X.data() + h * Y), b);
    const double fm = objective(A, FactorMatrix(X.data() - h * Y), b);
    const double f0 = objective(A, X, b);
    return (fp - 2.0 * f0 + fm) / (h * h);
}

/// All eigenvalues of ab^T + ba^T from a dense symmetric eigensolver,
/// ascending.
inline VectorXd dense_rank2_spectrum(const VectorXd& a, const VectorXd& b) {
    MatrixXd M = a * b.transpose() + b * a.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Normal-equations pseudo-inverse for full-column-rank X.
inline MatrixXd normal_equations_pinv(const MatrixXd& X) {
    return (X.transpose() * X).inverse() * X.transpose();
}

}  // namespace lowrank::oracles
