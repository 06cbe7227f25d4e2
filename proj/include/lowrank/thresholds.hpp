#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "lowrank/factor.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

/// Raised when XX^T = ZZ^T within tolerance and a formula with the
/// Frobenius distance in its denominator is requested.
struct CoincidentPointError : std::domain_error {
    using std::domain_error::domain_error;
};

inline constexpr double kCoincidenceTol = 1e-12;

inline bool coincident(const FactorMatrix& X, const FactorMatrix& Z,
                       double tol = kCoincidenceTol) {
    const double zz = Z.gram().norm();
    return (X.gram() - Z.gram()).norm() <= tol * std::max(1.0, zz);
}

/// C = ||ZZ^T||_F / sigma_min^2(Z), the conditioning constant governing how
/// fast the neighborhood threshold degrades.
inline double conditioning(const FactorMatrix& Z) {
    const double smin = Z.sigma_min();
    if (smin == 0.0)
        throw std::domain_error("conditioning: Z is rank deficient");
    return Z.gram().norm() / (smin * smin);
}

/// sin of the incidence angle between the error vector and range of the
/// Jacobian: ||Z^T (I - X X^+) Z||_F / ||XX^T - ZZ^T||_F.
inline double sin_theta(const FactorMatrix& X, const FactorMatrix& Z) {
    if (coincident(X, Z))
        throw CoincidentPointError("sin_theta: XX^T = ZZ^T within tolerance");
    MatrixXd Q = range_basis(X);
    // W = (I - XX^+) Z; numerator is ||W^T W||_F since the projector is
    // symmetric idempotent.
    MatrixXd W = Z.data();
    if (Q.cols() > 0) W -= Q * (Q.transpose() * Z.data());
    const double num = (W.transpose() * W).norm();
    const double den = (X.gram() - Z.gram()).norm();
    return std::clamp(num / den, 0.0, 1.0);
}

/// Closed-form first-order threshold: cos of the incidence angle, with the
/// convention delta_foc = 1 at coincident points. Any operator with RIP
/// constant below this value cannot make X a critical point.
inline double delta_foc(const FactorMatrix& X, const FactorMatrix& Z) {
    if (coincident(X, Z)) return 1.0;
    const double s = sin_theta(X, Z);
    return std::sqrt(std::max(0.0, 1.0 - s * s));
}

/// Independent route to the same quantity: solve the least-squares problem
/// y* = argmin ||e - Jy|| explicitly and return ||J y*|| / ||e||.
inline double delta_foc_numeric(const FactorMatrix& X, const FactorMatrix& Z) {
    if (coincident(X, Z))
        throw CoincidentPointError("delta_foc_numeric: coincident point");
    return critical_point_geometry(X, Z).cos_theta;
}

inline double eta_from_delta(double delta) {
    if (delta < 0.0 || delta > 1.0)
        throw std::invalid_argument("eta_from_delta: argument outside [0,1]");
    return (1.0 - delta) / (1.0 + delta);
}

inline double delta_from_eta(double eta) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("delta_from_eta: argument outside [0,1]");
    return (1.0 - eta) / (1.0 + eta);
}

/// min{ tr(M-)/tr(M+), tr(M+)/tr(M-) } from the eigen-splitting
/// M = M+ - M-. The PSD/NSD edge (one trace zero) returns 0.
inline double eig_split_value(const MatrixXd& M) {
    if (M.rows() != M.cols())
        throw std::invalid_argument("eig_split_value: non-square input");
    if (M.norm() == 0.0)
        throw std::invalid_argument("eig_split_value: zero matrix");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
    double pos = 0.0, neg = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double l = es.eigenvalues()(i);
        if (l > 0.0) pos += l;
        else neg -= l;
    }
    if (pos == 0.0 || neg == 0.0) return 0.0;
    return std::min(neg / pos, pos / neg);
}

/// Dual value eta = (1 - cos theta)/(1 + cos theta), the optimum of
/// min over witness directions y of (1 - cos theta_y)/(1 + cos theta_y).
inline double dual_eta(const FactorMatrix& X, const FactorMatrix& Z) {
    if (coincident(X, Z))
        throw CoincidentPointError("dual_eta: coincident point");
    if (X.norm() == 0.0) return 1.0;  // e is orthogonal to the trivial range
    const double c = delta_foc_numeric(X, Z);
    return (1.0 - c) / (1.0 + c);
}

/// Randomized no-better-witness check: smallest probe ratio
/// (1 - cos theta_y)/(1 + cos theta_y) over k Gaussian directions y.
/// Should never undercut dual_eta by more than roundoff.
inline double dual_eta_probe_min(const FactorMatrix& X, const FactorMatrix& Z,
                                 int probes, std::uint64_t seed) {
    if (coincident(X, Z))
        throw CoincidentPointError("dual_eta_probe_min: coincident point");
    const VectorXd e = error_vector(X, Z);
    const MatrixXd J = jacobian_matrix(X);
    if (J.norm() == 0.0)
        throw std::domain_error("dual_eta_probe_min: zero Jacobian");
    std::mt19937_64 rng(seed);
    const double en = e.norm();
    double best = 1.0;
    for (int k = 0; k < probes; ++k) {
        VectorXd y = gaussian_vector(J.cols(), rng);
        VectorXd Jy = J * y;
        const double nj = Jy.norm();
        if (nj == 0.0) continue;
        const double c = std::clamp(e.dot(Jy) / (en * nj), -1.0, 1.0);
        best = std::min(best, (1.0 - c) / (1.0 + c));
    }
    return best;
}

/// Worst-case sin^2 over the relative-error ball of radius eps:
/// eps / (2 sigma_min^2(Z)/||ZZ^T||_F - eps).
inline double sin_theta_sq_bound(double eps, const FactorMatrix& Z) {
    if (Z.norm() == 0.0)
        throw std::invalid_argument("sin_theta_sq_bound: Z = 0");
    if (eps <= 0.0)
        throw std::invalid_argument("sin_theta_sq_bound: eps must be positive");
    const double c1 = 1.0 / conditioning(Z);  // sigma_min^2 / ||ZZ^T||_F
    const double den = 2.0 * c1 - eps;
    if (den <= 0.0)
        throw std::domain_error("sin_theta_sq_bound: eps >= 2 sigma_min^2/||ZZ^T||_F");
    return eps / den;
}

/// sqrt([1 - C eps]_+), a strict lower bound on delta_foc over the ball.
inline double neighborhood_delta_foc_bound(double eps, const FactorMatrix& Z) {
    if (Z.norm() == 0.0)
        throw std::invalid_argument("neighborhood_delta_foc_bound: Z = 0");
    if (eps < 0.0)
        throw std::invalid_argument("neighborhood_delta_foc_bound: eps < 0");
    const double C = conditioning(Z);
    return std::sqrt(std::max(0.0, 1.0 - C * eps));
}

/// Global no-spurious-minima floor: 1/2 for rank 1, 1/5 above.
inline double delta_star(Eigen::Index r) {
    if (r < 1) throw std::invalid_argument("delta_star: r < 1");
    return r == 1 ? 0.5 : 0.2;
}

inline double soc_lower_bound(double eps, const FactorMatrix& Z,
                              Eigen::Index r) {
    return std::max(neighborhood_delta_foc_bound(eps, Z), delta_star(r));
}

/// ceil(min{1/[1 - C eps]_+, 25} * C0 * n * r), with 1/0 clamped by 25.
inline std::int64_t sample_complexity(double eps, const FactorMatrix& Z,
                                      Eigen::Index n, Eigen::Index r,
                                      double C0) {
    if (C0 <= 0.0) throw std::invalid_argument("sample_complexity: C0 <= 0");
    if (eps < 0.0) throw std::invalid_argument("sample_complexity: eps < 0");
    const double C = conditioning(Z);
    const double gap = std::max(0.0, 1.0 - C * eps);
    const double factor = gap > 0.0 ? std::min(1.0 / gap, 25.0) : 25.0;
    return static_cast<std::int64_t>(
        std::ceil(factor * C0 * static_cast<double>(n) * static_cast<double>(r)));
}

/// Everything the threshold machinery can say about one (X, Z) pair.
struct ThresholdReport {
    bool coincident = false;
    double sin_theta = 0.0;
    double delta_foc = 1.0;
    double eta = 0.0;
    double conditioning = 0.0;        // C
    double epsilon = 0.0;             // the point's own relative Gram error
    double neighborhood_bound = 1.0;  // sqrt([1 - C eps]_+) at that eps
    double soc_lower_bound = 1.0;
    std::int64_t sample_estimate = 0;
    double c0 = 1.0;
};

inline ThresholdReport threshold_report(const FactorMatrix& X,
                                        const FactorMatrix& Z,
                                        double C0 = 1.0) {
    ThresholdReport rep;
    rep.c0 = C0;
    rep.conditioning = conditioning(Z);
    rep.coincident = coincident(X, Z);
    rep.epsilon = (X.gram() - Z.gram()).norm() / Z.gram().norm();
    if (rep.coincident) {
        rep.sin_theta = 0.0;
        rep.delta_foc = 1.0;
    } else {
        rep.sin_theta = sin_theta(X, Z);
        rep.delta_foc = delta_foc(X, Z);
    }
    rep.eta = eta_from_delta(rep.delta_foc);
    rep.neighborhood_bound = neighborhood_delta_foc_bound(rep.epsilon, Z);
    rep.soc_lower_bound = soc_lower_bound(rep.epsilon, Z, Z.r());
    rep.sample_estimate = sample_complexity(rep.epsilon, Z, Z.n(), Z.r(), C0);
    return rep;
}

}  // namespace lowrank
