#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lowrank/factor.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/sensing.hpp"
#include "lowrank/thresholds.hpp"

namespace lowrank {

/// Feasible point H = I - (1-eta) v1 v1^T of the dual-certified threshold
/// problem, stored as the pair (eta, v1). Eigenvalues are {eta, 1, ..., 1},
/// so eta*I <= H <= I by construction, and J^T H e = 0 holds numerically.
struct CertificateH {
    double eta = 0.0;
    VectorXd v1;             // unit shrink direction, length n^2
    double feasibility = 0.0;  // ||J^T H e||, recorded at construction

    MatrixXd dense(Eigen::Index n) const {
        return MatrixXd::Identity(n * n, n * n) -
               (1.0 - eta) * (v1 * v1.transpose());
    }

    VectorXd apply(const VectorXd& x) const {
        return x - (1.0 - eta) * v1.dot(x) * v1;
    }
};

/// Builds the maximal-eta certificate from the least-squares decomposition
/// e = J y* + w: v1 bisects the unit directions of J y* and w, and
/// eta = (1 - cos theta)/(1 + cos theta). The aligned case sin theta = 0
/// degenerates to the eta = 0 certificate.
inline CertificateH optimal_certificate(const FactorMatrix& X,
                                        const FactorMatrix& Z) {
    if (coincident(X, Z))
        throw CoincidentPointError("optimal_certificate: coincident point");
    CriticalPointGeometry g = critical_point_geometry(X, Z);
    const double en = g.e.norm();

    CertificateH cert;
    if (X.norm() == 0.0) {
        // Zero Jacobian: every H is feasible, the optimum is H = I.
        cert.eta = 1.0;
        cert.v1 = g.e / en;
        cert.feasibility = 0.0;
        return cert;
    }

    VectorXd jy = g.jac * g.y_star;
    VectorXd w = g.e - jy;
    const double c = g.cos_theta;
    cert.eta = (1.0 - c) / (1.0 + c);

    const double half = 0.5 * std::acos(std::clamp(c, -1.0, 1.0));
    VectorXd u = jy.norm() > 0.0 ? VectorXd(jy / jy.norm())
                                 : VectorXd(VectorXd::Zero(g.e.size()));
    VectorXd what = w.norm() > 0.0 ? VectorXd(w / w.norm())
                                   : VectorXd(VectorXd::Zero(g.e.size()));
    if (u.norm() == 0.0) {
        // e orthogonal to range(J): H = I is already feasible.
        cert.eta = 1.0;
        cert.v1 = what;
    } else {
        cert.v1 = std::cos(half) * u + std::sin(half) * what;
        if (cert.v1.norm() > 0.0) cert.v1 /= cert.v1.norm();
    }
    cert.feasibility = (g.jac.transpose() * cert.apply(g.e)).norm();
    return cert;
}

/// The extremal operator A* with Gram matrix (2/(1+eta)) H on the symmetric
/// subspace. Rows of the symmetric square root are reshaped into n-by-n
/// measurement matrices and symmetrized.
struct CertifiedOperator {
    SensingOperator op;
    double achieved_delta = 0.0;  // = cos theta
    double eta = 0.0;
};

/// Outcome of the adversarial construction. The aligned case sin theta = 0
/// (delta_foc = 1) admits no operator with RIP constant below 1 that makes
/// X critical, so no operator is fabricated.
struct AdversarialResult {
    std::optional<CertifiedOperator> certified;
    CertificateH certificate;
    std::string note;
};

inline AdversarialResult adversarial_operator(const FactorMatrix& X,
                                              const FactorMatrix& Z) {
    AdversarialResult out;
    out.certificate = optimal_certificate(X, Z);
    const double eta = out.certificate.eta;
    const double delta = (1.0 - eta) / (1.0 + eta);
    if (delta >= 1.0 - 1e-12 && X.norm() > 0.0 &&
        sin_theta(X, Z) < 1e-12) {
        out.note = "no-certificate: column spaces aligned (delta_foc = 1)";
        return out;
    }

    const Eigen::Index n = X.n();
    const double scale = std::sqrt(2.0 / (1.0 + eta));
    const double shrink = 1.0 - std::sqrt(eta);
    const VectorXd& v1 = out.certificate.v1;

    // sqrt((2/(1+eta)) H) = scale * (I - (1 - sqrt(eta)) v1 v1^T).
    std::vector<MatrixXd> mats;
    mats.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n * n; ++i) {
        VectorXd row = -shrink * v1(i) * v1;
        row(i) += 1.0;
        MatrixXd Ai = unvectorize(scale * row, n);
        mats.emplace_back(0.5 * (Ai + Ai.transpose()));
    }
    out.certified = CertifiedOperator{SensingOperator(std::move(mats)), delta, eta};
    return out;
}

/// Gram matrix of the operator restricted to symmetric inputs, expressed in
/// an orthonormal basis of the symmetric subspace (dimension n(n+1)/2).
inline MatrixXd symmetric_gram(const SensingOperator& A) {
    const Eigen::Index n = A.n();
    const Eigen::Index d = n * (n + 1) / 2;
    MatrixXd basis(n * n, d);
    Eigen::Index k = 0;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j; i < n; ++i) {
            MatrixXd E = MatrixXd::Zero(n, n);
            if (i == j) {
                E(i, j) = 1.0;
            } else {
                E(i, j) = inv_sqrt2;
                E(j, i) = inv_sqrt2;
            }
            basis.col(k++) = vectorize(E);
        }
    MatrixXd AB = A.matrix_form() * basis;
    return AB.transpose() * AB;
}

/// max |lambda - 1| over the symmetric-subspace Gram spectrum; for the
/// certified operator this equals achieved_delta exactly.
inline double spectral_delta(const SensingOperator& A) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetric_gram(A),
                                               Eigen::EigenvaluesOnly);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        worst = std::max(worst, std::abs(es.eigenvalues()(i) - 1.0));
    return worst;
}

/// Monte-Carlo probe of the restricted isometry constant: max |  ||A(M)||^2 - 1 |
/// over sampled symmetric unit-Frobenius M of rank <= 2r, plus any caller
/// supplied probe directions. A lower bound on the true constant.
inline double rip_monte_carlo(const SensingOperator& A, Eigen::Index r,
                              int trials, std::uint64_t seed,
                              const std::vector<VectorXd>& extra_probes = {}) {
    if (trials < 1)
        throw std::invalid_argument("rip_monte_carlo: trials must be >= 1");
    const Eigen::Index n = A.n();
    const Eigen::Index k = std::min<Eigen::Index>(2 * r, n);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        MatrixXd G = gaussian_matrix(n, k, rng);
        Eigen::HouseholderQR<MatrixXd> qr(G);
        MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, k);
        VectorXd lam = gaussian_vector(k, rng);
        MatrixXd M = Q * lam.asDiagonal() * Q.transpose();
        const double nrm = M.norm();
        if (nrm == 0.0) continue;
        M /= nrm;
        worst = std::max(worst, std::abs(A.apply(M).squaredNorm() - 1.0));
    }
    for (const VectorXd& p : extra_probes) {
        const double nrm = p.norm();
        if (nrm == 0.0) continue;
        worst = std::max(worst, std::abs(A.apply_vec(p / nrm).squaredNorm() - 1.0));
    }
    return worst;
}

}  // namespace lowrank
