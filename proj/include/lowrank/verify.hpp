#pragma once

// Self-contained verification suite behind the `verify` CLI subcommand:
// cross-checks the closed-form quantities against their independent
// numeric routes and the sampled bounds. Each check reports pass/fail
// with a worst-case discrepancy.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "lowrank/certificate.hpp"
#include "lowrank/factor.hpp"
#include "lowrank/landscape.hpp"
#include "lowrank/oracles.hpp"
#include "lowrank/sensing.hpp"
#include "lowrank/thresholds.hpp"

namespace lowrank {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyConfig {
    std::uint64_t seed = 0;
    int pairs = 200;          // random (X, Z) pairs per cross-check
    int ball_samples = 5000;  // B_eps samples per (eps, Z) cell
    int probes = 2000;        // dual witness probes per pair
};

namespace detail {

inline FactorMatrix random_factor(Eigen::Index n, Eigen::Index r,
                                  std::mt19937_64& rng,
                                  bool rank_deficient = false) {
    MatrixXd M = gaussian_matrix(n, r, rng);
    if (rank_deficient && r > 1) M.col(r - 1) = M.col(0);
    return FactorMatrix(M);
}

inline CheckResult make_result(const std::string& name, bool pass,
                               double worst, double tol) {
    std::ostringstream os;
    os << "worst " << worst << " vs tol " << tol;
    return {name, pass, os.str()};
}

}  // namespace detail

inline std::vector<CheckResult> run_verification(const VerifyConfig& cfg) {
    std::vector<CheckResult> results;
    std::mt19937_64 rng(mix_seed(cfg.seed));
    std::uniform_int_distribution<int> pick_n(2, 8), pick_r(1, 3);

    {  // closed form vs least-squares route
        double worst = 0.0;
        for (int k = 0; k < cfg.pairs; ++k) {
            const Eigen::Index n = pick_n(rng);
            const Eigen::Index r = std::min<Eigen::Index>(pick_r(rng), n);
            FactorMatrix X = detail::random_factor(n, r, rng, k % 5 == 0);
            FactorMatrix Z = detail::random_factor(n, r, rng);
            worst = std::max(worst,
                             std::abs(delta_foc(X, Z) - delta_foc_numeric(X, Z)));
        }
        results.push_back(detail::make_result("delta_foc closed form vs numeric",
                                              worst <= 1e-8, worst, 1e-8));
    }

    {  // duality: primal certificate value = dual value, no better witness
        double worst_gap = 0.0, worst_probe = 0.0;
        for (int k = 0; k < cfg.pairs; ++k) {
            const Eigen::Index n = pick_n(rng);
            const Eigen::Index r = std::min<Eigen::Index>(pick_r(rng), n);
            FactorMatrix X = detail::random_factor(n, r, rng);
            FactorMatrix Z = detail::random_factor(n, r, rng);
            const double dual = dual_eta(X, Z);
            CertificateH cert = optimal_certificate(X, Z);
            worst_gap = std::max(worst_gap, std::abs(cert.eta - dual));
            const double probe =
                dual_eta_probe_min(X, Z, cfg.probes, derive_seed(cfg.seed, 17, k));
            worst_probe = std::max(worst_probe, dual - probe);
        }
        results.push_back(detail::make_result("strong duality primal = dual",
                                              worst_gap <= 1e-8, worst_gap, 1e-8));
        results.push_back(detail::make_result("no probe beats the dual value",
                                              worst_probe <= 1e-10, worst_probe,
                                              1e-10));
    }

    {  // rank-2 eigenvalue lemma vs dense solver
        double worst = 0.0;
        for (int k = 0; k < cfg.pairs; ++k) {
            const Eigen::Index n = pick_n(rng);
            VectorXd a = gaussian_vector(n, rng), b = gaussian_vector(n, rng);
            if (a.norm() == 0.0 || b.norm() == 0.0) continue;
            Rank2Eigvals ev = rank2_eigvals(a, b);
            VectorXd spec = oracles::dense_rank2_spectrum(a, b);
            worst = std::max(worst, std::abs(spec(spec.size() - 1) - ev.lambda_max));
            worst = std::max(worst, std::abs(spec(0) - ev.lambda_min));
        }
        results.push_back(detail::make_result("rank-2 eigenvalues vs dense solver",
                                              worst <= 1e-10, worst, 1e-10));
    }

    {  // eigen-splitting value vs alpha-grid oracle
        double worst = 0.0;
        for (int k = 0; k < cfg.pairs; ++k) {
            const Eigen::Index n = pick_n(rng);
            MatrixXd G = gaussian_matrix(n, n, rng);
            MatrixXd M = 0.5 * (G + G.transpose());
            M /= M.norm();
            worst = std::max(worst, std::abs(eig_split_value(M) -
                                             oracles::alpha_grid_split_value(M)));
        }
        results.push_back(detail::make_result("eig-split value vs alpha-grid oracle",
                                              worst <= 1e-6, worst, 1e-6));
    }

    {  // neighborhood bounds over sampled balls
        std::vector<FactorMatrix> zs;
        zs.push_back(FactorMatrix((MatrixXd(4, 1) << 1, 0, 0, 0).finished()));
        zs.push_back(FactorMatrix(MatrixXd::Identity(2, 2)));
        std::mt19937_64 zrng(derive_seed(cfg.seed, 23));
        zs.push_back(detail::random_factor(4, 2, zrng));
        double worst_sin = -1.0, worst_margin = 1.0;
        for (const FactorMatrix& Z : zs) {
            for (double eps : {0.1, 0.3, 0.5}) {
                if (2.0 / conditioning(Z) <= eps) continue;
                const double sbound = sin_theta_sq_bound(eps, Z);
                const double dbound = neighborhood_delta_foc_bound(eps, Z);
                std::mt19937_64 srng(derive_seed(cfg.seed, 29,
                                                 static_cast<std::uint64_t>(eps * 100)));
                for (int s = 0; s < cfg.ball_samples; ++s) {
                    FactorMatrix X = sample_B_eps(Z, eps, srng);
                    if (coincident(X, Z)) continue;
                    const double st = sin_theta(X, Z);
                    worst_sin = std::max(worst_sin, st * st - sbound);
                    worst_margin = std::min(worst_margin, delta_foc(X, Z) - dbound);
                }
            }
        }
        results.push_back(detail::make_result("ball sin^2 bound never violated",
                                              worst_sin <= 1e-12, worst_sin, 1e-12));
        results.push_back(detail::make_result(
            "ball delta_foc stays above sqrt([1-C eps]+)", worst_margin > 0.0,
            worst_margin, 0.0));
    }

    {  // calculus vs finite differences
        double worst_g = 0.0, worst_h = 0.0;
        for (int k = 0; k < cfg.pairs; ++k) {
            const Eigen::Index n = pick_n(rng);
            const Eigen::Index r = std::min<Eigen::Index>(pick_r(rng), n);
            FactorMatrix Z = detail::random_factor(n, r, rng);
            FactorMatrix X = detail::random_factor(n, r, rng);
            SensingOperator A =
                gaussian_ensemble(n, 3 * n * r, derive_seed(cfg.seed, 31, k));
            VectorXd b = A.apply(Z.gram());
            const double h = 1e-5 * std::max(1.0, X.norm());
            MatrixXd G = gradient(A, X, b);
            MatrixXd Gfd = oracles::fd_gradient(A, X, b, h);
            worst_g = std::max(worst_g, (G - Gfd).norm() / std::max(1.0, G.norm()));
            MatrixXd Y = gaussian_matrix(n, r, rng);
            const double q = hessian_quadratic_form(A, X, b, Y);
            const double qfd = oracles::fd_second_difference(A, X, b, Y, 1e-4);
            worst_h = std::max(worst_h, std::abs(q - qfd) / std::max(1.0, std::abs(q)));
        }
        results.push_back(detail::make_result("gradient vs central differences",
                                              worst_g <= 1e-5, worst_g, 1e-5));
        results.push_back(detail::make_result("hessian form vs second differences",
                                              worst_h <= 1e-4, worst_h, 1e-4));
    }

    {  // adversarial operator: gradient annihilation and spectral delta
        double worst_grad = 0.0, worst_spec = 0.0;
        for (int k = 0; k < cfg.pairs; ++k) {
            const Eigen::Index n = pick_n(rng);
            const Eigen::Index r = std::min<Eigen::Index>(pick_r(rng), n);
            FactorMatrix X = detail::random_factor(n, r, rng);
            FactorMatrix Z = detail::random_factor(n, r, rng);
            AdversarialResult adv = adversarial_operator(X, Z);
            if (!adv.certified) continue;
            const SensingOperator& A = adv.certified->op;
            VectorXd b = A.apply(Z.gram());
            const double xn = X.norm();
            const double scale = 1.0 + xn * xn * xn;
            worst_grad = std::max(worst_grad, gradient(A, X, b).norm() / scale);
            worst_spec = std::max(worst_spec,
                                  std::abs(spectral_delta(A) -
                                           adv.certified->achieved_delta));
        }
        results.push_back(detail::make_result("extremal operator kills the gradient",
                                              worst_grad <= 1e-8, worst_grad, 1e-8));
        results.push_back(detail::make_result("extremal operator spectral delta",
                                              worst_spec <= 1e-10, worst_spec,
                                              1e-10));
    }

    return results;
}

}  // namespace lowrank
