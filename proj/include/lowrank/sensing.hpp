#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lowrank/factor.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

/// m symmetric n-by-n measurement matrices A_i together with the matrix
/// form (m x n^2, rows are vec(A_i)) acting on vectorized inputs.
class SensingOperator {
public:
    explicit SensingOperator(std::vector<MatrixXd> matrices)
        : matrices_(std::move(matrices)) {
        if (matrices_.empty())
            throw std::invalid_argument("SensingOperator: no measurements");
        n_ = matrices_.front().rows();
        for (const MatrixXd& A : matrices_) {
            if (A.rows() != n_ || A.cols() != n_)
                throw std::invalid_argument("SensingOperator: shape mismatch");
            if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + A.norm()))
                throw std::invalid_argument("SensingOperator: asymmetric measurement");
        }
        form_.resize(static_cast<Eigen::Index>(matrices_.size()), n_ * n_);
        for (std::size_t i = 0; i < matrices_.size(); ++i)
            form_.row(static_cast<Eigen::Index>(i)) = vectorize(matrices_[i]).transpose();
    }

    Eigen::Index m() const { return form_.rows(); }
    Eigen::Index n() const { return n_; }
    const std::vector<MatrixXd>& matrices() const { return matrices_; }
    const MatrixXd& matrix_form() const { return form_; }

    /// (<A_1,M>, ..., <A_m,M>).
    VectorXd apply(const MatrixXd& M) const {
        if (M.rows() != n_ || M.cols() != n_)
            throw std::invalid_argument("SensingOperator::apply: shape mismatch");
        return form_ * vectorize(M);
    }

    VectorXd apply_vec(const VectorXd& v) const {
        if (v.size() != n_ * n_)
            throw std::invalid_argument("SensingOperator::apply_vec: length mismatch");
        return form_ * v;
    }

    /// Adjoint: sum_i v_i A_i.
    MatrixXd adjoint(const VectorXd& v) const {
        if (v.size() != m())
            throw std::invalid_argument("SensingOperator::adjoint: length mismatch");
        return unvectorize(form_.transpose() * v, n_);
    }

private:
    std::vector<MatrixXd> matrices_;
    MatrixXd form_;
    Eigen::Index n_ = 0;
};

/// Exact isometry on symmetric inputs: rows are the symmetrized standard
/// basis of n-by-n matrices, m = n^2.
inline SensingOperator identity_operator(Eigen::Index n) {
    std::vector<MatrixXd> mats;
    mats.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            MatrixXd A = MatrixXd::Zero(n, n);
            A(i, j) += 0.5;
            A(j, i) += 0.5;
            mats.push_back(std::move(A));
        }
    return SensingOperator(std::move(mats));
}

/// GOE-style ensemble: A_i = (G + G^T) / (2 sqrt(m)) with G iid N(0,1),
/// so that E||A(M)||^2 = ||M||_F^2 for every symmetric M.
inline SensingOperator gaussian_ensemble(Eigen::Index n, Eigen::Index m,
                                         std::uint64_t seed) {
    if (n < 1 || m < 1)
        throw std::invalid_argument("gaussian_ensemble: n, m must be >= 1");
    std::mt19937_64 rng(seed);
    const double scale = 1.0 / (2.0 * std::sqrt(static_cast<double>(m)));
    std::vector<MatrixXd> mats;
    mats.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        MatrixXd G = gaussian_matrix(n, n, rng);
        mats.emplace_back(scale * (G + G.transpose()));
    }
    return SensingOperator(std::move(mats));
}

/// f(X) = ||A(XX^T) - b||^2.
inline double objective(const SensingOperator& A, const FactorMatrix& X,
                        const VectorXd& b) {
    if (b.size() != A.m())
        throw std::invalid_argument("objective: measurement length mismatch");
    if (X.n() != A.n())
        throw std::invalid_argument("objective: dimension mismatch");
    return (A.apply(X.gram()) - b).squaredNorm();
}

/// Gradient 4 sum_i r_i A_i X for symmetric A_i, r = A(XX^T) - b.
inline MatrixXd gradient(const SensingOperator& A, const FactorMatrix& X,
                         const VectorXd& b) {
    if (b.size() != A.m())
        throw std::invalid_argument("gradient: measurement length mismatch");
    if (X.n() != A.n())
        throw std::invalid_argument("gradient: dimension mismatch");
    VectorXd res = A.apply(X.gram()) - b;
    return 4.0 * A.adjoint(res) * X.data();
}

/// Hessian applied to a direction Y: 4(G Y + T X) with G = A^*(residual)
/// and T = A^*(A(XY^T + YX^T)).
inline MatrixXd hessian_apply(const SensingOperator& A, const FactorMatrix& X,
                              const VectorXd& b, const MatrixXd& Y) {
    VectorXd res = A.apply(X.gram()) - b;
    MatrixXd S = jacobian_apply(X, Y);
    return 4.0 * (A.adjoint(res) * Y + A.adjoint(A.apply(S)) * X.data());
}

/// Quadratic form of the Hessian along Y:
/// 2||A(XY^T + YX^T)||^2 + 4 <A^*(residual), YY^T>.
inline double hessian_quadratic_form(const SensingOperator& A,
                                     const FactorMatrix& X, const VectorXd& b,
                                     const MatrixXd& Y) {
    if (Y.rows() != X.n() || Y.cols() != X.r())
        throw std::invalid_argument("hessian_quadratic_form: shape mismatch");
    VectorXd res = A.apply(X.gram()) - b;
    MatrixXd S = jacobian_apply(X, Y);
    return 2.0 * A.apply(S).squaredNorm() +
           4.0 * (A.adjoint(res).cwiseProduct(Y * Y.transpose())).sum();
}

struct GradientDescentOptions {
    double tol = 1e-9;        // stop when ||grad|| <= tol * (1 + ||X||^3)
    int max_iter = 2000;
    double shrink = 0.5;      // backtracking factor
    double armijo = 1e-4;
    int max_backtracks = 60;
};

struct GradientDescentResult {
    MatrixXd final_x;
    std::vector<double> objective_trajectory;
    int iterations = 0;
    bool converged = false;
    bool diverged = false;
};

/// Largest local curvature along random directions, power-iteration style;
/// used to size the initial step.
inline double curvature_estimate(const SensingOperator& A,
                                 const FactorMatrix& X, const VectorXd& b,
                                 std::mt19937_64& rng, int iters = 20) {
    MatrixXd Y = gaussian_matrix(X.n(), X.r(), rng);
    Y /= Y.norm();
    double lambda = 0.0;
    for (int k = 0; k < iters; ++k) {
        MatrixXd HY = hessian_apply(A, X, b, Y);
        const double nrm = HY.norm();
        if (nrm == 0.0) break;
        lambda = nrm;
        Y = HY / nrm;
    }
    return lambda;
}

inline GradientDescentResult gradient_descent(
    const SensingOperator& A, const VectorXd& b, const FactorMatrix& X0,
    const GradientDescentOptions& opts = {}) {
    GradientDescentResult out;
    MatrixXd X = X0.data();
    std::mt19937_64 rng(0x9e3779b9u);
    double f = objective(A, FactorMatrix(X), b);
    out.objective_trajectory.push_back(f);

    double lhat = curvature_estimate(A, X0, b, rng);
    double step = lhat > 0.0 ? 1.0 / lhat : 1.0;

    for (int it = 0; it < opts.max_iter; ++it) {
        MatrixXd G = gradient(A, FactorMatrix(X), b);
        const double gnorm = G.norm();
        const double xnorm = X.norm();
        if (gnorm <= opts.tol * (1.0 + xnorm * xnorm * xnorm)) {
            out.converged = true;
            break;
        }
        double s = step;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            MatrixXd Xnew = X - s * G;
            const double fnew = objective(A, FactorMatrix(Xnew), b);
            if (!std::isfinite(fnew)) {
                out.diverged = true;
                out.final_x = X;
                out.iterations = it;
                return out;
            }
            if (fnew <= f - opts.armijo * s * gnorm * gnorm) {
                X = std::move(Xnew);
                f = fnew;
                accepted = true;
                step = s * 2.0;  // allow the step to recover
                break;
            }
            s *= opts.shrink;
        }
        out.iterations = it + 1;
        out.objective_trajectory.push_back(f);
        if (!accepted) break;  // no descent at machine precision
    }
    // Check the termination condition once more for runs ending on max_iter.
    if (!out.converged && !out.diverged) {
        MatrixXd G = gradient(A, FactorMatrix(X), b);
        const double xnorm = X.norm();
        out.converged = G.norm() <= opts.tol * (1.0 + xnorm * xnorm * xnorm);
    }
    out.final_x = X;
    return out;
}

enum class BallSampling { kMixed, kBoundary };

/// Draw X = Z + t*Delta with Gaussian Delta, t solved by bisection so that
/// ||XX^T - ZZ^T||_F lands on the requested shell of the relative-error
/// ball of radius eps. Membership is re-verified before returning.
inline FactorMatrix sample_B_eps(const FactorMatrix& Z, double eps,
                                 std::mt19937_64& rng,
                                 BallSampling mode = BallSampling::kMixed) {
    if (Z.norm() == 0.0)
        throw std::invalid_argument("sample_B_eps: Z = 0");
    if (eps <= 0.0)
        throw std::invalid_argument("sample_B_eps: eps must be positive");
    const MatrixXd ZZ = Z.gram();
    const double zz = ZZ.norm();

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double shell;
    if (mode == BallSampling::kBoundary) {
        shell = 0.95 + 0.05 * unif(rng);
    } else if (unif(rng) < 0.5) {
        shell = 0.5 + 0.5 * unif(rng);  // stress the bound near the boundary
    } else {
        shell = 0.05 + 0.45 * unif(rng);
    }
    const double target = shell * eps * zz;

    MatrixXd delta = gaussian_matrix(Z.n(), Z.r(), rng);
    delta /= delta.norm();
    // (Z + t D)(Z + t D)^T - ZZ^T = t B + t^2 C with B = ZD^T + DZ^T and
    // C = DD^T, so the squared distance is a quartic in t.
    MatrixXd B = Z.data() * delta.transpose();
    B += B.transpose().eval();
    MatrixXd C = delta * delta.transpose();
    const double b2 = B.squaredNorm();
    const double bc = (B.cwiseProduct(C)).sum();
    const double c2 = C.squaredNorm();
    auto dist = [&](double t) {
        const double t2 = t * t;
        return std::sqrt(std::max(0.0, t2 * b2 + 2.0 * t2 * t * bc + t2 * t2 * c2));
    };
    double hi = 1.0;
    int expand = 0;
    while (dist(hi) < target) {
        hi *= 2.0;
        if (++expand > 200)
            throw std::runtime_error("sample_B_eps: failed to bracket radius");
    }
    double lo = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (dist(mid) < target ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    FactorMatrix X(Z.data() + t * delta);
    if ((X.gram() - ZZ).norm() > eps * zz * (1.0 + 1e-9))
        throw std::runtime_error("sample_B_eps: membership check failed");
    return X;
}

struct ExperimentConfig {
    Eigen::Index n = 8;
    Eigen::Index r = 1;
    std::vector<Eigen::Index> m_list;
    std::vector<double> epsilon_list;
    int trials = 100;
    std::uint64_t seed = 0;
    double c0 = 1.0;
    double success_rel_error = 1e-4;
    GradientDescentOptions gd{};
};

struct TrialRecord {
    Eigen::Index m = 0;
    double epsilon = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double final_rel_error = 0.0;
    int iterations = 0;
    bool converged = false;
    bool diverged = false;
    bool success = false;
};

struct CellSummary {
    Eigen::Index m = 0;
    double epsilon = 0.0;
    int trials = 0;
    int successes = 0;
    double success_rate = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<TrialRecord> records;
    std::vector<CellSummary> cells;
};

/// One trial: fresh ensemble and ground truth from the derived seed, start
/// on the boundary of B_eps, run gradient descent, compare relative error.
inline TrialRecord run_trial(const ExperimentConfig& cfg, Eigen::Index m,
                             double eps, int trial, std::uint64_t cell_index) {
    TrialRecord rec;
    rec.m = m;
    rec.epsilon = eps;
    rec.trial = trial;
    rec.seed = derive_seed(cfg.seed, cell_index, static_cast<std::uint64_t>(trial));
    std::mt19937_64 rng(rec.seed);

    MatrixXd zraw = gaussian_matrix(cfg.n, cfg.r, rng);
    FactorMatrix Z(zraw / zraw.norm());
    SensingOperator A = gaussian_ensemble(cfg.n, m, mix_seed(rec.seed));
    VectorXd b = A.apply(Z.gram());

    FactorMatrix X0 = eps > 0.0
                          ? sample_B_eps(Z, eps, rng, BallSampling::kBoundary)
                          : Z;
    GradientDescentResult gd = gradient_descent(A, b, X0, cfg.gd);
    rec.iterations = gd.iterations;
    rec.converged = gd.converged;
    rec.diverged = gd.diverged;
    const MatrixXd Xf = gd.final_x;
    rec.final_rel_error = (Xf * Xf.transpose() - Z.gram()).norm() / Z.gram().norm();
    rec.success = !gd.diverged && rec.final_rel_error <= cfg.success_rel_error;
    return rec;
}

inline ExperimentResult recovery_experiment(const ExperimentConfig& cfg) {
    if (cfg.m_list.empty() || cfg.epsilon_list.empty() || cfg.trials < 1)
        throw std::invalid_argument("recovery_experiment: empty configuration");
    ExperimentResult out;
    out.config = cfg;
    std::uint64_t cell_index = 0;
    for (double eps : cfg.epsilon_list) {
        for (Eigen::Index m : cfg.m_list) {
            CellSummary cell;
            cell.m = m;
            cell.epsilon = eps;
            cell.trials = cfg.trials;
            for (int t = 0; t < cfg.trials; ++t) {
                TrialRecord rec = run_trial(cfg, m, eps, t, cell_index);
                if (rec.success) ++cell.successes;
                out.records.push_back(rec);
            }
            cell.success_rate =
                static_cast<double>(cell.successes) / cell.trials;
            out.cells.push_back(cell);
            ++cell_index;
        }
    }
    return out;
}

}  // namespace lowrank
