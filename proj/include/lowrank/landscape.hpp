#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "lowrank/factor.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/sensing.hpp"
#include "lowrank/thresholds.hpp"

namespace lowrank {

/// delta_foc and relative-error level data over the rank-1 parameter grid
/// (rho = ||x||/||z||, phi = angle between x and z).
struct Rank1Grid {
    std::vector<double> rho_axis;
    std::vector<double> phi_axis;  // radians, [0, pi/2]
    MatrixXd delta_foc_values;     // rho index by phi index
    MatrixXd rel_error_values;
};

/// delta_foc in the rank-1 parameterization. Works in a fixed 2-D frame;
/// the value depends only on (rho, phi).
inline double rank1_delta_foc(double rho, double phi) {
    FactorMatrix z{(MatrixXd(2, 1) << 1.0, 0.0).finished()};
    FactorMatrix x{(MatrixXd(2, 1) << rho * std::cos(phi),
                    rho * std::sin(phi)).finished()};
    if (coincident(x, z)) return 1.0;
    if (x.norm() == 0.0) return 0.0;
    return delta_foc(x, z);
}

inline double rank1_rel_error(double rho, double phi) {
    FactorMatrix z{(MatrixXd(2, 1) << 1.0, 0.0).finished()};
    FactorMatrix x{(MatrixXd(2, 1) << rho * std::cos(phi),
                    rho * std::sin(phi)).finished()};
    return (x.gram() - z.gram()).norm() / z.gram().norm();
}

inline Rank1Grid rank1_grid(std::vector<double> rho_axis,
                            std::vector<double> phi_axis) {
    if (rho_axis.empty() || phi_axis.empty())
        throw std::invalid_argument("rank1_grid: empty axis");
    for (double rho : rho_axis)
        if (rho <= 0.0)
            throw std::invalid_argument("rank1_grid: rho must be positive");
    Rank1Grid grid;
    grid.rho_axis = std::move(rho_axis);
    grid.phi_axis = std::move(phi_axis);
    const auto nr = static_cast<Eigen::Index>(grid.rho_axis.size());
    const auto np = static_cast<Eigen::Index>(grid.phi_axis.size());
    grid.delta_foc_values.resize(nr, np);
    grid.rel_error_values.resize(nr, np);
    for (Eigen::Index i = 0; i < nr; ++i)
        for (Eigen::Index j = 0; j < np; ++j) {
            grid.delta_foc_values(i, j) =
                rank1_delta_foc(grid.rho_axis[i], grid.phi_axis[j]);
            grid.rel_error_values(i, j) =
                rank1_rel_error(grid.rho_axis[i], grid.phi_axis[j]);
        }
    return grid;
}

inline std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i)
        v[i] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
    return v;
}

struct SweepRow {
    double epsilon = 0.0;
    double bound = 0.0;          // sqrt([1 - C eps]_+)
    double empirical_inf = 1.0;  // min delta_foc over boundary samples
    double soc_floor = 0.0;      // max{bound, delta*}
};

/// For each eps, sample the boundary shell of B_eps and record the sampled
/// infimum of delta_foc next to the closed-form lower bound.
inline std::vector<SweepRow> epsilon_sweep(const FactorMatrix& Z,
                                           std::vector<double> epsilon_list,
                                           int samples_per_eps,
                                           std::uint64_t seed) {
    if (Z.norm() == 0.0)
        throw std::invalid_argument("epsilon_sweep: Z = 0");
    std::sort(epsilon_list.begin(), epsilon_list.end());
    std::vector<SweepRow> rows;
    rows.reserve(epsilon_list.size());
    for (std::size_t k = 0; k < epsilon_list.size(); ++k) {
        const double eps = epsilon_list[k];
        if (eps <= 0.0)
            throw std::invalid_argument("epsilon_sweep: eps must be positive");
        SweepRow row;
        row.epsilon = eps;
        row.bound = neighborhood_delta_foc_bound(eps, Z);
        row.soc_floor = soc_lower_bound(eps, Z, Z.r());
        std::mt19937_64 rng(derive_seed(seed, k));
        double inf = 1.0;
        for (int s = 0; s < samples_per_eps; ++s) {
            FactorMatrix X = sample_B_eps(Z, eps, rng, BallSampling::kBoundary);
            if (!coincident(X, Z)) inf = std::min(inf, delta_foc(X, Z));
        }
        row.empirical_inf = inf;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace lowrank
