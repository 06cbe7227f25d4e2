#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "lowrank/landscape.hpp"
#include "lowrank/rng.hpp"

using namespace lowrank;

namespace {
constexpr double kHalfPi = std::numbers::pi / 2;
}

TEST(Rank1Grid, KnownValues) {
    EXPECT_DOUBLE_EQ(rank1_delta_foc(2.0, 0.0), 1.0);
    EXPECT_NEAR(rank1_delta_foc(1.0, kHalfPi), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_LE(rank1_delta_foc(0.05, kHalfPi), 0.06);
    // For small rho the projector onto x survives, so the value depends on
    // phi alone: it collapses only along the orthogonal direction.
    EXPECT_LE(rank1_delta_foc(1e-4, kHalfPi), 1e-3);
    EXPECT_NEAR(rank1_delta_foc(1e-4, 1.0),
                std::sqrt(1.0 - std::pow(std::sin(1.0), 4)), 1e-3);
}

TEST(Rank1Grid, FillsConsistentMatrices) {
    Rank1Grid grid = rank1_grid(linspace(0.05, 2.0, 20), linspace(0.0, kHalfPi, 15));
    ASSERT_EQ(grid.delta_foc_values.rows(), 20);
    ASSERT_EQ(grid.delta_foc_values.cols(), 15);
    for (Eigen::Index i = 0; i < 20; ++i)
        for (Eigen::Index j = 0; j < 15; ++j) {
            EXPECT_GE(grid.delta_foc_values(i, j), 0.0);
            EXPECT_LE(grid.delta_foc_values(i, j), 1.0);
            EXPECT_GE(grid.rel_error_values(i, j), 0.0);
        }
}

TEST(Rank1Grid, MonotoneTowardOrthogonality) {
    Rank1Grid grid = rank1_grid({1.0}, linspace(0.0, kHalfPi, 50));
    for (Eigen::Index j = 1; j < 50; ++j)
        EXPECT_LE(grid.delta_foc_values(0, j),
                  grid.delta_foc_values(0, j - 1) + 1e-12);
}

TEST(Rank1Grid, FrameInvariance) {
    // Embedding the same (rho, phi) geometry in a random rotated frame of a
    // larger ambient space leaves delta_foc unchanged.
    std::mt19937_64 rng(7);
    MatrixXd G = gaussian_matrix(6, 2, rng);
    Eigen::HouseholderQR<MatrixXd> qr(G);
    MatrixXd Q = qr.householderQ() * MatrixXd::Identity(6, 2);
    for (double rho : {0.3, 1.0, 1.7}) {
        for (double phi : {0.2, 0.9, kHalfPi}) {
            FactorMatrix z(Q.col(0));
            FactorMatrix x(rho * (std::cos(phi) * Q.col(0) +
                                  std::sin(phi) * Q.col(1)));
            EXPECT_NEAR(delta_foc(x, z), rank1_delta_foc(rho, phi), 1e-10);
        }
    }
}

TEST(Rank1Grid, RejectsBadAxes) {
    EXPECT_THROW(rank1_grid({}, {0.0}), std::invalid_argument);
    EXPECT_THROW(rank1_grid({-1.0}, {0.0}), std::invalid_argument);
}

TEST(EpsilonSweep, BoundIsRespected) {
    FactorMatrix Z((MatrixXd(4, 1) << 1, 0, 0, 0).finished());  // C = 1
    std::vector<SweepRow> rows = epsilon_sweep(Z, {0.5, 0.1, 0.3}, 400, 3);
    ASSERT_EQ(rows.size(), 3u);
    // Sorted by epsilon.
    EXPECT_LT(rows[0].epsilon, rows[1].epsilon);
    EXPECT_LT(rows[1].epsilon, rows[2].epsilon);
    for (const SweepRow& row : rows) {
        EXPECT_NEAR(row.bound, std::sqrt(1.0 - row.epsilon), 1e-12);
        EXPECT_GT(row.empirical_inf, row.bound);
        EXPECT_DOUBLE_EQ(row.soc_floor, std::max(row.bound, 0.5));
    }
}

TEST(EpsilonSweep, SmallEpsApproachesOne) {
    FactorMatrix Z((MatrixXd(3, 1) << 1, 0, 0).finished());
    std::vector<SweepRow> rows = epsilon_sweep(Z, {1e-3}, 200, 5);
    EXPECT_GE(rows[0].empirical_inf, 0.999);
    EXPECT_GE(rows[0].bound, 0.999);
}

TEST(EpsilonSweep, FloorTiesAtThreeQuarters) {
    FactorMatrix Z((MatrixXd(2, 1) << 1, 0).finished());
    std::vector<SweepRow> rows = epsilon_sweep(Z, {0.75}, 100, 9);
    EXPECT_DOUBLE_EQ(rows[0].soc_floor, 0.5);
}
