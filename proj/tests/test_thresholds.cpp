#include <gtest/gtest.h>

#include <random>

#include "lowrank/oracles.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/thresholds.hpp"

using namespace lowrank;

namespace {

FactorMatrix rank1(double a, double b) {
    return FactorMatrix((MatrixXd(2, 1) << a, b).finished());
}

FactorMatrix random_factor(Eigen::Index n, Eigen::Index r,
                           std::mt19937_64& rng, bool deficient = false) {
    MatrixXd M = gaussian_matrix(n, r, rng);
    if (deficient && r > 1) M.col(r - 1) = 2.0 * M.col(0);
    return FactorMatrix(M);
}

}  // namespace

TEST(SinTheta, ZeroCandidate) {
    std::mt19937_64 rng(1);
    FactorMatrix Z = random_factor(3, 2, rng);
    EXPECT_NEAR(sin_theta(FactorMatrix::zero(3, 2), Z), 1.0, 1e-14);
}

TEST(SinTheta, AlignedColumnSpaces) {
    EXPECT_NEAR(sin_theta(rank1(2, 0), rank1(1, 0)), 0.0, 1e-14);
}

TEST(SinTheta, OrthogonalRank1) {
    EXPECT_NEAR(sin_theta(rank1(1, 0), rank1(0, 1)), 1.0 / std::sqrt(2.0),
                1e-14);
}

TEST(SinTheta, CoincidentPointThrows) {
    EXPECT_THROW(sin_theta(rank1(1, 0), rank1(1, 0)), CoincidentPointError);
    EXPECT_THROW(sin_theta(rank1(-1, 0), rank1(1, 0)), CoincidentPointError);
}

TEST(DeltaFoc, ConventionAtCoincidence) {
    EXPECT_DOUBLE_EQ(delta_foc(rank1(1, 0), rank1(1, 0)), 1.0);
    EXPECT_DOUBLE_EQ(delta_foc(rank1(-1, 0), rank1(1, 0)), 1.0);
}

TEST(DeltaFoc, SaddleAtOrigin) {
    EXPECT_NEAR(delta_foc(rank1(0, 0), rank1(0, 1)), 0.0, 1e-14);
}

TEST(DeltaFoc, OrthogonalRank1) {
    EXPECT_NEAR(delta_foc(rank1(1, 0), rank1(0, 1)), 1.0 / std::sqrt(2.0),
                1e-14);
}

TEST(DeltaFocNumeric, LeastSquaresRoute) {
    EXPECT_NEAR(delta_foc_numeric(rank1(1, 0), rank1(0, 1)),
                1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(delta_foc_numeric(rank1(2, 0), rank1(1, 0)), 1.0, 1e-12);
}

TEST(DeltaFoc, AgreesWithNumericOracle) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> pick_n(2, 8), pick_r(1, 3);
    for (int k = 0; k < 300; ++k) {
        const Eigen::Index n = pick_n(rng);
        const Eigen::Index r = std::min<Eigen::Index>(pick_r(rng), n);
        FactorMatrix X = random_factor(n, r, rng, k % 4 == 0);
        FactorMatrix Z = random_factor(n, r, rng);
        EXPECT_NEAR(delta_foc(X, Z), delta_foc_numeric(X, Z), 1e-8);
    }
}

TEST(DeltaFoc, ScaleInvariance) {
    std::mt19937_64 rng(43);
    for (int k = 0; k < 30; ++k) {
        FactorMatrix X = random_factor(5, 2, rng);
        FactorMatrix Z = random_factor(5, 2, rng);
        const double alpha = 0.1 + 3.0 * k / 30.0;
        FactorMatrix Xa(alpha * X.data());
        FactorMatrix Za(alpha * Z.data());
        EXPECT_NEAR(delta_foc(Xa, Za), delta_foc(X, Z), 1e-10);
    }
}

TEST(EtaDelta, Endpoints) {
    EXPECT_DOUBLE_EQ(eta_from_delta(1.0), 0.0);
    EXPECT_DOUBLE_EQ(eta_from_delta(0.0), 1.0);
    EXPECT_DOUBLE_EQ(eta_from_delta(0.5), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(delta_from_eta(0.0), 1.0);
    EXPECT_DOUBLE_EQ(delta_from_eta(1.0), 0.0);
}

TEST(EtaDelta, MutuallyInverse) {
    for (double d = 0.0; d <= 1.0; d += 0.05)
        EXPECT_NEAR(delta_from_eta(eta_from_delta(d)), d, 1e-14);
    EXPECT_THROW(eta_from_delta(-0.1), std::invalid_argument);
    EXPECT_THROW(delta_from_eta(1.1), std::invalid_argument);
}

TEST(EigSplit, KnownValues) {
    EXPECT_DOUBLE_EQ(eig_split_value((MatrixXd(2, 2) << 2, 0, 0, -1).finished()),
                     0.5);
    EXPECT_DOUBLE_EQ(eig_split_value((MatrixXd(2, 2) << 1, 0, 0, -1).finished()),
                     1.0);
    EXPECT_DOUBLE_EQ(eig_split_value((MatrixXd(2, 2) << 1, 0, 0, 2).finished()),
                     0.0);
    EXPECT_THROW(eig_split_value(MatrixXd::Zero(2, 2)), std::invalid_argument);
}

TEST(EigSplit, MatchesAlphaGridOracle) {
    EXPECT_NEAR(oracles::alpha_grid_split_value(
                    (MatrixXd(2, 2) << 2, 0, 0, -1).finished()),
                0.5, 1e-6);
    std::mt19937_64 rng(47);
    for (int k = 0; k < 100; ++k) {
        const Eigen::Index n = 2 + k % 7;
        MatrixXd G = gaussian_matrix(n, n, rng);
        MatrixXd M = 0.5 * (G + G.transpose());
        M /= M.norm();
        EXPECT_NEAR(eig_split_value(M), oracles::alpha_grid_split_value(M), 1e-6);
    }
}

TEST(DualEta, KnownValues) {
    const double c = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(dual_eta(rank1(1, 0), rank1(0, 1)), (1.0 - c) / (1.0 + c), 1e-12);
    EXPECT_NEAR(dual_eta(rank1(2, 0), rank1(1, 0)), 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(dual_eta(rank1(0, 0), rank1(0, 1)), 1.0);
}

TEST(DualEta, ConsistentWithDeltaFoc) {
    std::mt19937_64 rng(53);
    for (int k = 0; k < 100; ++k) {
        FactorMatrix X = random_factor(5, 2, rng);
        FactorMatrix Z = random_factor(5, 2, rng);
        EXPECT_NEAR(delta_from_eta(dual_eta(X, Z)), delta_foc(X, Z), 1e-8);
    }
}

TEST(DualEta, NoBetterWitness) {
    std::mt19937_64 rng(59);
    for (int k = 0; k < 20; ++k) {
        FactorMatrix X = random_factor(4, 2, rng);
        FactorMatrix Z = random_factor(4, 2, rng);
        const double dual = dual_eta(X, Z);
        const double probe = dual_eta_probe_min(X, Z, 2000, 1000 + k);
        EXPECT_GE(probe, dual - 1e-10);
    }
}

TEST(SinThetaSqBound, KnownValues) {
    FactorMatrix z = rank1(1, 0);
    EXPECT_NEAR(sin_theta_sq_bound(0.5, z), 0.5 / 1.5, 1e-14);
    EXPECT_NEAR(sin_theta_sq_bound(1e-9, z), 1e-9 / (2.0 - 1e-9), 1e-18);
    FactorMatrix I2(MatrixXd::Identity(2, 2));
    EXPECT_NEAR(sin_theta_sq_bound(0.5, I2), 0.5 / (2.0 / std::sqrt(2.0) - 0.5),
                1e-5);
    EXPECT_NEAR(sin_theta_sq_bound(0.5, I2), 0.54692, 1e-4);
    EXPECT_THROW(sin_theta_sq_bound(2.5, z), std::domain_error);
}

TEST(NeighborhoodBound, KnownValues) {
    FactorMatrix z = rank1(1, 0);  // C = 1
    EXPECT_DOUBLE_EQ(neighborhood_delta_foc_bound(0.0, z), 1.0);
    EXPECT_NEAR(neighborhood_delta_foc_bound(0.19, z), 0.9, 1e-14);
    EXPECT_DOUBLE_EQ(neighborhood_delta_foc_bound(1.5, z), 0.0);
}

TEST(NeighborhoodBound, MonotoneInEps) {
    FactorMatrix z = rank1(1, 0);
    double prev = 2.0;
    for (double eps = 0.0; eps <= 1.2; eps += 0.05) {
        const double cur = neighborhood_delta_foc_bound(eps, z);
        EXPECT_LE(cur, prev + 1e-15);
        prev = cur;
    }
}

TEST(SocLowerBound, RankDependentFloor) {
    FactorMatrix z1 = rank1(1, 0);
    EXPECT_DOUBLE_EQ(soc_lower_bound(10.0, z1, 1), 0.5);
    FactorMatrix I2(MatrixXd::Identity(2, 2));
    EXPECT_DOUBLE_EQ(soc_lower_bound(10.0, I2, 2), 0.2);
    EXPECT_NEAR(soc_lower_bound(0.19, z1, 1), 0.9, 1e-14);
}

TEST(SampleComplexity, CorollaryValues) {
    FactorMatrix z = rank1(1, 0);  // C = 1
    EXPECT_EQ(sample_complexity(0.0, z, 8, 1, 1.0), 8);
    EXPECT_EQ(sample_complexity(2.0, z, 8, 1, 1.0), 200);  // capped at 25x
    EXPECT_EQ(sample_complexity(0.5, z, 8, 1, 1.0), 16);
}

TEST(SampleComplexity, MonotoneInEps) {
    FactorMatrix z = rank1(1, 0);
    std::int64_t prev = 0;
    for (double eps = 0.0; eps <= 1.2; eps += 0.02) {
        const std::int64_t cur = sample_complexity(eps, z, 8, 2, 1.5);
        EXPECT_GE(cur, prev);
        prev = cur;
    }
}

TEST(Report, FieldsAreConsistent) {
    std::mt19937_64 rng(61);
    for (int k = 0; k < 25; ++k) {
        FactorMatrix X = random_factor(5, 2, rng);
        FactorMatrix Z = random_factor(5, 2, rng);
        ThresholdReport rep = threshold_report(X, Z, 2.0);
        EXPECT_NEAR(rep.delta_foc,
                    std::sqrt(1.0 - rep.sin_theta * rep.sin_theta), 1e-12);
        EXPECT_NEAR(rep.eta, (1.0 - rep.delta_foc) / (1.0 + rep.delta_foc),
                    1e-12);
        EXPECT_GE(rep.soc_lower_bound, rep.neighborhood_bound);
        EXPECT_GE(rep.soc_lower_bound, delta_star(Z.r()));
    }
    ThresholdReport same = threshold_report(rank1(1, 2), rank1(1, 2));
    EXPECT_TRUE(same.coincident);
    EXPECT_DOUBLE_EQ(same.delta_foc, 1.0);
}
