// Command-line front end: thresholds, certificates, landscape grids and
// sweeps, recovery experiments, and the verification suite.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lowrank/certificate.hpp"
#include "lowrank/io.hpp"
#include "lowrank/landscape.hpp"
#include "lowrank/sensing.hpp"
#include "lowrank/thresholds.hpp"
#include "lowrank/verify.hpp"

namespace {

using nlohmann::json;
using namespace lowrank;

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    double c0 = 1.0;
};

void emit(const json& doc, const std::string& out) {
    const std::string body = doc.dump(2) + "\n";
    if (out.empty()) {
        std::cout << body;
    } else {
        io::write_text_file(out, body);
    }
}

FactorMatrix rank1_point(double rho, double phi_rad) {
    return FactorMatrix(
        (MatrixXd(2, 1) << rho * std::cos(phi_rad), rho * std::sin(phi_rad))
            .finished());
}

int cmd_threshold(const std::string& x_path, const std::string& z_path,
                  std::optional<double> rho, std::optional<double> phi_deg,
                  const CommonOpts& common) {
    FactorMatrix Z = FactorMatrix::zero(1, 1);
    FactorMatrix X = FactorMatrix::zero(1, 1);
    if (rho && phi_deg) {
        const double phi = *phi_deg * std::numbers::pi / 180.0;
        Z = rank1_point(1.0, 0.0);
        X = rank1_point(*rho, phi);
    } else if (!x_path.empty() && !z_path.empty()) {
        X = io::read_factor_file(x_path);
        Z = io::read_factor_file(z_path);
    } else {
        std::cerr << "threshold: provide --x/--z files or --rho/--phi\n";
        return 1;
    }
    ThresholdReport rep = threshold_report(X, Z, common.c0);
    json doc = io::to_json(rep);
    doc["metadata"] = io::metadata(
        json{{"x", x_path}, {"z", z_path}, {"c0", common.c0}}, common.seed);
    emit(doc, common.out);
    return 0;
}

int cmd_certificate(const std::string& x_path, const std::string& z_path,
                    int mc_trials, const CommonOpts& common) {
    FactorMatrix X = io::read_factor_file(x_path);
    FactorMatrix Z = io::read_factor_file(z_path);
    AdversarialResult adv = adversarial_operator(X, Z);
    json doc;
    doc["certificate"] = io::to_json(adv.certificate,
                                     delta_from_eta(adv.certificate.eta));
    if (adv.certified) {
        const SensingOperator& A = adv.certified->op;
        const VectorXd b = A.apply(Z.gram());
        const double mc = rip_monte_carlo(A, Z.r(), mc_trials, common.seed,
                                          {adv.certificate.v1});
        doc["verification"] = json{
            {"gradient_norm", gradient(A, X, b).norm()},
            {"spectral_delta", spectral_delta(A)},
            {"monte_carlo_delta_lower_bound", mc},
            {"achieved_delta", adv.certified->achieved_delta}};
        doc["status"] = "certified";
    } else {
        doc["status"] = "no-certificate";
        doc["note"] = adv.note;
    }
    doc["metadata"] = io::metadata(
        json{{"x", x_path}, {"z", z_path}, {"mc_trials", mc_trials}},
        common.seed);
    emit(doc, common.out);
    return 0;
}

int cmd_grid(double rho_min, double rho_max, int rho_steps, int phi_steps,
             const CommonOpts& common) {
    Rank1Grid grid = rank1_grid(linspace(rho_min, rho_max, rho_steps),
                                linspace(0.0, std::numbers::pi / 2, phi_steps));
    const std::string prefix = common.out.empty() ? "grid" : common.out;
    io::write_text_file(prefix + ".csv", io::grid_csv(grid));
    json config{{"rho_min", rho_min}, {"rho_max", rho_max},
                {"rho_steps", rho_steps}, {"phi_steps", phi_steps}};
    io::write_text_file(prefix + ".meta.json",
                        io::metadata(config, common.seed).dump(2) + "\n");
    std::cout << "wrote " << prefix << ".csv (" << rho_steps * phi_steps
              << " cells)\n";
    return 0;
}

int cmd_sweep(const std::string& z_path, Eigen::Index n,
              std::vector<double> eps_list, int samples,
              const CommonOpts& common) {
    FactorMatrix Z = z_path.empty()
                         ? FactorMatrix([&] {
                               MatrixXd z = MatrixXd::Zero(n, 1);
                               z(0, 0) = 1.0;
                               return z;
                           }())
                         : io::read_factor_file(z_path);
    std::vector<SweepRow> rows =
        epsilon_sweep(Z, eps_list, samples, common.seed);
    const std::string prefix = common.out.empty() ? "sweep" : common.out;
    io::write_text_file(prefix + ".csv", io::sweep_csv(rows));
    json config{{"z", z_path}, {"n", n}, {"eps", eps_list},
                {"samples_per_eps", samples}};
    io::write_text_file(prefix + ".meta.json",
                        io::metadata(config, common.seed).dump(2) + "\n");
    std::cout << "wrote " << prefix << ".csv (" << rows.size() << " rows)\n";
    return 0;
}

int cmd_experiment(const ExperimentConfig& cfg, const CommonOpts& common) {
    ExperimentResult result = recovery_experiment(cfg);
    const std::string prefix = common.out.empty() ? "experiment" : common.out;
    io::write_text_file(prefix + ".csv", io::experiment_csv(result));
    io::write_text_file(prefix + ".json",
                        io::experiment_summary(result).dump(2) + "\n");
    for (const CellSummary& cell : result.cells)
        std::cout << "m=" << cell.m << " eps=" << cell.epsilon
                  << " success_rate=" << cell.success_rate << "\n";
    return 0;
}

int cmd_verify(const VerifyConfig& cfg) {
    std::vector<CheckResult> results = run_verification(cfg);
    bool all_pass = true;
    for (const CheckResult& check : results) {
        std::cout << (check.pass ? "PASS" : "FAIL") << "  " << check.name
                  << "  (" << check.detail << ")\n";
        all_pass = all_pass && check.pass;
    }
    std::cout << (all_pass ? "all checks passed\n" : "violations found\n");
    return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sharp RIP-constant thresholds for spurious critical points "
                 "in low-rank matrix sensing"};
    app.require_subcommand(1);
    // Let global flags (--seed, --out, ...) appear after the subcommand name.
    app.fallthrough();

    CommonOpts common;
    app.add_option("--seed", common.seed, "master RNG seed")->capture_default_str();
    app.add_option("--out", common.out, "output path or prefix");
    app.add_option("--format", common.format, "output format (csv|json)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--c0", common.c0, "sample-complexity constant C0")
        ->capture_default_str();

    // threshold
    auto* threshold = app.add_subcommand(
        "threshold", "delta_foc and neighborhood bounds for a point pair");
    std::string x_path, z_path;
    std::optional<double> rho, phi_deg;
    threshold->add_option("--x", x_path, "candidate factor file");
    threshold->add_option("--z", z_path, "ground-truth factor file");
    threshold->add_option("--rho", rho, "rank-1 shorthand: length ratio");
    threshold->add_option("--phi", phi_deg, "rank-1 shorthand: angle in degrees");

    // certificate
    auto* certificate = app.add_subcommand(
        "certificate", "extremal operator and duality certificate");
    std::string cx_path, cz_path;
    int mc_trials = 10000;
    certificate->add_option("--x", cx_path, "candidate factor file")->required();
    certificate->add_option("--z", cz_path, "ground-truth factor file")->required();
    certificate->add_option("--mc-trials", mc_trials, "isometry probe count")
        ->capture_default_str();

    // grid
    auto* grid = app.add_subcommand("grid", "rank-1 (rho, phi) level-curve grid");
    double rho_min = 0.05, rho_max = 2.0;
    int rho_steps = 200, phi_steps = 200;
    grid->add_option("--rho-min", rho_min)->capture_default_str();
    grid->add_option("--rho-max", rho_max)->capture_default_str();
    grid->add_option("--rho-steps", rho_steps)->capture_default_str();
    grid->add_option("--phi-steps", phi_steps)->capture_default_str();

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "bound vs sampled infimum over epsilon neighborhoods");
    std::string sz_path;
    Eigen::Index sweep_n = 4;
    std::vector<double> eps_list{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int samples = 2000;
    sweep->add_option("--z", sz_path, "ground-truth factor file");
    sweep->add_option("--n", sweep_n, "dimension for the default unit rank-1 z")
        ->capture_default_str();
    sweep->add_option("--eps", eps_list, "epsilon values")->capture_default_str();
    sweep->add_option("--samples", samples, "samples per epsilon")
        ->capture_default_str();

    // experiment
    auto* experiment =
        app.add_subcommand("experiment", "gradient-descent recovery table");
    ExperimentConfig ecfg;
    ecfg.m_list = {8, 16, 32, 64};
    ecfg.epsilon_list = {0.2, 0.8};
    experiment->add_option("--n", ecfg.n)->capture_default_str();
    experiment->add_option("--r", ecfg.r)->capture_default_str();
    experiment->add_option("--m", ecfg.m_list, "measurement counts")
        ->capture_default_str();
    experiment->add_option("--eps", ecfg.epsilon_list, "initial-point quality")
        ->capture_default_str();
    experiment->add_option("--trials", ecfg.trials)->capture_default_str();
    experiment->add_option("--tol-success", ecfg.success_rel_error,
                           "relative error counted as recovery")
        ->capture_default_str();
    experiment->add_option("--tol-grad", ecfg.gd.tol,
                           "gradient-descent stopping tolerance")
        ->capture_default_str();
    experiment->add_option("--max-iter", ecfg.gd.max_iter)->capture_default_str();

    // verify
    auto* verify =
        app.add_subcommand("verify", "run the oracle and bound cross-checks");
    VerifyConfig vcfg;
    verify->add_option("--pairs", vcfg.pairs)->capture_default_str();
    verify->add_option("--ball-samples", vcfg.ball_samples)->capture_default_str();
    verify->add_option("--probes", vcfg.probes)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (threshold->parsed())
            return cmd_threshold(x_path, z_path, rho, phi_deg, common);
        if (certificate->parsed())
            return cmd_certificate(cx_path, cz_path, mc_trials, common);
        if (grid->parsed())
            return cmd_grid(rho_min, rho_max, rho_steps, phi_steps, common);
        if (sweep->parsed())
            return cmd_sweep(sz_path, sweep_n, eps_list, samples, common);
        if (experiment->parsed()) {
            ecfg.seed = common.seed;
            ecfg.c0 = common.c0;
            return cmd_experiment(ecfg, common);
        }
        if (verify->parsed()) {
            vcfg.seed = common.seed;
            return cmd_verify(vcfg);
        }
    } catch (const io::IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}
