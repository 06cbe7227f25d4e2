#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lowrank/certificate.hpp"
#include "lowrank/factor.hpp"
#include "lowrank/landscape.hpp"
#include "lowrank/sensing.hpp"
#include "lowrank/thresholds.hpp"

namespace lowrank::io {

using nlohmann::json;

inline constexpr const char* kToolVersion =
#ifdef LOWRANK_VERSION
    LOWRANK_VERSION;
#else
    "dev";
#endif

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Plain-text factor format: header "n r", then n rows of r numbers.
inline FactorMatrix read_factor(std::istream& in, const std::string& name) {
    Eigen::Index n = 0, r = 0;
    if (!(in >> n >> r) || n < 1 || r < 1)
        throw IoError(name + ": expected header 'n r' with positive integers");
    MatrixXd M(n, r);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            if (!(in >> M(i, j)))
                throw IoError(name + ": truncated matrix body at row " +
                              std::to_string(i + 1));
    return FactorMatrix(M);
}

inline FactorMatrix read_factor_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path);
    return read_factor(in, path);
}

inline void write_factor(std::ostream& out, const FactorMatrix& X) {
    out << X.n() << " " << X.r() << "\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < X.n(); ++i) {
        for (Eigen::Index j = 0; j < X.r(); ++j)
            out << (j ? " " : "") << X.data()(i, j);
        out << "\n";
    }
}

inline void write_factor_file(const std::string& path, const FactorMatrix& X) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write matrix file: " + path);
    write_factor(out, X);
}

inline json to_json(const ThresholdReport& rep) {
    return json{{"coincident", rep.coincident},
                {"sin_theta", rep.sin_theta},
                {"delta_foc", rep.delta_foc},
                {"eta", rep.eta},
                {"conditioning", rep.conditioning},
                {"epsilon", rep.epsilon},
                {"neighborhood_bound", rep.neighborhood_bound},
                {"soc_lower_bound", rep.soc_lower_bound},
                {"sample_estimate", rep.sample_estimate},
                {"c0", rep.c0}};
}

inline json to_json(const CertificateH& cert, double delta) {
    std::vector<double> v1(cert.v1.data(), cert.v1.data() + cert.v1.size());
    return json{{"eta", cert.eta},
                {"delta", delta},
                {"v1", v1},
                {"residual_norms", {{"feasibility", cert.feasibility}}}};
}

inline json metadata(const json& config, std::uint64_t seed) {
    return json{{"tool_version", kToolVersion}, {"config", config}, {"seed", seed}};
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out << body;
}

/// Long-format grid CSV: rho, phi, delta_foc, rel_error.
inline std::string grid_csv(const Rank1Grid& grid) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "rho,phi,delta_foc,rel_error\n";
    for (std::size_t i = 0; i < grid.rho_axis.size(); ++i)
        for (std::size_t j = 0; j < grid.phi_axis.size(); ++j)
            os << grid.rho_axis[i] << "," << grid.phi_axis[j] << ","
               << grid.delta_foc_values(static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(j))
               << ","
               << grid.rel_error_values(static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(j))
               << "\n";
    return os.str();
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "eps,bound,empirical_inf,soc_floor\n";
    for (const SweepRow& row : rows)
        os << row.epsilon << "," << row.bound << "," << row.empirical_inf << ","
           << row.soc_floor << "\n";
    return os.str();
}

/// One row per trial.
inline std::string experiment_csv(const ExperimentResult& result) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "n,r,m,eps,trial,seed,final_rel_error,iterations,converged,diverged,"
          "success\n";
    for (const TrialRecord& rec : result.records)
        os << result.config.n << "," << result.config.r << "," << rec.m << ","
           << rec.epsilon << "," << rec.trial << "," << rec.seed << ","
           << rec.final_rel_error << "," << rec.iterations << ","
           << rec.converged << "," << rec.diverged << "," << rec.success << "\n";
    return os.str();
}

inline json experiment_summary(const ExperimentResult& result) {
    json cells = json::array();
    for (const CellSummary& cell : result.cells)
        cells.push_back(json{{"m", cell.m},
                             {"eps", cell.epsilon},
                             {"trials", cell.trials},
                             {"successes", cell.successes},
                             {"success_rate", cell.success_rate}});
    json config{{"n", result.config.n},
                {"r", result.config.r},
                {"m_list", result.config.m_list},
                {"epsilon_list", result.config.epsilon_list},
                {"trials", result.config.trials},
                {"seed", result.config.seed},
                {"c0", result.config.c0},
                {"success_rel_error", result.config.success_rel_error},
                {"gd_tol", result.config.gd.tol},
                {"gd_max_iter", result.config.gd.max_iter}};
    return json{{"schema_version", 1},
                {"metadata", metadata(config, result.config.seed)},
                {"cells", cells}};
}

}  // namespace lowrank::io
