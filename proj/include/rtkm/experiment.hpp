#ifndef RTKM_EXPERIMENT_HPP
#define RTKM_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtkm/metrics.hpp"
#include "rtkm/solver.hpp"

namespace rtkm {

struct Evaluation {
    std::optional<double> average_f1;
    std::optional<double> me;  // only when truth has both outliers and inliers
};

/// Scores predicted assignments against a truth clustering and truth outlier flags.
Evaluation evaluate(const Assignments& assignments, const std::vector<bool>& outlier_flags,
                    const Clustering& truth, const std::vector<bool>& truth_outliers);
/// Same, with truth taken from the dataset (empty Evaluation when it has none).
Evaluation evaluate(const FitResult& result, const Dataset& data);

/// One seeded run inside a restart or sweep driver.
struct RunRecord {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    Evaluation metrics;
};

struct RestartOutcome {
    FitResult best;
    std::uint64_t best_seed = 0;
    std::vector<RunRecord> runs;
};

/// Runs seeds base.seed + i for i < restarts and keeps the lowest final
/// objective (ties go to the earlier seed). Errors propagate.
RestartOutcome fit_restarts(const Dataset& data, Algorithm algorithm, const SolverConfig& base,
                            int restarts, int jobs = 1);

struct Summary {
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

Summary summarize(const std::vector<double>& values);

struct SweepRow {
    double alpha = 0.0;
    std::size_t runs = 0;
    std::size_t failures = 0;
    Summary f1;
    Summary me;
};

struct SweepOutcome {
    std::vector<SweepRow> rows;
    std::vector<RunRecord> runs;  // ordered by (alpha, seed)
};

/// Alpha-sensitivity sweep. A failing run is recorded, reported on `warnings`
/// (stderr by default) and excluded from the statistics; it never aborts the sweep.
SweepOutcome sweep_alpha(const Dataset& data, Algorithm algorithm, const SolverConfig& base,
                         const std::vector<double>& alpha_grid, int restarts, int jobs = 1,
                         std::ostream* warnings = nullptr);

/// Columns: alpha,runs,failures,f1_min,f1_mean,f1_max,me_min,me_mean,me_max.
/// Statistics without data (e.g. M_e on outlier-free truth) are left empty.
void write_sweep_csv(const SweepOutcome& sweep, std::ostream& out);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

std::string sha256_file(const std::filesystem::path& path);

nlohmann::json to_json(const SolverConfig& config);
SolverConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FitResult& result);
nlohmann::json to_json(const Evaluation& evaluation);
nlohmann::json to_json(const RunRecord& run);

}  // namespace rtkm

#endif  // RTKM_EXPERIMENT_HPP
