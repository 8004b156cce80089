#include "rtkm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <thread>

#include <openssl/evp.h>

#include "rtkm/error.hpp"

namespace rtkm {

namespace {

// Runs task(i) for i in [0, count) on up to `jobs` threads. Each task writes only
// its own slot, so results do not depend on scheduling.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) task(i);
        });
    }
    for (auto& t : pool) t.join();
}

RunRecord record_of(const FitResult& fit, double alpha, std::uint64_t seed) {
    RunRecord run;
    run.alpha = alpha;
    run.seed = seed;
    run.ok = true;
    run.objective = fit.objective();
    run.iterations = fit.iterations;
    run.converged = fit.converged;
    return run;
}

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

Evaluation evaluate(const Assignments& assignments, const std::vector<bool>& outlier_flags,
                    const Clustering& truth, const std::vector<bool>& truth_outliers) {
    Evaluation out;
    const Clustering predicted = Clustering::from_assignments(assignments, outlier_flags);
    out.average_f1 = average_f1(predicted, truth);
    if (!truth_outliers.empty()) {
        const auto outliers = std::count(truth_outliers.begin(), truth_outliers.end(), true);
        if (outliers > 0 && static_cast<std::size_t>(outliers) < truth_outliers.size()) {
            out.me = me_score(outlier_flags, truth_outliers);
        }
    }
    return out;
}

Evaluation evaluate(const FitResult& result, const Dataset& data) {
    if (!data.truth_memberships) return {};
    const std::vector<bool> truth_outliers = data.truth_outliers.value_or(std::vector<bool>{});
    const Clustering truth = Clustering::from_assignments(*data.truth_memberships, truth_outliers);
    return evaluate(result.assignments, result.outlier_flags, truth, truth_outliers);
}

RestartOutcome fit_restarts(const Dataset& data, Algorithm algorithm, const SolverConfig& base,
                            int restarts, int jobs) {
    if (restarts < 1) throw InvalidArgument("restarts must be at least 1");
    const auto count = static_cast<std::size_t>(restarts);
    std::vector<std::optional<FitResult>> fits(count);
    std::vector<std::exception_ptr> errors(count);
    parallel_for(count, jobs, [&](std::size_t i) {
        SolverConfig config = base;
        config.seed = base.seed + i;
        try {
            fits[i] = fit(data, algorithm, config);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    RestartOutcome out;
    std::size_t best = 0;
    for (std::size_t i = 0; i < count; ++i) {
        RunRecord run = record_of(*fits[i], base.alpha, base.seed + i);
        run.metrics = evaluate(*fits[i], data);
        out.runs.push_back(std::move(run));
        if (fits[i]->objective() < fits[best]->objective()) best = i;
    }
    out.best = std::move(*fits[best]);
    out.best_seed = base.seed + best;
    return out;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) total += v;
    // Clamp guards min <= mean <= max against summation rounding.
    s.mean = std::clamp(total / static_cast<double>(values.size()), s.min, s.max);
    return s;
}

SweepOutcome sweep_alpha(const Dataset& data, Algorithm algorithm, const SolverConfig& base,
                         const std::vector<double>& alpha_grid, int restarts, int jobs,
                         std::ostream* warnings) {
    if (restarts < 1) throw InvalidArgument("restarts must be at least 1");
    if (alpha_grid.empty()) throw InvalidArgument("alpha grid is empty");
    for (double a : alpha_grid) {
        if (!(a >= 0.0 && a < 1.0)) throw InvalidArgument("alpha grid values must lie in [0, 1)");
    }
    if (!data.truth_memberships) throw DataError("sweeps need ground-truth labels");

    const auto r = static_cast<std::size_t>(restarts);
    SweepOutcome out;
    out.runs.resize(alpha_grid.size() * r);
    parallel_for(out.runs.size(), jobs, [&](std::size_t idx) {
        SolverConfig config = base;
        config.alpha = alpha_grid[idx / r];
        config.seed = base.seed + idx % r;
        RunRecord& run = out.runs[idx];
        try {
            const FitResult result = fit(data, algorithm, config);
            run = record_of(result, config.alpha, config.seed);
            run.metrics = evaluate(result, data);
        } catch (const std::exception& e) {
            run.alpha = config.alpha;
            run.seed = config.seed;
            run.ok = false;
            run.error = e.what();
        }
    });

    for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
        SweepRow row;
        row.alpha = alpha_grid[a];
        std::vector<double> f1, me;
        for (std::size_t i = 0; i < r; ++i) {
            const RunRecord& run = out.runs[a * r + i];
            if (!run.ok) {
                ++row.failures;
                (warnings ? *warnings : std::cerr) << "warning: alpha=" << format_double(run.alpha) << " seed=" << run.seed
                          << " failed: " << run.error << '\n';
                continue;
            }
            ++row.runs;
            if (run.metrics.average_f1) f1.push_back(*run.metrics.average_f1);
            if (run.metrics.me) me.push_back(*run.metrics.me);
        }
        row.f1 = summarize(f1);
        row.me = summarize(me);
        out.rows.push_back(row);
    }
    return out;
}

void write_sweep_csv(const SweepOutcome& sweep, std::ostream& out) {
    out << "alpha,runs,failures,f1_min,f1_mean,f1_max,me_min,me_mean,me_max\n";
    auto stats = [&](const Summary& s) {
        if (s.count == 0) {
            out << ",,,";
            return;
        }
        out << ',' << format_double(s.min) << ',' << format_double(s.mean) << ','
            << format_double(s.max);
    };
    for (const auto& row : sweep.rows) {
        out << format_double(row.alpha) << ',' << row.runs << ',' << row.failures;
        stats(row.f1);
        stats(row.me);
        out << '\n';
    }
}

std::string format_double(double value) {
    char buffer[32];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    (void)ec;
    return std::string(buffer, end);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw NumericError("cannot initialize SHA-256");
    }
    std::vector<char> buffer(1 << 16);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &length);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

nlohmann::json to_json(const SolverConfig& c) {
    return {{"k", c.k},
            {"s", c.s},
            {"alpha", c.alpha},
            {"step_d", c.step_d},
            {"step_e", c.step_e},
            {"max_iters", c.max_iters},
            {"tol", c.tol},
            {"seed", c.seed},
            {"init", std::string(to_string(c.init))},
            {"weight_init", std::string(to_string(c.weight_init))},
            {"support_threshold", c.support_threshold}};
}

SolverConfig config_from_json(const nlohmann::json& j) {
    SolverConfig c;
    c.k = j.at("k").get<int>();
    c.s = j.at("s").get<int>();
    c.alpha = j.at("alpha").get<double>();
    c.step_d = j.at("step_d").get<double>();
    c.step_e = j.at("step_e").get<double>();
    c.max_iters = j.at("max_iters").get<int>();
    c.tol = j.at("tol").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.init = parse_init_scheme(j.at("init").get<std::string>());
    c.weight_init = parse_weight_init(j.at("weight_init").get<std::string>());
    c.support_threshold = j.at("support_threshold").get<double>();
    return c;
}

nlohmann::json to_json(const FitResult& r) {
    nlohmann::json centers = nlohmann::json::array();
    for (Eigen::Index j = 0; j < r.centers.cols(); ++j) {
        centers.push_back(std::vector<double>(r.centers.col(j).data(),
                                              r.centers.col(j).data() + r.centers.rows()));
    }
    nlohmann::json memberships = nlohmann::json::array();
    const Eigen::MatrixXd& w = r.memberships.weights;
    for (Eigen::Index i = 0; i < w.cols(); ++i) {
        memberships.push_back(std::vector<double>(w.col(i).data(), w.col(i).data() + w.rows()));
    }
    std::vector<int> flags(r.outlier_flags.begin(), r.outlier_flags.end());
    return {{"points", w.cols()},
            {"clusters", r.centers.cols()},
            {"features", r.centers.rows()},
            {"s", r.memberships.s},
            {"alpha", r.inliers.alpha},
            {"objective", r.objective()},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"centers", std::move(centers)},
            {"memberships", std::move(memberships)},
            {"inliers", std::vector<double>(r.inliers.weights.data(),
                                            r.inliers.weights.data() + r.inliers.weights.size())},
            {"assignments", r.assignments},
            {"outlier_flags", std::move(flags)},
            {"objective_trace", r.objective_trace}};
}

nlohmann::json to_json(const Evaluation& e) {
    return {{"average_f1", optional_number(e.average_f1)}, {"me", optional_number(e.me)}};
}

nlohmann::json to_json(const RunRecord& run) {
    nlohmann::json j = {{"alpha", run.alpha}, {"seed", run.seed}, {"ok", run.ok}};
    if (!run.ok) {
        j["error"] = run.error;
        return j;
    }
    j["objective"] = run.objective;
    j["iterations"] = run.iterations;
    j["converged"] = run.converged;
    j["metrics"] = to_json(run.metrics);
    return j;
}

}  // namespace rtkm
