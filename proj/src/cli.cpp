#include "rtkm/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtkm/data.hpp"
#include "rtkm/error.hpp"
#include "rtkm/experiment.hpp"

namespace rtkm {

namespace {

using nlohmann::json;

constexpr const char* kResultFormat = "rtkm-result/1";

struct DatasetArgs {
    std::string path;
    std::string labels = "none";
    std::string outlier_classes;
    std::string mixed = "inlier";
    bool no_header = false;
    std::string synthetic;
    std::uint64_t synth_seed = 0;
    int noise = 0;
    std::uint64_t noise_seed = 0;
    bool standardize = false;

    json to_json() const {
        json j;
        if (!synthetic.empty()) {
            j = {{"source", "synthetic"}, {"preset", synthetic}, {"seed", synth_seed}};
        } else {
            j = {{"source", "csv"},
                 {"path", path},
                 {"sha256", sha256_file(path)},
                 {"labels", labels},
                 {"outlier_classes", outlier_classes},
                 {"mixed_labels", mixed},
                 {"header", no_header ? "no" : "auto"}};
        }
        j["noise"] = {{"count", noise}, {"seed", noise_seed}};
        j["standardize"] = standardize;
        return j;
    }

    static DatasetArgs from_json(const json& j) {
        DatasetArgs a;
        if (j.at("source") == "synthetic") {
            a.synthetic = j.at("preset").get<std::string>();
            a.synth_seed = j.at("seed").get<std::uint64_t>();
        } else {
            a.path = j.at("path").get<std::string>();
            a.labels = j.at("labels").get<std::string>();
            a.outlier_classes = j.at("outlier_classes").get<std::string>();
            a.mixed = j.at("mixed_labels").get<std::string>();
            a.no_header = j.at("header") == "no";
        }
        a.noise = j.at("noise").at("count").get<int>();
        a.noise_seed = j.at("noise").at("seed").get<std::uint64_t>();
        a.standardize = j.at("standardize").get<bool>();
        return a;
    }
};

void add_dataset_options(CLI::App* cmd, DatasetArgs& a) {
    cmd->add_option("--data", a.path, "CSV file (comma-delimited, optional header row)");
    cmd->add_option("--labels", a.labels, "label columns: none | col:<index> | last:<width>")
        ->capture_default_str();
    cmd->add_option("--outlier-classes", a.outlier_classes,
                    "comma-separated class indices treated as outliers");
    cmd->add_option("--mixed-labels", a.mixed,
                    "records mixing inlier and outlier classes: inlier | outlier | reject")
        ->capture_default_str();
    cmd->add_flag("--no-header", a.no_header, "first CSV row is data");
    cmd->add_option("--synthetic", a.synthetic, "generated dataset instead of --data: three-blobs");
    cmd->add_option("--synth-seed", a.synth_seed, "seed of the synthetic generator");
    cmd->add_option("--noise", a.noise, "append this many uniform noise points as outliers");
    cmd->add_option("--noise-seed", a.noise_seed, "seed of the noise points");
    cmd->add_flag("--standardize", a.standardize, "z-score every feature");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::set<int> parse_class_list(const std::string& text) {
    std::set<int> out;
    for (const auto& item : split_list(text)) {
        try {
            std::size_t used = 0;
            const int value = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.insert(value);
        } catch (const std::logic_error&) {
            throw InvalidArgument("bad class index '" + item + "' in --outlier-classes");
        }
    }
    return out;
}

std::vector<double> parse_alpha_grid(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw InvalidArgument("bad alpha '" + item + "' in --alpha-grid");
        }
    }
    if (out.empty()) throw InvalidArgument("--alpha-grid is empty");
    return out;
}

MixedLabelPolicy parse_mixed(const std::string& text) {
    if (text == "inlier") return MixedLabelPolicy::inlier;
    if (text == "outlier") return MixedLabelPolicy::outlier;
    if (text == "reject") return MixedLabelPolicy::reject;
    throw InvalidArgument("bad --mixed-labels '" + text + "'");
}

Dataset load_dataset(const DatasetArgs& a) {
    if (a.path.empty() == a.synthetic.empty()) {
        throw InvalidArgument("give exactly one of --data and --synthetic");
    }
    Dataset data;
    if (!a.synthetic.empty()) {
        if (a.synthetic != "three-blobs") {
            throw InvalidArgument("unknown synthetic preset '" + a.synthetic + "'");
        }
        data = generate_synthetic(SynthSpec::three_blobs_two_outliers(a.synth_seed));
    } else {
        CsvOptions options;
        if (a.no_header) options.header = false;
        const LabeledTable table = load_csv(a.path, LabelSpec::parse(a.labels), options);
        data = to_dataset(table, parse_class_list(a.outlier_classes), parse_mixed(a.mixed));
    }
    data = inject_noise(data, a.noise, a.noise_seed);
    if (a.standardize) standardize(data);
    data.validate();
    return data;
}

struct SolverArgs {
    std::string algorithm = "rtkm";
    SolverConfig config;
    std::string init = "random-points";
    std::string weight_init = "uniform";
    int restarts = 1;
    int jobs = 1;

    SolverConfig resolve() const {
        SolverConfig c = config;
        c.init = parse_init_scheme(init);
        c.weight_init = parse_weight_init(weight_init);
        return c;
    }
};

void add_solver_options(CLI::App* cmd, SolverArgs& a, bool with_alpha) {
    cmd->add_option("--algorithm", a.algorithm, "kmeans | relaxed | rtkm | trimmed")
        ->capture_default_str();
    cmd->add_option("--k", a.config.k, "number of clusters")->required();
    cmd->add_option("--s", a.config.s, "membership mass per point")->capture_default_str();
    if (with_alpha) {
        cmd->add_option("--alpha", a.config.alpha, "expected outlier fraction")
            ->capture_default_str();
    }
    cmd->add_option("--step-d", a.config.step_d, "proximal step for memberships")
        ->capture_default_str();
    cmd->add_option("--step-e", a.config.step_e, "proximal step for inlier weights")
        ->capture_default_str();
    cmd->add_option("--max-iters", a.config.max_iters)->capture_default_str();
    cmd->add_option("--tol", a.config.tol, "relative objective change to stop at")
        ->capture_default_str();
    cmd->add_option("--seed", a.config.seed, "first seed; restart i uses seed + i")
        ->capture_default_str();
    cmd->add_option("--init", a.init, "random-points | kmeans++")->capture_default_str();
    cmd->add_option("--weight-init", a.weight_init, "uniform | random | nearest")
        ->capture_default_str();
    cmd->add_option("--support-threshold", a.config.support_threshold,
                    "membership weight above which a point joins a cluster (s > 1)")
        ->capture_default_str();
    cmd->add_option("--restarts", a.restarts, "seeded restarts")->capture_default_str();
    cmd->add_option("--jobs", a.jobs, "worker threads for restarts")->capture_default_str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw DataError("cannot write " + path);
    file << text;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

json run_fit(const DatasetArgs& dataset_args, const SolverArgs& solver_args, bool record_time) {
    const auto start = std::chrono::steady_clock::now();
    const Dataset data = load_dataset(dataset_args);
    const Algorithm algorithm = parse_algorithm(solver_args.algorithm);
    const SolverConfig config = solver_args.resolve();
    const RestartOutcome outcome =
        fit_restarts(data, algorithm, config, solver_args.restarts, solver_args.jobs);

    json runs = json::array();
    for (const auto& run : outcome.runs) runs.push_back(to_json(run));
    json manifest = {{"algorithm", std::string(to_string(algorithm))},
                     {"config", to_json(config)},
                     {"dataset", dataset_args.to_json()},
                     {"restarts", solver_args.restarts},
                     {"selection", "best-objective"},
                     {"selected_seed", outcome.best_seed},
                     {"runs", std::move(runs)}};
    if (record_time) {
        manifest["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return {{"format", kResultFormat},
            {"manifest", std::move(manifest)},
            {"result", to_json(outcome.best)},
            {"metrics", to_json(evaluate(outcome.best, data))}};
}

int cmd_fit(const DatasetArgs& d, const SolverArgs& s, const std::string& out_path,
            bool record_time, std::ostream& out) {
    write_text(out_path, run_fit(d, s, record_time).dump(2) + "\n", out);
    return kExitOk;
}

int cmd_sweep(const DatasetArgs& d, const SolverArgs& s, const std::string& grid_text,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
    const Dataset data = load_dataset(d);
    const Algorithm algorithm = parse_algorithm(s.algorithm);
    const SolverConfig config = s.resolve();
    const std::vector<double> grid = parse_alpha_grid(grid_text);
    const SweepOutcome sweep = sweep_alpha(data, algorithm, config, grid, s.restarts, s.jobs, &err);

    std::ostringstream csv;
    write_sweep_csv(sweep, csv);
    write_text(out_path, csv.str(), out);

    json runs = json::array();
    for (const auto& run : sweep.runs) runs.push_back(to_json(run));
    std::vector<double> alphas = grid;
    const json manifest = {{"format", "rtkm-sweep/1"},
                           {"algorithm", std::string(to_string(algorithm))},
                           {"config", to_json(config)},
                           {"dataset", d.to_json()},
                           {"alpha_grid", alphas},
                           {"restarts", s.restarts},
                           {"selection", "all"},
                           {"runs", std::move(runs)}};
    if (!out_path.empty() && out_path != "-") {
        write_text(out_path + ".manifest.json", manifest.dump(2) + "\n", out);
    }
    return kExitOk;
}

int cmd_eval(const std::string& result_path, const DatasetArgs& d, const std::string& truth_path,
             const std::string& out_path, std::ostream& out) {
    const json result = read_json(result_path).at("result");
    const auto assignments = result.at("assignments").get<Assignments>();
    std::vector<bool> flags;
    for (int f : result.at("outlier_flags").get<std::vector<int>>()) flags.push_back(f != 0);

    Clustering truth;
    std::vector<bool> truth_outliers;
    if (!truth_path.empty()) {
        const json other = read_json(truth_path).at("result");
        for (int f : other.at("outlier_flags").get<std::vector<int>>()) {
            truth_outliers.push_back(f != 0);
        }
        truth = Clustering::from_assignments(other.at("assignments").get<Assignments>(),
                                             truth_outliers);
    } else {
        const Dataset data = load_dataset(d);
        if (!data.truth_memberships) throw DataError("truth dataset has no labels (see --labels)");
        truth_outliers = data.truth_outliers.value_or(std::vector<bool>{});
        truth = Clustering::from_assignments(*data.truth_memberships, truth_outliers);
    }
    if (truth.size != assignments.size()) {
        throw DataError("result has " + std::to_string(assignments.size()) +
                        " points but truth has " + std::to_string(truth.size));
    }
    if (truth.clusters.empty() && truth.outliers.empty()) {
        throw DataError("truth clustering is empty");
    }
    const Evaluation e = evaluate(assignments, flags, truth, truth_outliers);
    json doc = to_json(e);
    doc["points"] = assignments.size();
    write_text(out_path, doc.dump(2) + "\n", out);
    return kExitOk;
}

int cmd_generate(const DatasetArgs& d, const std::string& out_path, std::ostream& out) {
    if (d.synthetic.empty()) throw InvalidArgument("generate needs --synthetic");
    const Dataset data = load_dataset(d);
    LabeledTable table;
    table.rows = data.points.transpose();
    for (Eigen::Index f = 0; f < data.dims(); ++f) table.feature_names.push_back("x" + std::to_string(f));
    int clusters = 0;
    for (const auto& set : *data.truth_memberships) {
        for (int c : set) clusters = std::max(clusters, c + 1);
    }
    for (int c = 0; c < clusters; ++c) table.class_names.push_back("cluster" + std::to_string(c));
    table.class_names.push_back("outlier");
    table.labels = *data.truth_memberships;
    for (std::size_t i = 0; i < table.labels.size(); ++i) {
        if ((*data.truth_outliers)[i]) table.labels[i] = {clusters};
    }
    std::ostringstream csv;
    write_csv(table, csv);
    write_text(out_path, csv.str(), out);
    return kExitOk;
}

int cmd_replay(const std::string& path, std::ostream& out, std::ostream& err) {
    const json original = read_json(path);
    if (original.value("format", "") != kResultFormat) {
        throw DataError(path + " is not a fit result");
    }
    const json& manifest = original.at("manifest");
    const DatasetArgs d = DatasetArgs::from_json(manifest.at("dataset"));
    if (manifest.at("dataset").at("source") == "csv" &&
        sha256_file(d.path) != manifest.at("dataset").at("sha256")) {
        throw DataError(d.path + " no longer matches the recorded content hash");
    }
    SolverArgs s;
    s.algorithm = manifest.at("algorithm").get<std::string>();
    s.config = config_from_json(manifest.at("config"));
    s.init = std::string(to_string(s.config.init));
    s.weight_init = std::string(to_string(s.config.weight_init));
    s.restarts = manifest.at("restarts").get<int>();

    const json again = run_fit(d, s, false);
    const bool same = again.at("result") == original.at("result") &&
                      again.at("metrics") == original.at("metrics") &&
                      again.at("manifest").at("runs") == manifest.at("runs");
    if (!same) {
        err << "replay of " << path << " does not reproduce the recorded result\n";
        return kExitNumeric;
    }
    out << "reproduced " << path << ": objective " << again.at("result").at("objective").dump()
        << ", metrics " << again.at("metrics").dump() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust trimmed k-means and baseline clustering"};
    app.require_subcommand(1);

    DatasetArgs fit_data, sweep_data, eval_data, gen_data;
    SolverArgs fit_solver, sweep_solver;
    std::string fit_out, sweep_out, eval_out, gen_out, alpha_grid, result_path, truth_path,
        replay_path;
    bool record_time = false;

    CLI::App* fit = app.add_subcommand("fit", "fit one configuration (best of --restarts by objective)");
    add_dataset_options(fit, fit_data);
    add_solver_options(fit, fit_solver, true);
    fit->add_option("--out", fit_out, "result JSON (default stdout)");
    fit->add_flag("--record-time", record_time, "store wall time in the manifest");

    CLI::App* sweep = app.add_subcommand("sweep", "alpha-sensitivity sweep to CSV");
    add_dataset_options(sweep, sweep_data);
    add_solver_options(sweep, sweep_solver, false);
    sweep->add_option("--alpha-grid", alpha_grid, "comma-separated alpha values")->required();
    sweep->add_option("--out", sweep_out, "CSV table; a .manifest.json is written beside it");

    CLI::App* eval = app.add_subcommand("eval", "score a result against ground truth");
    eval->add_option("--result", result_path, "result JSON from fit")->required();
    add_dataset_options(eval, eval_data);
    eval->add_option("--truth-result", truth_path, "use another result's assignments as truth");
    eval->add_option("--out", eval_out, "metrics JSON (default stdout)");

    CLI::App* gen = app.add_subcommand("generate", "write a synthetic dataset as CSV");
    add_dataset_options(gen, gen_data);
    gen->add_option("--out", gen_out, "CSV path (default stdout)");

    CLI::App* replay = app.add_subcommand("replay", "re-run a fit result's manifest and compare");
    replay->add_option("result", replay_path, "result JSON from fit")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*fit) return cmd_fit(fit_data, fit_solver, fit_out, record_time, out);
        if (*sweep) return cmd_sweep(sweep_data, sweep_solver, alpha_grid, sweep_out, out, err);
        if (*eval) return cmd_eval(result_path, eval_data, truth_path, eval_out, out);
        if (*gen) return cmd_generate(gen_data, gen_out, out);
        if (*replay) return cmd_replay(replay_path, out, err);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const json::exception& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}

}  // namespace rtkm
