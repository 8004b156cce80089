#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtkm/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "rtkm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = rtkm::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("rtkm_cli_" + std::to_string(std::rand()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        rows.push_back(fields);
    }
    return rows;
}

}  // namespace

TEST_CASE("fit flags the synthetic outliers") {
    TempDir tmp;
    const Run r = cli({"fit", "--synthetic", "three-blobs", "--synth-seed", "1", "--algorithm", "rtkm",
                       "--k", "3", "--s", "1", "--alpha", "0.013157894736842105", "--seed", "1",
                       "--out", tmp / "r.json"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(slurp(tmp / "r.json"));
    int flagged = 0;
    for (int f : doc["result"]["outlier_flags"]) flagged += f;
    CHECK(flagged == 2);
    CHECK(doc["metrics"]["me"] == 0.0);
    CHECK(doc["manifest"]["config"]["k"] == 3);
    CHECK(doc["manifest"]["selection"] == "best-objective");
    CHECK_FALSE(doc["manifest"].contains("wall_seconds"));
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cli({"fit", "--synthetic", "three-blobs", "--algorithm", "kmeans", "--k", "500"}).code == 2);
    CHECK(cli({"fit", "--synthetic", "three-blobs"}).code == 2);                      // --k missing
    CHECK(cli({"fit", "--synthetic", "three-blobs", "--k", "3", "--bogus"}).code == 2);
    CHECK(cli({"fit", "--synthetic", "three-blobs", "--k", "3", "--algorithm", "x"}).code == 2);
    CHECK(cli({"fit", "--k", "3"}).code == 2);                                         // no dataset
    CHECK(cli({}).code == 2);
}

TEST_CASE("data errors exit with 3") {
    TempDir tmp;
    CHECK(cli({"fit", "--data", tmp / "missing.csv", "--k", "2"}).code == 3);
    std::ofstream(tmp / "ragged.csv") << "1,2\n3\n";
    const Run r = cli({"fit", "--data", tmp / "ragged.csv", "--k", "1"});
    CHECK(r.code == 3);
    CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("repeated fits write identical bytes") {
    TempDir tmp;
    const std::vector<std::string> base = {"fit", "--synthetic", "three-blobs", "--k", "3",
                                           "--alpha", "0.02", "--seed", "7", "--restarts", "3"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", tmp / "a.json"});
    b.insert(b.end(), {"--out", tmp / "b.json", "--jobs", "3"});
    REQUIRE(cli(a).code == 0);
    REQUIRE(cli(b).code == 0);
    CHECK(slurp(tmp / "a.json") == slurp(tmp / "b.json"));
}

TEST_CASE("csv round trip through generate and fit") {
    TempDir tmp;
    REQUIRE(cli({"generate", "--synthetic", "three-blobs", "--synth-seed", "1", "--out", tmp / "d.csv"}).code == 0);
    const Run from_csv = cli({"fit", "--data", tmp / "d.csv", "--labels", "last:4", "--outlier-classes",
                              "3", "--k", "3", "--alpha", "0.0132", "--seed", "1"});
    const Run from_synth = cli({"fit", "--synthetic", "three-blobs", "--synth-seed", "1", "--k", "3",
                                "--alpha", "0.0132", "--seed", "1"});
    REQUIRE(from_csv.code == 0);
    REQUIRE(from_synth.code == 0);
    const json a = json::parse(from_csv.out), b = json::parse(from_synth.out);
    CHECK(a["result"]["assignments"] == b["result"]["assignments"]);
    CHECK(a["metrics"] == b["metrics"]);
    CHECK(a["manifest"]["dataset"]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("sweep statistics") {
    TempDir tmp;
    SUBCASE("single alpha and restart") {
        REQUIRE(cli({"sweep", "--synthetic", "three-blobs", "--k", "3", "--alpha-grid", "0.02",
                     "--restarts", "1", "--out", tmp / "s.csv"}).code == 0);
        const auto rows = read_csv(slurp(tmp / "s.csv"));
        REQUIRE(rows.size() == 2);
        CHECK(rows[0] == std::vector<std::string>{"alpha", "runs", "failures", "f1_min", "f1_mean",
                                                  "f1_max", "me_min", "me_mean", "me_max"});
        CHECK(rows[1][3] == rows[1][4]);
        CHECK(rows[1][4] == rows[1][5]);
        CHECK(rows[1][6] == rows[1][8]);
        CHECK(fs::exists(tmp / "s.csv.manifest.json"));
    }
    SUBCASE("alpha = 0 predicts no outliers") {
        const Run r = cli({"sweep", "--synthetic", "three-blobs", "--k", "3", "--alpha-grid",
                           "0,0.0132,0.05", "--restarts", "4"});
        REQUIRE(r.code == 0);
        const auto rows = read_csv(r.out);
        REQUIRE(rows.size() == 4);
        CHECK(std::stod(rows[1][6]) == 1.0);
        CHECK(std::stod(rows[1][8]) == 1.0);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i][1] == "4");
            CHECK(std::stod(rows[i][3]) <= std::stod(rows[i][4]));
            CHECK(std::stod(rows[i][4]) <= std::stod(rows[i][5]));
            CHECK(std::stod(rows[i][6]) <= std::stod(rows[i][7]));
            CHECK(std::stod(rows[i][7]) <= std::stod(rows[i][8]));
        }
    }
    SUBCASE("failing runs are reported, not fatal") {
        // k = 151 fits all 152 points at alpha 0 but not once one point is trimmed
        const Run r = cli({"sweep", "--synthetic", "three-blobs", "--algorithm", "trimmed", "--k", "151",
                           "--alpha-grid", "0,0.01", "--restarts", "1", "--max-iters", "3"});
        REQUIRE(r.code == 0);
        const auto rows = read_csv(r.out);
        CHECK(rows[1][2] == "0");
        CHECK(rows[2][1] == "0");
        CHECK(rows[2][2] == "1");
        CHECK(r.err.find("warning") != std::string::npos);
    }
    CHECK(cli({"sweep", "--synthetic", "three-blobs", "--k", "3", "--alpha-grid", "1.5"}).code == 2);
}

TEST_CASE("eval") {
    TempDir tmp;
    REQUIRE(cli({"fit", "--synthetic", "three-blobs", "--k", "3", "--alpha", "0.0132", "--seed", "3",
                 "--out", tmp / "r.json"}).code == 0);
    const Run self = cli({"eval", "--result", tmp / "r.json", "--truth-result", tmp / "r.json"});
    REQUIRE(self.code == 0);
    const json m = json::parse(self.out);
    CHECK(m["average_f1"] == 1.0);
    CHECK(m["me"] == 0.0);

    const Run vs_data = cli({"eval", "--result", tmp / "r.json", "--synthetic", "three-blobs"});
    REQUIRE(vs_data.code == 0);
    const json fit_doc = json::parse(slurp(tmp / "r.json"));
    CHECK(json::parse(vs_data.out)["average_f1"] == fit_doc["metrics"]["average_f1"]);

    // truth without any labels
    std::ofstream(tmp / "plain.csv") << "1,2\n3,4\n";
    CHECK(cli({"eval", "--result", tmp / "r.json", "--data", tmp / "plain.csv"}).code == 3);
    // mismatched sizes
    std::ofstream(tmp / "small.csv") << "1,2,1\n3,4,0\n";
    CHECK(cli({"eval", "--result", tmp / "r.json", "--data", tmp / "small.csv", "--labels", "last:1"}).code == 3);
    // empty truth clustering
    json empty = fit_doc;
    empty["result"]["assignments"] = json::array();
    empty["result"]["outlier_flags"] = json::array();
    std::ofstream(tmp / "empty.json") << empty.dump();
    CHECK(cli({"eval", "--result", tmp / "empty.json", "--truth-result", tmp / "empty.json"}).code == 3);
}

TEST_CASE("replay reproduces the recorded result") {
    TempDir tmp;
    std::ofstream(tmp / "d.csv") << "x,y,a,b\n0,0,1,0\n0.1,0,1,0\n5,5,0,1\n5.1,5,0,1\n50,-40,0,0\n";
    REQUIRE(cli({"fit", "--data", tmp / "d.csv", "--labels", "last:2", "--k", "2", "--alpha", "0.2",
                 "--restarts", "2", "--out", tmp / "r.json"}).code == 0);
    const Run ok = cli({"replay", tmp / "r.json"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("reproduced") != std::string::npos);

    json tampered = json::parse(slurp(tmp / "r.json"));
    tampered["result"]["objective"] = 123.0;
    std::ofstream(tmp / "t.json") << tampered.dump();
    CHECK(cli({"replay", tmp / "t.json"}).code == 4);

    std::ofstream(tmp / "d.csv", std::ios::app) << "1,1,1,0\n";
    CHECK(cli({"replay", tmp / "r.json"}).code == 3);
}

TEST_CASE("installed binary reports exit codes") {
    const std::string bin = RTKM_CLI_PATH;
    CHECK(WEXITSTATUS(std::system((bin + " fit --synthetic three-blobs --k 999 2>/dev/null").c_str())) == 2);
    CHECK(WEXITSTATUS(std::system((bin + " --help >/dev/null").c_str())) == 0);
}
