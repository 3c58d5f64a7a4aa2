/* Copyright 2026 The bgrank Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License. */

#include <cstdlib>
#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>

#include "temp_dir.hpp"
#include "testutil.hpp"

using namespace bgrank;
using testutil::TempDir;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

const TempDir& shared_dir() {
    static TempDir dir;
    return dir;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const auto out = shared_dir().path() / ("out" + std::to_string(counter) + ".txt");
    const auto err = shared_dir().path() / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string(BGRANK_CLI_BIN) + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = testutil::slurp(out);
    res.err = testutil::slurp(err);
    return res;
}

/// Small synthetic dataset shared by the CLI cases.
const std::filesystem::path& dataset_dir() {
    static const std::filesystem::path dir = [] {
        SynthConfig cfg;
        cfg.items = 150;
        cfg.users = 400;
        cfg.edges_per_user_mean = 6.0;
        cfg.popularity_bias = 1.5;
        cfg.seed = 77;
        const auto d = shared_dir().path() / "data";
        write_synthetic(generate_synthetic(cfg), d);
        return d;
    }();
    return dir;
}

}  // namespace

TEST_CASE("cli rank happy path writes scores and a manifest", "[cli]") {
    const auto ratings = dataset_dir() / "ratings.csv";
    const auto scores = shared_dir().path() / "scores.csv";
    const auto res = run_cli("rank --algo birank-r --in " + ratings.string() +
                             " --out " + scores.string() + " --seed 42");
    INFO(res.err);
    REQUIRE(res.code == 0);
    REQUIRE(std::filesystem::exists(scores));
    REQUIRE(std::filesystem::exists(scores.string() + ".manifest.json"));

    const std::string body = testutil::slurp(scores);
    CHECK(body.rfind("item_id,score,rank", 0) == 0);

    const std::string manifest = testutil::slurp(scores.string() + ".manifest.json");
    CHECK(manifest.find("\"subcommand\": \"rank\"") != std::string::npos);
    CHECK(manifest.find("\"sha256\"") != std::string::npos);
    CHECK(manifest.find("\"seed\": 42") != std::string::npos);

    SECTION("re-running reproduces the output byte for byte") {
        const auto scores2 = shared_dir().path() / "scores2.csv";
        const auto res2 = run_cli("rank --algo birank-r --in " + ratings.string() +
                                  " --out " + scores2.string() + " --seed 42");
        REQUIRE(res2.code == 0);
        CHECK(testutil::slurp(scores) == testutil::slurp(scores2));
    }
}

TEST_CASE("cli usage errors exit with code 2", "[cli]") {
    CHECK(run_cli("rank --algo nosuch --in x.csv").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("rank --in x.csv").code == 2);  // --algo is required
}

TEST_CASE("cli missing input file exits with code 4", "[cli]") {
    const auto res =
        run_cli("rank --algo birank-r --in /nonexistent/r.csv --out /tmp/s.csv");
    CHECK(res.code == 4);
    CHECK(res.err.find("cannot open") != std::string::npos);
}

TEST_CASE("cli conflicting options exit with code 3", "[cli]") {
    const auto ratings = dataset_dir() / "ratings.csv";
    SECTION("weighting contradicts the algorithm") {
        const auto res = run_cli("rank --algo birank-t --weighting rating --in " +
                                 ratings.string() + " --out /tmp/s.csv");
        CHECK(res.code == 3);
    }
    SECTION("--now under rating weighting") {
        const auto res = run_cli("rank --algo birank-r --now 12345 --in " +
                                 ratings.string() + " --out /tmp/s.csv");
        CHECK(res.code == 3);
    }
}

TEST_CASE("cli birank-t defaults --now to the newest timestamp", "[cli]") {
    const auto ratings = dataset_dir() / "ratings.csv";
    const auto scores = shared_dir().path() / "scores_t.csv";
    const auto res = run_cli("rank --algo birank-t --in " + ratings.string() +
                             " --out " + scores.string());
    INFO(res.err);
    REQUIRE(res.code == 0);
    const std::string manifest = testutil::slurp(scores.string() + ".manifest.json");
    CHECK(manifest.find("\"weighting\": \"time-decay\"") != std::string::npos);
    CHECK(manifest.find("\"delta\": 0.85") != std::string::npos);
}

TEST_CASE("cli ingest writes cleaned rows and a rejects sidecar", "[cli]") {
    TempDir dir;
    const auto raw = dir.file(
        "raw.csv", "u1,i1,5,100\nu1,i1,3,200\nu2,i1,9,300\nu2,i2,4,400\n");
    const auto cleaned = dir.path() / "cleaned.csv";
    const auto res =
        run_cli("ingest --in " + raw.string() + " --out " + cleaned.string());
    INFO(res.err);
    REQUIRE(res.code == 0);
    const std::string body = testutil::slurp(cleaned);
    // duplicate (u1,i1) merged to mean 4 at the earliest timestamp, the
    // out-of-scale row dropped
    CHECK(body.find("u1,i1,4,100") != std::string::npos);
    CHECK(body.find("u2,i2,4,400") != std::string::npos);
    CHECK(body.find("9") == std::string::npos);
    CHECK(std::filesystem::exists(raw.string() + ".rejects"));
}

TEST_CASE("cli eval emits report json, csv twin and per-year table", "[cli]") {
    const auto out_dir = shared_dir().path() / "eval-out";
    const auto res = run_cli(
        "eval --algo birank-r --in " + (dataset_dir() / "ratings.csv").string() +
        " --metadata " + (dataset_dir() / "metadata.csv").string() + " --truth " +
        (dataset_dir() / "truth.csv").string() +
        " --rebalance 20 --L 0.05 --groups 10 --out-dir " + out_dir.string());
    INFO(res.err);
    REQUIRE(res.code == 0);
    REQUIRE(std::filesystem::exists(out_dir / "report.json"));
    REQUIRE(std::filesystem::exists(out_dir / "report.csv"));
    REQUIRE(std::filesystem::exists(out_dir / "per_year.csv"));
    REQUIRE(std::filesystem::exists(out_dir / "manifest.json"));

    const std::string json = testutil::slurp(out_dir / "report.json");
    CHECK(json.find("\"rebalance\": \"none\"") != std::string::npos);
    CHECK(json.find("\"window_size\": 20") != std::string::npos);
    const std::string csv = testutil::slurp(out_dir / "report.csv");
    CHECK(csv.find(",none,") != std::string::npos);
    CHECK(csv.find(",dp=20,") != std::string::npos);
}

TEST_CASE("cli rebalance consumes a score file", "[cli]") {
    const auto scores = shared_dir().path() / "rb_input.csv";
    auto res = run_cli("rank --algo birank-r --in " +
                       (dataset_dir() / "ratings.csv").string() + " --out " +
                       scores.string());
    REQUIRE(res.code == 0);
    const auto rb = shared_dir().path() / "rb_output.csv";
    res = run_cli("rebalance --in " + (dataset_dir() / "ratings.csv").string() +
                  " --metadata " + (dataset_dir() / "metadata.csv").string() +
                  " --scores " + scores.string() + " --window 20 --out " +
                  rb.string());
    INFO(res.err);
    REQUIRE(res.code == 0);
    const std::string body = testutil::slurp(rb);
    CHECK(body.rfind("item_id,score,rank,raw_score", 0) == 0);
}

TEST_CASE("cli sweep emits the relative-imbalance curve", "[cli]") {
    const auto out = shared_dir().path() / "sweep.csv";
    const auto res = run_cli(
        "sweep --algo birank-r --in " + (dataset_dir() / "ratings.csv").string() +
        " --metadata " + (dataset_dir() / "metadata.csv").string() +
        " --windows 2,10,40 --L 0.05 --groups 10 --out " + out.string());
    INFO(res.err);
    REQUIRE(res.code == 0);
    const std::string body = testutil::slurp(out);
    CHECK(body.rfind("delta_p,raw_imbalance,rebalanced_imbalance,relative_imbalance",
                     0) == 0);
    CHECK(std::count(body.begin(), body.end(), '\n') == 4);  // header + 3 rows
}

TEST_CASE("cli synth is reproducible per seed", "[cli]") {
    const auto a = shared_dir().path() / "synth-a";
    const auto b = shared_dir().path() / "synth-b";
    const std::string base =
        "synth --items 80 --users 200 --mean-edges 4 --seed 5 --out-dir ";
    REQUIRE(run_cli(base + a.string()).code == 0);
    REQUIRE(run_cli(base + b.string()).code == 0);
    CHECK(testutil::slurp(a / "ratings.csv") == testutil::slurp(b / "ratings.csv"));
    CHECK(std::filesystem::exists(a / "manifest.json"));
}

TEST_CASE("cli top prints rank, item and release year", "[cli]") {
    const auto scores = shared_dir().path() / "top_scores.csv";
    auto res = run_cli("rank --algo birank-r --in " +
                       (dataset_dir() / "ratings.csv").string() + " --out " +
                       scores.string());
    REQUIRE(res.code == 0);
    res = run_cli("top --in " + (dataset_dir() / "ratings.csv").string() +
                  " --metadata " + (dataset_dir() / "metadata.csv").string() +
                  " --scores " + scores.string() + " --k 5");
    INFO(res.err);
    REQUIRE(res.code == 0);
    CHECK(res.out.find("rank  item_id  release_year  score") != std::string::npos);
    CHECK(res.out.find("\n1  i") != std::string::npos);
}

TEST_CASE("cli reads defaults from a config file, flags win", "[cli]") {
    TempDir dir;
    const auto cfg = dir.file("run.cfg", "[rank]\nseed=7\nth=1e-6\n");
    const auto scores = dir.path() / "cfg_scores.csv";
    const auto res = run_cli("--config " + cfg.string() + " rank --algo birank-r" +
                             " --in " + (dataset_dir() / "ratings.csv").string() +
                             " --out " + scores.string());
    INFO(res.err);
    REQUIRE(res.code == 0);
    const std::string manifest = testutil::slurp(scores.string() + ".manifest.json");
    CHECK(manifest.find("\"seed\": 7") != std::string::npos);
    CHECK(manifest.find("1e-06") != std::string::npos);
}

TEST_CASE("cli resolves relative inputs against BGRANK_DATA_DIR", "[cli]") {
    const auto scores = shared_dir().path() / "env_scores.csv";
    const std::string cmd = "BGRANK_DATA_DIR=" + dataset_dir().string() + " " +
                            std::string(BGRANK_CLI_BIN) +
                            " rank --algo birank-r --in ratings.csv --out " +
                            scores.string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(std::filesystem::exists(scores));
}
