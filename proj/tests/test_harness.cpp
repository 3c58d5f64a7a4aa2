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

#include <catch2/catch_amalgamated.hpp>

#include "temp_dir.hpp"
#include "testutil.hpp"

using namespace bgrank;
using Catch::Matchers::WithinAbs;
using testutil::TempDir;

TEST_CASE("load_ground_truth intersects with the catalog", "[harness]") {
    TempDir dir;
    const auto g = build_graph(
        {{"u1", "i1", 4, 1}, {"u1", "i2", 4, 2}, {"u2", "i3", 4, 3}},
        WeightingMode::rating());

    SECTION("all rows known") {
        const auto p = dir.file("t.csv", "i1\ni2\ni3\n");
        const auto res = load_ground_truth(p, g);
        CHECK(res.truth.ids.size() == 3);
        CHECK(res.dropped_unknown == 0);
    }
    SECTION("unknown rows are dropped with a warning count") {
        const auto p = dir.file("t.csv", "i1\nix\ni3\n");
        const auto res = load_ground_truth(p, g);
        CHECK(res.truth.ids.size() == 2);
        CHECK(res.dropped_unknown == 1);
    }
    SECTION("duplicates collapse") {
        const auto p = dir.file("t.csv", "i1\ni1\ni2\n");
        const auto res = load_ground_truth(p, g);
        CHECK(res.truth.ids.size() == 2);
    }
    SECTION("award years are parsed and enable per-year evaluation") {
        const auto p = dir.file("t.csv", "item,award_year\ni1,2001\ni2,\n");
        const auto res = load_ground_truth(p, g);
        CHECK(res.truth.has_award_years());
        CHECK(res.truth.award_year.at("i1") == 2001);
        CHECK(res.truth.award_year.count("i2") == 0);
    }
    SECTION("empty intersection is an error") {
        const auto p = dir.file("t.csv", "ix\niy\n");
        CHECK_THROWS_AS(load_ground_truth(p, g), std::runtime_error);
    }
}

TEST_CASE("evaluate produces the full metric bundle deterministically",
          "[harness]") {
    SynthConfig cfg;
    cfg.items = 300;
    cfg.users = 900;
    cfg.edges_per_user_mean = 8.0;
    cfg.popularity_bias = 0.0;
    cfg.seed = 5;
    const SynthData data = generate_synthetic(cfg);
    const auto graph = build_graph(merge_duplicates(data.interactions),
                                   WeightingMode::rating());
    const auto catalog = resolve_release_dates(graph, data.metadata);
    const RankerSpec spec{Algorithm::birank_r, {1e-10, 5000, 42}, 0.85};
    const MetricConfig mc{0.05, 10};

    const EvalReport rep =
        evaluate(graph, catalog, spec, std::nullopt, data.truth, mc, "synth");
    // unrated items are not part of the graph, so the list size follows the
    // graph's item count, not the configured one
    const int expected_top = static_cast<int>(
        std::ceil(0.05 * static_cast<double>(graph.item_count())));
    CHECK(rep.metrics.top_size == expected_top);
    CHECK(std::isfinite(rep.metrics.precision));
    CHECK(std::isfinite(rep.metrics.recall));
    CHECK(std::isfinite(rep.metrics.auc));
    CHECK(std::isfinite(rep.metrics.ndcg));
    CHECK(std::isfinite(rep.metrics.imbalance));
    int total = 0;
    for (const int c : rep.metrics.group_counts)
        total += c;
    CHECK(total == rep.metrics.top_size);

    const EvalReport again =
        evaluate(graph, catalog, spec, std::nullopt, data.truth, mc, "synth");
    CHECK(to_json(rep).dump() == to_json(again).dump());
}

TEST_CASE("rebalancing lowers the imbalance of biased synthetic data",
          "[harness]") {
    SynthConfig cfg;
    cfg.items = 800;
    cfg.users = 4000;
    cfg.edges_per_user_mean = 10.0;
    cfg.popularity_bias = 2.0;
    cfg.seed = 1;
    const SynthData data = generate_synthetic(cfg);
    const auto graph = build_graph(merge_duplicates(data.interactions),
                                   WeightingMode::rating());
    const auto catalog = resolve_release_dates(graph, data.metadata);
    const RankerSpec spec{Algorithm::birank_r, {1e-10, 5000, 42}, 0.85};
    const MetricConfig mc{0.01, 40};

    const EvalReport raw =
        evaluate(graph, catalog, spec, std::nullopt, data.truth, mc, "synth");
    const EvalReport rb = evaluate(graph, catalog, spec, RebalanceConfig{100, 0.0},
                                   data.truth, mc, "synth");
    CHECK(rb.metrics.imbalance < raw.metrics.imbalance);
}

TEST_CASE("recall_by_year on a hand-enumerated two-award toy", "[harness]") {
    auto at = [](const char* iso) {
        std::int64_t t{};
        REQUIRE(parse_iso_date(iso, t));
        return t;
    };
    // Weighted item degrees by snapshot:
    //   < 2000: i1 = 9, i2 = 5
    //   < 2002: i1 = 17, i2 = 5, i3 = 12, i4 = 3, i5 = 4, i6 = 2
    const std::vector<Interaction> rows = {
        {"u1", "i1", 4, at("1999-03-01")}, {"u2", "i1", 5, at("1999-04-01")},
        {"u2", "i2", 5, at("1999-05-01")}, {"u3", "i1", 4, at("2000-06-01")},
        {"u4", "i1", 4, at("2001-06-01")}, {"u3", "i3", 5, at("2000-03-01")},
        {"u4", "i3", 4, at("2000-04-01")}, {"u5", "i3", 3, at("2001-04-01")},
        {"u5", "i4", 3, at("2000-07-01")}, {"u6", "i5", 4, at("2001-03-01")},
        {"u6", "i6", 2, at("2001-05-01")}};
    const std::map<std::string, std::int64_t> releases = {
        {"i1", at("1999-01-01")}, {"i2", at("1999-02-01")},
        {"i3", at("2000-01-01")}, {"i4", at("2000-02-01")},
        {"i5", at("2001-01-01")}, {"i6", at("2001-02-01")}};

    const auto graph = build_graph(rows, WeightingMode::rating());
    const auto catalog = resolve_release_dates(graph, releases);

    GroundTruth truth;
    truth.label = "toy";
    truth.ids = {"i2", "i6", "i5"};
    truth.award_year = {{"i2", 2000}, {"i6", 2001}, {"i5", 2002}};

    const RankerSpec spec{Algorithm::birank_r, {1e-12, 20000, 42}, 0.85};
    const auto per_year = recall_by_year(graph, catalog, spec,
                                         RebalanceConfig{2, 0.0}, truth, 0.5);

    // Year 2001's truth item has no ratings before the cutoff, so the year
    // is skipped with a note.
    REQUIRE(per_year.rows.size() == 2);
    REQUIRE(per_year.notes.size() == 1);
    CHECK(per_year.notes[0].find("2001") != std::string::npos);

    // Year 2000 snapshot: items {i1, i2}, top-1 by sqrt(degree) is i1, and
    // the two-item z-window keeps that order. The awarded i2 is missed.
    const auto& y2000 = per_year.rows[0];
    CHECK(y2000.year == 2000);
    CHECK(y2000.snapshot_items == 2);
    CHECK(y2000.truth_count == 1);
    CHECK(y2000.recall_raw == 0.0);
    CHECK(y2000.recall_rebalanced == 0.0);

    // Year 2002 snapshot: degrees (17,5,12,3,4,2); the raw top-3 is
    // {i1,i3,i2} and misses i5, while z-scores over dp=2 windows rank
    // {i3,i5,i1} on top and recover it.
    const auto& y2002 = per_year.rows[1];
    CHECK(y2002.year == 2002);
    CHECK(y2002.snapshot_items == 6);
    CHECK(y2002.truth_count == 1);
    CHECK(y2002.recall_raw == 0.0);
    CHECK(y2002.recall_rebalanced == 1.0);
}

TEST_CASE("recall_by_year snapshots grow monotonically", "[harness]") {
    SynthConfig cfg;
    cfg.items = 200;
    cfg.users = 1000;
    cfg.edges_per_user_mean = 6.0;
    cfg.truth_fraction = 0.1;  // enough planted items to span several years
    cfg.seed = 9;
    const SynthData data = generate_synthetic(cfg);
    const auto graph = build_graph(merge_duplicates(data.interactions),
                                   WeightingMode::rating());
    const auto catalog = resolve_release_dates(graph, data.metadata);
    const RankerSpec spec{Algorithm::birank_r, {1e-8, 2000, 42}, 0.85};
    const auto per_year =
        recall_by_year(graph, catalog, spec, std::nullopt, data.truth, 0.05);
    REQUIRE(per_year.rows.size() >= 3);
    for (std::size_t k = 1; k < per_year.rows.size(); ++k)
        CHECK(per_year.rows[k].snapshot_items >=
              per_year.rows[k - 1].snapshot_items);
    for (const auto& row : per_year.rows)
        CHECK(std::isnan(row.recall_rebalanced));
}

TEST_CASE("sweep_window reuses one raw ranking and covers every request",
          "[harness]") {
    SynthConfig cfg;
    cfg.items = 150;
    cfg.users = 500;
    cfg.edges_per_user_mean = 6.0;
    cfg.popularity_bias = 1.5;
    cfg.seed = 3;
    const SynthData data = generate_synthetic(cfg);
    const auto graph = build_graph(merge_duplicates(data.interactions),
                                   WeightingMode::rating());
    const auto catalog = resolve_release_dates(graph, data.metadata);
    const RankerSpec spec{Algorithm::birank_r, {1e-10, 5000, 42}, 0.85};

    const std::vector<int> windows = {2, 10, 50, 150, 400};
    const auto sweep = sweep_window(graph, catalog, spec, windows, {0.05, 10});
    REQUIRE(sweep.size() == windows.size());
    for (std::size_t k = 0; k < windows.size(); ++k) {
        CHECK(sweep[k].window_size == windows[k]);
        CHECK(sweep[k].raw_imbalance == sweep[0].raw_imbalance);
        CHECK_THAT(sweep[k].relative,
                   WithinAbs(sweep[k].rebalanced_imbalance / sweep[k].raw_imbalance,
                             1e-12));
    }
    // windows >= n-1 cover the whole catalog: the order, and therefore the
    // imbalance, is exactly the raw one
    CHECK(sweep.back().rebalanced_imbalance == sweep.back().raw_imbalance);
    CHECK(sweep.back().relative == 1.0);

    CHECK_THROWS_AS(sweep_window(graph, catalog, spec, {3}, {0.05, 10}),
                    std::invalid_argument);
}

TEST_CASE("generate_synthetic noiseless ratings follow the quality map",
          "[harness]") {
    SynthConfig cfg;
    cfg.items = 120;
    cfg.users = 400;
    cfg.edges_per_user_mean = 5.0;
    cfg.popularity_bias = 0.0;
    cfg.rating_noise = 0.0;
    cfg.seed = 17;
    const SynthData data = generate_synthetic(cfg);
    REQUIRE_FALSE(data.interactions.empty());

    std::unordered_map<std::string, double> expected;
    for (std::size_t i = 0; i < data.item_ids.size(); ++i) {
        const double q = data.quality[i];
        expected[data.item_ids[i]] =
            std::clamp(static_cast<double>(std::llround(1.0 + 4.0 * q)), 1.0, 5.0);
    }
    for (const auto& it : data.interactions)
        CHECK(it.rating == expected.at(it.item));
}

TEST_CASE("generate_synthetic biased attachment correlates age with degree",
          "[harness]") {
    SynthConfig cfg;
    cfg.items = 4000;
    cfg.users = 10000;
    cfg.edges_per_user_mean = 10.0;
    cfg.popularity_bias = 2.0;
    cfg.seed = 21;
    const SynthData data = generate_synthetic(cfg);

    std::unordered_map<std::string, double> degree;
    for (const auto& it : data.interactions)
        degree[it.item] += 1.0;
    std::vector<double> age, deg;
    for (std::size_t i = 0; i < data.item_ids.size(); ++i) {
        age.push_back(static_cast<double>(-data.arrival[i]));  // older = larger
        const auto d = degree.find(data.item_ids[i]);
        deg.push_back(d == degree.end() ? 0.0 : d->second);
    }
    CHECK(testutil::spearman(age, deg) > 0.5);
}

TEST_CASE("generate_synthetic is deterministic per seed", "[harness]") {
    TempDir dir;
    SynthConfig cfg;
    cfg.items = 100;
    cfg.users = 300;
    cfg.edges_per_user_mean = 4.0;
    cfg.seed = 33;
    write_synthetic(generate_synthetic(cfg), dir.path() / "a");
    write_synthetic(generate_synthetic(cfg), dir.path() / "b");
    cfg.seed = 34;
    write_synthetic(generate_synthetic(cfg), dir.path() / "c");
    for (const char* name : {"ratings.csv", "metadata.csv", "truth.csv"}) {
        CHECK(testutil::slurp(dir.path() / "a" / name) ==
              testutil::slurp(dir.path() / "b" / name));
    }
    CHECK(testutil::slurp(dir.path() / "a" / "ratings.csv") !=
          testutil::slurp(dir.path() / "c" / "ratings.csv"));
}

TEST_CASE("generate_synthetic spreads the planted truth across time deciles",
          "[harness]") {
    SynthConfig cfg;
    cfg.items = 1000;
    cfg.users = 2000;
    cfg.edges_per_user_mean = 5.0;
    cfg.seed = 41;
    const SynthData data = generate_synthetic(cfg);
    REQUIRE(data.truth.ids.size() == 10);  // ceil(0.01 * 1000)

    std::unordered_map<std::string, int> item_pos;
    for (std::size_t i = 0; i < data.item_ids.size(); ++i)
        item_pos[data.item_ids[i]] = static_cast<int>(i);
    std::vector<int> per_decile(10, 0);
    for (const auto& id : data.truth.ids)
        ++per_decile[item_pos.at(id) / 100];
    for (const int c : per_decile)
        CHECK(c == 1);
}

TEST_CASE("generate_synthetic rejects an infeasible edge budget", "[harness]") {
    SynthConfig cfg;
    cfg.items = 10;
    cfg.edges_per_user_mean = 11.0;
    CHECK_THROWS_AS(generate_synthetic(cfg), std::invalid_argument);
}

TEST_CASE("score CSV round-trip", "[harness]") {
    TempDir dir;
    const auto [graph, catalog] = testutil::chain_catalog(5);
    std::vector<double> scores = {0.5, 0.9, 0.1, 0.9, 0.3};
    const auto ranked = make_ranked_list(scores, graph.item_ids);
    const auto path = dir.path() / "scores.csv";
    write_scores_csv(path, ranked, graph.item_ids);

    const auto rows = read_scores_csv(path);
    REQUIRE(rows.size() == 5);
    const auto back = scores_for_graph(rows, graph);
    for (std::size_t k = 0; k < scores.size(); ++k)
        CHECK(back[k] == scores[k]);

    SECTION("unknown and missing items are errors") {
        auto bad = rows;
        bad[0].first = "zz";
        CHECK_THROWS_AS(scores_for_graph(bad, graph), std::runtime_error);
        auto missing = rows;
        missing.pop_back();
        CHECK_THROWS_AS(scores_for_graph(missing, graph), std::runtime_error);
    }
}

TEST_CASE("report serialization is stable and complete", "[harness]") {
    TempDir dir;
    EvalReport rep;
    rep.dataset = "demo";
    rep.algorithm = "birank-r";
    rep.weighting = "rating";
    rep.rebalance = RebalanceConfig{100, 0.0};
    rep.metrics.precision = 0.5;
    rep.metrics.recall = 0.25;
    rep.metrics.auc = 0.9;
    rep.metrics.ndcg = 0.8;
    rep.metrics.imbalance = 0.1;
    rep.metrics.group_counts = {1, 2, 3};
    rep.per_year_note = "ground truth has no award years";

    const auto j = to_json(rep);
    CHECK(j["rebalance"]["window_size"] == 100);
    CHECK(j["metrics"].size() == 5);
    CHECK(j["per_year"]["applicable"] == false);

    write_report_csv(dir.path() / "report.csv", {rep});
    const std::string csv = testutil::slurp(dir.path() / "report.csv");
    CHECK(csv.find("demo,birank-r,dp=100,0.01,40,precision,0.5") !=
          std::string::npos);
    CHECK(csv.find("imbalance,0.1") != std::string::npos);

    write_per_year_csv(dir.path() / "py.csv",
                       PerYearRecall{{{2001, 0.5, 0.75, 2, 10}}, {}});
    const std::string py = testutil::slurp(dir.path() / "py.csv");
    CHECK(py.find("2001,0.5,0.75") != std::string::npos);
}
