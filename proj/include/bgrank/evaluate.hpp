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

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgrank/rebalance.hpp"
#include "bgrank/score_io.hpp"
#include "bgrank/synth.hpp"
#include "bgrank/truth.hpp"

namespace bgrank {

struct MetricConfig {
    double top_fraction = 0.01;  // L
    int groups = 40;             // S
};

struct MetricBundle {
    double precision = 0.0;
    double recall = 0.0;
    double auc = 0.0;
    double ndcg = 0.0;
    double imbalance = 0.0;
    std::vector<int> group_counts;
    int top_size = 0;
    int ndcg_depth = 0;
};

struct YearRecallRow {
    int year = 0;
    double recall_raw = 0.0;
    double recall_rebalanced = 0.0;  // NaN when no rebalance was requested
    int truth_count = 0;
    int snapshot_items = 0;
};

struct PerYearRecall {
    std::vector<YearRecallRow> rows;
    std::vector<std::string> notes;  // skipped years etc.
};

/// Everything measured for one (algorithm, rebalance-config, L) triple.
struct EvalReport {
    std::string dataset;
    std::string algorithm;
    std::string weighting;
    std::optional<RebalanceConfig> rebalance;
    double top_fraction = 0.01;
    int groups = 40;
    MetricBundle metrics;
    // run facts
    std::uint64_t seed = 0;
    double threshold = 0.0;
    int iterations = 0;
    bool converged = false;
    int components = 1;
    std::string truth_label;
    int truth_size = 0;
    std::optional<PerYearRecall> per_year;
    std::string per_year_note;  // reason when per_year is absent
};

namespace detail {

inline MetricBundle compute_metrics(const RankedList& ranked, const TruthSet& truth,
                                    const ItemCatalog& catalog,
                                    const MetricConfig& mc) {
    MetricBundle b;
    const auto top = top_list(ranked, mc.top_fraction);
    b.top_size = static_cast<int>(top.size());
    const auto pr = precision_recall(top, truth);
    b.precision = pr.precision;
    b.recall = pr.recall;
    b.auc = auc(ranked, truth);
    b.ndcg_depth = std::max<int>(1, b.top_size);
    b.ndcg = ndcg(ranked, truth, b.ndcg_depth);
    const auto imb = imbalance(ranked, catalog, {mc.groups, mc.top_fraction});
    b.imbalance = imb.imbalance;
    b.group_counts = imb.group_counts;
    return b;
}

}  // namespace detail

/// Rank, optionally rebalance, then score against the ground truth with the
/// full metric set. Deterministic for fixed seeds.
inline EvalReport evaluate(const RatingGraph& graph, const ItemCatalog& catalog,
                           const RankerSpec& spec,
                           const std::optional<RebalanceConfig>& rebalance,
                           const GroundTruth& truth, const MetricConfig& mc,
                           std::string dataset_label = {}) {
    const TruthSet truth_set = resolve_truth(truth, graph);
    if (truth_set.empty())
        throw std::invalid_argument("ground truth shares no items with the graph");

    ScoreVector scores = run_ranker(graph, spec);
    if (rebalance) {
        const WindowIndex windows = assign_windows(catalog, rebalance->window_size);
        scores = rebalance_scores(scores, windows, *rebalance);
    }
    const RankedList ranked = make_ranked_list(scores.item_scores, graph.item_ids);

    EvalReport rep;
    rep.dataset = std::move(dataset_label);
    rep.algorithm = algorithm_name(spec.algorithm);
    rep.weighting = graph.weighting.label();
    rep.rebalance = rebalance;
    rep.top_fraction = mc.top_fraction;
    rep.groups = mc.groups;
    rep.metrics = detail::compute_metrics(ranked, truth_set, catalog, mc);
    rep.seed = spec.convergence.seed;
    rep.threshold = spec.convergence.threshold;
    rep.iterations = scores.iterations_used;
    rep.converged = scores.converged;
    rep.components = scores.component_count;
    rep.truth_label = truth.label;
    rep.truth_size = static_cast<int>(truth_set.size());
    rep.per_year_note = "computed separately";
    return rep;
}

/// Per-award-year recall. For award year T the snapshot holds every edge
/// strictly before January 1st of T (UTC), i.e. items open through
/// December 31st of T-1; the ranking is recomputed on that snapshot and
/// recall is measured for the items awarded in T that the snapshot knows.
/// Snapshots are re-filtered with `snapshot_filter` because the cutoff can
/// push nodes below the cleaning thresholds.
inline PerYearRecall recall_by_year(const RatingGraph& graph,
                                    const ItemCatalog& catalog,
                                    const RankerSpec& spec,
                                    const std::optional<RebalanceConfig>& rebalance,
                                    const GroundTruth& truth, double top_fraction,
                                    const DegreeThresholds& snapshot_filter = {}) {
    if (!truth.has_award_years())
        throw std::invalid_argument("per-year recall needs award years");

    std::vector<int> years;
    for (const auto& [id, year] : truth.award_year)
        years.push_back(year);
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());

    const std::vector<Interaction> all = graph_interactions(graph);

    PerYearRecall out;
    for (const int year : years) {
        const std::int64_t cutoff = year_start(year);
        std::vector<Interaction> kept;
        kept.reserve(all.size());
        for (const auto& it : all)
            if (it.timestamp < cutoff)
                kept.push_back(it);
        kept = filter_min_degree(kept, snapshot_filter);
        if (kept.empty()) {
            out.notes.push_back("year " + std::to_string(year) +
                                ": empty snapshot, skipped");
            continue;
        }

        WeightingMode weighting = graph.weighting;
        if (weighting.kind == WeightingMode::Kind::time_decay)
            weighting.now = cutoff;  // "current time" of the snapshot
        const RatingGraph snap = build_graph(kept, weighting);
        const ItemCatalog snap_catalog = restrict_catalog(catalog, snap);

        TruthSet year_truth;
        for (const auto& [id, award] : truth.award_year)
            if (award == year)
                if (const auto dense = snap.find_item(id))
                    year_truth.insert(*dense);
        if (year_truth.empty()) {
            out.notes.push_back("year " + std::to_string(year) +
                                ": no truth items in snapshot, skipped");
            continue;
        }

        const ScoreVector raw = run_ranker(snap, spec);
        const RankedList ranked_raw = make_ranked_list(raw.item_scores, snap.item_ids);
        const auto top_raw = top_list(ranked_raw, top_fraction);

        YearRecallRow row;
        row.year = year;
        row.truth_count = static_cast<int>(year_truth.size());
        row.snapshot_items = static_cast<int>(snap.item_count());
        row.recall_raw = precision_recall(top_raw, year_truth).recall;
        row.recall_rebalanced = std::numeric_limits<double>::quiet_NaN();
        if (rebalance) {
            const WindowIndex windows =
                assign_windows(snap_catalog, rebalance->window_size);
            const ScoreVector rb = rebalance_scores(raw, windows, *rebalance);
            const RankedList ranked_rb = make_ranked_list(rb.item_scores, snap.item_ids);
            row.recall_rebalanced =
                precision_recall(top_list(ranked_rb, top_fraction), year_truth).recall;
        }
        out.rows.push_back(row);
    }
    return out;
}

struct SweepRow {
    int window_size = 0;
    double raw_imbalance = 0.0;
    double rebalanced_imbalance = 0.0;
    double relative = 0.0;  // rebalanced / raw
};

/// One ranking run, one rebalance pass per requested window size, imbalance
/// of each. The raw score vector is shared across all rows.
inline std::vector<SweepRow> sweep_window(const RatingGraph& graph,
                                          const ItemCatalog& catalog,
                                          const RankerSpec& spec,
                                          const std::vector<int>& window_sizes,
                                          const MetricConfig& mc) {
    for (const int w : window_sizes)
        RebalanceConfig{w, 0.0}.validate();

    const ScoreVector raw = run_ranker(graph, spec);
    const RankedList ranked_raw = make_ranked_list(raw.item_scores, graph.item_ids);
    const double raw_imb =
        imbalance(ranked_raw, catalog, {mc.groups, mc.top_fraction}).imbalance;

    std::vector<SweepRow> rows;
    rows.reserve(window_sizes.size());
    for (const int w : window_sizes) {
        const WindowIndex windows = assign_windows(catalog, w);
        const ScoreVector rb = rebalance_scores(raw, windows, RebalanceConfig{w, 0.0});
        const RankedList ranked_rb = make_ranked_list(rb.item_scores, graph.item_ids);
        const double rb_imb =
            imbalance(ranked_rb, catalog, {mc.groups, mc.top_fraction}).imbalance;
        rows.push_back({w, raw_imb, rb_imb, rb_imb / raw_imb});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["dataset"] = r.dataset;
    j["algorithm"] = r.algorithm;
    j["weighting"] = r.weighting;
    if (r.rebalance) {
        j["rebalance"] = {{"window_size", r.rebalance->window_size},
                          {"fallback", r.rebalance->fallback}};
    } else {
        j["rebalance"] = "none";
    }
    j["L"] = r.top_fraction;
    j["groups"] = r.groups;
    j["metrics"] = {{"precision", r.metrics.precision},
                    {"recall", r.metrics.recall},
                    {"auc", r.metrics.auc},
                    {"ndcg", r.metrics.ndcg},
                    {"imbalance", r.metrics.imbalance}};
    j["top_size"] = r.metrics.top_size;
    j["ndcg_depth"] = r.metrics.ndcg_depth;
    j["group_counts"] = r.metrics.group_counts;
    j["truth"] = {{"label", r.truth_label}, {"size", r.truth_size}};
    j["run"] = {{"seed", r.seed},
                {"threshold", r.threshold},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"components", r.components}};
    if (r.per_year) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : r.per_year->rows) {
            nlohmann::ordered_json jr;
            jr["year"] = row.year;
            jr["recall_raw"] = row.recall_raw;
            if (std::isfinite(row.recall_rebalanced))
                jr["recall_rebalanced"] = row.recall_rebalanced;
            jr["truth_count"] = row.truth_count;
            jr["snapshot_items"] = row.snapshot_items;
            rows.push_back(std::move(jr));
        }
        j["per_year"] = {{"rows", std::move(rows)}, {"notes", r.per_year->notes}};
    } else {
        j["per_year"] = {{"applicable", false}, {"reason", r.per_year_note}};
    }
    return j;
}

inline void write_report_json(const std::filesystem::path& path,
                              const std::vector<EvalReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports)
        arr.push_back(to_json(r));
    AtomicWriter out(path);
    out.stream() << arr.dump(2) << '\n';
    out.commit();
}

/// Flat twin of the JSON report: one row per (algorithm, rebalance, metric).
inline void write_report_csv(const std::filesystem::path& path,
                             const std::vector<EvalReport>& reports) {
    AtomicWriter out(path);
    out.stream() << "dataset,algorithm,rebalance,L,groups,metric,value\n";
    for (const auto& r : reports) {
        const std::string rb = r.rebalance
                                   ? "dp=" + std::to_string(r.rebalance->window_size)
                                   : "none";
        const std::pair<const char*, double> metrics[] = {
            {"precision", r.metrics.precision}, {"recall", r.metrics.recall},
            {"auc", r.metrics.auc},             {"ndcg", r.metrics.ndcg},
            {"imbalance", r.metrics.imbalance}};
        for (const auto& [name, value] : metrics)
            out.stream() << r.dataset << ',' << r.algorithm << ',' << rb << ','
                         << format_double(r.top_fraction) << ',' << r.groups << ','
                         << name << ',' << format_double(value) << '\n';
    }
    out.commit();
}

/// `year,recall_raw,recall_rebalanced` rows; missing rebalanced values stay
/// empty.
inline void write_per_year_csv(const std::filesystem::path& path,
                               const PerYearRecall& per_year) {
    AtomicWriter out(path);
    out.stream() << "year,recall_raw,recall_rebalanced\n";
    for (const auto& row : per_year.rows) {
        out.stream() << row.year << ',' << format_double(row.recall_raw) << ',';
        if (std::isfinite(row.recall_rebalanced))
            out.stream() << format_double(row.recall_rebalanced);
        out.stream() << '\n';
    }
    out.commit();
}

inline void write_sweep_csv(const std::filesystem::path& path,
                            const std::vector<SweepRow>& rows) {
    AtomicWriter out(path);
    out.stream() << "delta_p,raw_imbalance,rebalanced_imbalance,relative_imbalance\n";
    for (const auto& r : rows)
        out.stream() << r.window_size << ',' << format_double(r.raw_imbalance) << ','
                     << format_double(r.rebalanced_imbalance) << ','
                     << format_double(r.relative) << '\n';
    out.commit();
}

}  // namespace bgrank
