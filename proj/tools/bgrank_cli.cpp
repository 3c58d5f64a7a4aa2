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
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "bgrank/bgrank.hpp"

namespace {

using namespace bgrank;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Exit codes: 0 success, 1 runtime failure, 2 usage, 3 conflicting options,
// 4 missing or unreadable input file.
enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2, kConflict = 3, kMissingFile = 4 };

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileError("cannot open file: " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.good()) {
        in.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::int64_t now_epoch() {
    using namespace std::chrono;
    return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

/// Run manifest: every subcommand emits exactly one, with all parameters
/// resolved to their effective values and every input digested.
class Manifest {
  public:
    Manifest(std::string subcommand) : started_(now_epoch()) {
        doc_["tool"] = "bgrank";
        doc_["version"] = kVersion;
        doc_["subcommand"] = std::move(subcommand);
        doc_["parameters"] = ordered_json::object();
    }

    template <class T>
    void param(const std::string& key, const T& value) {
        doc_["parameters"][key] = value;
    }

    void input(const fs::path& path) {
        inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
    }

    void output(const fs::path& path) { outputs_.push_back(path.string()); }

    template <class T>
    void result(const std::string& key, const T& value) {
        results_[key] = value;
    }

    void write(const fs::path& path) {
        doc_["inputs"] = inputs_;
        doc_["outputs"] = outputs_;
        if (!results_.empty())
            doc_["result"] = results_;
        doc_["started"] = format_utc(started_);
        doc_["finished"] = format_utc(now_epoch());
        AtomicWriter out(path);
        out.stream() << doc_.dump(2) << '\n';
        out.commit();
    }

  private:
    ordered_json doc_;
    ordered_json inputs_ = ordered_json::array();
    ordered_json outputs_ = ordered_json::array();
    ordered_json results_ = ordered_json::object();
    std::int64_t started_;
};

/// Relative inputs that do not exist as given are retried under
/// $BGRANK_DATA_DIR.
fs::path resolve_input(const fs::path& path) {
    if (path.is_relative() && !fs::exists(path)) {
        if (const char* dir = std::getenv("BGRANK_DATA_DIR")) {
            const fs::path candidate = fs::path(dir) / path;
            if (fs::exists(candidate))
                return candidate;
        }
    }
    return path;
}

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct IngestOptions {
    std::string in;
    std::string columns = "user,item,rating,timestamp";
    std::string header = "auto";
    double scale_min = 1.0, scale_max = 5.0;
    int min_user = 0, min_item = 0;
    bool single_pass = false;
    std::string rejects;  // default: <in>.rejects

    void add_to(CLI::App* cmd, bool required_input = true) {
        auto* opt = cmd->add_option("--in", in, "Ratings CSV (user,item,rating,timestamp)");
        if (required_input)
            opt->required();
        cmd->add_option("--columns", columns,
                        "Column names or 0-based positions, comma separated");
        cmd->add_option("--header", header, "Header handling: auto|yes|no")
            ->check(CLI::IsMember({"auto", "yes", "no"}));
        cmd->add_option("--scale-min", scale_min, "Lowest valid rating");
        cmd->add_option("--scale-max", scale_max, "Highest valid rating");
        cmd->add_option("--min-user", min_user, "Minimum interactions per user");
        cmd->add_option("--min-item", min_item, "Minimum interactions per item");
        cmd->add_flag("--single-pass-filter", single_pass,
                      "Apply degree thresholds once instead of peeling to a fixed point");
        cmd->add_option("--rejects", rejects,
                        "Rejected-row sidecar path (default <in>.rejects)");
    }

    void describe(Manifest& m) const {
        m.param("in", in);
        m.param("columns", columns);
        m.param("header", header);
        m.param("scale_min", scale_min);
        m.param("scale_max", scale_max);
        m.param("min_user", min_user);
        m.param("min_item", min_item);
        m.param("single_pass_filter", single_pass);
    }
};

struct WeightingOptions {
    std::string weighting;  // empty = derived from the algorithm
    double delta = 0.85;
    double decay_rate = 1.0;
    std::string now;  // epoch seconds or ISO date; empty = max timestamp

    void add_to(CLI::App* cmd) {
        cmd->add_option("--weighting", weighting, "Edge weighting: rating|time-decay")
            ->check(CLI::IsMember({"rating", "time-decay"}));
        cmd->add_option("--delta", delta, "Time-decay base (0,1)");
        cmd->add_option("--decay-a", decay_rate, "Decay rate in 1/year");
        cmd->add_option("--now", now,
                        "Reference instant for time decay, epoch seconds or "
                        "YYYY-MM-DD (default: newest timestamp in the data)");
    }
};

struct RankOptions {
    std::string algo;
    std::uint64_t seed = 42;
    double threshold = 1e-8;
    int max_iterations = 1000;
    double lambda = 0.85;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--algo", algo, "birank-r|birank-t|bihits|qrep|bgrm")
            ->required()
            ->check(CLI::IsMember({"birank-r", "birank-t", "bihits", "qrep", "bgrm"}));
        cmd->add_option("--seed", seed, "Seed for score initialization");
        cmd->add_option("--th", threshold, "Convergence threshold");
        cmd->add_option("--max-iters", max_iterations, "Iteration cap");
        cmd->add_option("--lambda", lambda, "bgrm damping factor [0,1)");
    }

    RankerSpec spec() const {
        RankerSpec s;
        const auto a = parse_algorithm(algo);
        if (!a)
            throw ConflictError("unknown algorithm: " + algo);
        s.algorithm = *a;
        s.convergence = ConvergenceConfig{threshold, max_iterations, seed};
        s.bgrm_lambda = lambda;
        return s;
    }

    void describe(Manifest& m) const {
        m.param("algo", algo);
        m.param("seed", seed);
        m.param("th", threshold);
        m.param("max_iters", max_iterations);
        if (algo == "bgrm")
            m.param("lambda", lambda);
    }
};

LoadOptions to_load_options(const IngestOptions& o) {
    LoadOptions opt;
    opt.schema = CsvSchema::parse(o.columns);
    opt.header = o.header == "yes"   ? HeaderMode::present
                 : o.header == "no"  ? HeaderMode::absent
                                     : HeaderMode::autodetect;
    opt.scale = RatingScale{o.scale_min, o.scale_max};
    return opt;
}

/// load -> sidecar rejects -> merge -> degree filter
std::vector<Interaction> ingest_interactions(const IngestOptions& o, Manifest& m) {
    const fs::path in = resolve_input(o.in);
    const LoadResult loaded = load_interactions(in, to_load_options(o));
    m.input(in);
    std::cout << "loaded " << loaded.interactions.size() << " interactions from "
              << in.string();
    if (!loaded.rejects.empty()) {
        const fs::path rejects =
            o.rejects.empty() ? fs::path(in.string() + ".rejects") : fs::path(o.rejects);
        write_rejects(rejects, loaded.rejects);
        m.output(rejects);
        std::cout << " (" << loaded.rejects.size() << " rejected, see "
                  << rejects.string() << ")";
    }
    std::cout << "\n";

    std::vector<Interaction> rows = merge_duplicates(loaded.interactions);
    if (rows.size() != loaded.interactions.size())
        std::cout << "merged duplicates: " << loaded.interactions.size() << " -> "
                  << rows.size() << "\n";
    if (o.min_user > 0 || o.min_item > 0) {
        const std::size_t before = rows.size();
        rows = filter_min_degree(rows, {o.min_user, o.min_item, o.single_pass});
        std::cout << "degree filter (min_user=" << o.min_user
                  << ", min_item=" << o.min_item << "): " << before << " -> "
                  << rows.size() << "\n";
    }
    return rows;
}

WeightingMode make_weighting(const WeightingOptions& w, const RankOptions& r,
                             const std::vector<Interaction>& rows) {
    const auto algo = parse_algorithm(r.algo);
    const auto need = algo ? required_weighting(*algo) : std::nullopt;
    WeightingMode::Kind kind = WeightingMode::Kind::rating;
    if (!w.weighting.empty()) {
        kind = w.weighting == "rating" ? WeightingMode::Kind::rating
                                       : WeightingMode::Kind::time_decay;
        if (need && kind != *need)
            throw ConflictError("--weighting " + w.weighting +
                                " conflicts with --algo " + r.algo);
    } else if (need) {
        kind = *need;
    }

    if (kind == WeightingMode::Kind::rating) {
        if (!w.now.empty())
            throw ConflictError("--now has no effect under rating weighting");
        return WeightingMode::rating();
    }
    std::int64_t now = 0;
    if (w.now.empty()) {
        for (const auto& it : rows)
            now = std::max(now, it.timestamp);
    } else if (!try_parse_int(w.now, now) && !parse_iso_date(w.now, now)) {
        throw ConflictError("--now must be epoch seconds or YYYY-MM-DD: " + w.now);
    }
    return WeightingMode::time_decay(w.delta, w.decay_rate, now);
}

std::map<std::string, std::int64_t> load_metadata_if_given(const std::string& path,
                                                           Manifest& m) {
    if (path.empty())
        return {};
    const fs::path p = resolve_input(path);
    const MetadataLoadResult meta = load_release_metadata(p);
    m.input(p);
    if (!meta.rejects.empty())
        std::cerr << "warning: " << meta.rejects.size()
                  << " malformed metadata rows ignored\n";
    return meta.dates;
}

void report_run(const ScoreVector& s, const std::string& algo) {
    std::cout << algo << (s.converged ? " converged" : " did NOT converge") << " in "
              << s.iterations_used << " iterations";
    if (s.component_count > 1)
        std::cout << " (" << s.component_count << " graph components)";
    std::cout << "\n";
    if (!s.converged)
        std::cerr << "warning: iteration cap reached before the convergence "
                     "threshold\n";
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_ingest(const IngestOptions& ingest, const std::string& out) {
    Manifest m("ingest");
    ingest.describe(m);
    m.param("out", out);
    const auto rows = ingest_interactions(ingest, m);
    write_interactions(out, rows);
    m.output(out);
    m.result("interactions", rows.size());
    m.write(out + ".manifest.json");
    std::cout << "wrote " << out << " (" << rows.size() << " rows)\n";
    return kOk;
}

int cmd_rank(const IngestOptions& ingest, const WeightingOptions& weighting,
             const RankOptions& rank, const std::string& out) {
    Manifest m("rank");
    ingest.describe(m);
    rank.describe(m);
    m.param("out", out);

    const auto rows = ingest_interactions(ingest, m);
    const WeightingMode mode = make_weighting(weighting, rank, rows);
    m.param("weighting", mode.label());
    if (mode.kind == WeightingMode::Kind::time_decay) {
        m.param("delta", mode.delta);
        m.param("decay_a", mode.rate_per_year);
        m.param("now", mode.now);
    }

    const RatingGraph graph = build_graph(rows, mode);
    std::cout << "graph: " << graph.user_count() << " users, " << graph.item_count()
              << " items, " << graph.edge_count << " edges\n";
    if (graph.future_edges > 0)
        std::cerr << "warning: " << graph.future_edges
                  << " edges are timestamped after --now (weight > 1)\n";

    const ScoreVector scores = run_ranker(graph, rank.spec());
    report_run(scores, rank.algo);
    const RankedList ranked = make_ranked_list(scores.item_scores, graph.item_ids);
    write_scores_csv(out, ranked, graph.item_ids);
    m.output(out);
    m.result("iterations", scores.iterations_used);
    m.result("converged", scores.converged);
    m.result("components", scores.component_count);
    m.write(out + ".manifest.json");
    std::cout << "wrote " << out << "\n";
    return kOk;
}

int cmd_rebalance(const IngestOptions& ingest, const std::string& scores_path,
                  const std::string& metadata, int window, double fallback,
                  const std::string& out) {
    Manifest m("rebalance");
    ingest.describe(m);
    m.param("scores", scores_path);
    m.param("window", window);
    m.param("fallback", fallback);
    m.param("out", out);

    const auto rows = ingest_interactions(ingest, m);
    const RatingGraph graph = build_graph(rows, WeightingMode::rating());
    const auto metadata_map = load_metadata_if_given(metadata, m);
    const ItemCatalog catalog = resolve_release_dates(graph, metadata_map);

    const fs::path sp = resolve_input(scores_path);
    const auto score_rows = read_scores_csv(sp);
    m.input(sp);
    ScoreVector raw;
    raw.item_scores = scores_for_graph(score_rows, graph);

    const WindowIndex windows = assign_windows(catalog, window);
    const RebalanceConfig cfg{window, fallback};
    const ScoreVector rb = rebalance_scores(raw, windows, cfg);
    const RankedList ranked = make_ranked_list(rb.item_scores, graph.item_ids);
    write_scores_csv(out, ranked, graph.item_ids, &raw.item_scores);
    m.output(out);
    m.write(out + ".manifest.json");
    std::cout << "rebalanced " << graph.item_count() << " item scores (window "
              << window << "), wrote " << out << "\n";
    return kOk;
}

int cmd_eval(const IngestOptions& ingest, const WeightingOptions& weighting,
             const RankOptions& rank, const std::string& truth_path,
             const std::string& truth_label, const std::string& metadata,
             std::optional<int> rebalance_window, double fallback, double top_fraction,
             int groups, const std::string& label, const std::string& out_dir) {
    Manifest m("eval");
    ingest.describe(m);
    rank.describe(m);
    m.param("truth", truth_path);
    m.param("L", top_fraction);
    m.param("groups", groups);
    if (rebalance_window)
        m.param("rebalance", *rebalance_window);
    else
        m.param("rebalance", "none");
    m.param("out_dir", out_dir);

    const auto rows = ingest_interactions(ingest, m);
    const WeightingMode mode = make_weighting(weighting, rank, rows);
    m.param("weighting", mode.label());
    const RatingGraph graph = build_graph(rows, mode);
    const auto metadata_map = load_metadata_if_given(metadata, m);
    const ItemCatalog catalog = resolve_release_dates(graph, metadata_map);

    const fs::path tp = resolve_input(truth_path);
    const TruthLoadResult truth = load_ground_truth(tp, graph, truth_label);
    m.input(tp);
    if (truth.dropped_unknown > 0)
        std::cerr << "warning: " << truth.dropped_unknown
                  << " ground-truth items are not in the catalog\n";

    const std::string dataset =
        label.empty() ? fs::path(ingest.in).stem().string() : label;
    const RankerSpec spec = rank.spec();
    const MetricConfig mc{top_fraction, groups};
    const std::optional<RebalanceConfig> rb_cfg =
        rebalance_window ? std::optional<RebalanceConfig>(
                               RebalanceConfig{*rebalance_window, fallback})
                         : std::nullopt;

    std::vector<EvalReport> reports;
    reports.push_back(
        evaluate(graph, catalog, spec, std::nullopt, truth.truth, mc, dataset));
    if (rb_cfg)
        reports.push_back(
            evaluate(graph, catalog, spec, rb_cfg, truth.truth, mc, dataset));

    std::optional<PerYearRecall> per_year;
    if (truth.truth.has_award_years()) {
        per_year = recall_by_year(graph, catalog, spec, rb_cfg, truth.truth,
                                  top_fraction,
                                  {ingest.min_user, ingest.min_item, ingest.single_pass});
        reports.back().per_year = per_year;
        reports.back().per_year_note.clear();
    } else {
        for (auto& r : reports)
            r.per_year_note = "ground truth has no award years";
    }

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_report_json(dir / "report.json", reports);
    m.output(dir / "report.json");
    write_report_csv(dir / "report.csv", reports);
    m.output(dir / "report.csv");
    if (per_year) {
        write_per_year_csv(dir / "per_year.csv", *per_year);
        m.output(dir / "per_year.csv");
        for (const auto& note : per_year->notes)
            std::cout << "per-year: " << note << "\n";
    }
    m.write(dir / "manifest.json");

    for (const auto& r : reports) {
        const std::string rb =
            r.rebalance ? "dp=" + std::to_string(r.rebalance->window_size) : "raw";
        std::cout << r.algorithm << " [" << rb << "]"
                  << "  precision=" << r.metrics.precision
                  << "  recall=" << r.metrics.recall << "  auc=" << r.metrics.auc
                  << "  ndcg=" << r.metrics.ndcg
                  << "  imbalance=" << r.metrics.imbalance << "\n";
    }
    std::cout << "wrote " << (dir / "report.json").string() << "\n";
    return kOk;
}

int cmd_sweep(const IngestOptions& ingest, const WeightingOptions& weighting,
              const RankOptions& rank, const std::string& metadata,
              const std::string& windows_arg, double top_fraction, int groups,
              const std::string& out) {
    Manifest m("sweep");
    ingest.describe(m);
    rank.describe(m);
    m.param("windows", windows_arg);
    m.param("L", top_fraction);
    m.param("groups", groups);
    m.param("out", out);

    std::vector<int> windows;
    for (const auto& tok : split_fields(windows_arg)) {
        std::int64_t v{};
        if (!try_parse_int(tok, v))
            throw ConflictError("bad --windows entry: " + tok);
        windows.push_back(static_cast<int>(v));
    }
    if (windows.empty())
        throw ConflictError("--windows needs at least one value");

    const auto rows = ingest_interactions(ingest, m);
    const WeightingMode mode = make_weighting(weighting, rank, rows);
    const RatingGraph graph = build_graph(rows, mode);
    const auto metadata_map = load_metadata_if_given(metadata, m);
    const ItemCatalog catalog = resolve_release_dates(graph, metadata_map);

    const auto sweep =
        sweep_window(graph, catalog, rank.spec(), windows, {top_fraction, groups});
    write_sweep_csv(out, sweep);
    m.output(out);
    m.write(out + ".manifest.json");
    for (const auto& row : sweep)
        std::cout << "dp=" << row.window_size << "  raw=" << row.raw_imbalance
                  << "  rebalanced=" << row.rebalanced_imbalance
                  << "  relative=" << row.relative << "\n";
    std::cout << "wrote " << out << "\n";
    return kOk;
}

int cmd_synth(const SynthConfig& cfg, const std::string& out_dir) {
    Manifest m("synth");
    m.param("items", cfg.items);
    m.param("users", cfg.users);
    m.param("mean_edges", cfg.edges_per_user_mean);
    m.param("beta", cfg.popularity_bias);
    m.param("noise", cfg.rating_noise);
    m.param("horizon_seconds", cfg.horizon_seconds);
    m.param("start_epoch", cfg.start_epoch);
    m.param("truth_fraction", cfg.truth_fraction);
    m.param("seed", cfg.seed);
    m.param("out_dir", out_dir);

    const SynthData data = generate_synthetic(cfg);
    write_synthetic(data, out_dir);
    const fs::path dir(out_dir);
    m.output(dir / "ratings.csv");
    m.output(dir / "metadata.csv");
    m.output(dir / "truth.csv");
    m.result("interactions", data.interactions.size());
    m.result("truth_items", data.truth.ids.size());
    m.write(dir / "manifest.json");
    std::cout << "synthesized " << data.interactions.size() << " interactions over "
              << cfg.items << " items / " << cfg.users << " users into " << out_dir
              << "\n";
    return kOk;
}

int cmd_top(const IngestOptions& ingest, const std::string& scores_path,
            const std::string& metadata, int k) {
    Manifest m("top");
    ingest.describe(m);
    m.param("scores", scores_path);
    m.param("k", k);

    const auto rows = ingest_interactions(ingest, m);
    const RatingGraph graph = build_graph(rows, WeightingMode::rating());
    const auto metadata_map = load_metadata_if_given(metadata, m);
    const ItemCatalog catalog = resolve_release_dates(graph, metadata_map);

    const fs::path sp = resolve_input(scores_path);
    const auto score_rows = read_scores_csv(sp);
    m.input(sp);
    const std::vector<double> scores = scores_for_graph(score_rows, graph);
    const RankedList ranked = make_ranked_list(scores, graph.item_ids);

    std::cout << "rank  item_id  release_year  score\n";
    const std::size_t limit = std::min<std::size_t>(k, ranked.size());
    for (std::size_t pos = 0; pos < limit; ++pos) {
        const NodeId item = ranked.items[pos];
        std::cout << pos + 1 << "  " << graph.item_ids[item] << "  "
                  << utc_year(catalog.release[item]) << "  "
                  << format_double(ranked.scores[pos]) << "\n";
    }
    m.write(fs::path(sp.string() + ".top.manifest.json"));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bgrank - bipartite rating-graph ranking with time rebalancing"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file with key=value pairs");
    app.set_version_flag("--version", std::string("bgrank ") + kVersion);

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Load, clean and re-emit a ratings CSV");
    IngestOptions ingest_in;
    std::string ingest_out = "cleaned.csv";
    ingest_in.add_to(ingest_cmd);
    ingest_cmd->add_option("--out", ingest_out, "Cleaned CSV path");

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "Rank items with one algorithm");
    IngestOptions rank_in;
    WeightingOptions rank_w;
    RankOptions rank_r;
    std::string rank_out = "scores.csv";
    rank_in.add_to(rank_cmd);
    rank_w.add_to(rank_cmd);
    rank_r.add_to(rank_cmd);
    rank_cmd->add_option("--out", rank_out, "Score CSV path");

    // rebalance
    auto* rb_cmd = app.add_subcommand("rebalance", "Time-rebalance a score file");
    IngestOptions rb_in;
    std::string rb_scores, rb_metadata, rb_out = "rebalanced.csv";
    int rb_window = 100;
    double rb_fallback = 0.0;
    rb_in.add_to(rb_cmd);
    rb_cmd->add_option("--scores", rb_scores, "Raw score CSV")->required();
    rb_cmd->add_option("--metadata", rb_metadata, "item,release_date CSV");
    rb_cmd->add_option("--window", rb_window, "Close-set size (even)");
    rb_cmd->add_option("--fallback", rb_fallback, "Score for zero-variance windows");
    rb_cmd->add_option("--out", rb_out, "Rebalanced score CSV path");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Rank, rebalance and score against ground truth");
    IngestOptions eval_in;
    WeightingOptions eval_w;
    RankOptions eval_r;
    std::string eval_truth, eval_truth_label, eval_metadata, eval_label,
        eval_out = "eval-out";
    std::optional<int> eval_rb;
    double eval_fallback = 0.0, eval_L = 0.01;
    int eval_groups = 40;
    eval_in.add_to(eval_cmd);
    eval_w.add_to(eval_cmd);
    eval_r.add_to(eval_cmd);
    eval_cmd->add_option("--truth", eval_truth, "Ground-truth CSV item[,award_year]")
        ->required();
    eval_cmd->add_option("--truth-label", eval_truth_label, "Ground-truth label");
    eval_cmd->add_option("--metadata", eval_metadata, "item,release_date CSV");
    eval_cmd->add_option("--rebalance", eval_rb,
                         "Rebalance window; omit to evaluate the raw ranking only");
    eval_cmd->add_option("--fallback", eval_fallback, "Zero-variance fallback score");
    eval_cmd->add_option("--L", eval_L, "Top-list fraction");
    eval_cmd->add_option("--groups", eval_groups, "Time groups for imbalance");
    eval_cmd->add_option("--label", eval_label, "Dataset label for the report");
    eval_cmd->add_option("--out-dir", eval_out, "Report directory");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Imbalance across rebalance windows");
    IngestOptions sweep_in;
    WeightingOptions sweep_w;
    RankOptions sweep_r;
    std::string sweep_metadata, sweep_out = "sweep.csv";
    std::string sweep_windows = "2,10,20,50,100,200,500,1000,2000";
    double sweep_L = 0.01;
    int sweep_groups = 40;
    sweep_in.add_to(sweep_cmd);
    sweep_w.add_to(sweep_cmd);
    sweep_r.add_to(sweep_cmd);
    sweep_cmd->add_option("--metadata", sweep_metadata, "item,release_date CSV");
    sweep_cmd->add_option("--windows", sweep_windows, "Comma list of window sizes");
    sweep_cmd->add_option("--L", sweep_L, "Top-list fraction");
    sweep_cmd->add_option("--groups", sweep_groups, "Time groups for imbalance");
    sweep_cmd->add_option("--out", sweep_out, "Sweep CSV path");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    SynthConfig synth_cfg;
    std::string synth_out = "synth-out";
    double horizon_years = 10.0;
    std::string synth_start = "2000-01-01";
    synth_cmd->add_option("--items", synth_cfg.items, "Item count");
    synth_cmd->add_option("--users", synth_cfg.users, "User count");
    synth_cmd->add_option("--mean-edges", synth_cfg.edges_per_user_mean,
                          "Mean ratings per user");
    synth_cmd->add_option("--beta", synth_cfg.popularity_bias,
                          "Preferential-attachment exponent");
    synth_cmd->add_option("--noise", synth_cfg.rating_noise, "Rating noise stddev");
    synth_cmd->add_option("--horizon-years", horizon_years, "Time horizon in years");
    synth_cmd->add_option("--start-date", synth_start, "Horizon start (YYYY-MM-DD)");
    synth_cmd->add_option("--truth-fraction", synth_cfg.truth_fraction,
                          "Planted truth fraction");
    synth_cmd->add_option("--seed", synth_cfg.seed, "Generator seed");
    synth_cmd->add_option("--out-dir", synth_out, "Output directory");

    // top
    auto* top_cmd = app.add_subcommand("top", "Print the top-k of a score file");
    IngestOptions top_in;
    std::string top_scores, top_metadata;
    int top_k = 10;
    top_in.add_to(top_cmd);
    top_cmd->add_option("--scores", top_scores, "Score CSV")->required();
    top_cmd->add_option("--metadata", top_metadata, "item,release_date CSV");
    top_cmd->add_option("--k", top_k, "Rows to print");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }

    try {
        if (ingest_cmd->parsed())
            return cmd_ingest(ingest_in, ingest_out);
        if (rank_cmd->parsed())
            return cmd_rank(rank_in, rank_w, rank_r, rank_out);
        if (rb_cmd->parsed())
            return cmd_rebalance(rb_in, rb_scores, rb_metadata, rb_window, rb_fallback,
                                 rb_out);
        if (eval_cmd->parsed())
            return cmd_eval(eval_in, eval_w, eval_r, eval_truth, eval_truth_label,
                            eval_metadata, eval_rb, eval_fallback, eval_L, eval_groups,
                            eval_label, eval_out);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_in, sweep_w, sweep_r, sweep_metadata, sweep_windows,
                             sweep_L, sweep_groups, sweep_out);
        if (synth_cmd->parsed()) {
            synth_cfg.horizon_seconds = static_cast<std::int64_t>(
                horizon_years * static_cast<double>(kSecondsPerYear));
            if (!parse_iso_date(synth_start, synth_cfg.start_epoch))
                throw ConflictError("--start-date must be YYYY-MM-DD: " + synth_start);
            return cmd_synth(synth_cfg, synth_out);
        }
        if (top_cmd->parsed())
            return cmd_top(top_in, top_scores, top_metadata, top_k);
    } catch (const ConflictError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConflict;
    } catch (const FileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMissingFile;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
