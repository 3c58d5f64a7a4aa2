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

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "bgrank/catalog.hpp"

namespace bgrank {

/// Items ordered best-first. Ties in score break by ascending item id so
/// rankings are deterministic.
struct RankedList {
    std::vector<NodeId> items;
    std::vector<double> scores;  // aligned with items

    std::size_t size() const { return items.size(); }
};

inline RankedList make_ranked_list(const std::vector<double>& item_scores,
                                   const std::vector<std::string>& item_ids) {
    if (item_scores.size() != item_ids.size())
        throw std::invalid_argument("scores and ids differ in length");
    RankedList out;
    out.items.resize(item_scores.size());
    std::iota(out.items.begin(), out.items.end(), 0);
    std::sort(out.items.begin(), out.items.end(), [&](NodeId a, NodeId b) {
        if (item_scores[a] != item_scores[b])
            return item_scores[a] > item_scores[b];
        return item_ids[a] < item_ids[b];
    });
    out.scores.reserve(out.items.size());
    for (const NodeId i : out.items)
        out.scores.push_back(item_scores[i]);
    return out;
}

using TruthSet = std::unordered_set<NodeId>;

/// First ceil(fraction * m) items of the ranking.
inline std::vector<NodeId> top_list(const RankedList& ranked, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("top fraction must lie in (0,1]");
    if (ranked.items.empty())
        return {};
    const auto m = static_cast<double>(ranked.items.size());
    const std::size_t k = static_cast<std::size_t>(std::ceil(fraction * m));
    return {ranked.items.begin(), ranked.items.begin() + std::min(k, ranked.items.size())};
}

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

inline PrecisionRecall precision_recall(const std::vector<NodeId>& top,
                                        const TruthSet& truth) {
    if (top.empty())
        throw std::invalid_argument("precision undefined for an empty top list");
    if (truth.empty())
        throw std::invalid_argument("recall undefined for an empty ground truth");
    std::size_t hits = 0;
    for (const NodeId i : top)
        hits += truth.count(i);
    return {static_cast<double>(hits) / static_cast<double>(top.size()),
            static_cast<double>(hits) / static_cast<double>(truth.size())};
}

/// Probability that a random truth item outscores a random non-truth item,
/// ties counted half. Computed by the rank-sum (U statistic) form; the
/// pairwise definition is kept as a test oracle.
inline double auc(const RankedList& ranked, const TruthSet& truth) {
    const std::size_t m = ranked.size();
    const std::size_t t = truth.size();
    if (t == 0)
        throw std::invalid_argument("auc undefined for an empty ground truth");
    if (t >= m)
        throw std::invalid_argument("auc undefined when the truth covers all items");

    // ranked is sorted descending; walk from the bottom so ranks ascend
    // with score, averaging ranks across tie runs.
    double rank_sum_truth = 0.0;
    std::size_t idx = m;
    while (idx > 0) {
        std::size_t run_end = idx;  // exclusive
        const double score = ranked.scores[idx - 1];
        while (idx > 0 && ranked.scores[idx - 1] == score)
            --idx;
        // positions idx..run_end-1 (descending order) share this score;
        // ascending ranks m-run_end+1 .. m-idx, averaged:
        const double lo = static_cast<double>(m - run_end + 1);
        const double hi = static_cast<double>(m - idx);
        const double avg = (lo + hi) / 2.0;
        for (std::size_t k = idx; k < run_end; ++k)
            if (truth.count(ranked.items[k]))
                rank_sum_truth += avg;
    }
    const double tt = static_cast<double>(t);
    const double nn = static_cast<double>(m - t);
    const double u = rank_sum_truth - tt * (tt + 1.0) / 2.0;
    return u / (tt * nn);
}

/// Binary-gain NDCG at `depth` with the 1/log2(i+1) discount.
inline double ndcg(const RankedList& ranked, const TruthSet& truth, int depth) {
    if (depth < 1)
        throw std::invalid_argument("ndcg depth must be >= 1");
    if (truth.empty())
        throw std::invalid_argument("ndcg undefined for an empty ground truth");
    const std::size_t limit = std::min<std::size_t>(depth, ranked.size());
    double dcg = 0.0;
    for (std::size_t pos = 0; pos < limit; ++pos)
        if (truth.count(ranked.items[pos]))
            dcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
    const std::size_t ideal = std::min<std::size_t>(limit, truth.size());
    double idcg = 0.0;
    for (std::size_t pos = 0; pos < ideal; ++pos)
        idcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
    return dcg / idcg;
}

struct ImbalanceConfig {
    int groups = 40;           // S
    double top_fraction = 0.01;  // L

    void validate() const {
        if (groups < 2)
            throw std::invalid_argument("group count must be >= 2");
        if (!(top_fraction > 0.0 && top_fraction < 1.0))
            throw std::invalid_argument("top fraction must lie in (0,1)");
    }
};

struct ImbalanceResult {
    double imbalance = 0.0;
    std::vector<int> group_counts;  // top-list members per time group
    double sigma = 0.0;
    double sigma0 = 0.0;
};

/// Time-balance of a ranking: split the ranked items into S contiguous
/// release-time groups (oldest first, the first m mod S groups one larger),
/// count how many of each group reach the top-L list, and compare the
/// spread of those counts with the hypergeometric ideal:
///   sigma0 = sqrt((mL/S)(1 - 1/S)(1 - L) m/(m-1)),
///   sigma  = sqrt((1/S) sum_i (n_i - mL/S)^2),
///   imbalance = |sigma/sigma0 - 1|.
/// Note a perfectly even split scores 1.0, not 0: the ideal is matching the
/// hypergeometric fluctuation, not eliminating it.
inline ImbalanceResult imbalance(const RankedList& ranked, const ItemCatalog& catalog,
                                 const ImbalanceConfig& cfg = {}) {
    cfg.validate();
    const std::size_t m = ranked.size();
    if (static_cast<std::size_t>(cfg.groups) > m)
        throw std::invalid_argument("more groups than items");

    // Ranked items in release order (ranked is normally the whole catalog,
    // but only membership matters here).
    std::vector<NodeId> by_time = ranked.items;
    std::sort(by_time.begin(), by_time.end(), [&](NodeId a, NodeId b) {
        return catalog.position[a] < catalog.position[b];
    });

    const std::vector<NodeId> top_items = top_list(ranked, cfg.top_fraction);
    const TruthSet top(top_items.begin(), top_items.end());

    const std::size_t s = static_cast<std::size_t>(cfg.groups);
    const std::size_t base = m / s;
    const std::size_t extra = m % s;
    ImbalanceResult res;
    res.group_counts.resize(s, 0);
    std::size_t pos = 0;
    for (std::size_t gi = 0; gi < s; ++gi) {
        const std::size_t size = base + (gi < extra ? 1 : 0);
        for (std::size_t k = 0; k < size; ++k, ++pos)
            res.group_counts[gi] += top.count(by_time[pos]);
    }

    const double md = static_cast<double>(m);
    const double sd = static_cast<double>(s);
    const double l = cfg.top_fraction;
    const double expected = md * l / sd;
    const double sigma0_sq = expected * (1.0 - 1.0 / sd) * (1.0 - l) * md / (md - 1.0);
    if (!(sigma0_sq > 0.0))
        throw std::invalid_argument("degenerate imbalance configuration (sigma0 = 0)");
    double ss = 0.0;
    for (const int n : res.group_counts) {
        const double d = static_cast<double>(n) - expected;
        ss += d * d;
    }
    res.sigma = std::sqrt(ss / sd);
    res.sigma0 = std::sqrt(sigma0_sq);
    res.imbalance = std::abs(res.sigma / res.sigma0 - 1.0);
    return res;
}

}  // namespace bgrank
