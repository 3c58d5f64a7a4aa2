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
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bgrank/interactions.hpp"

namespace bgrank {

using NodeId = std::int32_t;

/// How edge weights are derived from an interaction: the raw rating, or a
/// decay delta^(rate * age_in_years) of the review's age relative to `now`.
struct WeightingMode {
    enum class Kind { rating, time_decay };

    Kind kind = Kind::rating;
    double delta = 0.85;
    double rate_per_year = 1.0;
    std::int64_t now = 0;

    static WeightingMode rating() { return WeightingMode{}; }

    static WeightingMode time_decay(double delta, double rate_per_year,
                                    std::int64_t now) {
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("decay delta must lie in (0,1)");
        if (!(rate_per_year > 0.0))
            throw std::invalid_argument("decay rate must be > 0");
        return WeightingMode{Kind::time_decay, delta, rate_per_year, now};
    }

    double edge_weight(double rating, std::int64_t timestamp) const {
        if (kind == Kind::rating)
            return rating;
        const double age_years =
            static_cast<double>(now - timestamp) / static_cast<double>(kSecondsPerYear);
        return std::pow(delta, rate_per_year * age_years);
    }

    std::string label() const {
        return kind == Kind::rating ? "rating" : "time-decay";
    }
};

/// Immutable bipartite rating graph in CSR form, mirrored for both sides.
/// Dense ids are assigned in ascending key order, and every adjacency row
/// is sorted by neighbor id, so the representation is canonical for a given
/// interaction set.
struct RatingGraph {
    std::vector<std::string> user_ids;  // dense user id -> key
    std::vector<std::string> item_ids;  // dense item id -> key

    // user -> item adjacency
    std::vector<std::size_t> user_offsets;
    std::vector<NodeId> user_adj;
    std::vector<double> user_weights;
    std::vector<double> user_ratings;
    std::vector<std::int64_t> user_times;

    // item -> user adjacency
    std::vector<std::size_t> item_offsets;
    std::vector<NodeId> item_adj;
    std::vector<double> item_weights;
    std::vector<double> item_ratings;
    std::vector<std::int64_t> item_times;

    std::vector<double> user_degree;  // weighted, under `weighting`
    std::vector<double> item_degree;

    WeightingMode weighting;
    std::size_t edge_count = 0;
    std::int64_t max_timestamp = 0;
    /// Edges timestamped after `weighting.now` (weight > 1 under decay).
    std::size_t future_edges = 0;

    NodeId user_count() const { return static_cast<NodeId>(user_ids.size()); }
    NodeId item_count() const { return static_cast<NodeId>(item_ids.size()); }

    std::optional<NodeId> find_item(std::string_view key) const {
        const auto it = std::lower_bound(item_ids.begin(), item_ids.end(), key);
        if (it != item_ids.end() && *it == key)
            return static_cast<NodeId>(it - item_ids.begin());
        return std::nullopt;
    }

    std::optional<NodeId> find_user(std::string_view key) const {
        const auto it = std::lower_bound(user_ids.begin(), user_ids.end(), key);
        if (it != user_ids.end() && *it == key)
            return static_cast<NodeId>(it - user_ids.begin());
        return std::nullopt;
    }

    /// Earliest interaction timestamp of an item.
    std::int64_t first_rating_time(NodeId item) const {
        std::int64_t t = INT64_MAX;
        for (std::size_t e = item_offsets[item]; e < item_offsets[item + 1]; ++e)
            t = std::min(t, item_times[e]);
        return t;
    }
};

/// Build the CSR graph from duplicate-free interactions. Degrees are the
/// weighted sums under `weighting`; a non-positive degree (possible only if
/// the rating scale admits 0) is rejected because every ranker divides by it.
inline RatingGraph build_graph(const std::vector<Interaction>& interactions,
                               const WeightingMode& weighting) {
    RatingGraph g;
    g.weighting = weighting;
    g.edge_count = interactions.size();

    for (const auto& it : interactions) {
        g.user_ids.push_back(it.user);
        g.item_ids.push_back(it.item);
    }
    auto dedupe_sort = [](std::vector<std::string>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe_sort(g.user_ids);
    dedupe_sort(g.item_ids);

    std::unordered_map<std::string_view, NodeId> uindex, iindex;
    uindex.reserve(g.user_ids.size() * 2);
    iindex.reserve(g.item_ids.size() * 2);
    for (NodeId u = 0; u < g.user_count(); ++u)
        uindex.emplace(g.user_ids[u], u);
    for (NodeId i = 0; i < g.item_count(); ++i)
        iindex.emplace(g.item_ids[i], i);

    struct Edge {
        NodeId user, item;
        double rating, weight;
        std::int64_t time;
    };
    std::vector<Edge> edges;
    edges.reserve(interactions.size());
    std::unordered_set<std::int64_t> seen;
    seen.reserve(interactions.size() * 2);
    const std::int64_t stride = std::max<std::int64_t>(1, g.item_count());
    for (const auto& it : interactions) {
        const NodeId u = uindex.at(it.user);
        const NodeId i = iindex.at(it.item);
        if (!seen.insert(static_cast<std::int64_t>(u) * stride + i).second)
            throw std::invalid_argument("duplicate (user,item) pair: " + it.user +
                                        "," + it.item + " (merge duplicates first)");
        const double w = weighting.edge_weight(it.rating, it.timestamp);
        if (weighting.kind == WeightingMode::Kind::time_decay &&
            it.timestamp > weighting.now)
            ++g.future_edges;
        g.max_timestamp = std::max(g.max_timestamp, it.timestamp);
        edges.push_back({u, i, it.rating, w, it.timestamp});
    }

    auto fill_side = [&](bool user_side) {
        const std::size_t n = user_side ? g.user_ids.size() : g.item_ids.size();
        auto& offsets = user_side ? g.user_offsets : g.item_offsets;
        auto& adj = user_side ? g.user_adj : g.item_adj;
        auto& weights = user_side ? g.user_weights : g.item_weights;
        auto& ratings = user_side ? g.user_ratings : g.item_ratings;
        auto& times = user_side ? g.user_times : g.item_times;

        std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
            const NodeId ak = user_side ? a.user : a.item;
            const NodeId bk = user_side ? b.user : b.item;
            const NodeId av = user_side ? a.item : a.user;
            const NodeId bv = user_side ? b.item : b.user;
            return ak != bk ? ak < bk : av < bv;
        });
        offsets.assign(n + 1, 0);
        for (const Edge& e : edges)
            ++offsets[(user_side ? e.user : e.item) + 1];
        for (std::size_t k = 1; k <= n; ++k)
            offsets[k] += offsets[k - 1];
        adj.reserve(edges.size());
        weights.reserve(edges.size());
        ratings.reserve(edges.size());
        times.reserve(edges.size());
        for (const Edge& e : edges) {
            adj.push_back(user_side ? e.item : e.user);
            weights.push_back(e.weight);
            ratings.push_back(e.rating);
            times.push_back(e.time);
        }
    };
    fill_side(true);
    fill_side(false);

    g.user_degree.assign(g.user_ids.size(), 0.0);
    g.item_degree.assign(g.item_ids.size(), 0.0);
    for (const Edge& e : edges) {
        g.user_degree[e.user] += e.weight;
        g.item_degree[e.item] += e.weight;
    }
    for (NodeId u = 0; u < g.user_count(); ++u)
        if (!(g.user_degree[u] > 0.0))
            throw std::invalid_argument("user '" + g.user_ids[u] +
                                        "' has non-positive weighted degree");
    for (NodeId i = 0; i < g.item_count(); ++i)
        if (!(g.item_degree[i] > 0.0))
            throw std::invalid_argument("item '" + g.item_ids[i] +
                                        "' has non-positive weighted degree");
    return g;
}

/// Interactions currently stored in the graph (the loader's view of them,
/// weights dropped). Used to rebuild snapshot subgraphs.
inline std::vector<Interaction> graph_interactions(const RatingGraph& g) {
    std::vector<Interaction> out;
    out.reserve(g.edge_count);
    for (NodeId u = 0; u < g.user_count(); ++u)
        for (std::size_t e = g.user_offsets[u]; e < g.user_offsets[u + 1]; ++e)
            out.push_back({g.user_ids[u], g.item_ids[g.user_adj[e]],
                           g.user_ratings[e], g.user_times[e]});
    return out;
}

}  // namespace bgrank
