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

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bgrank/graph.hpp"

namespace bgrank {

struct ConvergenceConfig {
    double threshold = 1e-8;
    int max_iterations = 1000;
    std::uint64_t seed = 42;

    void validate() const {
        if (!(threshold > 0.0))
            throw std::invalid_argument("convergence threshold must be > 0");
        if (max_iterations < 1)
            throw std::invalid_argument("max_iterations must be >= 1");
    }
};

/// Result of one ranker run. Item scores are the ranking key; user scores
/// are the companion vector of the alternating update.
struct ScoreVector {
    std::vector<double> item_scores;
    std::vector<double> user_scores;
    int iterations_used = 0;
    bool converged = false;
    int component_count = 1;
};

enum class Algorithm { birank_r, birank_t, bihits, qrep, bgrm };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::birank_r: return "birank-r";
        case Algorithm::birank_t: return "birank-t";
        case Algorithm::bihits: return "bihits";
        case Algorithm::qrep: return "qrep";
        case Algorithm::bgrm: return "bgrm";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (const Algorithm a : {Algorithm::birank_r, Algorithm::birank_t,
                              Algorithm::bihits, Algorithm::qrep, Algorithm::bgrm})
        if (name == algorithm_name(a))
            return a;
    return std::nullopt;
}

namespace detail {

struct Components {
    int count = 0;
    std::vector<int> user_comp;
    std::vector<int> item_comp;
};

inline Components find_components(const RatingGraph& g) {
    Components c;
    c.user_comp.assign(g.user_count(), -1);
    c.item_comp.assign(g.item_count(), -1);
    std::vector<NodeId> stack;
    for (NodeId start = 0; start < g.user_count(); ++start) {
        if (c.user_comp[start] >= 0)
            continue;
        const int id = c.count++;
        c.user_comp[start] = id;
        stack.push_back(start);
        // users on the stack are encoded as-is, items as ~item
        while (!stack.empty()) {
            const NodeId node = stack.back();
            stack.pop_back();
            if (node >= 0) {
                for (std::size_t e = g.user_offsets[node]; e < g.user_offsets[node + 1]; ++e) {
                    const NodeId i = g.user_adj[e];
                    if (c.item_comp[i] < 0) {
                        c.item_comp[i] = id;
                        stack.push_back(~i);
                    }
                }
            } else {
                const NodeId i = ~node;
                for (std::size_t e = g.item_offsets[i]; e < g.item_offsets[i + 1]; ++e) {
                    const NodeId u = g.item_adj[e];
                    if (c.user_comp[u] < 0) {
                        c.user_comp[u] = id;
                        stack.push_back(u);
                    }
                }
            }
        }
    }
    for (NodeId i = 0; i < g.item_count(); ++i)
        if (c.item_comp[i] < 0)
            c.item_comp[i] = c.count++;  // item with no edges; build_graph forbids it
    return c;
}

/// Run `sweep` until it reports convergence or the iteration budget runs out.
template <class Sweep>
inline std::pair<int, bool> run_to_convergence(const ConvergenceConfig& cfg,
                                               Sweep&& sweep) {
    for (int it = 1; it <= cfg.max_iterations; ++it)
        if (sweep())
            return {it, true};
    return {cfg.max_iterations, false};
}

enum class Norm { l1, l2 };

inline double vector_norm(const std::vector<double>& v, Norm n) {
    double acc = 0.0;
    if (n == Norm::l2) {
        for (const double x : v)
            acc += x * x;
        return std::sqrt(acc);
    }
    for (const double x : v)
        acc += std::abs(x);
    return acc;
}

/// Normalize each connected-component block separately, so components
/// iterate toward their own fixed points without exchanging mass.
inline void normalize_blocks(std::vector<double>& v, const std::vector<int>& comp,
                             int count, Norm n, const char* algo) {
    std::vector<double> acc(count, 0.0);
    if (n == Norm::l2) {
        for (std::size_t k = 0; k < v.size(); ++k)
            acc[comp[k]] += v[k] * v[k];
        for (double& a : acc)
            a = std::sqrt(a);
    } else {
        for (std::size_t k = 0; k < v.size(); ++k)
            acc[comp[k]] += std::abs(v[k]);
    }
    for (const double a : acc)
        if (!std::isfinite(a))
            throw std::runtime_error(std::string(algo) +
                                     ": non-finite intermediate value");
    for (std::size_t k = 0; k < v.size(); ++k)
        if (acc[comp[k]] > 0.0)
            v[k] /= acc[comp[k]];
}

inline double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

inline void require_rankable(const RatingGraph& g, const char* algo) {
    if (g.user_count() == 0 || g.item_count() == 0)
        throw std::invalid_argument(std::string(algo) + ": graph is empty");
    for (NodeId u = 0; u < g.user_count(); ++u)
        if (!(g.user_degree[u] > 0.0))
            throw std::invalid_argument(std::string(algo) + ": isolated user '" +
                                        g.user_ids[u] + "'");
    for (NodeId i = 0; i < g.item_count(); ++i)
        if (!(g.item_degree[i] > 0.0))
            throw std::invalid_argument(std::string(algo) + ": isolated item '" +
                                        g.item_ids[i] + "'");
}

inline std::vector<double> random_positive(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v)
        x = rng.u01();
    return v;
}

struct PropagationPlan {
    // Per-edge factors, aligned with the user-side / item-side CSR arrays.
    std::vector<double> to_user;  // multiplies F contributions into R
    std::vector<double> to_item;  // multiplies R contributions into F
    // Calibration vector g with g = step(g) exactly (sqrt(degree) for the
    // symmetric scheme, degree for the stochastic one). Cross-component
    // score ratios follow this vector so that disconnected graphs get a
    // deterministic, seed-free composition.
    std::vector<double> canonical_user;
    std::vector<double> canonical_item;
    Norm norm = Norm::l2;
    const char* name = "";
};

inline ScoreVector propagate(const RatingGraph& g, const ConvergenceConfig& cfg,
                             const PropagationPlan& plan) {
    cfg.validate();
    require_rankable(g, plan.name);
    const Components comps = find_components(g);

    Rng rng(cfg.seed);
    std::vector<double> R = random_positive(g.user_count(), rng);
    std::vector<double> F = random_positive(g.item_count(), rng);
    normalize_blocks(R, comps.user_comp, comps.count, plan.norm, plan.name);
    normalize_blocks(F, comps.item_comp, comps.count, plan.norm, plan.name);

    std::vector<double> Rn(R.size()), Fn(F.size());
    auto sweep = [&]() {
        for (NodeId u = 0; u < g.user_count(); ++u) {
            double acc = 0.0;
            for (std::size_t e = g.user_offsets[u]; e < g.user_offsets[u + 1]; ++e)
                acc += plan.to_user[e] * F[g.user_adj[e]];
            Rn[u] = acc;
        }
        normalize_blocks(Rn, comps.user_comp, comps.count, plan.norm, plan.name);
        for (NodeId i = 0; i < g.item_count(); ++i) {
            double acc = 0.0;
            for (std::size_t e = g.item_offsets[i]; e < g.item_offsets[i + 1]; ++e)
                acc += plan.to_item[e] * Rn[g.item_adj[e]];
            Fn[i] = acc;
        }
        normalize_blocks(Fn, comps.item_comp, comps.count, plan.norm, plan.name);
        const double dr = l2_diff(Rn, R);
        const double df = l2_diff(Fn, F);
        R.swap(Rn);
        F.swap(Fn);
        return dr < cfg.threshold && df < cfg.threshold;
    };
    const auto [iters, converged] = run_to_convergence(cfg, sweep);

    // Scale each component block to the canonical vector's share, then
    // normalize the full vector once. A connected graph is unaffected.
    auto calibrate = [&](std::vector<double>& v, const std::vector<double>& canon,
                         const std::vector<int>& comp) {
        if (comps.count > 1) {
            std::vector<double> scale(comps.count, 0.0);
            if (plan.norm == Norm::l2) {
                for (std::size_t k = 0; k < v.size(); ++k)
                    scale[comp[k]] += canon[k] * canon[k];
                for (double& s : scale)
                    s = std::sqrt(s);
            } else {
                for (std::size_t k = 0; k < v.size(); ++k)
                    scale[comp[k]] += std::abs(canon[k]);
            }
            for (std::size_t k = 0; k < v.size(); ++k)
                v[k] *= scale[comp[k]];
        }
        const double n = vector_norm(v, plan.norm);
        if (n > 0.0)
            for (double& x : v)
                x /= n;
    };
    calibrate(F, plan.canonical_item, comps.item_comp);
    calibrate(R, plan.canonical_user, comps.user_comp);

    ScoreVector out;
    out.item_scores = std::move(F);
    out.user_scores = std::move(R);
    out.iterations_used = iters;
    out.converged = converged;
    out.component_count = comps.count;
    return out;
}

}  // namespace detail

/// BiRank: alternating score propagation with symmetric degree
/// normalization,
///   R_i = sum_a w_ia / (sqrt(d_i) sqrt(d_a)) * F_a
///   F_a = sum_i w_ia / (sqrt(d_a) sqrt(d_i)) * R_i,
/// each vector L2-normalized per sweep. On a connected graph the item
/// fixed point is proportional to sqrt(weighted degree).
inline ScoreVector birank(const RatingGraph& g, const ConvergenceConfig& cfg = {}) {
    detail::PropagationPlan plan;
    plan.name = "birank";
    plan.norm = detail::Norm::l2;
    plan.to_user.resize(g.user_adj.size());
    for (NodeId u = 0; u < g.user_count(); ++u)
        for (std::size_t e = g.user_offsets[u]; e < g.user_offsets[u + 1]; ++e)
            plan.to_user[e] = g.user_weights[e] /
                              (std::sqrt(g.user_degree[u]) *
                               std::sqrt(g.item_degree[g.user_adj[e]]));
    plan.to_item.resize(g.item_adj.size());
    for (NodeId i = 0; i < g.item_count(); ++i)
        for (std::size_t e = g.item_offsets[i]; e < g.item_offsets[i + 1]; ++e)
            plan.to_item[e] = g.item_weights[e] /
                              (std::sqrt(g.item_degree[i]) *
                               std::sqrt(g.user_degree[g.item_adj[e]]));
    plan.canonical_user.resize(g.user_count());
    for (NodeId u = 0; u < g.user_count(); ++u)
        plan.canonical_user[u] = std::sqrt(g.user_degree[u]);
    plan.canonical_item.resize(g.item_count());
    for (NodeId i = 0; i < g.item_count(); ++i)
        plan.canonical_item[i] = std::sqrt(g.item_degree[i]);
    return detail::propagate(g, cfg, plan);
}

/// BiRank on a time-decay weighted graph (BiRank_t). The update rule is
/// birank's; only the edge weighting differs, and that is fixed when the
/// graph is built.
inline ScoreVector birank_time(const RatingGraph& g,
                               const ConvergenceConfig& cfg = {}) {
    if (g.weighting.kind != WeightingMode::Kind::time_decay)
        throw std::invalid_argument(
            "birank_time requires a graph built with time-decay weighting");
    return birank(g, cfg);
}

/// Co-HITS style propagation with one-sided stochastic normalization,
///   R_i = sum_a (w_ia / d_a) F_a,   F_a = sum_i (w_ia / d_i) R_i,
/// L1-normalized per sweep. The item fixed point on a connected graph is
/// proportional to the weighted degree.
inline ScoreVector bihits(const RatingGraph& g, const ConvergenceConfig& cfg = {}) {
    detail::PropagationPlan plan;
    plan.name = "bihits";
    plan.norm = detail::Norm::l1;
    plan.to_user.resize(g.user_adj.size());
    for (NodeId u = 0; u < g.user_count(); ++u)
        for (std::size_t e = g.user_offsets[u]; e < g.user_offsets[u + 1]; ++e)
            plan.to_user[e] = g.user_weights[e] / g.item_degree[g.user_adj[e]];
    plan.to_item.resize(g.item_adj.size());
    for (NodeId i = 0; i < g.item_count(); ++i)
        for (std::size_t e = g.item_offsets[i]; e < g.item_offsets[i + 1]; ++e)
            plan.to_item[e] = g.item_weights[e] / g.user_degree[g.item_adj[e]];
    plan.canonical_user = g.user_degree;
    plan.canonical_item = g.item_degree;
    return detail::propagate(g, cfg, plan);
}

/// Iterative quality/reputation refinement. Item quality starts at the mean
/// rating; a user's reputation is the inverse of their mean absolute
/// deviation from current quality; quality is re-estimated as the
/// reputation-weighted mean rating. Quality stays on the rating scale.
inline ScoreVector qrep(const RatingGraph& g, const ConvergenceConfig& cfg = {}) {
    cfg.validate();
    detail::require_rankable(g, "qrep");
    constexpr double kEpsilon = 1e-3;

    std::vector<double> quality(g.item_count(), 0.0);
    for (NodeId i = 0; i < g.item_count(); ++i) {
        double sum = 0.0;
        const std::size_t lo = g.item_offsets[i], hi = g.item_offsets[i + 1];
        for (std::size_t e = lo; e < hi; ++e)
            sum += g.item_ratings[e];
        quality[i] = sum / static_cast<double>(hi - lo);
    }

    std::vector<double> reputation(g.user_count(), 0.0);
    std::vector<double> next(g.item_count(), 0.0);
    auto sweep = [&]() {
        for (NodeId u = 0; u < g.user_count(); ++u) {
            double dev = 0.0;
            const std::size_t lo = g.user_offsets[u], hi = g.user_offsets[u + 1];
            for (std::size_t e = lo; e < hi; ++e)
                dev += std::abs(g.user_ratings[e] - quality[g.user_adj[e]]);
            reputation[u] = 1.0 / (dev / static_cast<double>(hi - lo) + kEpsilon);
        }
        double max_delta = 0.0;
        for (NodeId i = 0; i < g.item_count(); ++i) {
            double num = 0.0, den = 0.0;
            for (std::size_t e = g.item_offsets[i]; e < g.item_offsets[i + 1]; ++e) {
                const double rep = reputation[g.item_adj[e]];
                num += rep * g.item_ratings[e];
                den += rep;
            }
            next[i] = num / den;
            if (!std::isfinite(next[i]))
                throw std::runtime_error("qrep: non-finite intermediate value");
            max_delta = std::max(max_delta, std::abs(next[i] - quality[i]));
        }
        quality.swap(next);
        return max_delta < cfg.threshold;
    };
    const auto [iters, converged] = detail::run_to_convergence(cfg, sweep);

    double rep_sum = 0.0;
    for (const double r : reputation)
        rep_sum += r;
    for (double& r : reputation)
        r /= rep_sum;

    ScoreVector out;
    out.item_scores = std::move(quality);
    out.user_scores = std::move(reputation);
    out.iterations_used = iters;
    out.converged = converged;
    out.component_count = detail::find_components(g).count;
    return out;
}

/// Damped mutual reinforcement with uniform priors,
///   R = lambda * P_u F + (1-lambda)/U,   F = lambda * P_v R + (1-lambda)/I,
/// where P_u, P_v are the row-stochastic transitions w_ia/d_i and w_ia/d_a.
/// The fixed point is unique for lambda < 1; the returned vectors are
/// L2-normalized.
inline ScoreVector bgrm(const RatingGraph& g, const ConvergenceConfig& cfg = {},
                        double lambda = 0.85) {
    cfg.validate();
    detail::require_rankable(g, "bgrm");
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw std::invalid_argument("bgrm lambda must lie in [0,1)");

    Rng rng(cfg.seed);
    std::vector<double> R = detail::random_positive(g.user_count(), rng);
    std::vector<double> F = detail::random_positive(g.item_count(), rng);
    const double user_prior = (1.0 - lambda) / static_cast<double>(g.user_count());
    const double item_prior = (1.0 - lambda) / static_cast<double>(g.item_count());

    std::vector<double> Rn(R.size()), Fn(F.size());
    auto sweep = [&]() {
        for (NodeId u = 0; u < g.user_count(); ++u) {
            double acc = 0.0;
            for (std::size_t e = g.user_offsets[u]; e < g.user_offsets[u + 1]; ++e)
                acc += g.user_weights[e] * F[g.user_adj[e]];
            Rn[u] = lambda * acc / g.user_degree[u] + user_prior;
        }
        for (NodeId i = 0; i < g.item_count(); ++i) {
            double acc = 0.0;
            for (std::size_t e = g.item_offsets[i]; e < g.item_offsets[i + 1]; ++e)
                acc += g.item_weights[e] * Rn[g.item_adj[e]];
            Fn[i] = lambda * acc / g.item_degree[i] + item_prior;
            if (!std::isfinite(Fn[i]))
                throw std::runtime_error("bgrm: non-finite intermediate value");
        }
        const double dr = detail::l2_diff(Rn, R);
        const double df = detail::l2_diff(Fn, F);
        R.swap(Rn);
        F.swap(Fn);
        return dr < cfg.threshold && df < cfg.threshold;
    };
    const auto [iters, converged] = detail::run_to_convergence(cfg, sweep);

    auto unit = [](std::vector<double>& v) {
        const double n = detail::vector_norm(v, detail::Norm::l2);
        if (n > 0.0)
            for (double& x : v)
                x /= n;
    };
    unit(R);
    unit(F);

    ScoreVector out;
    out.item_scores = std::move(F);
    out.user_scores = std::move(R);
    out.iterations_used = iters;
    out.converged = converged;
    out.component_count = detail::find_components(g).count;
    return out;
}

struct RankerSpec {
    Algorithm algorithm = Algorithm::birank_r;
    ConvergenceConfig convergence;
    double bgrm_lambda = 0.85;
};

/// Which weighting a graph must carry for the given algorithm, if any.
inline std::optional<WeightingMode::Kind> required_weighting(Algorithm a) {
    switch (a) {
        case Algorithm::birank_r: return WeightingMode::Kind::rating;
        case Algorithm::birank_t: return WeightingMode::Kind::time_decay;
        default: return std::nullopt;
    }
}

inline ScoreVector run_ranker(const RatingGraph& g, const RankerSpec& spec) {
    if (const auto need = required_weighting(spec.algorithm);
        need && g.weighting.kind != *need)
        throw std::invalid_argument(
            std::string(algorithm_name(spec.algorithm)) +
            " requires a graph built with " +
            (*need == WeightingMode::Kind::rating ? "rating" : "time-decay") +
            " weighting");
    switch (spec.algorithm) {
        case Algorithm::birank_r: return birank(g, spec.convergence);
        case Algorithm::birank_t: return birank_time(g, spec.convergence);
        case Algorithm::bihits: return bihits(g, spec.convergence);
        case Algorithm::qrep: return qrep(g, spec.convergence);
        case Algorithm::bgrm: return bgrm(g, spec.convergence, spec.bgrm_lambda);
    }
    throw std::invalid_argument("unknown algorithm");
}

}  // namespace bgrank
