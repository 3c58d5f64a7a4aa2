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
#include <map>
#include <string>
#include <vector>

#include "bgrank/truth.hpp"

namespace bgrank {

/// Synthetic rating-network generator. Items carry a latent quality and an
/// arrival time; users arrive over the horizon and pick available items
/// preferentially by current popularity and quality, which reproduces the
/// old-items-accumulate-degree effect the rebalance pipeline targets.
struct SynthConfig {
    int items = 4000;
    int users = 20000;
    double edges_per_user_mean = 15.0;
    double quality_min = 0.0;
    double quality_max = 1.0;
    /// Preferential-attachment strength beta: selection weight is
    /// (degree + 1)^beta * quality. beta = 0 removes the popularity bias.
    double popularity_bias = 2.0;
    /// User arrival instants are horizon * U^shape: 1 means a uniform
    /// audience, values below 1 skew arrivals late (a growing platform),
    /// which keeps late items trafficked enough for cohort statistics.
    double user_arrival_shape = 0.4;
    std::int64_t start_epoch = 946684800;  // 2000-01-01
    std::int64_t horizon_seconds = 10 * kSecondsPerYear;
    double rating_noise = 0.5;
    double truth_fraction = 0.01;
    std::uint64_t seed = 42;

    void validate() const {
        if (items < 1 || users < 1)
            throw std::invalid_argument("synthetic item/user counts must be >= 1");
        if (!(edges_per_user_mean > 0.0))
            throw std::invalid_argument("edges per user must be > 0");
        if (edges_per_user_mean > static_cast<double>(items))
            throw std::invalid_argument(
                "infeasible edge budget: a user cannot rate more distinct items "
                "than exist");
        if (!(quality_min < quality_max))
            throw std::invalid_argument("quality range is empty");
        if (popularity_bias < 0.0)
            throw std::invalid_argument("popularity bias must be >= 0");
        if (!(user_arrival_shape > 0.0 && user_arrival_shape <= 1.0))
            throw std::invalid_argument("user arrival shape must lie in (0,1]");
        if (horizon_seconds <= 0)
            throw std::invalid_argument("time horizon must be positive");
        if (rating_noise < 0.0)
            throw std::invalid_argument("rating noise must be >= 0");
        if (!(truth_fraction > 0.0 && truth_fraction <= 1.0))
            throw std::invalid_argument("truth fraction must lie in (0,1]");
    }
};

struct SynthData {
    std::vector<Interaction> interactions;
    std::map<std::string, std::int64_t> metadata;  // item id -> release epoch
    GroundTruth truth;                             // planted, with award years
    std::vector<std::string> item_ids;             // arrival order
    std::vector<double> quality;                   // aligned with item_ids
    std::vector<std::int64_t> arrival;             // aligned with item_ids
};

namespace detail {

/// The attachment weight raises quality to this power. Sharper-than-linear
/// quality keeps within-cohort contrast visible next to the popularity
/// term, which is what windowed standardization needs to recover good
/// items in every period.
inline constexpr double kQualitySharpness = 2.0;

/// Segment tree over item weights keeping per-node sum and max. Supports
/// point updates, cumulative sampling and enumeration of heavy items in
/// O(log n) while degrees and availability evolve.
class WeightedSampler {
  public:
    explicit WeightedSampler(int n) : n_(n) {
        size_ = 1;
        while (size_ < n_)
            size_ <<= 1;
        sum_.assign(2 * size_, 0.0);
        max_.assign(2 * size_, 0.0);
    }

    void set(int i, double w) {
        int node = size_ + i;
        sum_[node] = w;
        max_[node] = w;
        for (node >>= 1; node >= 1; node >>= 1) {
            sum_[node] = sum_[2 * node] + sum_[2 * node + 1];
            max_[node] = std::max(max_[2 * node], max_[2 * node + 1]);
        }
    }

    double get(int i) const { return sum_[size_ + i]; }

    double total() const { return sum_[1]; }

    /// Index with cumulative weight crossing x, nudged to the nearest
    /// positive-weight slot if float rounding lands on an empty one.
    /// Returns -1 only if no weight is left.
    int sample(double x) const {
        if (!(sum_[1] > 0.0))
            return -1;
        int node = 1;
        while (node < size_) {
            const int left = 2 * node;
            if (sum_[left] > x) {
                node = left;
            } else {
                x -= sum_[left];
                node = left + 1;
            }
        }
        int pos = std::min(node - size_, n_ - 1);
        if (sum_[size_ + pos] > 0.0)
            return pos;
        for (int k = pos - 1; k >= 0; --k)
            if (sum_[size_ + k] > 0.0)
                return k;
        for (int k = pos + 1; k < n_; ++k)
            if (sum_[size_ + k] > 0.0)
                return k;
        return -1;
    }

    /// Append every index with weight >= threshold to `out` (ascending).
    void collect_at_least(double threshold, std::vector<int>& out) const {
        if (!(threshold > 0.0))
            threshold = std::numeric_limits<double>::min();
        collect(1, threshold, out);
    }

  private:
    void collect(int node, double threshold, std::vector<int>& out) const {
        if (max_[node] < threshold)
            return;
        if (node >= size_) {
            const int pos = node - size_;
            if (pos < n_)
                out.push_back(pos);
            return;
        }
        collect(2 * node, threshold, out);
        collect(2 * node + 1, threshold, out);
    }

    int n_;
    int size_;
    std::vector<double> sum_;
    std::vector<double> max_;
};

inline std::string padded_id(char prefix, int k, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%c%0*d", prefix, std::min(width, 12), k);
    return buf;
}

}  // namespace detail

/// Deterministic per seed. Items arrive uniformly over the horizon with
/// quality ~ U(quality_min, quality_max); users arrive uniformly and rate
/// distinct available items with inclusion probability proportional to
///     quality * (1 + ln(1 + degree))^beta,
/// capped at 1 and budgeted by a Poisson draw around edges_per_user_mean.
/// The damped popularity term keeps the feedback sublinear: with the raw
/// degree in the exponent base, beta >= 1 condenses every edge onto a
/// handful of hub items and the age-degree gradient the bias metrics need
/// disappears. Ratings are clamp(round(1 + 4q + noise), 1, 5). The planted
/// truth is the top truth_fraction of items by latent quality, stratified
/// so every time decile contributes the same count (so recall gains from
/// rebalancing reflect bias removal, not truth placement).
inline SynthData generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    SynthData data;

    const int n = cfg.items;
    data.arrival.resize(n);
    for (auto& t : data.arrival)
        t = cfg.start_epoch + rng.below(cfg.horizon_seconds);
    std::sort(data.arrival.begin(), data.arrival.end());

    data.quality.resize(n);
    for (auto& q : data.quality)
        q = cfg.quality_min + (cfg.quality_max - cfg.quality_min) * rng.u01();

    const int item_width = std::max(4, static_cast<int>(std::to_string(n).size()));
    const int user_width = std::max(4, static_cast<int>(std::to_string(cfg.users).size()));
    data.item_ids.resize(n);
    for (int i = 0; i < n; ++i) {
        data.item_ids[i] = detail::padded_id('i', i, item_width);
        data.metadata[data.item_ids[i]] = data.arrival[i];
    }

    std::vector<std::int64_t> user_arrival(cfg.users);
    for (auto& t : user_arrival)
        t = cfg.start_epoch +
            static_cast<std::int64_t>(std::pow(rng.u01(), cfg.user_arrival_shape) *
                                      static_cast<double>(cfg.horizon_seconds));
    std::sort(user_arrival.begin(), user_arrival.end());

    // Normalized quality drives both attachment and the rating map.
    auto unit_quality = [&](int i) {
        return (data.quality[i] - cfg.quality_min) /
               (cfg.quality_max - cfg.quality_min);
    };

    detail::WeightedSampler sampler(n);
    std::vector<int> degree(n, 0);
    auto item_weight = [&](int i) {
        return std::pow(1.0 + std::log1p(static_cast<double>(degree[i])),
                        cfg.popularity_bias) *
               (std::pow(unit_quality(i), detail::kQualitySharpness) + 1e-9);
    };

    // Every item debuts with one rating from its first reviewer, so the
    // whole catalog is present in the produced graph.
    auto debut = [&](int item) {
        const double q = unit_quality(item);
        const double noisy =
            1.0 + 4.0 * q +
            (cfg.rating_noise > 0.0 ? rng.normal(0.0, cfg.rating_noise) : 0.0);
        const double rating =
            std::clamp(static_cast<double>(std::llround(noisy)), 1.0, 5.0);
        data.interactions.push_back({detail::padded_id('s', item, item_width),
                                     data.item_ids[item], rating,
                                     data.arrival[item]});
        degree[item] = 1;
        sampler.set(item, item_weight(item));
    };

    int available = 0;
    std::vector<int> picked, heavy;
    for (int u = 0; u < cfg.users; ++u) {
        const std::int64_t when = user_arrival[u];
        while (available < n && data.arrival[available] <= when) {
            debut(available);
            ++available;
        }
        if (available == 0)
            continue;
        int budget = std::min(rng.poisson(cfg.edges_per_user_mean), available);
        if (budget == 0)
            continue;

        picked.clear();
        // Water-fill the capped inclusion probabilities min(1, s*w):
        // items with w >= remaining_weight / remaining_budget saturate at
        // probability 1; the leftover budget samples the tail by weight.
        while (budget > 0) {
            const double remaining = sampler.total();
            if (!(remaining > 0.0))
                break;
            heavy.clear();
            sampler.collect_at_least(remaining / budget, heavy);
            if (heavy.empty())
                break;
            for (const int item : heavy) {
                picked.push_back(item);
                sampler.set(item, 0.0);
            }
            budget -= static_cast<int>(heavy.size());
        }
        for (int k = 0; k < budget; ++k) {
            const double remaining = sampler.total();
            if (!(remaining > 0.0))
                break;
            const int item = sampler.sample(rng.u01() * remaining);
            if (item < 0)
                break;
            picked.push_back(item);
            sampler.set(item, 0.0);  // without replacement within this user
        }

        const std::string user_id = detail::padded_id('u', u, user_width);
        for (const int item : picked) {
            const double q = unit_quality(item);
            const double noisy = 1.0 + 4.0 * q +
                                 (cfg.rating_noise > 0.0
                                      ? rng.normal(0.0, cfg.rating_noise)
                                      : 0.0);
            const double rating =
                std::clamp(static_cast<double>(std::llround(noisy)), 1.0, 5.0);
            data.interactions.push_back({user_id, data.item_ids[item], rating, when});
            ++degree[item];
            sampler.set(item, item_weight(item));
        }
    }
    while (available < n) {
        debut(available);  // items arriving after the last user
        ++available;
    }

    // Planted truth: per time decile, the decile's best items by quality.
    const int total_truth =
        static_cast<int>(std::ceil(cfg.truth_fraction * static_cast<double>(n)));
    data.truth.label = "planted";
    const int deciles = std::min(10, n);
    const int base = total_truth / deciles;
    const int extra = total_truth % deciles;
    const int dec_base = n / deciles;
    const int dec_extra = n % deciles;
    int start = 0;
    for (int d = 0; d < deciles; ++d) {
        const int size = dec_base + (d < dec_extra ? 1 : 0);
        std::vector<int> members(size);
        std::iota(members.begin(), members.end(), start);
        std::sort(members.begin(), members.end(), [&](int a, int b) {
            if (data.quality[a] != data.quality[b])
                return data.quality[a] > data.quality[b];
            return data.item_ids[a] < data.item_ids[b];
        });
        const int take = std::min(size, base + (d < extra ? 1 : 0));
        for (int k = 0; k < take; ++k) {
            const int item = members[k];
            data.truth.ids.push_back(data.item_ids[item]);
            data.truth.award_year[data.item_ids[item]] =
                utc_year(data.arrival[item]) + 1;
        }
        start += size;
    }
    std::sort(data.truth.ids.begin(), data.truth.ids.end());
    return data;
}

/// Write ratings.csv, metadata.csv and truth.csv into `dir`.
inline void write_synthetic(const SynthData& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_interactions(dir / "ratings.csv", data.interactions);

    AtomicWriter meta(dir / "metadata.csv");
    meta.stream() << "item,release_date\n";
    for (std::size_t i = 0; i < data.item_ids.size(); ++i) {
        const std::string stamp = format_utc(data.metadata.at(data.item_ids[i]));
        meta.stream() << data.item_ids[i] << ',' << stamp.substr(0, 10) << '\n';
    }
    meta.commit();

    AtomicWriter truth(dir / "truth.csv");
    truth.stream() << "item,award_year\n";
    for (const auto& id : data.truth.ids)
        truth.stream() << id << ',' << data.truth.award_year.at(id) << '\n';
    truth.commit();
}

}  // namespace bgrank
