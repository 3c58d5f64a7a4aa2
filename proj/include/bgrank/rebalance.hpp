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
#include <vector>

#include "bgrank/catalog.hpp"
#include "bgrank/rank.hpp"

namespace bgrank {

struct RebalanceConfig {
    /// Number of time-adjacent items standardized against (the window also
    /// contains the item itself, so windows hold window_size + 1 items when
    /// the catalog is large enough). Must be even so the two sides split.
    int window_size = 100;
    /// Score assigned when every score in a window is identical.
    double fallback = 0.0;

    void validate() const {
        if (window_size < 2 || window_size % 2 != 0)
            throw std::invalid_argument("window size must be an even integer >= 2");
    }
};

/// One item's standardization cohort.
struct TimeWindow {
    std::vector<NodeId> members;
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
};

/// Per-item window spans over the catalog's release order.
class WindowIndex {
  public:
    WindowIndex(const ItemCatalog& catalog, int window_size)
        : item_ids_(catalog.item_ids), order_(catalog.order),
          window_size_(window_size) {
        const std::int32_t n = static_cast<std::int32_t>(order_.size());
        lo_.resize(n);
        hi_.resize(n);
        const std::int32_t half = window_size / 2;
        for (std::int32_t pos = 0; pos < n; ++pos) {
            // Interior: half a window each side. Near a boundary the window
            // is anchored there so it still holds min(n, window_size + 1)
            // items.
            std::int32_t lo = pos - half;
            const std::int32_t max_lo = std::max(0, n - 1 - window_size);
            lo = std::clamp(lo, 0, max_lo);
            const std::int32_t hi = std::min(n - 1, lo + window_size);
            const NodeId item = order_[pos];
            lo_[item] = lo;
            hi_[item] = hi;
        }
    }

    std::size_t item_count() const { return order_.size(); }
    int window_size() const { return window_size_; }
    const std::vector<NodeId>& order() const { return order_; }
    const std::string& item_id(NodeId item) const { return item_ids_[item]; }

    /// Window span of `item` as positions [first, last] in release order.
    std::pair<std::int32_t, std::int32_t> span(NodeId item) const {
        return {lo_[item], hi_[item]};
    }

    TimeWindow window_of(NodeId item, const std::vector<double>& item_scores) const {
        TimeWindow w;
        const auto [lo, hi] = span(item);
        w.members.reserve(hi - lo + 1);
        for (std::int32_t p = lo; p <= hi; ++p)
            w.members.push_back(order_[p]);
        double sum = 0.0;
        for (const NodeId m : w.members)
            sum += item_scores[m];
        w.mean = sum / static_cast<double>(w.members.size());
        double ss = 0.0;
        for (const NodeId m : w.members) {
            const double d = item_scores[m] - w.mean;
            ss += d * d;
        }
        w.stddev = std::sqrt(ss / static_cast<double>(w.members.size()));
        return w;
    }

  private:
    std::vector<std::string> item_ids_;
    std::vector<NodeId> order_;
    std::vector<std::int32_t> lo_, hi_;
    int window_size_;
};

/// Build each item's close set: the window_size/2 older and window_size/2
/// newer items in release order, plus the item itself, anchored at the
/// catalog boundaries.
inline WindowIndex assign_windows(const ItemCatalog& catalog, int window_size) {
    RebalanceConfig probe{window_size, 0.0};
    probe.validate();
    return WindowIndex(catalog, window_size);
}

/// Standardize every item score against its window: F' = (F - mean) / std.
/// Zero-variance windows yield the configured fallback. User scores pass
/// through; the output is deliberately not re-normalized, the z-scores are
/// the final ranking key.
inline ScoreVector rebalance_scores(const ScoreVector& scores,
                                    const WindowIndex& windows,
                                    const RebalanceConfig& cfg = {}) {
    cfg.validate();
    if (scores.item_scores.size() != windows.item_count()) {
        const std::size_t k = std::min(scores.item_scores.size(), windows.item_count());
        throw std::runtime_error(
            "rebalance: item #" + std::to_string(k) +
            " has a score but no window assignment (catalog mismatch)");
    }

    ScoreVector out = scores;
    const auto& order = windows.order();
    const auto& raw = scores.item_scores;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const NodeId item = static_cast<NodeId>(k);
        const auto [lo, hi] = windows.span(item);
        const std::int32_t m = hi - lo + 1;
        double sum = 0.0;
        for (std::int32_t p = lo; p <= hi; ++p)
            sum += raw[order[p]];
        const double mean = sum / m;
        double ss = 0.0;
        for (std::int32_t p = lo; p <= hi; ++p) {
            const double d = raw[order[p]] - mean;
            ss += d * d;
        }
        const double stddev = std::sqrt(ss / m);
        out.item_scores[k] = stddev > 0.0 ? (raw[k] - mean) / stddev : cfg.fallback;
    }
    return out;
}

}  // namespace bgrank
