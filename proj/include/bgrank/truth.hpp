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

#include <string>
#include <unordered_map>
#include <vector>

#include "bgrank/metrics.hpp"

namespace bgrank {

/// Externally curated list of high-quality items, optionally annotated with
/// the year each item won its award (enables per-year recall).
struct GroundTruth {
    std::string label;
    std::vector<std::string> ids;  // unique, in parse order
    std::unordered_map<std::string, int> award_year;

    bool has_award_years() const { return !award_year.empty(); }
};

/// Parse `item[,award_year]` rows; duplicates collapse to the first
/// occurrence.
inline GroundTruth parse_ground_truth(const std::filesystem::path& path,
                                      std::string label = {}) {
    GroundTruth truth;
    truth.label = label.empty() ? path.stem().string() : std::move(label);
    std::unordered_set<std::string> seen;
    bool first = true;
    for_each_csv_row(path, [&](const CsvRow& row) {
        if (first) {
            first = false;
            for (const auto& cell : row.fields)
                if (iequals(cell, "item") || iequals(cell, "item_id") ||
                    iequals(cell, "award_year"))
                    return;  // header
        }
        const std::string& id = row.fields[0];
        if (id.empty() || !seen.insert(id).second)
            return;
        truth.ids.push_back(id);
        if (row.fields.size() >= 2 && !row.fields[1].empty()) {
            std::int64_t year{};
            if (try_parse_int(row.fields[1], year))
                truth.award_year[id] = static_cast<int>(year);
        }
    });
    return truth;
}

struct TruthLoadResult {
    GroundTruth truth;
    int dropped_unknown = 0;  // ids absent from the graph, warned and removed
};

/// Load a ground-truth file and restrict it to items the graph knows.
inline TruthLoadResult load_ground_truth(const std::filesystem::path& path,
                                         const RatingGraph& graph,
                                         std::string label = {}) {
    const GroundTruth parsed = parse_ground_truth(path, std::move(label));
    TruthLoadResult out;
    out.truth.label = parsed.label;
    for (const auto& id : parsed.ids) {
        if (graph.find_item(id)) {
            out.truth.ids.push_back(id);
            const auto year = parsed.award_year.find(id);
            if (year != parsed.award_year.end())
                out.truth.award_year.emplace(*year);
        } else {
            ++out.dropped_unknown;
        }
    }
    if (out.truth.ids.empty())
        throw std::runtime_error("ground truth '" + path.string() +
                                 "' shares no items with the catalog");
    return out;
}

/// Dense-id set of the truth items present in `graph`.
inline TruthSet resolve_truth(const GroundTruth& truth, const RatingGraph& graph) {
    TruthSet set;
    for (const auto& id : truth.ids)
        if (const auto dense = graph.find_item(id))
            set.insert(*dense);
    return set;
}

}  // namespace bgrank
