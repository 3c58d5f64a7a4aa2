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

#include <map>
#include <string>
#include <vector>

#include "bgrank/graph.hpp"

namespace bgrank {

enum class ReleaseSource { metadata, proxy_first_rating };

/// Release instant of every item in a graph, plus the induced total order
/// (release time ascending, ties by item id ascending). That order is the
/// sort key for rebalance windows and imbalance groups.
struct ItemCatalog {
    std::vector<std::string> item_ids;       // aligned with graph dense ids
    std::vector<std::int64_t> release;       // per dense item id
    std::vector<ReleaseSource> source;       // per dense item id
    std::vector<NodeId> order;               // position -> dense item id
    std::vector<std::int32_t> position;      // dense item id -> position

    NodeId item_count() const { return static_cast<NodeId>(item_ids.size()); }
};

struct MetadataLoadResult {
    std::map<std::string, std::int64_t> dates;
    std::vector<RejectedRow> rejects;
};

/// CSV of `item,release_date` rows. Dates are ISO-8601 days (midnight UTC);
/// a raw integer epoch is accepted too.
inline MetadataLoadResult load_release_metadata(const std::filesystem::path& path) {
    MetadataLoadResult result;
    bool first = true;
    for_each_csv_row(path, [&](const CsvRow& row) {
        if (first) {
            first = false;
            for (const auto& cell : row.fields)
                if (iequals(cell, "item") || iequals(cell, "release_date"))
                    return;  // header row
        }
        if (row.fields.size() < 2 || row.fields[0].empty()) {
            result.rejects.push_back({row.line_no, "expected item,release_date", row.raw});
            return;
        }
        std::int64_t epoch{};
        if (!parse_iso_date(row.fields[1], epoch) &&
            !try_parse_int(row.fields[1], epoch)) {
            result.rejects.push_back({row.line_no, "unparsable release date", row.raw});
            return;
        }
        result.dates[row.fields[0]] = epoch;
    });
    return result;
}

/// Assign each item its entry instant: the metadata date when present,
/// otherwise the item's earliest rating as a proxy.
inline ItemCatalog resolve_release_dates(
    const RatingGraph& graph,
    const std::map<std::string, std::int64_t>& metadata = {}) {
    ItemCatalog cat;
    cat.item_ids = graph.item_ids;
    const NodeId n = graph.item_count();
    cat.release.resize(n);
    cat.source.resize(n);
    for (NodeId i = 0; i < n; ++i) {
        const auto it = metadata.find(graph.item_ids[i]);
        if (it != metadata.end()) {
            cat.release[i] = it->second;
            cat.source[i] = ReleaseSource::metadata;
        } else {
            cat.release[i] = graph.first_rating_time(i);
            cat.source[i] = ReleaseSource::proxy_first_rating;
        }
    }
    cat.order.resize(n);
    std::iota(cat.order.begin(), cat.order.end(), 0);
    std::sort(cat.order.begin(), cat.order.end(), [&](NodeId a, NodeId b) {
        if (cat.release[a] != cat.release[b])
            return cat.release[a] < cat.release[b];
        return cat.item_ids[a] < cat.item_ids[b];
    });
    cat.position.resize(n);
    for (std::int32_t p = 0; p < n; ++p)
        cat.position[cat.order[p]] = p;
    return cat;
}

/// Catalog for a subgraph, inheriting release instants and provenance from
/// the full catalog (an item's entry time does not depend on the snapshot).
inline ItemCatalog restrict_catalog(const ItemCatalog& full,
                                    const RatingGraph& subgraph) {
    std::map<std::string, std::int64_t> dates;
    std::map<std::string, ReleaseSource> sources;
    for (NodeId i = 0; i < full.item_count(); ++i) {
        dates[full.item_ids[i]] = full.release[i];
        sources[full.item_ids[i]] = full.source[i];
    }
    ItemCatalog cat = resolve_release_dates(subgraph, dates);
    for (NodeId i = 0; i < cat.item_count(); ++i) {
        const auto it = sources.find(cat.item_ids[i]);
        if (it != sources.end())
            cat.source[i] = it->second;
    }
    return cat;
}

}  // namespace bgrank
