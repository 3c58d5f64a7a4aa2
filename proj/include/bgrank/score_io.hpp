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

#include "bgrank/metrics.hpp"

namespace bgrank {

/// `item_id,score,rank` sorted by descending score (ties by ascending id).
/// When `raw_scores` is given (rebalanced output) a fourth `raw_score`
/// column carries the pre-rebalance value.
inline void write_scores_csv(const std::filesystem::path& path,
                             const RankedList& ranked,
                             const std::vector<std::string>& item_ids,
                             const std::vector<double>* raw_scores = nullptr) {
    AtomicWriter out(path);
    out.stream() << "item_id,score,rank";
    if (raw_scores)
        out.stream() << ",raw_score";
    out.stream() << '\n';
    for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
        const NodeId item = ranked.items[pos];
        out.stream() << item_ids[item] << ',' << format_double(ranked.scores[pos])
                     << ',' << pos + 1;
        if (raw_scores)
            out.stream() << ',' << format_double((*raw_scores)[item]);
        out.stream() << '\n';
    }
    out.commit();
}

/// Read a score CSV back as id -> score pairs (the `score` column).
inline std::vector<std::pair<std::string, double>> read_scores_csv(
    const std::filesystem::path& path) {
    std::vector<std::pair<std::string, double>> out;
    bool first = true;
    for_each_csv_row(path, [&](const CsvRow& row) {
        if (first) {
            first = false;
            if (!row.fields.empty() && iequals(row.fields[0], "item_id"))
                return;
        }
        if (row.fields.size() < 2)
            throw std::runtime_error("malformed score row at line " +
                                     std::to_string(row.line_no) + " in " +
                                     path.string());
        double score{};
        if (!try_parse_double(row.fields[1], score))
            throw std::runtime_error("unparsable score at line " +
                                     std::to_string(row.line_no) + " in " +
                                     path.string());
        out.emplace_back(row.fields[0], score);
    });
    return out;
}

/// Map a score file onto a graph's dense item ids. Every graph item must be
/// covered; unknown ids are an error.
inline std::vector<double> scores_for_graph(
    const std::vector<std::pair<std::string, double>>& rows,
    const RatingGraph& graph) {
    std::vector<double> scores(graph.item_count());
    std::vector<char> seen(graph.item_count(), 0);
    for (const auto& [id, score] : rows) {
        const auto dense = graph.find_item(id);
        if (!dense)
            throw std::runtime_error("score file mentions unknown item '" + id + "'");
        scores[*dense] = score;
        seen[*dense] = 1;
    }
    for (NodeId i = 0; i < graph.item_count(); ++i)
        if (!seen[i])
            throw std::runtime_error("score file is missing item '" +
                                     graph.item_ids[i] + "'");
    return scores;
}

}  // namespace bgrank
