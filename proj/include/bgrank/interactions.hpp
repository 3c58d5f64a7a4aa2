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
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bgrank/csv.hpp"

namespace bgrank {

/// One user-item rating event.
struct Interaction {
    std::string user;
    std::string item;
    double rating = 0.0;
    std::int64_t timestamp = 0;  // seconds since Unix epoch
};

struct RatingScale {
    double min = 1.0;
    double max = 5.0;
};

/// A column is addressed either by header name or by 0-based position.
/// The default schema carries both, so headerless files fall back to
/// positions 0..3 while files with a header resolve by name.
struct ColumnSpec {
    std::string name;
    int position = -1;

    static ColumnSpec by_name(std::string n, int fallback = -1) {
        return ColumnSpec{std::move(n), fallback};
    }
    static ColumnSpec by_position(int p) { return ColumnSpec{{}, p}; }
};

struct CsvSchema {
    ColumnSpec user = ColumnSpec::by_name("user", 0);
    ColumnSpec item = ColumnSpec::by_name("item", 1);
    ColumnSpec rating = ColumnSpec::by_name("rating", 2);
    ColumnSpec timestamp = ColumnSpec::by_name("timestamp", 3);

    /// Parse "user,item,rating,timestamp" or "0,1,2,3" (mixing allowed).
    /// Named columns fall back to their slot position, so a named schema
    /// also reads headerless files laid out in the given order.
    static CsvSchema parse(std::string_view spec) {
        const auto parts = split_fields(spec);
        if (parts.size() != 4)
            throw std::invalid_argument("schema needs exactly 4 columns: " +
                                        std::string(spec));
        CsvSchema s;
        ColumnSpec* slots[4] = {&s.user, &s.item, &s.rating, &s.timestamp};
        for (int i = 0; i < 4; ++i) {
            std::int64_t pos{};
            if (try_parse_int(parts[i], pos)) {
                if (pos < 0)
                    throw std::invalid_argument("negative column position");
                *slots[i] = ColumnSpec::by_position(static_cast<int>(pos));
            } else {
                *slots[i] = ColumnSpec::by_name(parts[i], i);
            }
        }
        return s;
    }
};

enum class HeaderMode { autodetect, present, absent };

struct LoadOptions {
    CsvSchema schema;
    HeaderMode header = HeaderMode::autodetect;
    RatingScale scale;
};

struct RejectedRow {
    std::size_t line = 0;
    std::string reason;
    std::string raw;
};

struct LoadResult {
    std::vector<Interaction> interactions;
    std::vector<RejectedRow> rejects;
};

namespace detail {

inline std::optional<int> find_column(const std::vector<std::string>& header,
                                      const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (iequals(header[i], name))
            return static_cast<int>(i);
    return std::nullopt;
}

struct ResolvedSchema {
    int user, item, rating, timestamp;
    int max_index() const { return std::max({user, item, rating, timestamp}); }
};

inline ResolvedSchema resolve_schema(const CsvSchema& schema,
                                     const std::vector<std::string>* header) {
    auto resolve = [&](const ColumnSpec& c, const char* what) -> int {
        if (header && !c.name.empty()) {
            if (const auto idx = detail::find_column(*header, c.name))
                return *idx;
            if (c.position < 0)
                throw std::invalid_argument(std::string("column '") + c.name +
                                            "' (" + what + ") not found in header");
        }
        if (c.position >= 0)
            return c.position;
        throw std::invalid_argument(std::string("column '") + c.name + "' (" + what +
                                    ") needs a header row to resolve");
    };
    return ResolvedSchema{resolve(schema.user, "user"), resolve(schema.item, "item"),
                          resolve(schema.rating, "rating"),
                          resolve(schema.timestamp, "timestamp")};
}

/// A first row is a header iff any of its cells equals one of the schema's
/// column names. Malformed data rows keep counting as rejects this way.
inline bool looks_like_header(const std::vector<std::string>& row,
                              const CsvSchema& schema) {
    for (const auto& cell : row)
        for (const ColumnSpec* c : {&schema.user, &schema.item, &schema.rating,
                                    &schema.timestamp})
            if (!c->name.empty() && iequals(cell, c->name))
                return true;
    return false;
}

}  // namespace detail

/// Parse a ratings CSV. Malformed rows are collected with their line number
/// and reason instead of aborting the load.
inline LoadResult load_interactions(const std::filesystem::path& path,
                                    const LoadOptions& opt = {}) {
    LoadResult result;
    bool saw_first = false;
    std::optional<detail::ResolvedSchema> cols;

    for_each_csv_row(path, [&](const CsvRow& row) {
        if (!saw_first) {
            saw_first = true;
            const bool header =
                opt.header == HeaderMode::present ||
                (opt.header == HeaderMode::autodetect &&
                 detail::looks_like_header(row.fields, opt.schema));
            if (header) {
                cols = detail::resolve_schema(opt.schema, &row.fields);
                return;
            }
            cols = detail::resolve_schema(opt.schema, nullptr);
        }
        const auto& c = *cols;
        if (static_cast<int>(row.fields.size()) <= c.max_index()) {
            result.rejects.push_back({row.line_no, "too few columns", row.raw});
            return;
        }
        Interaction it;
        it.user = row.fields[c.user];
        it.item = row.fields[c.item];
        if (it.user.empty() || it.item.empty()) {
            result.rejects.push_back({row.line_no, "empty user or item id", row.raw});
            return;
        }
        if (!try_parse_double(row.fields[c.rating], it.rating)) {
            result.rejects.push_back({row.line_no, "unparsable rating", row.raw});
            return;
        }
        if (it.rating < opt.scale.min || it.rating > opt.scale.max) {
            result.rejects.push_back(
                {row.line_no,
                 "rating outside scale [" + format_double(opt.scale.min) + "," +
                     format_double(opt.scale.max) + "]",
                 row.raw});
            return;
        }
        if (!try_parse_int(row.fields[c.timestamp], it.timestamp)) {
            result.rejects.push_back({row.line_no, "unparsable timestamp", row.raw});
            return;
        }
        if (it.timestamp < 0) {
            result.rejects.push_back({row.line_no, "negative timestamp", row.raw});
            return;
        }
        result.interactions.push_back(std::move(it));
    });
    return result;
}

/// Sidecar file with one `line,reason,raw` record per rejected row.
inline void write_rejects(const std::filesystem::path& path,
                          const std::vector<RejectedRow>& rejects) {
    AtomicWriter out(path);
    out.stream() << "line,reason,raw\n";
    for (const auto& r : rejects)
        out.stream() << r.line << ',' << r.reason << ',' << r.raw << '\n';
    out.commit();
}

inline void write_interactions(const std::filesystem::path& path,
                               const std::vector<Interaction>& rows) {
    AtomicWriter out(path);
    out.stream() << "user,item,rating,timestamp\n";
    for (const auto& r : rows)
        out.stream() << r.user << ',' << r.item << ',' << format_double(r.rating)
                     << ',' << r.timestamp << '\n';
    out.commit();
}

/// Collapse repeated (user, item) pairs: mean rating, earliest timestamp.
/// Output keeps the first-occurrence order of each pair; idempotent.
inline std::vector<Interaction> merge_duplicates(const std::vector<Interaction>& in) {
    std::vector<Interaction> out;
    std::vector<double> sums;
    std::vector<int> counts;
    std::unordered_map<std::string, std::size_t> slot;
    slot.reserve(in.size() * 2);
    for (const auto& it : in) {
        std::string key = it.user;
        key.push_back('\x1f');
        key += it.item;
        const auto [entry, fresh] = slot.try_emplace(key, out.size());
        if (fresh) {
            out.push_back(it);
            sums.push_back(it.rating);
            counts.push_back(1);
        } else {
            const std::size_t i = entry->second;
            sums[i] += it.rating;
            counts[i] += 1;
            out[i].timestamp = std::min(out[i].timestamp, it.timestamp);
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].rating = sums[i] / counts[i];
    return out;
}

struct DegreeThresholds {
    int min_user = 0;
    int min_item = 0;
    /// Strict-reproduction mode: apply the thresholds once instead of
    /// peeling to a fixed point.
    bool single_pass = false;
};

/// Drop users/items with too few interactions. By default removal is
/// repeated until no node falls below its threshold; the result is the
/// maximal subgraph satisfying both bounds.
inline std::vector<Interaction> filter_min_degree(const std::vector<Interaction>& in,
                                                  const DegreeThresholds& t) {
    if (t.min_user < 0 || t.min_item < 0)
        throw std::invalid_argument("degree thresholds must be >= 0");
    if (t.min_user == 0 && t.min_item == 0)
        return in;

    // Intern keys once so each pass is integer counting.
    std::unordered_map<std::string, int> users, items;
    std::vector<int> uid(in.size()), iid(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) {
        uid[k] = users.try_emplace(in[k].user, static_cast<int>(users.size()))
                     .first->second;
        iid[k] = items.try_emplace(in[k].item, static_cast<int>(items.size()))
                     .first->second;
    }

    std::vector<char> alive(in.size(), 1);
    std::vector<int> du(users.size()), di(items.size());
    while (true) {
        std::fill(du.begin(), du.end(), 0);
        std::fill(di.begin(), di.end(), 0);
        for (std::size_t k = 0; k < in.size(); ++k)
            if (alive[k]) {
                ++du[uid[k]];
                ++di[iid[k]];
            }
        bool changed = false;
        for (std::size_t k = 0; k < in.size(); ++k)
            if (alive[k] && (du[uid[k]] < t.min_user || di[iid[k]] < t.min_item)) {
                alive[k] = 0;
                changed = true;
            }
        if (!changed || t.single_pass)
            break;
    }

    std::vector<Interaction> out;
    for (std::size_t k = 0; k < in.size(); ++k)
        if (alive[k])
            out.push_back(in[k]);
    return out;
}

}  // namespace bgrank
