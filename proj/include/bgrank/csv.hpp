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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bgrank/common.hpp"

namespace bgrank {

/// Split one CSV line on `delim`. Fields are trimmed; no quoting support
/// (the rating-file formats handled here are plain comma-separated keys
/// and numbers).
inline std::vector<std::string> split_fields(std::string_view line, char delim = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(trim(line.substr(start)));
            break;
        }
        out.emplace_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

struct CsvRow {
    std::size_t line_no = 0;  // 1-based
    std::vector<std::string> fields;
    std::string raw;
};

/// Stream non-blank rows of a CSV file to `fn(const CsvRow&)`.
template <class Fn>
inline void for_each_csv_row(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in)
        throw FileError("cannot open file: " + path.string());
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;
        fn(CsvRow{no, split_fields(line), line});
    }
}

/// Write-temp-then-rename file writer. The target appears atomically on
/// commit(); an uncommitted writer cleans its temporary up on destruction.
class AtomicWriter {
  public:
    explicit AtomicWriter(std::filesystem::path target)
        : target_(std::move(target)), tmp_(target_.string() + ".tmp") {
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!out_)
            throw FileError("cannot open file for writing: " + tmp_.string());
    }

    AtomicWriter(const AtomicWriter&) = delete;
    AtomicWriter& operator=(const AtomicWriter&) = delete;

    ~AtomicWriter() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    std::ofstream& stream() { return out_; }

    void commit() {
        out_.flush();
        if (!out_)
            throw FileError("write failed: " + tmp_.string());
        out_.close();
        std::filesystem::rename(tmp_, target_);
        committed_ = true;
    }

  private:
    std::filesystem::path target_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

/// Shortest exact decimal form that round-trips a double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back{};
    try_parse_double(buf, back);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char probe[40];
            std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
            if (try_parse_double(probe, back) && back == v)
                return probe;
        }
    }
    return buf;
}

}  // namespace bgrank
