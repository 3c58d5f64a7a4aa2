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

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bgrank {

/// Seconds in one Julian year (365.25 days). Used as the unit of the
/// time-decay exponent.
inline constexpr std::int64_t kSecondsPerYear = 31557600;

/// An input file is missing or unreadable.
struct FileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mutually incompatible options were combined.
struct ConflictError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline bool try_parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty())
        return false;
    const char* last = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), last, out);
    return ec == std::errc() && p == last && std::isfinite(out);
}

inline bool try_parse_int(std::string_view s, std::int64_t& out) {
    s = trim(s);
    if (s.empty())
        return false;
    const char* last = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), last, out);
    return ec == std::errc() && p == last;
}

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Calendar helpers. Everything is UTC; metadata dates resolve to midnight.
// ---------------------------------------------------------------------------

inline std::int64_t utc_midnight(int y, unsigned m, unsigned d) {
    using namespace std::chrono;
    const sys_days day{year{y} / static_cast<int>(m) / static_cast<int>(d)};
    return duration_cast<seconds>(day.time_since_epoch()).count();
}

/// Strict `YYYY-MM-DD` parse; the result is midnight UTC of that day.
inline bool parse_iso_date(std::string_view s, std::int64_t& out) {
    s = trim(s);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        return false;
    std::int64_t y{}, m{}, d{};
    if (!try_parse_int(s.substr(0, 4), y) || !try_parse_int(s.substr(5, 2), m) ||
        !try_parse_int(s.substr(8, 2), d))
        return false;
    using namespace std::chrono;
    const year_month_day ymd{year{static_cast<int>(y)} / static_cast<int>(m) /
                             static_cast<int>(d)};
    if (!ymd.ok())
        return false;
    out = utc_midnight(static_cast<int>(y), static_cast<unsigned>(m),
                       static_cast<unsigned>(d));
    return true;
}

inline int utc_year(std::int64_t epoch_seconds) {
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(sys_seconds{seconds{epoch_seconds}})};
    return static_cast<int>(ymd.year());
}

/// Midnight UTC of January 1st of `y`. Edges strictly before this instant
/// belong to award-year snapshots for year `y`.
inline std::int64_t year_start(int y) { return utc_midnight(y, 1, 1); }

inline std::string format_utc(std::int64_t epoch_seconds) {
    using namespace std::chrono;
    const sys_seconds tp{seconds{epoch_seconds}};
    const auto day = floor<days>(tp);
    const year_month_day ymd{day};
    const hh_mm_ss tod{tp - day};
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long>(tod.hours().count()),
                  static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

// ---------------------------------------------------------------------------
// Seeded RNG with hand-rolled variate generation so that streams are stable
// across standard-library implementations.
// ---------------------------------------------------------------------------

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Box-Muller normal variate.
    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = 1.0 - u01();  // (0, 1]
        const double u2 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586 * u2);
    }

    /// Knuth inversion, split for large means (Poisson sums are Poisson).
    int poisson(double lambda) {
        int total = 0;
        while (lambda > 30.0) {
            total += poisson_small(30.0);
            lambda -= 30.0;
        }
        return total + poisson_small(lambda);
    }

    /// Uniform integer in [0, n), rejection sampled.
    std::int64_t below(std::int64_t n) {
        const std::uint64_t span = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<std::int64_t>(x % span);
    }

    std::uint64_t bits() { return gen_(); }

  private:
    int poisson_small(double lambda) {
        if (lambda <= 0.0)
            return 0;
        const double limit = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01();
        } while (p > limit);
        return k - 1;
    }

    std::mt19937_64 gen_;
};

}  // namespace bgrank
