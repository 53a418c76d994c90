#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quantcal/losses.hpp"
#include "quantcal/trackers.hpp"

namespace quantcal {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

// Wide per-step table: one time key, one observation, one forecast per level,
// optional coverage indicators.
struct ForecastTable {
    std::string time_name = "t";
    std::vector<std::string> time;
    std::vector<double> y;
    std::vector<double> levels;
    std::vector<std::vector<double>> q;            // one row per step
    std::vector<std::vector<std::uint8_t>> cov;    // empty = omit columns
};

// Input series for a run: time keys, observations, and base forecasts.
struct Series {
    std::string time_name;
    std::vector<std::string> time;
    std::vector<double> y;
    std::vector<std::vector<double>> base;
    std::vector<double> levels;
    bool repaired = false;  // some rows were re-projected while reading
};

struct ReadOptions {
    // Re-project crossing forecast rows instead of rejecting them.
    bool repair_base = false;
    // Accept crossing rows as-is (forecast evaluation mode).
    bool allow_crossing = false;
};

// Strict CSV reader. Expects a header `<time>,y,q_<l1>,...` with levels in
// strictly increasing order; `cov_*` columns are parsed and ignored. Raises
// ParseError with line/column context on malformed cells, duplicate or
// unsorted time keys, and crossing forecast rows (subject to options).
Series read_series(const std::string& path, const ReadOptions& options = {});

// Writes the wide CSV with format_double cells; read_series(write(x)) gives
// back bit-identical numbers.
void write_forecast_csv(const std::string& path, const ForecastTable& table);

// Entry point shared by the `quantcal` binary and in-process tests.
// Returns the process exit code: 0 ok, 1 input/data error, 2 usage error.
int run_cli(const std::vector<std::string>& args);

} // namespace quantcal
