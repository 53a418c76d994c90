#include "quantcal/runner_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "quantcal/adversarial.hpp"
#include "quantcal/errors.hpp"
#include "quantcal/isotonic.hpp"
#include "quantcal/metrics.hpp"
#include "quantcal/rng.hpp"

namespace quantcal {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool starts_with(const std::string& s, const char* prefix) {
    return s.rfind(prefix, 0) == 0;
}

[[noreturn]] void parse_fail(const std::string& path, long line,
                             const std::string& what) {
    throw ParseError(path + ", line " + std::to_string(line) + ": " + what);
}

} // namespace

Series read_series(const std::string& path, const ReadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    strip_cr(line);
    const std::vector<std::string> header = split_csv(line);
    if (header.size() < 3)
        parse_fail(path, 1, "header needs a time column, y, and at least one q_<level> column");

    const std::string& time_name = header[0];
    if (time_name.empty() || time_name == "y" || starts_with(time_name, "q_") ||
        starts_with(time_name, "cov_"))
        parse_fail(path, 1, "first column must be the time column");

    long y_col = -1;
    std::vector<std::size_t> q_cols;
    std::vector<double> levels;
    std::vector<std::size_t> cov_cols;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (name == "y") {
            if (y_col >= 0) parse_fail(path, 1, "duplicate y column");
            y_col = static_cast<long>(c);
        } else if (starts_with(name, "q_")) {
            const auto lvl = parse_double(name.substr(2));
            if (!lvl) parse_fail(path, 1, "malformed level in column '" + name + "'");
            if (!levels.empty() && !(levels.back() < *lvl))
                parse_fail(path, 1, "forecast columns must be in strictly increasing level order (column '" + name + "')");
            levels.push_back(*lvl);
            q_cols.push_back(c);
        } else if (starts_with(name, "cov_")) {
            cov_cols.push_back(c);
        } else {
            parse_fail(path, 1, "unexpected column '" + name + "'");
        }
    }
    if (y_col < 0) parse_fail(path, 1, "missing y column");
    if (q_cols.empty()) parse_fail(path, 1, "no q_<level> columns");
    QuantileLevels validated(levels);  // enforces the (0,1) range

    Series out;
    out.time_name = time_name;
    out.levels = validated.values();

    std::unordered_set<std::string> seen;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) parse_fail(path, line_no, "empty row");
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != header.size())
            parse_fail(path, line_no,
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
        const std::string& key = fields[0];
        if (key.empty()) parse_fail(path, line_no, "empty time key");
        if (!seen.insert(key).second)
            parse_fail(path, line_no, "duplicate time key '" + key + "'");
        out.time.push_back(key);

        const auto yv = parse_double(fields[static_cast<std::size_t>(y_col)]);
        if (!yv)
            parse_fail(path, line_no, "malformed number '" +
                                          fields[static_cast<std::size_t>(y_col)] +
                                          "' in column 'y'");
        out.y.push_back(*yv);

        std::vector<double> row(q_cols.size());
        for (std::size_t i = 0; i < q_cols.size(); ++i) {
            const std::string& cell = fields[q_cols[i]];
            const auto v = parse_double(cell);
            if (!v)
                parse_fail(path, line_no, "malformed number '" + cell +
                                              "' in column '" + header[q_cols[i]] + "'");
            row[i] = *v;
        }
        for (std::size_t c : cov_cols) {
            if (!parse_double(fields[c]))
                parse_fail(path, line_no, "malformed number '" + fields[c] +
                                              "' in column '" + header[c] + "'");
        }
        if (!is_nondecreasing(row) && !options.allow_crossing) {
            if (options.repair_base) {
                row = pava(row);
                out.repaired = true;
            } else {
                parse_fail(path, line_no,
                           "forecast values cross; pass --repair-base=isotonic to re-project");
            }
        }
        out.base.push_back(std::move(row));
    }
    if (out.time.empty()) throw ParseError(path + ": no data rows");

    // Ordering: numeric when every key parses as a number, lexicographic
    // otherwise (ISO dates sort correctly either way).
    bool all_numeric = true;
    std::vector<double> numeric(out.time.size());
    for (std::size_t i = 0; i < out.time.size(); ++i) {
        const auto v = parse_double(out.time[i]);
        if (!v) {
            all_numeric = false;
            break;
        }
        numeric[i] = *v;
    }
    for (std::size_t i = 1; i < out.time.size(); ++i) {
        const bool ok = all_numeric ? numeric[i - 1] < numeric[i]
                                    : out.time[i - 1] < out.time[i];
        if (!ok)
            parse_fail(path, static_cast<long>(i) + 2,
                       "rows not sorted by time (key '" + out.time[i] + "')");
    }
    return out;
}

void write_forecast_csv(const std::string& path, const ForecastTable& table) {
    const std::size_t T = table.time.size();
    const std::size_t n = table.levels.size();
    if (table.y.size() != T || table.q.size() != T)
        throw InputError("write_forecast_csv: column lengths differ");
    if (!table.cov.empty() && table.cov.size() != T)
        throw InputError("write_forecast_csv: coverage length differs");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open output file: " + path);

    out << table.time_name << ",y";
    for (double lvl : table.levels) out << ",q_" << format_double(lvl);
    if (!table.cov.empty())
        for (double lvl : table.levels) out << ",cov_" << format_double(lvl);
    out << "\n";

    for (std::size_t t = 0; t < T; ++t) {
        if (table.q[t].size() != n)
            throw InputError("write_forecast_csv: forecast row width mismatch");
        out << table.time[t] << "," << format_double(table.y[t]);
        for (double v : table.q[t]) out << "," << format_double(v);
        if (!table.cov.empty()) {
            if (table.cov[t].size() != n)
                throw InputError("write_forecast_csv: coverage row width mismatch");
            for (std::uint8_t c : table.cov[t]) out << "," << (c ? "1" : "0");
        }
        out << "\n";
    }
    out.flush();
    if (!out) throw InputError("write failed: " + path);
}

// ---- report assembly -----------------------------------------------------------

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool all_rows_constant(const std::vector<StepRecord>& records) {
    for (const StepRecord& r : records)
        for (std::size_t i = 1; i < r.base.size(); ++i)
            if (r.base[i] != r.base[0]) return false;
    return true;
}

ordered_json coverage_object(const QuantileLevels& levels,
                             const std::vector<double>& cov) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < cov.size(); ++i)
        obj[format_double(levels[i])] = cov[i];
    return obj;
}

ordered_json bounds_object(const QuantileLevels& levels,
                           const std::vector<StepRecord>& records,
                           const VariantSpec& spec) {
    ordered_json b = ordered_json::object();
    if (spec.adaptive_eta) return b;  // no guarantee covers a varying rate
    const double R = residual_bound(records);
    const long T = static_cast<long>(records.size());
    const double gap = max_coverage_gap(records, levels);
    const double init =
        spec.theta1.empty() ? 0.0 : norm2(spec.theta1);
    const bool zero_init = init == 0.0;

    switch (spec.kind) {
        case VariantKind::multiqt:
        case VariantKind::multiqt_delayed: {
            const long D = spec.delay;
            const double t1 =
                D > 0 ? delayed_theorem1_bound(levels, R, spec.eta, T, init, D)
                      : theorem1_bound(levels, R, spec.eta, T, init);
            b["theorem1"] = t1;
            b["theorem1_held"] = gap <= t1;
            const double p8 =
                D > 0 ? delayed_prop8_regret_bound(levels, R, spec.eta, T, D)
                      : prop8_regret_bound(levels, R, spec.eta, T);
            b["prop8"] = p8;
            if (zero_init) {
                const RegretResult reg = compute_regret(records, levels);
                b["prop8_held"] =
                    reg.regret <= p8 && reg.regret_vs_zero <= p8;
            } else {
                b["prop8_held"] = nullptr;
            }
            if (spec.kind == VariantKind::multiqt && all_rows_constant(records)) {
                const double pb = point_base_gap_bound(levels, R, spec.eta, T, init);
                b["point_base"] = pb;
                b["point_base_held"] = gap <= pb;
            }
            break;
        }
        case VariantKind::qt_independent: {
            // Per-level trackers: the scalar prefix bound applies level-wise.
            ordered_json arr = ordered_json::array();
            bool held = true;
            const std::vector<double> cov = per_level_coverage(records);
            for (std::size_t i = 0; i < levels.size(); ++i) {
                const double th1 = spec.theta1.empty() ? 0.0 : spec.theta1[i];
                const double bound = prop1_gap_bound(th1, R, spec.eta, T);
                arr.push_back(bound);
                if (std::abs(cov[i] - levels[i]) > bound) held = false;
            }
            b["prop1"] = arr;
            b["prop1_held"] = held;
            break;
        }
        default:
            break;  // no deterministic guarantee claimed for these variants
    }
    return b;
}

ordered_json build_report(const QuantileLevels& levels,
                          const std::vector<StepRecord>& records,
                          const VariantSpec* spec, bool repaired, int pit_bins) {
    ordered_json rep;
    rep["variant"] = spec ? ordered_json(variant_name(spec->kind)) : nullptr;
    rep["levels"] = levels.values();
    rep["T"] = records.size();
    if (spec) {
        if (spec->adaptive_eta)
            rep["eta"] = "auto";
        else
            rep["eta"] = spec->eta;
        rep["delay"] = spec->delay;
        if (spec->kind == VariantKind::multiqt_eps) rep["eps"] = spec->eps;
        rep["theta1"] = spec->theta1.empty()
                            ? std::vector<double>(levels.size(), 0.0)
                            : spec->theta1;
    } else {
        rep["eta"] = nullptr;
    }

    rep["coverage"] = coverage_object(levels, per_level_coverage(records));
    rep["calibration_error"] = calibration_error(records, levels);
    double loss = 0.0;
    for (const StepRecord& r : records) loss += r.loss;
    rep["quantile_loss"] = loss / static_cast<double>(records.size());
    const double crossing = crossing_fraction(records);
    rep["crossing_fraction"] = crossing;

    if (levels.size() >= 3 && crossing == 0.0) {
        const PitSummary pit = pit_summary(records, levels, pit_bins);
        rep["pit_entropy"] = pit.entropy;
        rep["pit_degenerate_steps"] = pit.degenerate_steps;
    } else {
        rep["pit_entropy"] = nullptr;
        rep["pit_degenerate_steps"] = nullptr;
    }

    if (spec) {
        const RegretResult reg = compute_regret(records, levels);
        rep["regret"] = reg.regret;
        rep["regret_comparator"] =
            reg.comparator_feasible ? "empirical_quantiles" : "zero_fallback";
        rep["regret_vs_zero"] = reg.regret_vs_zero;
    } else {
        rep["regret"] = nullptr;
        rep["regret_comparator"] = nullptr;
        rep["regret_vs_zero"] = nullptr;
    }

    rep["average_gradient_norm"] = average_gradient_norm(records);
    rep["residual_bound"] = residual_bound(records);
    rep["repaired_base"] = repaired;
    rep["bounds"] = spec ? bounds_object(levels, records, *spec)
                         : ordered_json::object();
    return rep;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open output file: " + path.string());
    out << text;
    out.flush();
    if (!out) throw InputError("write failed: " + path.string());
}

void write_calibration_csv(const std::filesystem::path& path,
                           const QuantileLevels& levels,
                           const std::vector<double>& cov) {
    std::string text = "level,desired,actual\n";
    for (std::size_t i = 0; i < levels.size(); ++i) {
        text += format_double(levels[i]);
        text += ",";
        text += format_double(levels[i]);
        text += ",";
        text += format_double(cov[i]);
        text += "\n";
    }
    write_text(path, text);
}

// ---- CLI ------------------------------------------------------------------------

struct RunArgs {
    std::string input;
    std::string out;
    std::string variant = "multiqt";
    std::string eta = "auto";
    std::string theta1;
    std::string repair;
    long delay = 0;
    double eps = 0.0;
    int pit_bins = 10;
};

VariantSpec make_spec(const RunArgs& a) {
    VariantSpec spec;
    spec.kind = variant_from_name(a.variant);
    if (a.eta == "auto") {
        spec.adaptive_eta = true;
    } else {
        const auto v = parse_double(a.eta);
        if (!v || !(*v > 0.0))
            throw UsageError("--eta must be a positive number or 'auto'");
        spec.eta = *v;
    }
    spec.delay = a.delay;
    spec.eps = a.eps;
    if (!a.theta1.empty()) {
        for (const std::string& cell : split_csv(a.theta1)) {
            const auto v = parse_double(cell);
            if (!v) throw UsageError("--theta1 must be a comma-separated number list");
            spec.theta1.push_back(*v);
        }
    }
    return spec;
}

std::filesystem::path prepare_out_dir(const std::string& out) {
    const std::filesystem::path dir(out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory: " + out);
    return dir;
}

int do_run(const RunArgs& a) {
    const VariantSpec spec = make_spec(a);
    ReadOptions opts;
    opts.repair_base = a.repair == "isotonic";
    const Series series = read_series(a.input, opts);
    const QuantileLevels levels(series.levels);
    const std::vector<StepRecord> records =
        run_series(spec, levels, series.base, series.y);

    const ordered_json report =
        build_report(levels, records, &spec, series.repaired, a.pit_bins);
    const auto dir = prepare_out_dir(a.out);
    write_text(dir / "report.json", report.dump(2) + "\n");

    ForecastTable table;
    table.time_name = series.time_name;
    table.time = series.time;
    table.y = series.y;
    table.levels = levels.values();
    table.q.reserve(records.size());
    table.cov.reserve(records.size());
    for (const StepRecord& r : records) {
        table.q.push_back(r.forecast);
        table.cov.push_back(r.coverage);
    }
    write_forecast_csv((dir / "corrected.csv").string(), table);
    write_calibration_csv(dir / "calibration.csv", levels,
                          per_level_coverage(records));
    std::cout << report.dump(2) << "\n";
    return 0;
}

int do_sweep(const RunArgs& a, const std::string& grid) {
    std::vector<double> etas;
    for (const std::string& cell : split_csv(grid)) {
        const auto v = parse_double(cell);
        if (!v || !(*v > 0.0))
            throw UsageError("--eta-grid must be a comma-separated list of positive numbers");
        etas.push_back(*v);
    }
    if (etas.empty()) throw UsageError("--eta-grid must not be empty");

    ReadOptions opts;
    opts.repair_base = a.repair == "isotonic";
    const Series series = read_series(a.input, opts);
    const QuantileLevels levels(series.levels);

    double R = 0.0;
    for (std::size_t t = 0; t < series.y.size(); ++t)
        for (double b : series.base[t])
            R = std::max(R, std::abs(series.y[t] - b));
    const double T = static_cast<double>(series.y.size());
    // Scale-matched reference rate from the calibration/sharpness tradeoff.
    const double eta_ref = (R > 0.0 ? R : 1.0) * std::pow(T, -1.0 / 3.0);

    std::string csv = "eta,calibration_error,quantile_loss,regret,reference\n";
    VariantSpec spec = make_spec(a);
    spec.adaptive_eta = false;
    std::vector<double> all = etas;
    all.push_back(eta_ref);
    for (std::size_t i = 0; i < all.size(); ++i) {
        spec.eta = all[i];
        const std::vector<StepRecord> records =
            run_series(spec, levels, series.base, series.y);
        double loss = 0.0;
        for (const StepRecord& r : records) loss += r.loss;
        loss /= T;
        const RegretResult reg = compute_regret(records, levels);
        csv += format_double(spec.eta);
        csv += ",";
        csv += format_double(calibration_error(records, levels));
        csv += ",";
        csv += format_double(loss);
        csv += ",";
        csv += format_double(reg.regret);
        csv += (i + 1 == all.size()) ? ",1\n" : ",0\n";
    }
    const auto dir = prepare_out_dir(a.out);
    write_text(dir / "sweep.csv", csv);
    std::cout << csv;
    return 0;
}

struct AdvArgs {
    std::string scenario;
    std::string out;
    double eta = 1.0;
    double alpha = -1.0;
    double beta = -1.0;
    double q0 = 0.0;
    double eps = 0.5;
    long repetitions = 0;
    long horizon = 10000;
};

int do_adversarial(const AdvArgs& a) {
    AdversarialStream stream{"", QuantileLevels({0.5}), {}, {}, {}, 0.0};
    if (a.scenario == "sorted_qt_cycle") {
        stream = gen_sorted_qt_cycle(a.eta, a.repetitions > 0 ? a.repetitions : 1250);
    } else if (a.scenario == "pgd_cycle") {
        const double alpha = a.alpha > 0.0 ? a.alpha : 0.2;
        const double beta = a.beta > 0.0 ? a.beta : 0.3;
        stream = gen_pgd_cycle(alpha, beta, a.eta, a.q0,
                               a.repetitions > 0 ? a.repetitions : 5000);
    } else if (a.scenario == "multiqt_sort_divergence") {
        const double alpha = a.alpha > 0.0 ? a.alpha : 0.3;
        const double beta = a.beta > 0.0 ? a.beta : 0.7;
        stream = gen_multiqt_sort_divergence(alpha, beta, a.eta, a.horizon);
    } else if (a.scenario == "eps_separated_divergence") {
        const double alpha = a.alpha > 0.0 ? a.alpha : 0.3;
        const double beta = a.beta > 0.0 ? a.beta : 0.7;
        stream = gen_eps_separated_divergence(alpha, beta, a.eta, a.eps, a.horizon);
    } else {
        throw UsageError("unknown scenario: " + a.scenario);
    }

    const long T = static_cast<long>(stream.y.size());
    const std::vector<StepRecord> target_records =
        run_series(stream.target, stream.levels, stream.base, stream.y);

    VariantSpec mspec;
    mspec.kind = VariantKind::multiqt;
    mspec.eta = a.eta;
    const std::vector<StepRecord> multiqt_records =
        run_series(mspec, stream.levels, stream.base, stream.y);
    const double bound =
        theorem1_bound(stream.levels, stream.residual_bound, a.eta, T);

    ordered_json cmp;
    cmp["scenario"] = stream.name;
    cmp["levels"] = stream.levels.values();
    cmp["T"] = T;
    cmp["eta"] = a.eta;
    cmp["target_variant"] = variant_name(stream.target.kind);
    cmp["target_coverage"] =
        coverage_object(stream.levels, per_level_coverage(target_records));
    cmp["target_max_gap"] = max_coverage_gap(target_records, stream.levels);
    cmp["multiqt_coverage"] =
        coverage_object(stream.levels, per_level_coverage(multiqt_records));
    cmp["multiqt_max_gap"] = max_coverage_gap(multiqt_records, stream.levels);
    cmp["theorem1"] = bound;
    cmp["multiqt_within_bound"] =
        max_coverage_gap(multiqt_records, stream.levels) <= bound;

    const auto dir = prepare_out_dir(a.out);
    ForecastTable table;
    table.time = std::vector<std::string>(static_cast<std::size_t>(T));
    for (long t = 0; t < T; ++t) table.time[static_cast<std::size_t>(t)] = std::to_string(t + 1);
    table.y = stream.y;
    table.levels = stream.levels.values();
    table.q = stream.base;
    write_forecast_csv((dir / "stream.csv").string(), table);
    write_text(dir / "comparison.json", cmp.dump(2) + "\n");
    std::cout << cmp.dump(2) << "\n";
    return 0;
}

int do_metrics(const std::string& input, int pit_bins, const std::string& out) {
    ReadOptions opts;
    opts.allow_crossing = true;
    const Series series = read_series(input, opts);
    const QuantileLevels levels(series.levels);
    std::vector<StepRecord> records;
    records.reserve(series.y.size());
    for (std::size_t t = 0; t < series.y.size(); ++t) {
        StepRecord r;
        r.base = series.base[t];
        r.forecast = series.base[t];
        r.y = series.y[t];
        r.coverage = coverage_indicators(r.forecast, r.y);
        r.loss = aggregated_quantile_loss(levels, r.forecast, r.y);
        r.gradient = gradient_at_forecast(levels, r.forecast, r.y);
        r.eta = 0.0;
        records.push_back(std::move(r));
    }
    const ordered_json report =
        build_report(levels, records, nullptr, false, pit_bins);
    if (!out.empty()) {
        const auto dir = prepare_out_dir(out);
        write_text(dir / "report.json", report.dump(2) + "\n");
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

struct GenArgs {
    std::string kind = "iid";
    std::string levels = "0.1,0.25,0.5,0.75,0.9";
    std::string out;
    long t = 10000;
    double scale = 1.0;
    double shift = 3.0;
};

std::uint64_t env_seed() {
    const char* raw = std::getenv("QUANTCAL_SEED");
    if (raw == nullptr || *raw == '\0') return 1;
    std::uint64_t v = 0;
    const char* last = raw + std::string(raw).size();
    const auto res = std::from_chars(raw, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw InputError("QUANTCAL_SEED must be an unsigned integer");
    return v;
}

int do_gen(const GenArgs& a) {
    if (a.t < 1) throw UsageError("--t must be >= 1");
    std::vector<double> levels;
    for (const std::string& cell : split_csv(a.levels)) {
        const auto v = parse_double(cell);
        if (!v) throw UsageError("--levels must be a comma-separated number list");
        levels.push_back(*v);
    }
    const QuantileLevels validated(levels);
    const std::size_t n = validated.size();
    const std::size_t T = static_cast<std::size_t>(a.t);

    Rng rng(env_seed());
    ForecastTable table;
    table.levels = validated.values();
    table.time.resize(T);
    table.y.resize(T);
    table.q.assign(T, std::vector<double>(n, 0.0));
    double walk = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        table.time[t] = std::to_string(t + 1);
        if (a.kind == "iid") {
            table.y[t] = rng.uniform(-a.scale, a.scale);
        } else if (a.kind == "piecewise") {
            table.y[t] = rng.uniform(-a.scale, a.scale) +
                         (t >= T / 2 ? a.shift * a.scale : 0.0);
        } else if (a.kind == "walk") {
            walk += rng.normal(0.0, 0.3 * a.scale);
            table.q[t].assign(n, walk);
            table.y[t] = walk + rng.uniform(-a.scale, a.scale);
        } else {
            throw UsageError("unknown --kind: " + a.kind);
        }
    }
    write_forecast_csv(a.out, table);
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"online multi-level quantile forecast recalibration"};
    app.require_subcommand(1);

    RunArgs run_args;
    std::string eta_grid;
    AdvArgs adv_args;
    GenArgs gen_args;
    std::string metrics_input, metrics_out;
    int metrics_bins = 10;

    const std::vector<std::string> variant_names = {
        "qt_independent", "multiqt",      "multiqt_delayed", "projected_gd",
        "posthoc_sort",   "posthoc_isotonic", "multiqt_sort", "multiqt_eps"};

    CLI::App* run = app.add_subcommand("run", "recalibrate one series");
    run->add_option("--input", run_args.input, "input CSV")->required();
    run->add_option("--out", run_args.out, "output directory")->required();
    run->add_option("--variant", run_args.variant, "tracker variant")
        ->check(CLI::IsMember(variant_names));
    run->add_option("--eta", run_args.eta, "learning rate or 'auto'");
    run->add_option("--delay", run_args.delay, "feedback delay (multiqt_delayed)");
    run->add_option("--eps", run_args.eps, "separation width (multiqt_eps)");
    run->add_option("--theta1", run_args.theta1, "initial offsets a,b,c");
    run->add_option("--repair-base", run_args.repair, "re-project crossing input rows")
        ->check(CLI::IsMember({"isotonic"}));
    run->add_option("--pit-bins", run_args.pit_bins, "PIT histogram bins")
        ->check(CLI::PositiveNumber);

    CLI::App* sweep = app.add_subcommand("sweep", "grid of learning rates");
    sweep->add_option("--input", run_args.input, "input CSV")->required();
    sweep->add_option("--out", run_args.out, "output directory")->required();
    sweep->add_option("--variant", run_args.variant, "tracker variant")
        ->check(CLI::IsMember(variant_names));
    sweep->add_option("--eta-grid", eta_grid, "comma-separated learning rates")
        ->required();
    sweep->add_option("--delay", run_args.delay, "feedback delay");
    sweep->add_option("--eps", run_args.eps, "separation width");
    sweep->add_option("--repair-base", run_args.repair, "re-project crossing input rows")
        ->check(CLI::IsMember({"isotonic"}));

    CLI::App* adv = app.add_subcommand("adversarial", "generate a failure stream");
    adv->add_option("--scenario", adv_args.scenario, "construction name")
        ->required()
        ->check(CLI::IsMember({"sorted_qt_cycle", "pgd_cycle",
                               "multiqt_sort_divergence",
                               "eps_separated_divergence"}));
    adv->add_option("--out", adv_args.out, "output directory")->required();
    adv->add_option("--eta", adv_args.eta, "learning rate");
    adv->add_option("--alpha", adv_args.alpha, "lower level");
    adv->add_option("--beta", adv_args.beta, "upper level");
    adv->add_option("--q0", adv_args.q0, "cycle anchor (pgd_cycle)");
    adv->add_option("--eps", adv_args.eps, "separation width");
    adv->add_option("--repetitions", adv_args.repetitions, "cycle repetitions");
    adv->add_option("--horizon", adv_args.horizon, "divergence stream length");

    CLI::App* metrics = app.add_subcommand("metrics", "evaluate a forecast CSV");
    metrics->add_option("--input", metrics_input, "forecast CSV")->required();
    metrics->add_option("--out", metrics_out, "output directory");
    metrics->add_option("--pit-bins", metrics_bins, "PIT histogram bins")
        ->check(CLI::PositiveNumber);

    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic series");
    gen->add_option("--kind", gen_args.kind, "iid | piecewise | walk")
        ->check(CLI::IsMember({"iid", "piecewise", "walk"}));
    gen->add_option("--t", gen_args.t, "number of steps");
    gen->add_option("--levels", gen_args.levels, "comma-separated levels");
    gen->add_option("--scale", gen_args.scale, "noise half-width");
    gen->add_option("--shift", gen_args.shift, "piecewise jump (times scale)");
    gen->add_option("--out", gen_args.out, "output CSV")->required();

    std::vector<const char*> argv;
    argv.push_back("quantcal");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return do_run(run_args);
        if (sweep->parsed()) return do_sweep(run_args, eta_grid);
        if (adv->parsed()) return do_adversarial(adv_args);
        if (metrics->parsed()) return do_metrics(metrics_input, metrics_bins, metrics_out);
        if (gen->parsed()) return do_gen(gen_args);
        throw UsageError("missing subcommand");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace quantcal
