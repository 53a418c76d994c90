#include "quantcal/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "quantcal/errors.hpp"
#include "quantcal/isotonic.hpp"

namespace quantcal {

double empirical_coverage(const std::vector<StepRecord>& records,
                          std::size_t level_index) {
    if (records.empty()) throw InputError("empirical_coverage: no records");
    long hits = 0;
    for (const StepRecord& r : records) {
        if (level_index >= r.coverage.size())
            throw InputError("empirical_coverage: level index out of range");
        hits += r.coverage[level_index];
    }
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::vector<double> per_level_coverage(const std::vector<StepRecord>& records) {
    if (records.empty()) throw InputError("per_level_coverage: no records");
    const std::size_t n = records.front().coverage.size();
    std::vector<double> cov(n, 0.0);
    for (const StepRecord& r : records) {
        if (r.coverage.size() != n)
            throw InputError("per_level_coverage: inconsistent level counts");
        for (std::size_t i = 0; i < n; ++i) cov[i] += r.coverage[i];
    }
    for (double& c : cov) c /= static_cast<double>(records.size());
    return cov;
}

double calibration_error(const std::vector<StepRecord>& records,
                         const QuantileLevels& levels) {
    const std::vector<double> cov = per_level_coverage(records);
    if (cov.size() != levels.size())
        throw InputError("calibration_error: level count mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < cov.size(); ++i)
        total += std::abs(cov[i] - levels[i]);
    return total / static_cast<double>(cov.size());
}

double max_coverage_gap(const std::vector<StepRecord>& records,
                        const QuantileLevels& levels) {
    const std::vector<double> cov = per_level_coverage(records);
    if (cov.size() != levels.size())
        throw InputError("max_coverage_gap: level count mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < cov.size(); ++i)
        worst = std::max(worst, std::abs(cov[i] - levels[i]));
    return worst;
}

double average_gradient_norm(const std::vector<StepRecord>& records) {
    if (records.empty()) throw InputError("average_gradient_norm: no records");
    const std::size_t n = records.front().gradient.size();
    std::vector<double> mean(n, 0.0);
    for (const StepRecord& r : records) {
        if (r.gradient.size() != n)
            throw InputError("average_gradient_norm: inconsistent level counts");
        for (std::size_t i = 0; i < n; ++i) mean[i] += r.gradient[i];
    }
    double sq = 0.0;
    for (double m : mean) {
        const double v = m / static_cast<double>(records.size());
        sq += v * v;
    }
    return std::sqrt(sq);
}

double crossing_fraction(const std::vector<StepRecord>& records) {
    if (records.empty()) throw InputError("crossing_fraction: no records");
    long crossed = 0;
    for (const StepRecord& r : records)
        crossed += is_nondecreasing(r.forecast) ? 0 : 1;
    return static_cast<double>(crossed) / static_cast<double>(records.size());
}

double residual_bound(const std::vector<StepRecord>& records) {
    double worst = 0.0;
    for (const StepRecord& r : records)
        for (double b : r.base) worst = std::max(worst, std::abs(r.y - b));
    return worst;
}

double empirical_quantile_type1(std::vector<double> values, double alpha) {
    if (values.empty())
        throw InputError("empirical_quantile_type1: empty sample");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InputError("empirical_quantile_type1: alpha must lie in (0,1]");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::size_t k = static_cast<std::size_t>(std::ceil(alpha * n));
    if (k < 1) k = 1;
    if (k > values.size()) k = values.size();
    return values[k - 1];
}

RegretResult compute_regret(const std::vector<StepRecord>& records,
                            const QuantileLevels& levels) {
    if (records.empty()) throw InputError("compute_regret: no records");
    const std::size_t n = levels.size();
    const std::size_t T = records.size();

    std::vector<double> comparator(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> residuals(T);
        for (std::size_t t = 0; t < T; ++t)
            residuals[t] = records[t].y - records[t].base[i];
        comparator[i] = empirical_quantile_type1(std::move(residuals), levels[i]);
    }

    bool feasible = true;
    for (const StepRecord& r : records) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (r.base[i] + comparator[i] > r.base[i + 1] + comparator[i + 1]) {
                feasible = false;
                break;
            }
        }
        if (!feasible) break;
    }

    RegretResult out;
    out.comparator_feasible = feasible;
    out.comparator = feasible ? comparator : std::vector<double>(n, 0.0);

    double played = 0.0, vs_comp = 0.0, vs_zero = 0.0;
    std::vector<double> shifted(n);
    for (const StepRecord& r : records) {
        played += r.loss;
        for (std::size_t i = 0; i < n; ++i) shifted[i] = r.base[i] + out.comparator[i];
        vs_comp += aggregated_quantile_loss(levels, shifted, r.y);
        vs_zero += aggregated_quantile_loss(levels, r.base, r.y);
    }
    const double Td = static_cast<double>(T);
    out.regret = (played - vs_comp) / Td;
    out.regret_vs_zero = (played - vs_zero) / Td;
    return out;
}

// ---- PIT ---------------------------------------------------------------------

bool pit_degenerate(const std::vector<double>& q) {
    if (q.empty()) throw InputError("pit_degenerate: empty forecast");
    return q.front() == q.back();
}

double pit_value(const QuantileLevels& levels, const std::vector<double>& q,
                 double y) {
    const std::size_t m = levels.size();
    if (m < 3) throw InputError("pit_value: at least 3 levels required");
    if (q.size() != m) throw InputError("pit_value: forecast size mismatch");
    if (!is_nondecreasing(q))
        throw InputError("pit_value: forecasts must be non-crossing");
    const std::vector<double>& a = levels.values();

    // Fully tied forecast: fall back to unit-rate exponential tails.
    if (q.front() == q.back()) {
        const double v = q.front();
        if (y < v) return a.front() * std::exp(y - v);
        if (y > v) return 1.0 - (1.0 - a.back()) * std::exp(-(y - v));
        return a.back();
    }

    // y lands exactly on a forecast value: largest level of the tied block.
    for (std::size_t i = m; i-- > 0;) {
        if (q[i] == y) return a[i];
    }

    if (y < q.front()) {
        std::size_t i = 0;
        while (q[i + 1] == q[i]) ++i;
        const double rho = (a[i + 1] - a[i]) / (q[i + 1] - q[i]);
        const double lam = rho / a.front();
        return a.front() * std::exp(lam * (y - q.front()));
    }
    if (y > q.back()) {
        std::size_t i = m - 2;
        while (q[i + 1] == q[i]) --i;
        const double rho = (a[i + 1] - a[i]) / (q[i + 1] - q[i]);
        const double lam = rho / (1.0 - a.back());
        return 1.0 - (1.0 - a.back()) * std::exp(-lam * (y - q.back()));
    }

    // Interior: linear between the nearest distinct forecast values.
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (q[i] < y && y < q[i + 1])
            return a[i] + (y - q[i]) / (q[i + 1] - q[i]) * (a[i + 1] - a[i]);
    }
    throw InputError("pit_value: unreachable interior case");
}

double pit_entropy(const std::vector<double>& pit_values, int bins) {
    if (bins < 2) throw InputError("pit_entropy: bins must be >= 2");
    if (pit_values.empty()) throw InputError("pit_entropy: no values");
    std::vector<long> hist(static_cast<std::size_t>(bins), 0);
    for (double u : pit_values) {
        if (!(u > 0.0 && u <= 1.0))
            throw InputError("pit_entropy: values must lie in (0,1]");
        int k = static_cast<int>(u * bins);
        if (k >= bins) k = bins - 1;
        ++hist[static_cast<std::size_t>(k)];
    }
    const double total = static_cast<double>(pit_values.size());
    double ent = 0.0;
    for (long c : hist) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        ent -= p * std::log(p);
    }
    return ent / std::log(static_cast<double>(bins));
}

PitSummary pit_summary(const std::vector<StepRecord>& records,
                       const QuantileLevels& levels, int bins) {
    if (records.empty()) throw InputError("pit_summary: no records");
    PitSummary out;
    out.values.reserve(records.size());
    for (const StepRecord& r : records) {
        out.values.push_back(pit_value(levels, r.forecast, r.y));
        if (pit_degenerate(r.forecast)) ++out.degenerate_steps;
    }
    out.entropy = pit_entropy(out.values, bins);
    return out;
}

// ---- central intervals ---------------------------------------------------------

namespace {

std::size_t level_index(const QuantileLevels& levels, double target) {
    const std::vector<double>& v = levels.values();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i] - target) <= 1e-12) return i;
    throw InputError("central_intervals: required level missing from grid");
}

} // namespace

std::vector<CentralInterval> central_intervals(const QuantileLevels& levels,
                                               const std::vector<double>& q,
                                               const std::vector<double>& betas) {
    if (q.size() != levels.size())
        throw InputError("central_intervals: forecast size mismatch");
    if (!is_nondecreasing(q))
        throw InputError("central_intervals: forecasts must be non-crossing");
    std::vector<CentralInterval> out;
    out.reserve(betas.size());
    for (double beta : betas) {
        if (!(beta > 0.0 && beta < 1.0))
            throw InputError("central_intervals: miss rate must lie in (0,1)");
        CentralInterval ci;
        ci.miss_rate = beta;
        ci.lo = q[level_index(levels, beta / 2.0)];
        ci.hi = q[level_index(levels, 1.0 - beta / 2.0)];
        out.push_back(ci);
    }
    return out;
}

// ---- bounds --------------------------------------------------------------------

namespace {

void check_bound_args(double R, double eta, long T) {
    if (R < 0.0) throw InputError("bound: residual bound must be >= 0");
    if (!(eta > 0.0)) throw InputError("bound: learning rate must be positive");
    if (T < 1) throw InputError("bound: horizon must be >= 1");
}

} // namespace

double theorem1_bound(const QuantileLevels& levels, double R, double eta,
                      long T, double init_norm) {
    check_bound_args(R, eta, T);
    if (init_norm < 0.0) throw InputError("bound: init norm must be >= 0");
    const double A = static_cast<double>(levels.size());
    const double dA = levels.min_tail_distance();
    const double Td = static_cast<double>(T);
    return 2.0 * init_norm / (eta * Td) +
           std::sqrt(A / Td + 2.0 * R * std::pow(A, 1.5) / (eta * dA * Td));
}

double delayed_theorem1_bound(const QuantileLevels& levels, double R, double eta,
                              long T, double init_norm, long delay) {
    check_bound_args(R, eta, T);
    if (init_norm < 0.0) throw InputError("bound: init norm must be >= 0");
    if (delay < 0) throw InputError("bound: delay must be >= 0");
    const double A = static_cast<double>(levels.size());
    const double dA = levels.min_tail_distance();
    const double Td = static_cast<double>(T);
    const double D = static_cast<double>(delay);
    return 2.0 * init_norm / (eta * Td) +
           std::sqrt(A * (2.0 * D + 1.0) / Td +
                     2.0 * R * std::pow(A, 1.5) / (eta * dA * Td)) +
           D * std::sqrt(A) / Td;
}

double prop8_regret_bound(const QuantileLevels& levels, double R, double eta,
                          long T) {
    check_bound_args(R, eta, T);
    const double A = static_cast<double>(levels.size());
    return R * R * A / (2.0 * eta * static_cast<double>(T)) + 2.0 * eta * A;
}

double delayed_prop8_regret_bound(const QuantileLevels& levels, double R,
                                  double eta, long T, long delay) {
    check_bound_args(R, eta, T);
    if (delay < 0) throw InputError("bound: delay must be >= 0");
    const double A = static_cast<double>(levels.size());
    return R * R * A / (2.0 * eta * static_cast<double>(T)) +
           2.0 * eta * A * (static_cast<double>(delay) + 1.0);
}

double prop1_gap_bound(double theta1, double R, double eta, long T) {
    check_bound_args(R, eta, T);
    return (2.0 * std::abs(theta1) + R + eta) / (eta * static_cast<double>(T));
}

double point_base_gap_bound(const QuantileLevels& levels, double R, double eta,
                            long T, double init_norm) {
    check_bound_args(R, eta, T);
    if (init_norm < 0.0) throw InputError("bound: init norm must be >= 0");
    const double A = static_cast<double>(levels.size());
    const double dA = levels.min_tail_distance();
    const double Td = static_cast<double>(T);
    const double A32 = std::pow(A, 1.5);
    return 2.0 * init_norm / (eta * Td) + std::sqrt(A) / Td +
           A32 / (2.0 * dA * Td) + R * A32 / (dA * eta * Td) +
           A32 / (std::sqrt(3.0) * Td);
}

double hidden_played_distance_bound(const QuantileLevels& levels, double eta) {
    if (!(eta > 0.0)) throw InputError("bound: learning rate must be positive");
    return eta * std::pow(static_cast<double>(levels.size()), 1.5) /
           std::sqrt(3.0);
}

double restorativity_radius(const QuantileLevels& levels, double R) {
    if (R < 0.0) throw InputError("bound: residual bound must be >= 0");
    return R * std::pow(static_cast<double>(levels.size()), 1.5) /
           levels.min_tail_distance();
}

} // namespace quantcal
