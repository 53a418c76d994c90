#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace quantcal {

// Validated, strictly increasing set of quantile levels in (0,1).
class QuantileLevels {
public:
    // Throws InputError unless every level lies in (0,1) and the sequence is
    // strictly increasing.
    explicit QuantileLevels(std::vector<double> levels);

    const std::vector<double>& values() const { return levels_; }
    std::size_t size() const { return levels_.size(); }
    double operator[](std::size_t i) const { return levels_[i]; }

    // Smallest gap between consecutive levels and the boundary of (0,1):
    // min(alpha_1, 1 - alpha_m, min_i alpha_{i+1} - alpha_i). Always > 0.
    double min_tail_distance() const { return min_tail_distance_; }

private:
    std::vector<double> levels_;
    double min_tail_distance_;
};

// Pinball loss for a single level: alpha * (y - q) when y >= q, else
// (1 - alpha) * (q - y). Requires alpha in (0,1).
double quantile_loss(double alpha, double q, double y);

// Sum of pinball losses across all levels. Requires q.size() == levels.size().
double aggregated_quantile_loss(const QuantileLevels& levels,
                                const std::vector<double>& q, double y);

// Per-level coverage indicators 1{y <= q_i}. Ties count as covered.
std::vector<std::uint8_t> coverage_indicators(const std::vector<double>& q,
                                              double y);

// Subgradient of the aggregated loss at offsets theta for base forecasts b:
// entry i is 1{y <= b_i + theta_i} - alpha_i. Each entry lies in (-1, 1) and
// the Euclidean norm is at most sqrt(levels.size()).
std::vector<double> loss_gradient(const QuantileLevels& levels,
                                  const std::vector<double>& b,
                                  const std::vector<double>& theta, double y);

// Gradient evaluated directly at forecast values q (entry 1{y<=q_i} - alpha_i).
std::vector<double> gradient_at_forecast(const QuantileLevels& levels,
                                         const std::vector<double>& q, double y);

// Interval score at nominal miss rate beta for the central interval [lo, hi]:
// (hi - lo) + (2 / beta) * max(lo - y, y - hi, 0).
// Requires beta in (0,1) and lo <= hi.
double interval_score(double beta, double lo, double hi, double y);

// Weighted interval score: sum over beta of beta * interval_score(beta, ...).
// Each beta needs the levels beta/2 and 1-beta/2 present in `levels` (matched
// within 1e-12); a missing level raises InputError, as do crossing forecasts.
double weighted_interval_score(const std::vector<double>& betas,
                               const QuantileLevels& levels,
                               const std::vector<double>& forecasts, double y);

} // namespace quantcal
