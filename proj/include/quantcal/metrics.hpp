#pragma once

#include <cstddef>
#include <vector>

#include "quantcal/losses.hpp"
#include "quantcal/trackers.hpp"

namespace quantcal {

// ---- empirical calibration ------------------------------------------------

// Fraction of steps whose revealed forecast covered y at one level.
double empirical_coverage(const std::vector<StepRecord>& records,
                          std::size_t level_index);

// Per-level empirical coverage across all steps.
std::vector<double> per_level_coverage(const std::vector<StepRecord>& records);

// Mean over levels of |empirical coverage - level|.
double calibration_error(const std::vector<StepRecord>& records,
                         const QuantileLevels& levels);

// Largest per-level |empirical coverage - level|.
double max_coverage_gap(const std::vector<StepRecord>& records,
                        const QuantileLevels& levels);

// Euclidean norm of the time-averaged gradient; equals
// sqrt(sum_i (coverage_i - alpha_i)^2) of the empirical coverages.
double average_gradient_norm(const std::vector<StepRecord>& records);

// Fraction of steps whose revealed forecast has an adjacent decrease.
double crossing_fraction(const std::vector<StepRecord>& records);

// Largest |y_t - base_t[i]| observed in the run; 0 for an empty run.
double residual_bound(const std::vector<StepRecord>& records);

// ---- comparator and regret --------------------------------------------------

// Lower empirical quantile: smallest value v with #{x <= v} >= alpha * N.
// Requires non-empty values and alpha in (0,1].
double empirical_quantile_type1(std::vector<double> values, double alpha);

struct RegretResult {
    double regret = 0.0;          // avg played loss minus avg comparator loss
    double regret_vs_zero = 0.0;  // same against the all-zero offset
    bool comparator_feasible = false;  // empirical comparator stayed in the
                                       // shifted monotone cone at every step
    std::vector<double> comparator;    // offsets actually compared against
};

// Average regret of the recorded run against the per-level empirical-quantile
// offsets of the residuals y - base. When those offsets leave the shifted cone
// for any step the comparator falls back to all zeros and the flag reports it.
RegretResult compute_regret(const std::vector<StepRecord>& records,
                            const QuantileLevels& levels);

// ---- probability integral transform ----------------------------------------

// CDF value of the piecewise forecaster distribution at y: linear between
// distinct forecast values, exponential tails matched to the nearest distinct
// slope, largest tied level when y equals a forecast value. Requires at least
// 3 levels and non-crossing q. Output lies in (0,1].
double pit_value(const QuantileLevels& levels, const std::vector<double>& q,
                 double y);

// True when every entry of q is identical (unit-rate tails are used then).
bool pit_degenerate(const std::vector<double>& q);

// Normalized entropy of the binned PIT values: -sum p log p / log bins.
// Requires bins >= 2; values must lie in (0,1].
double pit_entropy(const std::vector<double>& pit_values, int bins = 10);

struct PitSummary {
    double entropy = 0.0;
    long degenerate_steps = 0;  // steps whose forecast was fully tied
    std::vector<double> values;
};

PitSummary pit_summary(const std::vector<StepRecord>& records,
                       const QuantileLevels& levels, int bins = 10);

// ---- central intervals -------------------------------------------------------

struct CentralInterval {
    double miss_rate = 0.0;  // beta; nominal coverage is 1 - beta
    double lo = 0.0;
    double hi = 0.0;
};

// Central interval (q at beta/2, q at 1-beta/2] for each requested miss rate.
// Every beta/2 and 1-beta/2 must be present in the levels; forecasts must be
// non-crossing, which makes intervals for smaller beta contain the larger-beta
// ones.
std::vector<CentralInterval> central_intervals(const QuantileLevels& levels,
                                               const std::vector<double>& q,
                                               const std::vector<double>& betas);

// ---- deterministic guarantees -------------------------------------------------

// Worst-case per-level coverage-gap bound after T steps with residual bound R,
// learning rate eta, and initial hidden offset norm init_norm.
double theorem1_bound(const QuantileLevels& levels, double R, double eta,
                      long T, double init_norm = 0.0);

// Same bound when coverage feedback arrives delay steps late.
double delayed_theorem1_bound(const QuantileLevels& levels, double R, double eta,
                              long T, double init_norm, long delay);

// Average-regret bound against any fixed feasible offset, zero-initialized
// hidden state.
double prop8_regret_bound(const QuantileLevels& levels, double R, double eta,
                          long T);

// Regret bound under delayed feedback.
double delayed_prop8_regret_bound(const QuantileLevels& levels, double R,
                                  double eta, long T, long delay);

// Single-level tracker coverage-gap bound at every prefix length T.
double prop1_gap_bound(double theta1, double R, double eta, long T);

// Sharper gap bound when every base row is a constant vector (point
// forecasts); decays like 1/T.
double point_base_gap_bound(const QuantileLevels& levels, double R, double eta,
                            long T, double init_norm = 0.0);

// Largest distance between hidden and played offsets under point-forecast
// bases: eta * |A|^{3/2} / sqrt(3).
double hidden_played_distance_bound(const QuantileLevels& levels, double eta);

// Radius beyond which the gradient field pushes offsets back toward the
// bounded region: R * |A|^{3/2} / d_A.
double restorativity_radius(const QuantileLevels& levels, double R);

} // namespace quantcal
