#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "quantcal/losses.hpp"

namespace quantcal {

// Online recalibration variants. All of them maintain a hidden offset vector
// and differ in how the revealed forecast is produced from base + hidden and
// in where the update gradient is evaluated.
enum class VariantKind {
    qt_independent,   // per-level trackers, no projection at reveal
    multiqt,          // reveal isotonic projection, update from revealed coverage
    multiqt_delayed,  // multiqt with coverage feedback delayed by D steps
    projected_gd,     // hidden state re-anchored to the projected point each step
    posthoc_sort,     // independent trackers, reveal sorted, update from raw coverage
    posthoc_isotonic, // independent trackers, reveal projected, update from raw coverage
    multiqt_sort,     // reveal sorted, update from revealed (sorted) coverage
    multiqt_eps,      // reveal projection onto eps-separated vectors
};

VariantKind variant_from_name(const std::string& name);
std::string variant_name(VariantKind kind);

// Learning-rate heuristic: eta_t = max(factor * Q_quantile(residuals), floor)
// over the pooled per-level absolute residuals |y - b_i| of the last `window`
// steps. An empty window yields the floor.
struct EtaHeuristic {
    int window = 50;
    double quantile = 0.9;
    double factor = 0.01;
    double floor = 0.1;
};

double adaptive_eta(const std::vector<double>& window_residuals,
                    const EtaHeuristic& h);

struct VariantSpec {
    VariantKind kind = VariantKind::multiqt;
    double eta = 0.1;            // fixed learning rate when !adaptive_eta
    bool adaptive_eta = false;
    EtaHeuristic heuristic{};
    long delay = 0;              // multiqt_delayed only
    double eps = 0.0;            // multiqt_eps only, must be > 0 there
    std::vector<double> theta1;  // initial hidden offsets; empty means zeros

    // Throws InputError on inconsistent parameters (delay on the wrong kind,
    // non-positive eta, initial offsets that cross, ...).
    void validate(std::size_t n_levels) const;
};

// One observed step: the revealed forecast with its coverage, loss and
// gradient, plus the learning rate the update used.
struct StepRecord {
    std::vector<double> base;
    std::vector<double> forecast;
    double y = 0.0;
    std::vector<std::uint8_t> coverage;
    double loss = 0.0;
    std::vector<double> gradient;
    double eta = 0.0;
};

class Tracker {
public:
    Tracker(VariantSpec spec, QuantileLevels levels);

    const QuantileLevels& levels() const { return levels_; }
    const VariantSpec& spec() const { return spec_; }
    const std::vector<double>& hidden() const { return hidden_; }
    long steps_taken() const { return steps_; }

    // Learning rate the next update will use (fixed, or from the heuristic
    // window accumulated so far).
    double next_eta() const;

    // Revealed forecast for base forecasts `base`. Does not mutate state.
    // Kinds that project at reveal (multiqt, multiqt_delayed, projected_gd,
    // multiqt_eps) require base to be non-decreasing.
    std::vector<double> forecast(const std::vector<double>& base) const;

    // Observe y for the current step: computes the revealed forecast, applies
    // the variant's update, and returns the step's record.
    StepRecord step(const std::vector<double>& base, double y);

    // step() with the record discarded.
    void update(const std::vector<double>& base, double y);

private:
    VariantSpec spec_;
    QuantileLevels levels_;
    std::vector<double> hidden_;
    long steps_ = 0;
    std::deque<std::vector<double>> pending_;          // delayed gradients, oldest first
    std::deque<std::vector<double>> residual_window_;  // per-step |y - b_i| batches
};

// Run a full series through a fresh tracker and collect every step record.
// base and y must have equal length; every base row must match the level count.
std::vector<StepRecord> run_series(const VariantSpec& spec,
                                   const QuantileLevels& levels,
                                   const std::vector<std::vector<double>>& base,
                                   const std::vector<double>& y);

} // namespace quantcal
