#pragma once

#include <string>
#include <vector>

#include "quantcal/losses.hpp"
#include "quantcal/trackers.hpp"

namespace quantcal {

// Deterministic observation stream engineered to break one recalibration
// variant. `target` is the variant the construction attacks; running it on
// the stream reproduces the failure, while the projection-based tracker stays
// calibrated on the same data.
struct AdversarialStream {
    std::string name;
    QuantileLevels levels;
    std::vector<std::vector<double>> base;  // all-zero rows
    std::vector<double> y;
    VariantSpec target;
    double residual_bound = 0.0;  // max |y - base|
};

// Eight-step cycle on levels {0.5, 0.75} that keeps per-level trackers exactly
// calibrated while their sorted reveal is miscalibrated: raw coverages
// (0.5, 0.75), sorted-slot coverages (0.375, 0.875), repeating every 8 steps.
// Observations scale linearly with eta.
AdversarialStream gen_sorted_qt_cycle(double eta, long repetitions);

// Two-step construction for the re-anchored (non-lazy) gradient variant:
// constant observations at q0 + eta*(alpha+beta)/2 drive the iterate into a
// period-2 orbit. Requires alpha < beta with alpha + beta == 0.5 so the orbit
// stays bounded.
AdversarialStream gen_pgd_cycle(double alpha, double beta, double eta,
                                double q0, long repetitions);

// Constant observations at eta*(alpha+beta)/2 make the sort-at-reveal variant's
// hidden offsets cross and drift apart without bound; slot coverages converge
// to (0, 1) so the per-level gaps approach (alpha, 1-beta). Requires
// alpha < beta with alpha + beta == 1.
AdversarialStream gen_multiqt_sort_divergence(double alpha, double beta,
                                              double eta, long horizon);

// Constant observations at 0 pin the eps-separated reveal at (-eps/2, +eps/2)
// while the hidden offsets drift apart without bound; coverages converge to
// (0, 1). Requires alpha < beta with alpha + beta == 1 and eps > 0.
AdversarialStream gen_eps_separated_divergence(double alpha, double beta,
                                               double eta, double eps,
                                               long horizon);

} // namespace quantcal
