#include "quantcal/adversarial.hpp"

#include <cmath>

#include "quantcal/errors.hpp"

namespace quantcal {

namespace {

std::vector<std::vector<double>> zero_base(long T, std::size_t n) {
    return std::vector<std::vector<double>>(static_cast<std::size_t>(T),
                                            std::vector<double>(n, 0.0));
}

double max_abs(const std::vector<double>& v) {
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x));
    return worst;
}

void check_pair(double alpha, double beta, double sum, const char* what) {
    if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0))
        throw InputError(std::string(what) + ": levels must lie in (0,1)");
    if (!(alpha < beta))
        throw InputError(std::string(what) + ": alpha must be below beta");
    if (std::abs(alpha + beta - sum) > 1e-12)
        throw InputError(std::string(what) + ": alpha + beta must equal " +
                         std::to_string(sum));
}

} // namespace

AdversarialStream gen_sorted_qt_cycle(double eta, long repetitions) {
    if (!(eta > 0.0)) throw InputError("sorted_qt_cycle: eta must be positive");
    if (repetitions < 1)
        throw InputError("sorted_qt_cycle: repetitions must be >= 1");
    // One cycle of the per-level trackers started at zero offsets; the hidden
    // state returns to zero exactly after these eight observations.
    static const double pattern[8] = {0.60,  0.625, 0.75,  -0.10,
                                      -0.20, -0.70, -0.25, -0.125};
    AdversarialStream s{
        "sorted_qt_cycle", QuantileLevels({0.5, 0.75}), {}, {}, {}, 0.0};
    s.y.reserve(static_cast<std::size_t>(8 * repetitions));
    for (long r = 0; r < repetitions; ++r)
        for (double p : pattern) s.y.push_back(eta * p);
    s.base = zero_base(8 * repetitions, 2);
    s.target.kind = VariantKind::posthoc_sort;
    s.target.eta = eta;
    s.residual_bound = max_abs(s.y);
    return s;
}

AdversarialStream gen_pgd_cycle(double alpha, double beta, double eta,
                                double q0, long repetitions) {
    check_pair(alpha, beta, 0.5, "pgd_cycle");
    if (!(eta > 0.0)) throw InputError("pgd_cycle: eta must be positive");
    if (repetitions < 1) throw InputError("pgd_cycle: repetitions must be >= 1");
    const long T = 2 * repetitions;
    AdversarialStream s{
        "pgd_cycle", QuantileLevels({alpha, beta}), {}, {}, {}, 0.0};
    const double y = q0 + eta * (alpha + beta) / 2.0;
    s.y.assign(static_cast<std::size_t>(T), y);
    s.base = zero_base(T, 2);
    s.target.kind = VariantKind::projected_gd;
    s.target.eta = eta;
    s.residual_bound = std::abs(y);
    return s;
}

AdversarialStream gen_multiqt_sort_divergence(double alpha, double beta,
                                              double eta, long horizon) {
    check_pair(alpha, beta, 1.0, "multiqt_sort_divergence");
    if (!(eta > 0.0))
        throw InputError("multiqt_sort_divergence: eta must be positive");
    if (horizon < 1)
        throw InputError("multiqt_sort_divergence: horizon must be >= 1");
    AdversarialStream s{
        "multiqt_sort_divergence", QuantileLevels({alpha, beta}), {}, {}, {},
        0.0};
    // The hidden pair always sums to eta*(alpha+beta); observing the midpoint
    // straddles the sorted reveal forever once the offsets separate.
    const double y = eta * (alpha + beta) / 2.0;
    s.y.assign(static_cast<std::size_t>(horizon), y);
    s.base = zero_base(horizon, 2);
    s.target.kind = VariantKind::multiqt_sort;
    s.target.eta = eta;
    s.residual_bound = std::abs(y);
    return s;
}

AdversarialStream gen_eps_separated_divergence(double alpha, double beta,
                                               double eta, double eps,
                                               long horizon) {
    check_pair(alpha, beta, 1.0, "eps_separated_divergence");
    if (!(eta > 0.0))
        throw InputError("eps_separated_divergence: eta must be positive");
    if (!(eps > 0.0))
        throw InputError("eps_separated_divergence: eps must be positive");
    if (horizon < 1)
        throw InputError("eps_separated_divergence: horizon must be >= 1");
    AdversarialStream s{
        "eps_separated_divergence", QuantileLevels({alpha, beta}), {}, {}, {},
        0.0};
    // The separated reveal is pinned at (-eps/2, +eps/2) around the
    // observation, covering only the upper level at every step.
    s.y.assign(static_cast<std::size_t>(horizon), 0.0);
    s.base = zero_base(horizon, 2);
    s.target.kind = VariantKind::multiqt_eps;
    s.target.eta = eta;
    s.target.eps = eps;
    s.residual_bound = 0.0;
    return s;
}

} // namespace quantcal
