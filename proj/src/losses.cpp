#include "quantcal/losses.hpp"

#include <algorithm>
#include <cmath>

#include "quantcal/errors.hpp"
#include "quantcal/isotonic.hpp"

namespace quantcal {

QuantileLevels::QuantileLevels(std::vector<double> levels)
    : levels_(std::move(levels)) {
    if (levels_.empty()) throw InputError("levels: at least one level required");
    for (double a : levels_) {
        if (!(a > 0.0 && a < 1.0))
            throw InputError("levels: every level must lie strictly in (0,1)");
    }
    for (std::size_t i = 1; i < levels_.size(); ++i) {
        if (!(levels_[i - 1] < levels_[i]))
            throw InputError("levels: sequence must be strictly increasing");
    }
    min_tail_distance_ = std::min(levels_.front(), 1.0 - levels_.back());
    for (std::size_t i = 1; i < levels_.size(); ++i)
        min_tail_distance_ = std::min(min_tail_distance_, levels_[i] - levels_[i - 1]);
}

double quantile_loss(double alpha, double q, double y) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InputError("quantile_loss: alpha must lie in (0,1)");
    const double d = y - q;
    return d >= 0.0 ? alpha * d : (alpha - 1.0) * d;
}

double aggregated_quantile_loss(const QuantileLevels& levels,
                                const std::vector<double>& q, double y) {
    if (q.size() != levels.size())
        throw InputError("aggregated_quantile_loss: forecast size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        total += quantile_loss(levels[i], q[i], y);
    return total;
}

std::vector<std::uint8_t> coverage_indicators(const std::vector<double>& q,
                                              double y) {
    std::vector<std::uint8_t> cov(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        cov[i] = static_cast<std::uint8_t>(y <= q[i]);
    return cov;
}

std::vector<double> gradient_at_forecast(const QuantileLevels& levels,
                                         const std::vector<double>& q, double y) {
    if (q.size() != levels.size())
        throw InputError("gradient_at_forecast: forecast size mismatch");
    std::vector<double> g(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        g[i] = (y <= q[i] ? 1.0 : 0.0) - levels[i];
    return g;
}

std::vector<double> loss_gradient(const QuantileLevels& levels,
                                  const std::vector<double>& b,
                                  const std::vector<double>& theta, double y) {
    if (b.size() != levels.size() || theta.size() != levels.size())
        throw InputError("loss_gradient: argument size mismatch");
    std::vector<double> q(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) q[i] = b[i] + theta[i];
    return gradient_at_forecast(levels, q, y);
}

double interval_score(double beta, double lo, double hi, double y) {
    if (!(beta > 0.0 && beta < 1.0))
        throw InputError("interval_score: beta must lie in (0,1)");
    if (!(lo <= hi)) throw InputError("interval_score: interval endpoints crossed");
    const double outside = std::max({lo - y, y - hi, 0.0});
    return (hi - lo) + (2.0 / beta) * outside;
}

namespace {

std::size_t find_level(const QuantileLevels& levels, double target) {
    const std::vector<double>& v = levels.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i] - target) <= 1e-12) return i;
    }
    throw InputError("weighted_interval_score: required level missing from grid");
}

} // namespace

double weighted_interval_score(const std::vector<double>& betas,
                               const QuantileLevels& levels,
                               const std::vector<double>& forecasts, double y) {
    if (forecasts.size() != levels.size())
        throw InputError("weighted_interval_score: forecast size mismatch");
    if (!is_nondecreasing(forecasts))
        throw InputError("weighted_interval_score: forecasts must be non-crossing");
    double total = 0.0;
    for (double beta : betas) {
        if (!(beta > 0.0 && beta < 1.0))
            throw InputError("weighted_interval_score: beta must lie in (0,1)");
        const std::size_t lo = find_level(levels, beta / 2.0);
        const std::size_t hi = find_level(levels, 1.0 - beta / 2.0);
        total += beta * interval_score(beta, forecasts[lo], forecasts[hi], y);
    }
    return total;
}

} // namespace quantcal
