#include "quantcal/trackers.hpp"

#include <algorithm>
#include <cmath>

#include "quantcal/errors.hpp"
#include "quantcal/isotonic.hpp"
#include "quantcal/metrics.hpp"

namespace quantcal {

VariantKind variant_from_name(const std::string& name) {
    if (name == "qt_independent") return VariantKind::qt_independent;
    if (name == "multiqt") return VariantKind::multiqt;
    if (name == "multiqt_delayed") return VariantKind::multiqt_delayed;
    if (name == "projected_gd") return VariantKind::projected_gd;
    if (name == "posthoc_sort") return VariantKind::posthoc_sort;
    if (name == "posthoc_isotonic") return VariantKind::posthoc_isotonic;
    if (name == "multiqt_sort") return VariantKind::multiqt_sort;
    if (name == "multiqt_eps") return VariantKind::multiqt_eps;
    throw InputError("unknown variant: " + name);
}

std::string variant_name(VariantKind kind) {
    switch (kind) {
        case VariantKind::qt_independent: return "qt_independent";
        case VariantKind::multiqt: return "multiqt";
        case VariantKind::multiqt_delayed: return "multiqt_delayed";
        case VariantKind::projected_gd: return "projected_gd";
        case VariantKind::posthoc_sort: return "posthoc_sort";
        case VariantKind::posthoc_isotonic: return "posthoc_isotonic";
        case VariantKind::multiqt_sort: return "multiqt_sort";
        case VariantKind::multiqt_eps: return "multiqt_eps";
    }
    throw InputError("unknown variant kind");
}

double adaptive_eta(const std::vector<double>& window_residuals,
                    const EtaHeuristic& h) {
    if (window_residuals.empty()) return h.floor;
    const double q =
        empirical_quantile_type1(window_residuals, h.quantile);
    return std::max(h.factor * q, h.floor);
}

void VariantSpec::validate(std::size_t n_levels) const {
    if (!adaptive_eta && !(eta > 0.0))
        throw InputError("variant: fixed learning rate must be positive");
    if (adaptive_eta) {
        if (heuristic.window < 1)
            throw InputError("variant: heuristic window must be >= 1");
        if (!(heuristic.quantile > 0.0 && heuristic.quantile <= 1.0))
            throw InputError("variant: heuristic quantile must lie in (0,1]");
        if (!(heuristic.factor > 0.0) || !(heuristic.floor > 0.0))
            throw InputError("variant: heuristic factor and floor must be positive");
    }
    if (delay < 0) throw InputError("variant: delay must be >= 0");
    if (delay > 0 && kind != VariantKind::multiqt_delayed)
        throw InputError("variant: delay is only valid for multiqt_delayed");
    if (kind == VariantKind::multiqt_eps) {
        if (!(eps > 0.0))
            throw InputError("variant: multiqt_eps requires eps > 0");
    } else if (eps != 0.0) {
        throw InputError("variant: eps is only valid for multiqt_eps");
    }
    if (!theta1.empty()) {
        if (theta1.size() != n_levels)
            throw InputError("variant: initial offsets must match the level count");
        if (!is_nondecreasing(theta1))
            throw InputError("variant: initial offsets must be non-decreasing");
    }
}

namespace {

bool requires_sorted_base(VariantKind kind) {
    switch (kind) {
        case VariantKind::multiqt:
        case VariantKind::multiqt_delayed:
        case VariantKind::projected_gd:
        case VariantKind::multiqt_eps:
            return true;
        default:
            return false;
    }
}

} // namespace

Tracker::Tracker(VariantSpec spec, QuantileLevels levels)
    : spec_(std::move(spec)), levels_(std::move(levels)) {
    spec_.validate(levels_.size());
    hidden_ = spec_.theta1.empty() ? std::vector<double>(levels_.size(), 0.0)
                                   : spec_.theta1;
}

double Tracker::next_eta() const {
    if (!spec_.adaptive_eta) return spec_.eta;
    std::vector<double> pooled;
    pooled.reserve(residual_window_.size() * levels_.size());
    for (const auto& batch : residual_window_)
        pooled.insert(pooled.end(), batch.begin(), batch.end());
    return adaptive_eta(pooled, spec_.heuristic);
}

std::vector<double> Tracker::forecast(const std::vector<double>& base) const {
    if (base.size() != levels_.size())
        throw InputError("tracker: base forecast size mismatch");
    if (requires_sorted_base(spec_.kind) && !is_nondecreasing(base))
        throw InputError("tracker: base forecasts must be non-decreasing");
    std::vector<double> raw(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) raw[i] = base[i] + hidden_[i];
    switch (spec_.kind) {
        case VariantKind::qt_independent:
            return raw;
        case VariantKind::multiqt:
        case VariantKind::multiqt_delayed:
        case VariantKind::projected_gd:
        case VariantKind::posthoc_isotonic:
            return pava(raw);
        case VariantKind::posthoc_sort:
        case VariantKind::multiqt_sort: {
            std::sort(raw.begin(), raw.end());
            return raw;
        }
        case VariantKind::multiqt_eps:
            return pava_eps_separated(raw, spec_.eps);
    }
    throw InputError("tracker: unknown variant kind");
}

StepRecord Tracker::step(const std::vector<double>& base, double y) {
    const double eta = next_eta();
    StepRecord rec;
    rec.base = base;
    rec.forecast = forecast(base);
    rec.y = y;
    rec.coverage = coverage_indicators(rec.forecast, y);
    rec.loss = aggregated_quantile_loss(levels_, rec.forecast, y);
    rec.gradient = gradient_at_forecast(levels_, rec.forecast, y);
    rec.eta = eta;

    const std::size_t n = levels_.size();
    switch (spec_.kind) {
        case VariantKind::qt_independent:
        case VariantKind::multiqt:
        case VariantKind::multiqt_sort:
        case VariantKind::multiqt_eps:
            for (std::size_t i = 0; i < n; ++i)
                hidden_[i] -= eta * rec.gradient[i];
            break;
        case VariantKind::multiqt_delayed:
            // Feedback for this step becomes visible `delay` steps later;
            // a full buffer releases the oldest revealed-coverage gradient.
            pending_.push_back(rec.gradient);
            if (static_cast<long>(pending_.size()) > spec_.delay) {
                const std::vector<double>& g = pending_.front();
                for (std::size_t i = 0; i < n; ++i) hidden_[i] -= eta * g[i];
                pending_.pop_front();
            }
            break;
        case VariantKind::projected_gd: {
            // Hidden state restarts from the played (projected) offsets.
            for (std::size_t i = 0; i < n; ++i)
                hidden_[i] = (rec.forecast[i] - base[i]) - eta * rec.gradient[i];
            break;
        }
        case VariantKind::posthoc_sort:
        case VariantKind::posthoc_isotonic: {
            // The reveal is cosmetic: per-level trackers update from the
            // coverage of their own raw forecasts.
            const std::vector<double> g_raw =
                loss_gradient(levels_, base, hidden_, y);
            for (std::size_t i = 0; i < n; ++i) hidden_[i] -= eta * g_raw[i];
            break;
        }
    }

    if (spec_.adaptive_eta) {
        std::vector<double> batch(n);
        for (std::size_t i = 0; i < n; ++i) batch[i] = std::abs(y - base[i]);
        residual_window_.push_back(std::move(batch));
        while (static_cast<long>(residual_window_.size()) > spec_.heuristic.window)
            residual_window_.pop_front();
    }
    ++steps_;
    return rec;
}

void Tracker::update(const std::vector<double>& base, double y) {
    step(base, y);
}

std::vector<StepRecord> run_series(const VariantSpec& spec,
                                   const QuantileLevels& levels,
                                   const std::vector<std::vector<double>>& base,
                                   const std::vector<double>& y) {
    if (base.size() != y.size())
        throw InputError("run_series: base and y lengths differ");
    Tracker tracker(spec, levels);
    std::vector<StepRecord> records;
    records.reserve(y.size());
    for (std::size_t t = 0; t < y.size(); ++t)
        records.push_back(tracker.step(base[t], y[t]));
    return records;
}

} // namespace quantcal
