#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "quantcal/errors.hpp"
#include "quantcal/isotonic.hpp"
#include "quantcal/metrics.hpp"
#include "quantcal/rng.hpp"
#include "quantcal/trackers.hpp"

using namespace quantcal;

namespace {

const std::vector<double> kLv5 = {0.1, 0.25, 0.5, 0.75, 0.9};

std::vector<double> sorted_uniform(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    std::sort(v.begin(), v.end());
    return v;
}

VariantSpec spec_of(VariantKind kind, double eta) {
    VariantSpec s;
    s.kind = kind;
    s.eta = eta;
    return s;
}

double norm2_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

} // namespace

TEST_CASE("single-level tracker reproduces the scalar recursion bit for bit") {
    const QuantileLevels levels({0.3});
    const double eta = 0.25;
    Tracker tr(spec_of(VariantKind::qt_independent, eta), levels);
    double manual = 0.0;
    Rng rng(31);
    for (int t = 0; t < 500; ++t) {
        const double y = rng.uniform(-2, 2);
        const std::vector<double> q = tr.forecast({0.0});
        CHECK(q[0] == manual);
        tr.update({0.0}, y);
        const double g = (y <= manual ? 1.0 : 0.0) - 0.3;
        manual -= eta * g;
        CHECK(tr.hidden()[0] == manual);
    }
}

TEST_CASE("scalar prefix gap bound holds at every prefix") {
    Rng rng(32);
    for (double alpha : {0.1, 0.5, 0.9}) {
        for (double eta : {0.05, 0.5}) {
            for (double theta1 : {0.0, 2.0}) {
                const QuantileLevels levels({alpha});
                VariantSpec spec = spec_of(VariantKind::qt_independent, eta);
                spec.theta1 = {theta1};
                Tracker tr(spec, levels);
                long covered = 0;
                double R = 0.0;
                const double iterate_cap = std::max(std::abs(theta1), 0.0);
                for (long t = 1; t <= 2000; ++t) {
                    const double y = rng.uniform(-1, 1);
                    R = std::max(R, std::abs(y));
                    const StepRecord rec = tr.step({0.0}, y);
                    covered += rec.coverage[0];
                    const double gap =
                        std::abs(static_cast<double>(covered) / static_cast<double>(t) - alpha);
                    CHECK(gap <= prop1_gap_bound(theta1, R, eta, t) + 1e-12);
                    // Iterates stay inside max(|theta1|, R + eta).
                    CHECK(std::abs(tr.hidden()[0]) <=
                          std::max(iterate_cap, R + eta) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("lazy projection forecast equals base plus projected offsets") {
    const QuantileLevels levels(kLv5);
    Rng rng(33);
    for (VariantKind kind : {VariantKind::multiqt, VariantKind::multiqt_eps}) {
        VariantSpec spec = spec_of(kind, 0.3);
        if (kind == VariantKind::multiqt_eps) spec.eps = 0.2;
        Tracker tr(spec, levels);
        for (int t = 0; t < 400; ++t) {
            const std::vector<double> b = sorted_uniform(rng, 5, -2, 2);
            const std::vector<double> q = tr.forecast(b);
            const std::vector<double> played =
                kind == VariantKind::multiqt
                    ? project_shifted(tr.hidden(), b)
                    : project_eps_separated(tr.hidden(), b, spec.eps);
            for (std::size_t i = 0; i < 5; ++i)
                CHECK(std::abs(q[i] - (b[i] + played[i])) <= 1e-12);
            tr.update(b, rng.uniform(-3, 3));
        }
    }
}

TEST_CASE("forecast does not mutate state and repeats exactly") {
    const QuantileLevels levels(kLv5);
    Tracker tr(spec_of(VariantKind::multiqt, 0.5), levels);
    Rng rng(34);
    for (int t = 0; t < 50; ++t) {
        const std::vector<double> b = sorted_uniform(rng, 5, -1, 1);
        const std::vector<double> q1 = tr.forecast(b);
        const std::vector<double> q2 = tr.forecast(b);
        for (std::size_t i = 0; i < 5; ++i) CHECK(q1[i] == q2[i]);
        const StepRecord rec = tr.step(b, rng.uniform(-1, 1));
        for (std::size_t i = 0; i < 5; ++i) CHECK(rec.forecast[i] == q1[i]);
    }
}

TEST_CASE("zero delay is step-identical to the undelayed tracker") {
    const QuantileLevels levels(kLv5);
    VariantSpec delayed = spec_of(VariantKind::multiqt_delayed, 0.2);
    delayed.delay = 0;
    Tracker a(delayed, levels);
    Tracker b(spec_of(VariantKind::multiqt, 0.2), levels);
    Rng rng(35);
    for (int t = 0; t < 1000; ++t) {
        const std::vector<double> base = sorted_uniform(rng, 5, -2, 2);
        const double y = rng.uniform(-3, 3);
        const StepRecord ra = a.step(base, y);
        const StepRecord rb = b.step(base, y);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(ra.forecast[i] == rb.forecast[i]);
            CHECK(a.hidden()[i] == b.hidden()[i]);
        }
    }
}

TEST_CASE("delayed feedback applies nothing for the first D steps") {
    const QuantileLevels levels({0.5});
    VariantSpec spec = spec_of(VariantKind::multiqt_delayed, 1.0);
    spec.delay = 3;
    spec.theta1 = {0.25};
    Tracker tr(spec, levels);
    // Hidden state must stay at theta1 while the buffer fills.
    std::vector<double> g_seen;
    for (int t = 1; t <= 3; ++t) {
        const StepRecord rec = tr.step({0.0}, 10.0);  // never covered
        g_seen.push_back(rec.gradient[0]);
        CHECK(tr.hidden()[0] == 0.25);
    }
    // Step 4 releases the gradient recorded at step 1.
    tr.step({0.0}, -10.0);  // covered now, but the applied gradient is g_1
    CHECK(tr.hidden()[0] == 0.25 - 1.0 * g_seen[0]);
}

TEST_CASE("cosmetic reveals update from the raw forecasts") {
    const QuantileLevels levels({0.5, 0.75});
    VariantSpec ind = spec_of(VariantKind::qt_independent, 1.0);
    VariantSpec ps = spec_of(VariantKind::posthoc_sort, 1.0);
    VariantSpec pi = spec_of(VariantKind::posthoc_isotonic, 1.0);
    Tracker a(ind, levels), b(ps, levels), c(pi, levels);
    Rng rng(36);
    for (int t = 0; t < 300; ++t) {
        const std::vector<double> base = {0.0, 0.0};
        const double y = rng.uniform(-2, 2);
        const StepRecord ra = a.step(base, y);
        const StepRecord rb = b.step(base, y);
        const StepRecord rc = c.step(base, y);
        // Identical internal trajectories.
        CHECK(a.hidden()[0] == b.hidden()[0]);
        CHECK(a.hidden()[1] == b.hidden()[1]);
        CHECK(a.hidden()[0] == c.hidden()[0]);
        CHECK(a.hidden()[1] == c.hidden()[1]);
        // Reveals are the sorted / pooled version of the raw forecast.
        std::vector<double> sorted_raw = ra.forecast;
        std::sort(sorted_raw.begin(), sorted_raw.end());
        const std::vector<double> pooled_raw = pava(ra.forecast);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(rb.forecast[i] == sorted_raw[i]);
            CHECK(rc.forecast[i] == pooled_raw[i]);
        }
    }
}

TEST_CASE("sorted-reveal gradient differs from raw gradient on crossed state") {
    const QuantileLevels levels({0.5, 0.75});
    // Walk both variants into the crossed hidden state (1.0, 0.5): y = 0.75
    // then covers the raw lower coordinate but the sorted upper slot.
    Tracker ta(spec_of(VariantKind::posthoc_sort, 1.0), levels);
    Tracker tb(spec_of(VariantKind::multiqt_sort, 1.0), levels);
    // Step 1: y far above, both variants push both coordinates up by eta*alpha.
    ta.step({0.0, 0.0}, 10.0);
    tb.step({0.0, 0.0}, 10.0);
    CHECK(ta.hidden()[0] == 0.5);
    CHECK(ta.hidden()[1] == 0.75);
    // Step 2: y = 0.6 covers only the upper coordinate for both (state sorted).
    ta.step({0.0, 0.0}, 0.6);
    tb.step({0.0, 0.0}, 0.6);
    CHECK(ta.hidden()[0] == 1.0);
    CHECK(ta.hidden()[1] == 0.5);  // crossed now
    CHECK(tb.hidden()[0] == 1.0);
    CHECK(tb.hidden()[1] == 0.5);
    // Step 3 on the crossed state: raw coverage (1,0), sorted coverage (0,1).
    ta.step({0.0, 0.0}, 0.75);
    tb.step({0.0, 0.0}, 0.75);
    CHECK(ta.hidden()[0] == 1.0 - (1.0 - 0.5));    // raw gradient (0.5, -0.75)
    CHECK(ta.hidden()[1] == 0.5 - (0.0 - 0.75));
    CHECK(tb.hidden()[0] == 1.0 - (0.0 - 0.5));    // sorted gradient (-0.5, 0.25)
    CHECK(tb.hidden()[1] == 0.5 - (1.0 - 0.75));
}

TEST_CASE("re-anchored gradient step restarts from the projected point") {
    const QuantileLevels levels({0.2, 0.3});
    VariantSpec spec = spec_of(VariantKind::projected_gd, 1.0);
    Tracker tr(spec, levels);
    // Step 1: reveal (0,0), y above, push up by (alpha, beta).
    tr.step({0.0, 0.0}, 0.25);
    CHECK(tr.hidden()[0] == 0.2);
    CHECK(tr.hidden()[1] == 0.3);
    // Step 2: reveal (0.2, 0.3), y = 0.25 covers the upper level only.
    tr.step({0.0, 0.0}, 0.25);
    CHECK(tr.hidden()[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(tr.hidden()[1] == doctest::Approx(-0.4).epsilon(1e-15));
    // Step 3: the crossed state reveals its pooled mean (~0), it re-anchors
    // there, and the lazy tracker would NOT have done so.
    tr.step({0.0, 0.0}, 0.25);
    CHECK(tr.hidden()[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(tr.hidden()[1] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("projection reveals never cross on fuzzed streams") {
    const QuantileLevels levels(kLv5);
    Rng rng(37);
    for (VariantKind kind : {VariantKind::multiqt, VariantKind::posthoc_isotonic,
                             VariantKind::multiqt_eps, VariantKind::multiqt_sort}) {
        VariantSpec spec = spec_of(kind, 0.7);
        if (kind == VariantKind::multiqt_eps) spec.eps = 0.05;
        Tracker tr(spec, levels);
        for (int t = 0; t < 5000; ++t) {
            std::vector<double> b = sorted_uniform(rng, 5, -3, 3);
            if (kind == VariantKind::posthoc_isotonic || kind == VariantKind::multiqt_sort)
                b.assign(5, 0.0);
            const StepRecord rec = tr.step(b, rng.uniform(-6, 6));
            REQUIRE(is_nondecreasing(rec.forecast));
            if (kind == VariantKind::multiqt_eps) {
                for (std::size_t i = 1; i < 5; ++i)
                    REQUIRE(rec.forecast[i] - rec.forecast[i - 1] >= 0.05 - 1e-9);
            }
        }
    }
}

TEST_CASE("hidden and played offsets stay close under point-forecast bases") {
    const QuantileLevels levels(kLv5);
    Rng rng(38);
    const double eta = 0.5;
    Tracker tr(spec_of(VariantKind::multiqt, eta), levels);
    const double bound = hidden_played_distance_bound(levels, eta);
    double center = 0.0;
    double worst = 0.0;
    for (int t = 0; t < 2000; ++t) {
        center += rng.normal();
        const std::vector<double> b(5, center);
        const std::vector<double> q = tr.forecast(b);
        std::vector<double> played(5);
        for (std::size_t i = 0; i < 5; ++i) played[i] = q[i] - b[i];
        worst = std::max(worst, norm2_diff(played, tr.hidden()));
        tr.update(b, center + rng.uniform(-2, 2));
    }
    CHECK(worst <= bound);
}

TEST_CASE("learning-rate heuristic: floor, window, and exact quantile") {
    EtaHeuristic h;
    CHECK(adaptive_eta({}, h) == 0.1);
    CHECK(adaptive_eta({0.5, 1.0, 2.0}, h) == 0.1);  // 0.01 * Q90 below floor

    // Single-level run with residuals 1..100; the window keeps the last 50.
    const QuantileLevels levels({0.5});
    VariantSpec spec;
    spec.kind = VariantKind::qt_independent;
    spec.adaptive_eta = true;
    Tracker tr(spec, levels);
    CHECK(tr.next_eta() == 0.1);  // empty window
    for (int t = 1; t <= 100; ++t) tr.update({0.0}, static_cast<double>(t));
    // Residuals in window: 51..100. Type-1 Q90 = 45th smallest = 95.
    CHECK(tr.next_eta() == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
    const QuantileLevels levels(kLv5);
    VariantSpec s = spec_of(VariantKind::multiqt, 0.1);
    s.delay = 2;
    CHECK_THROWS_AS(Tracker(s, levels), InputError);  // delay on wrong kind

    s = spec_of(VariantKind::multiqt_eps, 0.1);
    CHECK_THROWS_AS(Tracker(s, levels), InputError);  // eps missing

    s = spec_of(VariantKind::multiqt, 0.1);
    s.eps = 0.5;
    CHECK_THROWS_AS(Tracker(s, levels), InputError);  // eps on wrong kind

    s = spec_of(VariantKind::multiqt, 0.0);
    CHECK_THROWS_AS(Tracker(s, levels), InputError);  // non-positive rate

    s = spec_of(VariantKind::multiqt, 0.1);
    s.theta1 = {1.0, 0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(Tracker(s, levels), InputError);  // crossing initial offsets

    s = spec_of(VariantKind::multiqt, 0.1);
    s.theta1 = {0.0, 0.0};
    CHECK_THROWS_AS(Tracker(s, levels), InputError);  // wrong length

    // Crossing base rows are rejected by projection kinds, accepted by others.
    Tracker proj(spec_of(VariantKind::multiqt, 0.1), levels);
    CHECK_THROWS_AS(proj.forecast({1.0, 0.0, 0.0, 0.0, 0.0}), InputError);
    Tracker ind(spec_of(VariantKind::qt_independent, 0.1), levels);
    CHECK_NOTHROW(ind.forecast({1.0, 0.0, 0.0, 0.0, 0.0}));

    CHECK_THROWS_AS(run_series(spec_of(VariantKind::multiqt, 0.1), levels,
                               {{0, 0, 0, 0, 0}}, {1.0, 2.0}),
                    InputError);
    CHECK_THROWS_AS(variant_from_name("nope"), InputError);
    CHECK(variant_from_name(variant_name(VariantKind::multiqt_eps)) ==
          VariantKind::multiqt_eps);
}
