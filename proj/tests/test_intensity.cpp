#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "d2dcache/intensity.hpp"
#include "d2dcache/quadrature.hpp"
#include "d2dcache/rng.hpp"

using namespace d2dcache;

namespace {

// Independent oracle: the estimator evaluated straight from its definition,
// with the kernel written out by hand.
double oracle_kernel(double x) { return std::fabs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0; }

double oracle_lambda(double t, const std::vector<double>& samples, int nt, double w, double len,
                     bool corrected = true) {
    if (t < 0.0 || t > len) return 0.0;
    double sum = 0.0;
    for (double ta : samples) {
        sum += oracle_kernel((t - ta) / w);
        if (corrected) {
            sum += oracle_kernel((t - ta + len) / w);
            sum += oracle_kernel((t - ta - len) / w);
        }
    }
    return sum / (nt * w);
}

double oracle_trapezoid(const std::vector<double>& samples, int nt, double w, double len,
                        int panels, bool corrected = true, bool square = false) {
    double acc = 0.0;
    const double h = len / panels;
    for (int i = 0; i <= panels; ++i) {
        double v = oracle_lambda(i * h, samples, nt, w, len, corrected);
        if (square) v *= v;
        acc += (i == 0 || i == panels) ? 0.5 * v : v;
    }
    return acc * h;
}

SampleSet random_samples(Rng& rng, int min_count = 0) {
    const double len = 0.5 + 20.0 * rng.uniform01();
    const int nt = 1 + static_cast<int>(rng.bounded(8));
    const int np = min_count + static_cast<int>(rng.bounded(60));
    std::vector<double> arr(np);
    for (auto& t : arr) {
        double u = rng.uniform01();
        // push a fifth of the mass close to the boundaries
        if (rng.uniform01() < 0.2) u = u < 0.5 ? u * 0.02 : 1.0 - (1.0 - u) * 0.02;
        t = u * len;
    }
    return SampleSet(std::move(arr), nt, len);
}

}  // namespace

TEST_CASE("epanechnikov kernel values") {
    CHECK(epanechnikov(0.0) == doctest::Approx(0.75));
    CHECK(epanechnikov(1.0) == 0.0);
    CHECK(epanechnikov(-1.0) == 0.0);
    CHECK(epanechnikov(-0.5) == doctest::Approx(0.5625));
    CHECK(epanechnikov(1.0001) == 0.0);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double x = 3.0 * (rng.uniform01() - 0.5);
        CHECK(epanechnikov(x) == epanechnikov(-x));
        CHECK(epanechnikov(x) >= 0.0);
        CHECK(epanechnikov(x) <= 0.75);
    }
}

TEST_CASE("corrected kernel interior and boundary values") {
    CHECK(corrected_kernel(5.0, 5.0, 2.0, 10.0) == doctest::Approx(0.75));
    // only the left-translated copy contributes: K(-0.75) = 0.328125
    CHECK(corrected_kernel(9.5, 1.0, 2.0, 10.0) == doctest::Approx(0.328125));
    CHECK_THROWS_AS(corrected_kernel(1.0, 1.0, 10.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(corrected_kernel(1.0, 1.0, 12.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(corrected_kernel(1.0, 1.0, 0.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(corrected_kernel(1.0, -0.5, 2.0, 10.0), std::invalid_argument);
}

TEST_CASE("corrected kernel keeps unit mass for any sample position") {
    // includes the boundary-heavy case t_alpha = 0.5, W = 2, L = 10
    Rng rng(17);
    for (int i = 0; i < 40; ++i) {
        const double len = 1.0 + 15.0 * rng.uniform01();
        const double w = len * (0.02 + 0.93 * rng.uniform01());
        const double ta = i == 0 ? 0.05 * len : rng.uniform01() * len;
        const double mass = adaptive_simpson(
            [&](double t) { return corrected_kernel(t, ta, w, len) / w; }, 0.0, len, 1e-10);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
    const double unit = adaptive_simpson(
        [&](double t) { return corrected_kernel(t, 0.5, 2.0, 10.0) / 2.0; }, 0.0, 10.0, 1e-10);
    CHECK(unit == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("estimator mass equals N_p over N_T") {
    SampleSet s({0.4, 1.0, 2.5, 5.0, 7.25, 7.9}, 2, 8.0);
    IntensityEstimate est = estimate_intensity(s, 1.7);
    CHECK(est.mass() == doctest::Approx(3.0).epsilon(1e-12));
    const double quad = adaptive_simpson([&](double t) { return est(t); }, 0.0, 8.0, 1e-10);
    CHECK(quad == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("empty sample set estimates the zero function") {
    SampleSet s({}, 3, 5.0);
    IntensityEstimate est = estimate_intensity(s, 1.0);
    CHECK(est.mass() == 0.0);
    CHECK(est(2.5) == 0.0);
    CHECK(est(0.0) == 0.0);
}

TEST_CASE("single-sample estimate peaks at the sample") {
    const double len = 8.0;
    SampleSet s({len / 2.0}, 2, len);
    IntensityEstimate est = estimate_intensity(s, len / 4.0);
    CHECK(est(len / 2.0) == doctest::Approx(0.75 / (2.0 * len / 4.0)).epsilon(1e-12));
}

TEST_CASE("estimate is non-negative and vanishes outside the period") {
    Rng rng(23);
    SampleSet s = random_samples(rng, 2);
    const double w = s.period_length * 0.2;
    IntensityEstimate est = estimate_intensity(s, w);
    CHECK(est(-0.001 * s.period_length) == 0.0);
    CHECK(est(1.001 * s.period_length) == 0.0);
    for (int i = 0; i <= 500; ++i) CHECK(est(i * s.period_length / 500.0) >= 0.0);
}

TEST_CASE("sample order does not change the estimate") {
    std::vector<double> arr{4.0, 0.2, 7.7, 3.3, 0.21, 6.6};
    SampleSet a(arr, 2, 8.0);
    std::reverse(arr.begin(), arr.end());
    std::swap(arr[1], arr[3]);
    SampleSet b(arr, 2, 8.0);
    IntensityEstimate ea = estimate_intensity(a, 1.3), eb = estimate_intensity(b, 1.3);
    for (int i = 0; i <= 200; ++i) {
        const double t = i * 8.0 / 200.0;
        CHECK(ea(t) == eb(t));
    }
}

TEST_CASE("mass identity holds for random sample sets under quadrature") {
    Rng rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        SampleSet s = random_samples(rng, 1);
        const double w = s.period_length * (0.01 + 0.95 * rng.uniform01());
        IntensityEstimate est = estimate_intensity(s, w);
        const double expected = static_cast<double>(s.size()) / s.period_count;
        const double quad =
            adaptive_simpson([&](double t) { return est(t); }, 0.0, s.period_length, 1e-9);
        CHECK(std::fabs(quad - expected) < 1e-6);
        CHECK(std::fabs(est.mass() - expected) < 1e-9);
    }
}

TEST_CASE("without end correction boundary samples lose mass, interior ones do not") {
    const double len = 10.0, w = 2.0;
    // a sample within W of the lower boundary: strictly biased low
    SampleSet near_edge({0.5, 5.0}, 1, len);
    IntensityEstimate plain(near_edge, w, EndCorrection::none);
    CHECK(plain.mass() < 2.0 - 1e-6);
    const double quad =
        adaptive_simpson([&](double t) { return plain(t); }, 0.0, len, 1e-10);
    CHECK(quad < 2.0 - 1e-6);
    // all samples at least W away from both ends: no bias even uncorrected
    SampleSet interior({3.0, 5.0, 6.5}, 1, len);
    IntensityEstimate plain2(interior, w, EndCorrection::none);
    CHECK(plain2.mass() == doctest::Approx(3.0).epsilon(1e-12));
    // and the corrected estimator restores the boundary case
    CHECK(estimate_intensity(near_edge, w).mass() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("leave-one-out estimate equals the full estimate minus one kernel") {
    Rng rng(59);
    SampleSet s = random_samples(rng, 3);
    const double w = s.period_length * 0.17;
    IntensityEstimate full = estimate_intensity(s, w);
    for (std::size_t drop = 0; drop < s.size(); drop += 2) {
        std::vector<double> rest;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (i != drop) rest.push_back(s.arrivals[i]);
        IntensityEstimate reduced =
            estimate_intensity(SampleSet(rest, s.period_count, s.period_length), w);
        for (int i = 0; i <= 100; ++i) {
            const double t = i * s.period_length / 100.0;
            const double contribution =
                corrected_kernel(t, s.arrivals[drop], w, s.period_length) /
                (s.period_count * w);
            CHECK(reduced(t) == doctest::Approx(full(t) - contribution).epsilon(1e-12));
        }
    }
}

TEST_CASE("ise score matches a direct-quadrature oracle on a hand-built set") {
    // frozen with an independent trapezoid oracle at 1e4 panels
    SampleSet s({1.0, 3.0, 7.4}, 2, 8.0);
    const double w = 2.0;  // L / 4
    const double score = ise_score(s, w);
    CHECK(score == doctest::Approx(0.00996681481481481).epsilon(1e-9));

    const double sq = oracle_trapezoid(s.arrivals, 2, w, 8.0, 10000, true, true);
    double loo = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::vector<double> rest;
        for (std::size_t k = 0; k < s.size(); ++k)
            if (k != i) rest.push_back(s.arrivals[k]);
        loo += oracle_lambda(s.arrivals[i], rest, 2, w, 8.0);
    }
    const double n_p = 3.0, n_t = 2.0;
    const double oracle =
        (n_t * n_t) / (9.0 * n_p * n_p) * sq - 2.0 * n_t / (3.0 * n_p * (3.0 * n_p - 1.0)) * loo;
    CHECK(std::fabs(score - oracle) < 1e-9);
}

TEST_CASE("ise score agrees with the oracle on random sets") {
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        SampleSet s = random_samples(rng, 2);
        const double w = s.period_length * (0.03 + 0.6 * rng.uniform01());
        const double sq = oracle_trapezoid(s.arrivals, s.period_count, w, s.period_length, 200000,
                                           true, true);
        double loo = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::vector<double> rest;
            for (std::size_t k = 0; k < s.size(); ++k)
                if (k != i) rest.push_back(s.arrivals[k]);
            loo += oracle_lambda(s.arrivals[i], rest, s.period_count, w, s.period_length);
        }
        const double n_p = static_cast<double>(s.size()), n_t = s.period_count;
        const double oracle = (n_t * n_t) / (9.0 * n_p * n_p) * sq -
                              2.0 * n_t / (3.0 * n_p * (3.0 * n_p - 1.0)) * loo;
        CHECK(ise_score(s, w) == doctest::Approx(oracle).epsilon(5e-7));
    }
}

TEST_CASE("ise score is deterministic and finite") {
    Rng rng(67);
    SampleSet a = random_samples(rng, 2);
    SampleSet b = a;
    const double w = a.period_length * 0.21;
    CHECK(ise_score(a, w) == ise_score(b, w));
    CHECK(std::isfinite(ise_score(a, w)));
}

TEST_CASE("ise score needs two samples") {
    SampleSet one({1.0}, 1, 4.0);
    CHECK_THROWS_AS(ise_score(one, 1.0), insufficient_data_error);
}

TEST_CASE("pairwise and sweep integral routes agree") {
    Rng rng(71);
    for (int trial = 0; trial < 60; ++trial) {
        SampleSet s = random_samples(rng, 2);
        for (double frac : {0.005, 0.08, 0.35, 0.6, 0.9}) {
            const double w = frac * s.period_length;
            const double a = detail::intensity_sq_integral_pairwise(s, w);
            const double b = detail::intensity_sweep(s, w).sq_integral;
            CHECK(a == doctest::Approx(b).epsilon(5e-9));
        }
    }
}

TEST_CASE("selected bandwidth lies inside the open interval") {
    Rng rng(73);
    for (int trial = 0; trial < 10; ++trial) {
        SampleSet s = random_samples(rng, 5);
        const double w = select_bandwidth(s);
        CHECK(w > 0.0);
        CHECK(w < s.period_length);
    }
}

TEST_CASE("selected bandwidth matches a dense-grid oracle") {
    // clustered samples give the ISE a clear interior minimum
    Rng rng(79);
    std::vector<double> arr;
    const double len = 10.0;
    for (int i = 0; i < 120; ++i) {
        const double c = rng.uniform01() < 0.5 ? 2.5 : 7.0;
        double t = c + 0.8 * (rng.uniform01() - 0.5);
        arr.push_back(std::clamp(t, 0.0, len));
    }
    SampleSet s(arr, 4, len);
    const double w = select_bandwidth(s);

    const double lo = len / (2.0 * static_cast<double>(s.size())), hi = len / 2.0;
    double best_w = lo;
    double best = ise_score(s, lo);
    for (int k = 1; k < 500; ++k) {
        const double cand = lo * std::pow(hi / lo, k / 499.0);
        const double score = ise_score(s, cand);
        if (score < best) {
            best = score;
            best_w = cand;
        }
    }
    const double step = std::pow(hi / lo, 1.0 / 499.0);
    CHECK(w >= best_w / step * 0.999);
    CHECK(w <= best_w * step * 1.001);
    // the golden step tolerance is 1e-4 relative, so scores can differ at that scale
    CHECK(ise_score(s, w) <= best + 1e-4 * std::fabs(best));
}

TEST_CASE("bandwidth selection is scale equivariant") {
    Rng rng(83);
    SampleSet s = random_samples(rng, 8);
    const double w = select_bandwidth(s);
    const double c = 3.7;
    std::vector<double> scaled = s.arrivals;
    for (double& t : scaled) t *= c;
    SampleSet s2(scaled, s.period_count, s.period_length * c);
    const double w2 = select_bandwidth(s2);
    CHECK(w2 == doctest::Approx(c * w).epsilon(1e-6));
}

TEST_CASE("bandwidth selection falls back below two samples") {
    SampleSet one({2.0}, 1, 12.0);
    CHECK(select_bandwidth(one) == doctest::Approx(1.2));
    SampleSet zero({}, 1, 12.0);
    CHECK(select_bandwidth(zero) == doctest::Approx(1.2));
}

TEST_CASE("expected requests over whole and partial windows") {
    SampleSet s({0.5, 2.2, 3.3, 6.1, 7.0, 7.9}, 2, 8.0);
    IntensityEstimate est = estimate_intensity(s, 1.1);
    CHECK(expected_requests(est, 0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(expected_requests(est, 1.0, -0.1), std::invalid_argument);
    // one full period from any phase
    CHECK(expected_requests(est, 0.0, 8.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(expected_requests(est, 5.3, 8.0) == doctest::Approx(3.0).epsilon(1e-9));
    // several periods plus a remainder, window wrapping the boundary
    const double direct = adaptive_simpson([&](double t) { return est(t); }, 6.0, 8.0, 1e-11) +
                          adaptive_simpson([&](double t) { return est(t); }, 0.0, 1.5, 1e-11);
    CHECK(expected_requests(est, 6.0, 2.0 * 8.0 + 3.5) ==
          doctest::Approx(2.0 * 3.0 + direct).epsilon(1e-7));
    // negative start phases wrap too
    CHECK(expected_requests(est, -2.0, 8.0) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("estimate rejects invalid bandwidths") {
    SampleSet s({1.0, 2.0}, 1, 4.0);
    CHECK_THROWS_AS(estimate_intensity(s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_intensity(s, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_intensity(s, -1.0), std::invalid_argument);
}

TEST_CASE("samples exactly on the period boundaries keep unit mass") {
    const double len = 6.0;
    SampleSet s({0.0, len}, 3, len);
    for (double w : {0.5, 2.9, 5.9}) {
        IntensityEstimate est = estimate_intensity(s, w);
        CHECK(est.mass() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        const double quad =
            adaptive_simpson([&](double t) { return est(t); }, 0.0, len, 1e-10);
        CHECK(quad == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
        CHECK(std::isfinite(ise_score(s, w)));
        CHECK(detail::intensity_sq_integral_pairwise(s, w) ==
              doctest::Approx(detail::intensity_sweep(s, w).sq_integral).epsilon(5e-9));
    }
}

TEST_CASE("sample set validates its invariants") {
    CHECK_THROWS_AS(SampleSet({-0.1}, 1, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(SampleSet({4.1}, 1, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(SampleSet({1.0}, 0, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(SampleSet({1.0}, 1, 0.0), std::invalid_argument);
    SampleSet ok({0.0, 4.0}, 1, 4.0);  // boundary arrivals are valid
    CHECK(ok.size() == 2);
}
