#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "d2dcache/errors.hpp"

namespace d2dcache {

/// Relative request arrival times observed over a whole number of behavior
/// periods. Arrivals are folded to [0, period_length] and kept sorted.
struct SampleSet {
    SampleSet(std::vector<double> arrival_times, int periods, double period_len);

    std::size_t size() const { return arrivals.size(); }  // N_p
    bool empty() const { return arrivals.empty(); }

    std::vector<double> arrivals;  // sorted, each in [0, period_length]
    int period_count = 1;          // N_T >= 1
    double period_length = 0.0;    // behavior period in seconds, > 0
};

/// Epanechnikov kernel 0.75*(1 - x^2) on |x| <= 1, zero elsewhere.
double epanechnikov(double x);

/// Kernel autocorrelation  \int K(x) K(x - u) dx ; zero for |u| >= 2.
double epanechnikov_autocorr(double u);

/// Kernel CDF  \int_{-1}^{x} K ; clamps to 0 / 1 outside [-1, 1].
double epanechnikov_cdf(double x);

/// End-corrected kernel: the kernel plus copies translated one period left
/// and right, so each sample keeps unit mass inside [0, L] (requires W < L).
double corrected_kernel(double t, double t_alpha, double bandwidth, double period_length);

enum class EndCorrection { none, wrapped };

/// Kernel intensity estimate for one <user,file> pair. Evaluates to
/// requests/second inside [0, L] and to zero outside. Immutable once built.
class IntensityEstimate {
public:
    IntensityEstimate() = default;
    IntensityEstimate(SampleSet samples, double bandwidth,
                      EndCorrection correction = EndCorrection::wrapped);

    /// lambda_hat(t); zero outside [0, L].
    double operator()(double t) const;

    /// Exact integral over [a, b] (clipped to [0, L]), via kernel CDFs.
    double integral(double a, double b) const;

    /// Integral over one full period. Equals N_p / N_T for the wrapped kernel.
    double mass() const { return integral(0.0, samples_.period_length); }

    double bandwidth() const { return bandwidth_; }
    const SampleSet& samples() const { return samples_; }
    EndCorrection correction() const { return correction_; }

private:
    SampleSet samples_{{}, 1, 1.0};
    double bandwidth_ = 0.25;
    EndCorrection correction_ = EndCorrection::wrapped;
};

/// End-corrected estimator with the given bandwidth (0 < W < L). An empty
/// sample set yields the zero function.
IntensityEstimate estimate_intensity(SampleSet samples, double bandwidth);

/// Leave-one-out cross-validation score of the bandwidth. Lower is better.
/// Throws insufficient_data_error when fewer than two samples are available.
double ise_score(const SampleSet& samples, double bandwidth);

/// Minimizes ise_score over (0, L): coarse log grid on [L/(2 N_p), L/2],
/// then golden-section refinement. Falls back to L/10 when N_p < 2.
double select_bandwidth(const SampleSet& samples);

/// Expected number of requests in [t_start, t_start + duration], treating the
/// estimate as L-periodic. duration must be non-negative.
double expected_requests(const IntensityEstimate& estimate, double t_start, double duration);

namespace detail {

// Exact \int_0^L lambda_hat^2 computed from pairwise kernel overlaps.
double intensity_sq_integral_pairwise(const SampleSet& samples, double bandwidth);

// Same integral via a sweep over the piecewise-quadratic segments; also
// returns sum_alpha lambda_hat(t_alpha). O(N_p log N_p) regardless of W.
struct SweepResult {
    double sq_integral = 0.0;
    double self_eval_sum = 0.0;
};
SweepResult intensity_sweep(const SampleSet& samples, double bandwidth);

}  // namespace detail

}  // namespace d2dcache
