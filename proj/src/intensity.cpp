#include "d2dcache/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace d2dcache {

namespace {

void check_bandwidth(double bandwidth, double period_length) {
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("bandwidth must be positive, got " + std::to_string(bandwidth));
    if (!(bandwidth < period_length))
        throw std::invalid_argument("bandwidth must be smaller than the period length (" +
                                    std::to_string(bandwidth) + " >= " +
                                    std::to_string(period_length) + ")");
}

}  // namespace

SampleSet::SampleSet(std::vector<double> arrival_times, int periods, double period_len)
    : arrivals(std::move(arrival_times)), period_count(periods), period_length(period_len) {
    if (period_count < 1) throw std::invalid_argument("period_count must be >= 1");
    if (!(period_length > 0.0)) throw std::invalid_argument("period_length must be positive");
    for (double t : arrivals)
        if (!(t >= 0.0) || !(t <= period_length))
            throw std::invalid_argument("arrival time outside [0, period_length]: " +
                                        std::to_string(t));
    std::sort(arrivals.begin(), arrivals.end());
}

double epanechnikov(double x) {
    const double a = std::fabs(x);
    return a <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
}

double epanechnikov_autocorr(double u) {
    const double a = std::fabs(u);
    if (a >= 2.0) return 0.0;
    const double d = 2.0 - a;
    return (3.0 / 160.0) * d * d * d * (a * a + 6.0 * a + 4.0);
}

double epanechnikov_cdf(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return 0.5 + 0.75 * x - 0.25 * x * x * x;
}

double corrected_kernel(double t, double t_alpha, double bandwidth, double period_length) {
    check_bandwidth(bandwidth, period_length);
    if (!(t_alpha >= 0.0) || !(t_alpha <= period_length))
        throw std::invalid_argument("t_alpha outside [0, period_length]");
    const double d = t - t_alpha;
    return epanechnikov(d / bandwidth) + epanechnikov((d + period_length) / bandwidth) +
           epanechnikov((d - period_length) / bandwidth);
}

IntensityEstimate::IntensityEstimate(SampleSet samples, double bandwidth, EndCorrection correction)
    : samples_(std::move(samples)), bandwidth_(bandwidth), correction_(correction) {
    check_bandwidth(bandwidth_, samples_.period_length);
}

double IntensityEstimate::operator()(double t) const {
    const double length = samples_.period_length;
    if (t < 0.0 || t > length || samples_.empty()) return 0.0;
    const auto& arr = samples_.arrivals;
    const double w = bandwidth_;
    double sum = 0.0;
    // kernel copies are centered at t_alpha + shift; only samples with
    // |t - center| < w contribute
    const int n_shifts = correction_ == EndCorrection::wrapped ? 3 : 1;
    static constexpr double kShiftSign[3] = {0.0, -1.0, 1.0};
    for (int s = 0; s < n_shifts; ++s) {
        const double shift = kShiftSign[s] * length;
        const auto lo = std::lower_bound(arr.begin(), arr.end(), t - shift - w);
        const auto hi = std::upper_bound(arr.begin(), arr.end(), t - shift + w);
        for (auto it = lo; it != hi; ++it) sum += epanechnikov((t - (*it + shift)) / w);
    }
    return sum / (samples_.period_count * w);
}

double IntensityEstimate::integral(double a, double b) const {
    const double length = samples_.period_length;
    a = std::max(a, 0.0);
    b = std::min(b, length);
    if (!(b > a) || samples_.empty()) return 0.0;
    const double w = bandwidth_;
    double sum = 0.0;
    for (double t_alpha : samples_.arrivals) {
        if (correction_ == EndCorrection::wrapped) {
            for (double shift : {-length, 0.0, length}) {
                const double c = t_alpha + shift;
                sum += epanechnikov_cdf((b - c) / w) - epanechnikov_cdf((a - c) / w);
            }
        } else {
            sum += epanechnikov_cdf((b - t_alpha) / w) - epanechnikov_cdf((a - t_alpha) / w);
        }
    }
    return sum / samples_.period_count;
}

IntensityEstimate estimate_intensity(SampleSet samples, double bandwidth) {
    return IntensityEstimate(std::move(samples), bandwidth, EndCorrection::wrapped);
}

namespace detail {

double intensity_sq_integral_pairwise(const SampleSet& samples, double bandwidth) {
    check_bandwidth(bandwidth, samples.period_length);
    const auto& arr = samples.arrivals;
    const double w = bandwidth;
    const double length = samples.period_length;
    // \int_0^L Ktilde_a Ktilde_b dt = sum_d W * R((delta + d*L) / W)
    auto overlap = [&](double delta) {
        double acc = 0.0;
        for (int d = -2; d <= 2; ++d) acc += epanechnikov_autocorr((delta + d * length) / w);
        return w * acc;
    };
    double total = 0.0;
    for (std::size_t a = 0; a < arr.size(); ++a) {
        total += overlap(0.0);
        for (std::size_t b = a + 1; b < arr.size(); ++b) {
            total += 2.0 * overlap(arr[b] - arr[a]);
        }
    }
    const double scale = samples.period_count * w;
    return total / (scale * scale);
}

namespace {

// One event of the piecewise-quadratic sweep. Kind order matters: kernel
// segments opened or clipped at this position must be visible to evaluations
// here, while segments ending here contribute zero anyway (K(+-1) = 0).
enum class EventKind : int { add = 0, eval = 1, remove = 2 };

struct SweepCursor {
    const std::vector<double>* positions;  // sorted event positions
    const std::vector<double>* centers;    // kernel centers (nullptr for eval)
    std::size_t index = 0;
    EventKind kind = EventKind::add;
};

}  // namespace

SweepResult intensity_sweep(const SampleSet& samples, double bandwidth) {
    check_bandwidth(bandwidth, samples.period_length);
    SweepResult out;
    const auto& arr = samples.arrivals;
    if (arr.empty()) return out;
    const double w = bandwidth;
    const double length = samples.period_length;

    // Kernel copies at t_alpha + shift, clipped to [0, L]. Each stream below
    // stays sorted because arrivals are sorted; merging them avoids a per-call
    // sort even for very large sample sets.
    std::vector<double> starts[3], ends[3], centers[3];
    for (int s = 0; s < 3; ++s) {
        const double shift = (s == 0 ? -length : (s == 1 ? 0.0 : length));
        auto& st = starts[s];
        auto& en = ends[s];
        auto& ce = centers[s];
        st.reserve(arr.size());
        en.reserve(arr.size());
        ce.reserve(arr.size());
        for (double t_alpha : arr) {
            const double c = t_alpha + shift;
            const double lo = c - w, hi = c + w;
            if (hi <= 0.0 || lo >= length) continue;
            st.push_back(std::max(lo, 0.0));
            en.push_back(std::min(hi, length));
            ce.push_back(c);
        }
    }

    SweepCursor cursors[7];
    for (int s = 0; s < 3; ++s) {
        cursors[s] = {&starts[s], &centers[s], 0, EventKind::add};
        cursors[3 + s] = {&ends[s], &centers[s], 0, EventKind::remove};
    }
    cursors[6] = {&arr, nullptr, 0, EventKind::eval};

    const double inv_w2 = 1.0 / (w * w);
    double a_coef = 0.0, b_coef = 0.0, c_coef = 0.0;  // S(u) = A + B u + C u^2, u local
    double cur = 0.0;
    double sq_acc = 0.0, eval_acc = 0.0;

    for (;;) {
        int pick = -1;
        int pick_kind = 99;
        double pick_pos = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 7; ++i) {
            const auto& cu = cursors[i];
            if (cu.index >= cu.positions->size()) continue;
            const double pos = (*cu.positions)[cu.index];
            if (pos < pick_pos || (pos == pick_pos && static_cast<int>(cu.kind) < pick_kind)) {
                pick = i;
                pick_pos = pos;
                pick_kind = static_cast<int>(cu.kind);
            }
        }
        if (pick < 0) break;
        auto& cu = cursors[pick];

        const double h = pick_pos - cur;
        if (h > 0.0) {
            // exact integral of the running quadratic squared over the segment
            const double h2 = h * h;
            sq_acc += h * (a_coef * a_coef) + h2 * (a_coef * b_coef) +
                      h2 * h * ((b_coef * b_coef + 2.0 * a_coef * c_coef) / 3.0) +
                      h2 * h2 * (b_coef * c_coef / 2.0) + h2 * h2 * h * (c_coef * c_coef / 5.0);
            a_coef += b_coef * h + c_coef * h2;
            b_coef += 2.0 * c_coef * h;
            cur = pick_pos;
        }

        switch (cu.kind) {
            case EventKind::add: {
                const double g = cur - (*cu.centers)[cu.index];
                a_coef += 0.75 * (1.0 - g * g * inv_w2);
                b_coef += -1.5 * g * inv_w2;
                c_coef += -0.75 * inv_w2;
                break;
            }
            case EventKind::remove: {
                const double g = cur - (*cu.centers)[cu.index];
                a_coef -= 0.75 * (1.0 - g * g * inv_w2);
                b_coef -= -1.5 * g * inv_w2;
                c_coef -= -0.75 * inv_w2;
                break;
            }
            case EventKind::eval:
                eval_acc += a_coef;
                break;
        }
        ++cu.index;
    }

    const double scale = samples.period_count * w;
    out.sq_integral = sq_acc / (scale * scale);
    out.self_eval_sum = eval_acc / scale;
    return out;
}

}  // namespace detail

double ise_score(const SampleSet& samples, double bandwidth) {
    check_bandwidth(bandwidth, samples.period_length);
    const auto n_p = static_cast<double>(samples.size());
    if (samples.size() < 2)
        throw insufficient_data_error("ise_score needs at least two samples, got " +
                                      std::to_string(samples.size()));
    const double n_t = samples.period_count;
    const auto sweep = detail::intensity_sweep(samples, bandwidth);
    // leave-one-out value at each sample: drop the sample's own kernel, whose
    // translated copies vanish at distance L >= W
    const double self_term = n_p * 0.75 / (n_t * bandwidth);
    const double loo_sum = sweep.self_eval_sum - self_term;
    return (n_t * n_t) / (9.0 * n_p * n_p) * sweep.sq_integral -
           2.0 * n_t / (3.0 * n_p * (3.0 * n_p - 1.0)) * loo_sum;
}

double select_bandwidth(const SampleSet& samples) {
    const double length = samples.period_length;
    if (samples.size() < 2) {
        std::cerr << "d2dcache: bandwidth cross-validation needs >= 2 samples (got "
                  << samples.size() << "); using default W = L/10\n";
        return length / 10.0;
    }
    const double lo = length / (2.0 * static_cast<double>(samples.size()));
    const double hi = length / 2.0;

    double best_w = hi;
    double best_score = std::numeric_limits<double>::infinity();
    auto probe = [&](double w) {
        const double score = ise_score(samples, w);
        // ties resolved toward the smaller bandwidth
        if (score < best_score || (score == best_score && w < best_w)) {
            best_score = score;
            best_w = w;
        }
        return score;
    };

    constexpr int kGridPoints = 50;
    const double ratio = std::pow(hi / lo, 1.0 / (kGridPoints - 1));
    int best_idx = 0;
    double best_grid = std::numeric_limits<double>::infinity();
    double grid_w[kGridPoints];
    for (int k = 0; k < kGridPoints; ++k) {
        grid_w[k] = (k == kGridPoints - 1) ? hi : lo * std::pow(ratio, k);
        const double score = probe(grid_w[k]);
        if (score < best_grid) {
            best_grid = score;
            best_idx = k;
        }
    }

    // golden-section refinement inside the bracketing grid cells
    double a = grid_w[std::max(0, best_idx - 1)];
    double b = grid_w[std::min(kGridPoints - 1, best_idx + 1)];
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = probe(x1);
    double f2 = probe(x2);
    for (int iter = 0; iter < 200 && (b - a) > 1e-4 * 0.5 * (a + b); ++iter) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = probe(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = probe(x2);
        }
    }
    return best_w;
}

double expected_requests(const IntensityEstimate& estimate, double t_start, double duration) {
    if (duration < 0.0) throw std::invalid_argument("duration must be non-negative");
    if (duration == 0.0) return 0.0;
    const double length = estimate.samples().period_length;
    double t0 = std::fmod(t_start, length);
    if (t0 < 0.0) t0 += length;
    const double full_periods = std::floor(duration / length);
    double total = full_periods * estimate.mass();
    const double rem = duration - full_periods * length;
    const double end = t0 + rem;
    if (end <= length) {
        total += estimate.integral(t0, end);
    } else {
        total += estimate.integral(t0, length) + estimate.integral(0.0, end - length);
    }
    return total;
}

}  // namespace d2dcache
