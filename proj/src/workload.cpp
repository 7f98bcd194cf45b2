#include "d2dcache/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "d2dcache/quadrature.hpp"
#include "d2dcache/rng.hpp"

namespace d2dcache {

namespace {

// antiderivative of the unit raised cosine 0.5*(1 + cos(pi x)) on [-1, 1]
double raised_cosine_cdf(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return (std::numbers::pi * x + std::sin(std::numbers::pi * x) + std::numbers::pi) /
           (2.0 * std::numbers::pi);
}

double raised_cosine(double x) {
    return std::fabs(x) <= 1.0 ? 0.5 * (1.0 + std::cos(std::numbers::pi * x)) : 0.0;
}

}  // namespace

IntensityProfile::IntensityProfile(double base_level, std::vector<RaisedCosineBump> bumps,
                                   double period_len)
    : base_(base_level), bumps_(std::move(bumps)), period_length_(period_len) {
    if (!(period_length_ > 0.0)) throw std::invalid_argument("period_length must be positive");
    if (base_ < 0.0) throw std::invalid_argument("base level must be non-negative");
    for (const auto& b : bumps_) {
        if (b.amplitude < 0.0) throw std::invalid_argument("bump amplitude must be non-negative");
        if (!(b.width > 0.0)) throw std::invalid_argument("bump width must be positive");
        if (b.center < 0.0 || b.center >= period_length_)
            throw std::invalid_argument("bump center must lie in [0, period_length)");
    }
}

double IntensityProfile::operator()(double t) const {
    double value = base_;
    for (const auto& b : bumps_) {
        const int m_lo = static_cast<int>(std::floor((t - b.center - b.width) / period_length_));
        const int m_hi = static_cast<int>(std::ceil((t - b.center + b.width) / period_length_));
        for (int m = m_lo; m <= m_hi; ++m)
            value += b.amplitude * raised_cosine((t - b.center - m * period_length_) / b.width);
    }
    return value;
}

double IntensityProfile::integral(double a, double b) const {
    if (!(b > a)) return 0.0;
    double total = base_ * (b - a);
    for (const auto& bump : bumps_) {
        const int m_lo =
            static_cast<int>(std::floor((a - bump.center - bump.width) / period_length_));
        const int m_hi =
            static_cast<int>(std::ceil((b - bump.center + bump.width) / period_length_));
        for (int m = m_lo; m <= m_hi; ++m) {
            const double c = bump.center + m * period_length_;
            total += bump.amplitude * bump.width *
                     (raised_cosine_cdf((b - c) / bump.width) -
                      raised_cosine_cdf((a - c) / bump.width));
        }
    }
    return total;
}

double IntensityProfile::max_bound() const {
    double bound = base_;
    for (const auto& b : bumps_)
        bound += b.amplitude * (1.0 + std::floor(2.0 * b.width / period_length_));
    return bound;
}

PopularityVector zipf_popularity(int n_files, double beta) {
    if (n_files < 1) throw std::invalid_argument("zipf_popularity needs at least one file");
    if (beta < 0.0) throw std::invalid_argument("zipf exponent must be non-negative");
    PopularityVector p(static_cast<std::size_t>(n_files));
    double total = 0.0;
    for (int k = 0; k < n_files; ++k) {
        p[k] = std::pow(static_cast<double>(k + 1), -beta);
        total += p[k];
    }
    for (double& v : p) v /= total;
    return p;
}

SampleSet sample_requests(const IntensityProfile& profile, int periods, std::uint64_t rng_seed) {
    if (periods < 1) throw std::invalid_argument("periods must be >= 1");
    const double length = profile.period_length();
    const double bound = profile.max_bound();
    std::vector<double> arrivals;
    if (bound > 0.0) {
        Rng rng(rng_seed);
        const double horizon = periods * length;
        double t = rng.exponential(1.0 / bound);
        while (t < horizon) {
            double folded = std::fmod(t, length);
            if (rng.uniform01() * bound < profile(folded)) arrivals.push_back(folded);
            t += rng.exponential(1.0 / bound);
        }
    }
    return SampleSet(std::move(arrivals), periods, length);
}

const std::vector<std::vector<int>>& scripted_preference_lists() {
    static const std::vector<std::vector<int>> lists = {
        {1, 2, 3, 4, 5, 6, 7, 8, 9},
        {8, 9, 10, 11, 12, 13, 14, 1, 2},
        {15, 16, 17, 18, 19, 20, 21, 1, 2},
    };
    return lists;
}

UserProfiles build_user_profiles(const ProfileConfig& config, std::uint64_t rng_seed) {
    if (config.n_users < 1 || config.n_files < 1)
        throw std::invalid_argument("profile config needs at least one user and one file");
    if (!(config.min_intensity > 0.0))
        throw std::invalid_argument("min_intensity must be positive");
    if (!(config.period_length > 0.0))
        throw std::invalid_argument("period_length must be positive");
    if (config.mode == PopularityMode::scripted && (config.n_users != 3 || config.n_files != 21))
        throw std::invalid_argument("scripted mode is defined for 3 users and 21 files");

    const int n = config.n_users, m = config.n_files;
    const double length = config.period_length;

    // per-period target mean for each <user,file>, indexed by the user's rank
    std::vector<std::vector<double>> mean(n, std::vector<double>(m, config.min_intensity));
    std::vector<std::vector<int>> rank_of(n, std::vector<int>(m, m - 1));

    if (config.mode == PopularityMode::scripted) {
        const auto& lists = scripted_preference_lists();
        for (int u = 0; u < n; ++u) {
            for (std::size_t r = 0; r < lists[u].size(); ++r) {
                const int file = lists[u][r] - 1;
                rank_of[u][file] = static_cast<int>(r);
                // linear preference decay, floored at the minimum intensity
                mean[u][file] = config.min_intensity * 2.0 * (9.0 - static_cast<double>(r));
            }
        }
    } else {
        const PopularityVector pop = zipf_popularity(m, config.zipf_beta);
        const double least = pop.back();
        std::vector<int> shared_by_rank(m);
        std::iota(shared_by_rank.begin(), shared_by_rank.end(), 0);
        if (config.mode == PopularityMode::identical) {
            Rng rng(derive_seed(rng_seed, {hash_str("rank")}));
            rng.shuffle(shared_by_rank);
        }
        for (int u = 0; u < n; ++u) {
            std::vector<int> by_rank = shared_by_rank;
            if (config.mode == PopularityMode::independent) {
                Rng rng(derive_seed(rng_seed, {hash_str("rank"), static_cast<std::uint64_t>(u)}));
                rng.shuffle(by_rank);
            }
            for (int r = 0; r < m; ++r) {
                rank_of[u][by_rank[r]] = r;
                mean[u][by_rank[r]] = config.min_intensity * (pop[r] / least);
            }
        }
    }

    // shared per-user activity shape: flat plus one raised-cosine peak window,
    // normalized to unit mass so per-file means stay exact
    const double width = config.bump_width_frac * length;
    const double gain = config.peak_multiplier - 1.0;
    std::vector<double> peak(n);
    if (config.mode == PopularityMode::scripted) {
        peak = {0.245 * length, 0.745 * length, 0.245 * length};
    } else {
        for (int u = 0; u < n; ++u) {
            Rng rng(derive_seed(rng_seed, {hash_str("peak"), static_cast<std::uint64_t>(u)}));
            peak[u] = rng.uniform01() * length;
        }
    }
    const double shape_mass = length + gain * width;

    UserProfiles out;
    out.profiles = Matrix<IntensityProfile>(static_cast<std::size_t>(n),
                                            static_cast<std::size_t>(m));
    out.rank_of = std::move(rank_of);
    for (int u = 0; u < n; ++u) {
        for (int f = 0; f < m; ++f) {
            const double mu = mean[u][f];
            std::vector<RaisedCosineBump> bumps;
            if (gain > 0.0 && width > 0.0)
                bumps.push_back({mu * gain / shape_mass, peak[u], width});
            out.profiles(u, f) = IntensityProfile(mu / shape_mass, std::move(bumps), length);
        }
    }
    return out;
}

namespace {

double truth_sq_integral(const IntensityProfile& truth) {
    const double length = truth.period_length();
    const double mass = truth.mass();
    if (!(mass > 0.0)) throw std::domain_error("estimation_error: truth profile has zero mass");
    const double rough = mass * mass / length;  // lower bound on int lambda^2
    return adaptive_simpson([&](double t) { const double v = truth(t); return v * v; }, 0.0,
                            length, 1e-10 * std::max(1.0, rough));
}

}  // namespace

double estimation_error(const IntensityEstimate& estimate, const IntensityProfile& truth) {
    if (std::fabs(estimate.samples().period_length - truth.period_length()) >
        1e-12 * truth.period_length())
        throw std::invalid_argument("estimation_error: period lengths differ");
    if (estimate.correction() != EndCorrection::wrapped) {
        return estimation_error(
            std::function<double(double)>([&](double t) { return estimate(t); }), truth);
    }
    const double denom_sq = truth_sq_integral(truth);
    const auto& samples = estimate.samples();
    const double w = estimate.bandwidth();
    const double length = truth.period_length();

    double est_sq = 0.0;
    double cross = 0.0;
    if (!samples.empty()) {
        est_sq = detail::intensity_sweep(samples, w).sq_integral;
        const double scale = samples.period_count * w;
        const double tol = 1e-11 * std::max(1.0, denom_sq) /
                           static_cast<double>(3 * samples.size());
        for (double t_alpha : samples.arrivals) {
            for (double shift : {-length, 0.0, length}) {
                const double c = t_alpha + shift;
                const double lo = std::max(c - w, 0.0), hi = std::min(c + w, length);
                if (hi <= lo) continue;
                cross += adaptive_simpson(
                             [&](double t) { return epanechnikov((t - c) / w) * truth(t); }, lo,
                             hi, tol, 48, 3) /
                         scale;
            }
        }
    }
    const double num_sq = std::max(0.0, est_sq - 2.0 * cross + denom_sq);
    return std::sqrt(num_sq) / std::sqrt(denom_sq);
}

double estimation_error(const std::function<double(double)>& estimate,
                        const IntensityProfile& truth) {
    const double denom_sq = truth_sq_integral(truth);
    const double length = truth.period_length();
    const double num_sq = adaptive_simpson(
        [&](double t) {
            const double d = estimate(t) - truth(t);
            return d * d;
        },
        0.0, length, 1e-10 * std::max(1.0, denom_sq));
    return std::sqrt(std::max(0.0, num_sq)) / std::sqrt(denom_sq);
}

}  // namespace d2dcache
