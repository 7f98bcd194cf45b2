#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "d2dcache/intensity.hpp"
#include "d2dcache/matrix.hpp"

namespace d2dcache {

struct RaisedCosineBump {
    double amplitude = 0.0;  // peak height, requests/second
    double center = 0.0;     // in [0, L)
    double width = 0.0;      // half-support; bump mass = amplitude * width
};

/// Ground-truth periodic request intensity: a base level plus raised-cosine
/// bumps, extended L-periodically. Smooth, non-negative, integrable in
/// closed form.
class IntensityProfile {
public:
    IntensityProfile() = default;
    IntensityProfile(double base_level, std::vector<RaisedCosineBump> bumps, double period_len);

    double operator()(double t) const;  // L-periodic
    double integral(double a, double b) const;  // exact, any a <= b
    double mass() const { return integral(0.0, period_length_); }
    double period_length() const { return period_length_; }
    double max_bound() const;  // upper bound on sup lambda, used for thinning

    double base_level() const { return base_; }
    const std::vector<RaisedCosineBump>& bumps() const { return bumps_; }

private:
    double base_ = 0.0;
    std::vector<RaisedCosineBump> bumps_;
    double period_length_ = 1.0;
};

using PopularityVector = std::vector<double>;  // non-negative, sums to 1

/// Zipf popularity over M ranks: P(rank k) proportional to k^-beta.
PopularityVector zipf_popularity(int n_files, double beta);

/// Inhomogeneous-Poisson arrivals over `periods` behavior periods, folded to
/// relative time in [0, L]. Thinning against the profile's max bound;
/// deterministic for a fixed seed.
SampleSet sample_requests(const IntensityProfile& profile, int periods, std::uint64_t rng_seed);

enum class PopularityMode { independent, identical, scripted };

struct ProfileConfig {
    int n_users = 0;
    int n_files = 0;
    PopularityMode mode = PopularityMode::independent;
    double zipf_beta = 0.5;
    double min_intensity = 2.0;  // per-period mean of the least popular file
    double period_length = 1000.0;
    double bump_width_frac = 0.1;   // bump half-width as a fraction of L
    double peak_multiplier = 5.0;   // activity gain at a user's peak window
};

struct UserProfiles {
    Matrix<IntensityProfile> profiles;      // N x M
    std::vector<std::vector<int>> rank_of;  // rank_of[user][file] = 0-based rank
};

/// Per-<user,file> ground-truth profiles. Modes: independent random per-user
/// ranks, one shared random rank permutation, or the scripted 3-user scenario
/// (21 files, fixed preference lists, activity peaks at 24.5% and 74.5% of
/// the behavior period).
UserProfiles build_user_profiles(const ProfileConfig& config, std::uint64_t rng_seed);

/// Preference lists of the scripted 3-user scenario (1-based file ids).
const std::vector<std::vector<int>>& scripted_preference_lists();

/// Normalized L2 distance sqrt(int (f - lambda)^2) / sqrt(int lambda^2).
/// Throws std::domain_error when the truth has zero mass.
double estimation_error(const IntensityEstimate& estimate, const IntensityProfile& truth);
double estimation_error(const std::function<double(double)>& estimate,
                        const IntensityProfile& truth);

}  // namespace d2dcache
