#pragma once

#include <cstdint>
#include <vector>

#include "d2dcache/errors.hpp"
#include "d2dcache/matrix.hpp"
#include "d2dcache/rng.hpp"

namespace d2dcache {

/// Source table entry for "served by the base station".
inline constexpr int kBaseStation = -1;

struct SystemParams {
    double frame_duration = 1.0;     // T0, seconds
    double channel_bandwidth = 1.0;  // B, Hz
    double noise_variance = 1.0;     // sigma^2, W/Hz
    double file_size_bits = 0.0;     // F
    double bs_power = 0.0;           // P_b; with B = sigma^2 = 1 this is the SNR ratio
    std::vector<double> user_powers; // P_i per user
    double pathloss_exponent = 4.0;
    int channel_count = 1;           // N_c; carried as configuration only
    std::int64_t max_delay_frames = 1'000'000;

    void validate(std::size_t n_users) const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance_km(const Point& a, const Point& b);

struct Topology {
    double cell_radius_km = 1.0;
    Point bs_position{};
    std::vector<Point> user_positions;

    std::size_t size() const { return user_positions.size(); }
    void validate() const;  // every user inside the cell
};

/// Average-delay state for one cache configuration: the symmetric link-delay
/// matrix, the per-<user,file> best achievable delay, and the chosen source.
struct DelayState {
    MatrixD t_avg;            // N x N; diagonal = BS link, off-diagonal = D2D
    MatrixD d_min;            // N x M
    Matrix<int> source;       // N x M; kBaseStation or a user index
};

/// Instantaneous capacity B * log2(1 + P/(B sigma^2) * z) in bits/s.
double channel_capacity(double power, double fading, const SystemParams& params);

/// Magnitude-square of a Rayleigh fading coefficient: exponential with the
/// given mean (typically distance^-pathloss_exponent).
double sample_fading(double mean, Rng& rng);

/// Frames needed to push `file_bits` through a link whose per-frame capacity
/// comes from `rate`; throws pathological_link_error past `cap` frames.
template <typename RateFn>
std::int64_t frames_to_deliver(double file_bits, double frame_duration, RateFn&& rate,
                               std::int64_t cap) {
    double sent = 0.0;
    for (std::int64_t frame = 1; frame <= cap; ++frame) {
        sent += frame_duration * rate();
        if (sent >= file_bits) return frame;
    }
    throw pathological_link_error("transmission exceeded the frame cap");
}

/// One Monte-Carlo draw of the transmission delay with fresh fading per frame.
std::int64_t transmission_delay_sample(double power, double fading_mean,
                                       const SystemParams& params, Rng& rng);

/// Mean of n_samples delay draws; deterministic per seed.
double estimate_avg_delay(double power, double fading_mean, const SystemParams& params,
                          int n_samples, std::uint64_t rng_seed);

/// Builds the N x N average-delay matrix. Each link's RNG substream is keyed
/// on (seed, link kind, distance, power), so the result is independent of
/// evaluation order and thread count, and relabeling users permutes the
/// matrix exactly.
MatrixD build_delay_matrix(const Topology& topology, const SystemParams& params, int n_samples,
                           std::uint64_t rng_seed, int threads = 1);

/// Best source and minimum average delay per <user,file> for a cache state.
/// Ties prefer the base station, then the lowest user index.
DelayState compute_best_sources(const MatrixD& t_avg, const BinaryMatrix& phi);

}  // namespace d2dcache
