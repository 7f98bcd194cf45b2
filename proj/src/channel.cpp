#include "d2dcache/channel.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "d2dcache/parallel.hpp"

namespace d2dcache {

namespace {

// coincident nodes would make d^-4 singular
constexpr double kDistanceFloorKm = 1e-3;

std::uint64_t bits_of(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

void SystemParams::validate(std::size_t n_users) const {
    if (!(frame_duration > 0.0) || !(channel_bandwidth > 0.0) || !(noise_variance > 0.0))
        throw std::invalid_argument("frame duration, bandwidth and noise variance must be positive");
    if (!(file_size_bits > 0.0)) throw std::invalid_argument("file size must be positive");
    if (!(bs_power > 0.0)) throw std::invalid_argument("base-station power must be positive");
    if (user_powers.size() != n_users)
        throw std::invalid_argument("user_powers length must match the user count");
    for (double p : user_powers)
        if (!(p > 0.0)) throw std::invalid_argument("user powers must be positive");
    if (!(pathloss_exponent > 0.0)) throw std::invalid_argument("pathloss exponent must be positive");
    if (channel_count < 1) throw std::invalid_argument("channel count must be >= 1");
}

double distance_km(const Point& a, const Point& b) {
    return std::max(std::hypot(a.x - b.x, a.y - b.y), kDistanceFloorKm);
}

void Topology::validate() const {
    if (!(cell_radius_km > 0.0)) throw std::invalid_argument("cell radius must be positive");
    for (const auto& p : user_positions) {
        if (std::hypot(p.x - bs_position.x, p.y - bs_position.y) > cell_radius_km * (1.0 + 1e-12))
            throw std::invalid_argument("user outside the cell radius");
    }
}

double channel_capacity(double power, double fading, const SystemParams& params) {
    if (fading < 0.0) throw std::invalid_argument("fading magnitude-square must be >= 0");
    const double snr = power / (params.channel_bandwidth * params.noise_variance);
    return params.channel_bandwidth * std::log2(1.0 + snr * fading);
}

double sample_fading(double mean, Rng& rng) {
    if (!(mean > 0.0)) throw std::invalid_argument("fading mean must be positive");
    return rng.exponential(mean);
}

std::int64_t transmission_delay_sample(double power, double fading_mean,
                                       const SystemParams& params, Rng& rng) {
    return frames_to_deliver(
        params.file_size_bits, params.frame_duration,
        [&] { return channel_capacity(power, sample_fading(fading_mean, rng), params); },
        params.max_delay_frames);
}

double estimate_avg_delay(double power, double fading_mean, const SystemParams& params,
                          int n_samples, std::uint64_t rng_seed) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    Rng rng(rng_seed);
    double total = 0.0;
    for (int i = 0; i < n_samples; ++i)
        total += static_cast<double>(transmission_delay_sample(power, fading_mean, params, rng));
    return total / n_samples;
}

MatrixD build_delay_matrix(const Topology& topology, const SystemParams& params, int n_samples,
                           std::uint64_t rng_seed, int threads) {
    topology.validate();
    const std::size_t n = topology.size();
    params.validate(n);
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");

    struct Link {
        std::size_t i, j;
        double power, distance;
    };
    std::vector<Link> links;
    links.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        links.push_back({i, i, params.bs_power,
                         distance_km(topology.bs_position, topology.user_positions[i])});
        for (std::size_t j = i + 1; j < n; ++j) {
            // symmetric D2D link, estimated once per unordered pair; the
            // lower-indexed user's power is used as the D2D transmit power
            links.push_back({i, j, params.user_powers[i],
                             distance_km(topology.user_positions[i], topology.user_positions[j])});
        }
    }

    MatrixD t_avg(n, n, 0.0);
    parallel_for(links.size(), threads, [&](std::size_t idx) {
        const Link& link = links[idx];
        const double mean = std::pow(link.distance, -params.pathloss_exponent);
        const std::uint64_t kind = link.i == link.j ? 0u : 1u;
        const std::uint64_t seed =
            derive_seed(rng_seed, {kind, bits_of(link.distance), bits_of(link.power)});
        const double avg = estimate_avg_delay(link.power, mean, params, n_samples, seed);
        t_avg(link.i, link.j) = avg;
        t_avg(link.j, link.i) = avg;
    });
    return t_avg;
}

DelayState compute_best_sources(const MatrixD& t_avg, const BinaryMatrix& phi) {
    const std::size_t n = phi.rows(), m = phi.cols();
    if (t_avg.rows() != n || t_avg.cols() != n)
        throw std::invalid_argument("t_avg dimensions do not match the cache matrix");
    DelayState state;
    state.t_avg = t_avg;
    state.d_min = MatrixD(n, m, 0.0);
    state.source = Matrix<int>(n, m, kBaseStation);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (phi(i, j)) {
                state.d_min(i, j) = 0.0;
                state.source(i, j) = static_cast<int>(i);
                continue;
            }
            double best = t_avg(i, i);  // the base station always has the file
            int src = kBaseStation;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || !phi(k, j)) continue;
                if (t_avg(i, k) < best) {
                    best = t_avg(i, k);
                    src = static_cast<int>(k);
                }
            }
            state.d_min(i, j) = best;
            state.source(i, j) = src;
        }
    }
    return state;
}

}  // namespace d2dcache
