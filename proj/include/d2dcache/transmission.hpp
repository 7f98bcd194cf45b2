#pragma once

#include <cstdint>
#include <vector>

#include "d2dcache/caching.hpp"
#include "d2dcache/channel.hpp"
#include "d2dcache/matrix.hpp"

namespace d2dcache {

struct Request {
    int user = 0;
    int file = 0;
};

/// Transmission-phase workload: one request list per time slot.
struct RequestBatch {
    std::vector<std::vector<Request>> slots;

    std::size_t total_requests() const;
    void validate(std::size_t n_users, std::size_t n_files) const;
};

enum class TransmissionMode { unicast, broadcast };

/// Max-min broadcast source selection: each candidate's rate is the minimum
/// link capacity over the receivers; the candidate with the largest such rate
/// wins. Ties prefer the base station, then the lowest user index.
/// `fading` holds one magnitude-square draw per (candidate, receiver) link and
/// `candidate_powers` one transmit power per candidate.
struct BroadcastPick {
    int source = kBaseStation;  // kBaseStation or a user index
    double rate = 0.0;          // bits/s
};
BroadcastPick broadcast_rate(const std::vector<int>& candidates,
                             const std::vector<int>& receivers, const MatrixD& fading,
                             const std::vector<double>& candidate_powers,
                             const SystemParams& params);

struct PhaseResult {
    double eta_hat = 0.0;             // realized average delay, frames per request
    std::int64_t requests_served = 0;
    std::int64_t broadcast_groups = 0;
};

/// Simulates the transmission phase for a fixed cache state. Self-cached
/// requests cost zero. Unicast serves every remaining request over its
/// best-source link with fresh per-frame fading. Broadcast groups same-file
/// requests from two or more users per slot: one max-min transmission serves
/// the whole group and contributes a single delay term, and a D2D transmitter
/// already broadcasting in a slot drops out of later candidate sets
/// (the base station is always available). Requests from a single user are
/// served exactly as in unicast mode, on the same RNG substream, so the two
/// modes coincide when no groups form.
PhaseResult simulate_phase(const RequestBatch& requests, const CacheMatrix& cache,
                           const DelayState& delay_state, const Topology& topology,
                           const SystemParams& params, TransmissionMode mode,
                           std::uint64_t rng_seed);

}  // namespace d2dcache
