#pragma once

#include <cstdint>
#include <vector>

#include "d2dcache/channel.hpp"
#include "d2dcache/errors.hpp"
#include "d2dcache/matrix.hpp"

namespace d2dcache {

/// Binary cache state with per-user capacity and remaining update budgets.
struct CacheMatrix {
    BinaryMatrix phi;                 // N x M
    int capacity = 0;                 // mu, files per user
    std::vector<int> update_budgets;  // xi_i remaining

    std::size_t users() const { return phi.rows(); }
    std::size_t files() const { return phi.cols(); }
    int row_fill(std::size_t user) const;
};

/// Request weights. Entries are non-negative; the normalized factory scales
/// expected request counts so they sum to one.
struct WeightMatrix {
    MatrixD omega;  // N x M

    static WeightMatrix normalized(MatrixD expected_requests);
    void validate() const;
};

/// Weighted average transmission delay: sum_ij omega_ij * D_ij.
double average_delay(const WeightMatrix& weights, const MatrixD& d_min);

/// One d_min/source cell rewritten by a candidate placement.
struct SourceUpdate {
    int user = 0;
    double delay = 0.0;
    int source = kBaseStation;
};

/// Outcome of evaluating one <user,file> candidate. Evaluation is
/// side-effect-free: budgets and matrices are only touched when a winning
/// candidate is committed.
struct PlacementEval {
    double gain = 0.0;
    bool placeable = false;       // false: already cached, or budget forbids it
    bool consumes_budget = false; // placement is new relative to the previous cycle
    std::vector<SourceUpdate> updates;
};

/// Delay improvement of caching file j at user i (Algorithm 1): the user's own
/// delay drops to zero and every user whose current best delay exceeds the
/// D2D link to i is relinked.
PlacementEval delay_improvement(int user, int file, const CacheMatrix& cache,
                                const BinaryMatrix& prev_phi, const WeightMatrix& weights,
                                const DelayState& state, const MatrixD& t_avg,
                                const std::vector<int>& budget_left);

class GreedyCaching {
public:
    /// prev_phi is the physically retained cache of the previous cycle;
    /// budgets are the per-user update limits xi_i for this cycle.
    GreedyCaching(const WeightMatrix& weights, const MatrixD& t_avg, BinaryMatrix prev_phi,
                  int capacity_mu, std::vector<int> budgets);

    struct Pick {
        int user = 0;
        int file = 0;
        double gain = 0.0;
    };

    /// One greedy round (Algorithm 2): evaluates every uncached pair, commits
    /// the best feasible one. When every gain is zero, falls back to the
    /// largest-weight feasible pair so the caches always fill up.
    Pick step();

    /// Runs N*mu rounds (Algorithm 3) from the empty logical cache.
    void run();

    const CacheMatrix& cache() const { return cache_; }
    const DelayState& state() const { return state_; }
    long evaluations() const { return evaluations_; }
    const std::vector<double>& eta_trace() const { return eta_trace_; }
    const std::vector<double>& gain_trace() const { return gain_trace_; }
    bool done() const { return placements_ == static_cast<long>(cache_.users()) * cache_.capacity; }

private:
    const WeightMatrix& weights_;
    const MatrixD& t_avg_;
    BinaryMatrix prev_phi_;
    CacheMatrix cache_;
    DelayState state_;
    long evaluations_ = 0;
    long placements_ = 0;
    std::vector<double> eta_trace_;
    std::vector<double> gain_trace_;
};

struct CachingResult {
    CacheMatrix cache;
    DelayState state;
    long evaluations = 0;
    std::vector<double> eta_trace;   // eta after each committed placement
    std::vector<double> gain_trace;  // committed g* per round
};

/// Full greedy cycle (Algorithm 3). budgets may be empty, meaning
/// unconstrained (xi_i = mu).
CachingResult run_caching(const WeightMatrix& weights, const MatrixD& t_avg,
                          const BinaryMatrix& prev_phi, int capacity_mu,
                          std::vector<int> budgets = {});

/// Every user caches its top-mu files by its own weight row; ties go to the
/// lower file index.
CacheMatrix naive_cache(const MatrixD& per_user_weights, int capacity_mu);

/// Each user independently draws mu distinct files, proportionally to
/// popularity, without replacement. Deterministic per seed.
CacheMatrix probabilistic_cache(const std::vector<double>& popularity, int n_users,
                                int capacity_mu, std::uint64_t rng_seed);

struct ExhaustiveResult {
    BinaryMatrix phi;
    double eta = 0.0;
};

/// Exhaustive minimizer of the average delay over all feasible cache states
/// (update budgets unconstrained). Refuses instances with more than 10^6
/// candidate states.
ExhaustiveResult exhaustive_optimal(const WeightMatrix& weights, const MatrixD& t_avg,
                                    int capacity_mu);

}  // namespace d2dcache
