#include "d2dcache/caching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "d2dcache/rng.hpp"

namespace d2dcache {

int CacheMatrix::row_fill(std::size_t user) const {
    int count = 0;
    for (std::size_t j = 0; j < phi.cols(); ++j) count += phi(user, j);
    return count;
}

WeightMatrix WeightMatrix::normalized(MatrixD expected_requests) {
    double total = 0.0;
    for (double v : expected_requests.data()) {
        if (v < 0.0) throw std::invalid_argument("expected request counts must be non-negative");
        total += v;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("cannot normalize an all-zero expected-request matrix");
    for (double& v : expected_requests.data()) v /= total;
    return WeightMatrix{std::move(expected_requests)};
}

void WeightMatrix::validate() const {
    for (double v : omega.data())
        if (v < 0.0) throw std::invalid_argument("weights must be non-negative");
}

double average_delay(const WeightMatrix& weights, const MatrixD& d_min) {
    if (weights.omega.rows() != d_min.rows() || weights.omega.cols() != d_min.cols())
        throw std::invalid_argument("weight and delay matrices must have matching dimensions");
    double eta = 0.0;
    const auto& w = weights.omega.data();
    const auto& d = d_min.data();
    for (std::size_t k = 0; k < w.size(); ++k) eta += w[k] * d[k];
    return eta;
}

PlacementEval delay_improvement(int user, int file, const CacheMatrix& cache,
                                const BinaryMatrix& prev_phi, const WeightMatrix& weights,
                                const DelayState& state, const MatrixD& t_avg,
                                const std::vector<int>& budget_left) {
    PlacementEval eval;
    if (cache.phi(user, file)) return eval;  // already cached this cycle: g = 0
    const bool is_new = prev_phi(user, file) == 0;
    if (is_new && budget_left[user] <= 0) return eval;  // update budget exhausted

    eval.placeable = true;
    eval.consumes_budget = is_new;
    eval.gain = weights.omega(user, file) * state.d_min(user, file);
    eval.updates.push_back({user, 0.0, user});
    const std::size_t n = t_avg.rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (static_cast<int>(k) == user) continue;
        const double link = t_avg(user, k);
        const double current = state.d_min(k, file);
        if (current > link) {
            eval.gain += weights.omega(k, file) * (current - link);
            eval.updates.push_back({static_cast<int>(k), link, user});
        } else if (current == link) {
            // equal-delay source: keep the canonical choice (BS, then lowest
            // index) so the maintained table matches a from-scratch rebuild
            const int cur_src = state.source(k, file);
            if (cur_src != kBaseStation && user < cur_src)
                eval.updates.push_back({static_cast<int>(k), link, user});
        }
    }
    return eval;
}

GreedyCaching::GreedyCaching(const WeightMatrix& weights, const MatrixD& t_avg,
                             BinaryMatrix prev_phi, int capacity_mu, std::vector<int> budgets)
    : weights_(weights), t_avg_(t_avg), prev_phi_(std::move(prev_phi)) {
    const std::size_t n = weights.omega.rows(), m = weights.omega.cols();
    weights.validate();
    if (t_avg.rows() != n || t_avg.cols() != n)
        throw std::invalid_argument("t_avg dimensions do not match the weight matrix");
    if (prev_phi_.rows() != n || prev_phi_.cols() != m)
        throw std::invalid_argument("previous cache dimensions do not match the weight matrix");
    if (capacity_mu < 0 || capacity_mu > static_cast<int>(m))
        throw std::invalid_argument("cache size mu must satisfy 0 <= mu <= M");
    if (budgets.empty()) budgets.assign(n, capacity_mu);
    if (budgets.size() != n) throw std::invalid_argument("budget vector length must be N");

    // a row must be fillable from retained files plus fresh updates
    for (std::size_t i = 0; i < n; ++i) {
        int retained = 0;
        for (std::size_t j = 0; j < m; ++j) retained += prev_phi_(i, j);
        if (retained + budgets[i] < capacity_mu)
            throw std::invalid_argument("update budget of user " + std::to_string(i) +
                                        " cannot fill its cache row");
    }

    cache_.phi = BinaryMatrix(n, m, 0);
    cache_.capacity = capacity_mu;
    cache_.update_budgets = std::move(budgets);
    // Algorithm 3 initialization: every request starts at the base station
    state_.t_avg = t_avg;
    state_.d_min = MatrixD(n, m, 0.0);
    state_.source = Matrix<int>(n, m, kBaseStation);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) state_.d_min(i, j) = t_avg(i, i);
}

GreedyCaching::Pick GreedyCaching::step() {
    const std::size_t n = cache_.users(), m = cache_.files();
    std::vector<int> fill(n, 0);
    for (std::size_t i = 0; i < n; ++i) fill[i] = cache_.row_fill(i);
    bool any_free = false;
    for (std::size_t i = 0; i < n; ++i) any_free |= fill[i] < cache_.capacity;
    if (!any_free) throw cache_full_error("no user has free cache space");

    PlacementEval best;
    int best_user = -1, best_file = -1;
    double fallback_weight = -1.0;
    PlacementEval fallback;
    int fb_user = -1, fb_file = -1;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (cache_.phi(i, j)) continue;  // outside the remaining search space
            PlacementEval eval =
                delay_improvement(static_cast<int>(i), static_cast<int>(j), cache_, prev_phi_,
                                  weights_, state_, t_avg_, cache_.update_budgets);
            ++evaluations_;
            if (!eval.placeable || fill[i] >= cache_.capacity) continue;
            if (best_user < 0 || eval.gain > best.gain) {
                best = std::move(eval);
                best_user = static_cast<int>(i);
                best_file = static_cast<int>(j);
            }
            if (weights_.omega(i, j) > fallback_weight) {
                fallback_weight = weights_.omega(i, j);
                fb_user = static_cast<int>(i);
                fb_file = static_cast<int>(j);
            }
        }
    }

    if (best_user < 0)
        throw std::runtime_error("no feasible placement left; update budgets are inconsistent");
    if (best.gain <= 0.0 && fb_user >= 0 && (fb_user != best_user || fb_file != best_file)) {
        // all gains zero: place the largest-weight feasible pair instead
        best = delay_improvement(fb_user, fb_file, cache_, prev_phi_, weights_, state_, t_avg_,
                                 cache_.update_budgets);
        best_user = fb_user;
        best_file = fb_file;
    }

    cache_.phi(best_user, best_file) = 1;
    if (best.consumes_budget) --cache_.update_budgets[best_user];
    for (const auto& u : best.updates) {
        state_.d_min(u.user, best_file) = u.delay;
        state_.source(u.user, best_file) = u.source;
    }
    ++placements_;
    gain_trace_.push_back(best.gain);
    eta_trace_.push_back(average_delay(weights_, state_.d_min));
    return {best_user, best_file, best.gain};
}

void GreedyCaching::run() {
    const long total = static_cast<long>(cache_.users()) * cache_.capacity;
    while (placements_ < total) step();
}

CachingResult run_caching(const WeightMatrix& weights, const MatrixD& t_avg,
                          const BinaryMatrix& prev_phi, int capacity_mu,
                          std::vector<int> budgets) {
    GreedyCaching greedy(weights, t_avg, prev_phi, capacity_mu, std::move(budgets));
    greedy.run();
    return {greedy.cache(), greedy.state(), greedy.evaluations(), greedy.eta_trace(),
            greedy.gain_trace()};
}

CacheMatrix naive_cache(const MatrixD& per_user_weights, int capacity_mu) {
    const std::size_t n = per_user_weights.rows(), m = per_user_weights.cols();
    if (capacity_mu < 0 || capacity_mu > static_cast<int>(m))
        throw std::invalid_argument("cache size mu must satisfy 0 <= mu <= M");
    CacheMatrix cache;
    cache.phi = BinaryMatrix(n, m, 0);
    cache.capacity = capacity_mu;
    cache.update_budgets.assign(n, 0);
    std::vector<int> order(m);
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return per_user_weights(i, a) > per_user_weights(i, b);
        });
        for (int r = 0; r < capacity_mu; ++r) cache.phi(i, order[r]) = 1;
    }
    return cache;
}

CacheMatrix probabilistic_cache(const std::vector<double>& popularity, int n_users,
                                int capacity_mu, std::uint64_t rng_seed) {
    const std::size_t m = popularity.size();
    if (capacity_mu < 0 || capacity_mu > static_cast<int>(m))
        throw std::invalid_argument("cache size mu must satisfy 0 <= mu <= M");
    for (double p : popularity)
        if (p < 0.0) throw std::invalid_argument("popularity entries must be non-negative");
    CacheMatrix cache;
    cache.phi = BinaryMatrix(static_cast<std::size_t>(n_users), m, 0);
    cache.capacity = capacity_mu;
    cache.update_budgets.assign(static_cast<std::size_t>(n_users), 0);
    for (int u = 0; u < n_users; ++u) {
        Rng rng(derive_seed(rng_seed, {static_cast<std::uint64_t>(u)}));
        std::vector<double> weight = popularity;
        double total = std::accumulate(weight.begin(), weight.end(), 0.0);
        for (int pick = 0; pick < capacity_mu; ++pick) {
            std::size_t chosen = m;
            if (total > 0.0) {
                const double x = rng.uniform01() * total;
                double acc = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    acc += weight[j];
                    if (x < acc) {
                        chosen = j;
                        break;
                    }
                }
            }
            if (chosen == m) {
                // residual mass exhausted (or swallowed by rounding): take the
                // first file not yet cached
                for (std::size_t j = 0; j < m; ++j) {
                    if (!cache.phi(u, j)) {
                        chosen = j;
                        break;
                    }
                }
            }
            cache.phi(u, chosen) = 1;
            total -= weight[chosen];
            weight[chosen] = 0.0;
        }
    }
    return cache;
}

ExhaustiveResult exhaustive_optimal(const WeightMatrix& weights, const MatrixD& t_avg,
                                    int capacity_mu) {
    weights.validate();
    const std::size_t n = weights.omega.rows(), m = weights.omega.cols();
    if (capacity_mu < 0 || capacity_mu > static_cast<int>(m))
        throw std::invalid_argument("cache size mu must satisfy 0 <= mu <= M");

    double per_user = 1.0;
    for (int k = 0; k < capacity_mu; ++k)
        per_user *= static_cast<double>(m - k) / static_cast<double>(k + 1);
    const double space = std::pow(per_user, static_cast<double>(n));
    if (space > 1e6)
        throw std::invalid_argument("exhaustive search space too large: " +
                                    std::to_string(space) + " states");

    // one combination odometer per user
    std::vector<std::vector<int>> combo(n);
    for (auto& c : combo) {
        c.resize(capacity_mu);
        std::iota(c.begin(), c.end(), 0);
    }
    auto advance_combo = [&](std::vector<int>& c) {
        int k = capacity_mu;
        for (int idx = k - 1; idx >= 0; --idx) {
            if (c[idx] < static_cast<int>(m) - (k - idx)) {
                ++c[idx];
                for (int t = idx + 1; t < k; ++t) c[t] = c[t - 1] + 1;
                return true;
            }
        }
        return false;
    };

    ExhaustiveResult best;
    best.eta = std::numeric_limits<double>::infinity();
    BinaryMatrix phi(n, m, 0);
    for (;;) {
        for (auto& v : phi.data()) v = 0;
        for (std::size_t u = 0; u < n; ++u)
            for (int idx : combo[u]) phi(u, idx) = 1;
        const DelayState state = compute_best_sources(t_avg, phi);
        const double eta = average_delay(weights, state.d_min);
        if (eta < best.eta) {
            best.eta = eta;
            best.phi = phi;
        }
        std::size_t level = n;
        while (level > 0) {
            if (advance_combo(combo[level - 1])) break;
            std::iota(combo[level - 1].begin(), combo[level - 1].end(), 0);
            --level;
        }
        if (level == 0) break;
    }
    return best;
}

}  // namespace d2dcache
