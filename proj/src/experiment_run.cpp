#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <string>

#include "d2dcache/caching.hpp"
#include "d2dcache/channel.hpp"
#include "d2dcache/experiment.hpp"
#include "d2dcache/parallel.hpp"
#include "d2dcache/transmission.hpp"

namespace d2dcache {

namespace {

constexpr double kRingRadiusFrac = 0.75;

std::string short_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

SystemParams make_params(const ScenarioConfig& cfg) {
    SystemParams params;
    params.file_size_bits = cfg.file_size_bits;
    params.bs_power = std::pow(10.0, cfg.bs_power_db / 10.0);
    params.user_powers.assign(static_cast<std::size_t>(cfg.n_users),
                              std::pow(10.0, cfg.user_power_db / 10.0));
    return params;
}

Topology make_topology(const ScenarioConfig& cfg, std::uint64_t rep_seed) {
    Topology topo;
    topo.cell_radius_km = cfg.cell_radius_km;
    topo.bs_position = {0.0, 0.0};
    const std::size_t n = static_cast<std::size_t>(cfg.n_users);
    topo.user_positions.resize(n);
    switch (cfg.topology_mode) {
        case TopologyMode::disk: {
            Rng rng(derive_seed(rep_seed, {hash_str("topology")}));
            for (std::size_t i = 0; i < n; ++i) {
                const double r = cfg.cell_radius_km * std::sqrt(rng.uniform01());
                const double theta = 2.0 * std::numbers::pi * rng.uniform01();
                topo.user_positions[i] = {r * std::cos(theta), r * std::sin(theta)};
            }
            break;
        }
        case TopologyMode::ring: {
            // equidistant from the BS with a fixed angular pitch: every user
            // keeps the same cellular link quality, neighbors stay within D2D
            // range, and growing n extends the arc without moving anyone
            const double r = kRingRadiusFrac * cfg.cell_radius_km;
            const double pitch = std::min(0.15, 2.0 * std::numbers::pi / static_cast<double>(n));
            for (std::size_t i = 0; i < n; ++i) {
                const double theta = pitch * static_cast<double>(i);
                topo.user_positions[i] = {r * std::cos(theta), r * std::sin(theta)};
            }
            break;
        }
        case TopologyMode::cluster: {
            // tight cluster far from the base station, so D2D links beat the
            // cellular link by a wide margin
            if (n != 3)
                throw config_error("cluster topology is defined for exactly 3 users");
            topo.user_positions = {{1.2, 0.12}, {1.2, 0.0}, {1.2, -0.12}};
            break;
        }
    }
    return topo;
}

ProfileConfig make_profile_config(const ScenarioConfig& cfg) {
    ProfileConfig pc;
    pc.n_users = cfg.n_users;
    pc.n_files = cfg.n_files;
    pc.mode = cfg.popularity_mode;
    pc.zipf_beta = cfg.zipf_beta;
    pc.min_intensity = cfg.min_intensity;
    pc.period_length = cfg.period_frames;
    pc.bump_width_frac = cfg.bump_width_frac;
    pc.peak_multiplier = cfg.peak_multiplier;
    return pc;
}

struct Job {
    // sweep points evaluated by this job; prep-invariant sweeps (cache size,
    // update budget) batch every point of one replicate behind shared
    // profiles, estimates and delay matrices
    std::vector<std::pair<double, ScenarioConfig>> points;
    int replicate = 0;
    std::uint64_t rep_seed = 0;
    std::vector<ResultRow> rows;
};

void run_estimation_job(Job& job) {
    const ScenarioConfig& cfg = job.points.front().second;
    const double sweep_value = job.points.front().first;
    const std::uint64_t profile_seed = derive_seed(job.rep_seed, {hash_str("profiles")});
    int degenerate = 0;

    for (double curve : cfg.est_curve_values) {
        ScenarioConfig point = cfg;
        set_config_field(point, cfg.est_curve_param, short_value(curve));
        const UserProfiles up = build_user_profiles(make_profile_config(point), profile_seed);

        // score a deterministic spread of low-popularity ranks for user 0,
        // starting from the least popular file, whose per-period mean is the
        // minimum intensity itself
        std::vector<int> file_at_rank(static_cast<std::size_t>(point.n_files), 0);
        for (int f = 0; f < point.n_files; ++f) file_at_rank[up.rank_of[0][f]] = f;
        const int pairs = std::min(point.est_pairs, point.n_files);
        double error_sum = 0.0;
        for (int k = 0; k < pairs; ++k) {
            const int rank = point.n_files - 1 -
                             static_cast<int>(std::llround(static_cast<double>(k) *
                                                           static_cast<double>(point.n_files - 1) /
                                                           static_cast<double>(2 * pairs)));
            const int file = file_at_rank[rank];
            const IntensityProfile& truth = up.profiles(0, file);
            SampleSet trace = sample_requests(
                truth, point.sample_periods,
                derive_seed(job.rep_seed, {hash_str("trace"),
                                           std::bit_cast<std::uint64_t>(curve),
                                           static_cast<std::uint64_t>(rank)}));
            double bandwidth;
            if (trace.size() < 2) {
                bandwidth = point.period_frames / 10.0;
                ++degenerate;
            } else {
                bandwidth = select_bandwidth(trace);
            }
            error_sum += estimation_error(estimate_intensity(std::move(trace), bandwidth), truth);
        }
        const std::string tag = cfg.est_curve_param == "sample_periods" ? "nt" : "m";
        job.rows.push_back({sweep_value, "estimator", "est_error_" + tag + short_value(curve),
                            error_sum / pairs, job.rep_seed, job.replicate});
    }
    if (degenerate > 0)
        std::cerr << "d2dcache: " << degenerate
                  << " sample set(s) were too small for cross-validation; default bandwidth used\n";
}

// per-<user,file> expected requests inside one cycle window
MatrixD true_expected_requests(const UserProfiles& up, double win_start, double duration) {
    MatrixD expected(up.profiles.rows(), up.profiles.cols(), 0.0);
    for (std::size_t u = 0; u < up.profiles.rows(); ++u)
        for (std::size_t f = 0; f < up.profiles.cols(); ++f)
            expected(u, f) = up.profiles(u, f).integral(win_start, win_start + duration);
    return expected;
}

struct PolicyOutcome {
    CacheMatrix cache;
    double eta = 0.0;
    bool valid = false;
};

void run_policy_job(Job& job) {
    const ScenarioConfig& base = job.points.front().second;
    const std::size_t n = static_cast<std::size_t>(base.n_users);
    const std::size_t m = static_cast<std::size_t>(base.n_files);
    const double period = base.period_frames;
    const double tau = period / base.cycles_per_period;
    const bool cycle_labeled = base.sweep_param == "cycle";

    // preparation shared by every sweep point in this job
    const Topology topo = make_topology(base, job.rep_seed);
    const SystemParams params = make_params(base);
    const UserProfiles up = build_user_profiles(make_profile_config(base),
                                                derive_seed(job.rep_seed, {hash_str("profiles")}));
    const MatrixD t_avg = build_delay_matrix(
        topo, params, base.mc_samples, derive_seed(job.rep_seed, {hash_str("t_avg")}), 1);

    std::vector<std::string> sources;
    if (base.intensity_source == IntensitySource::true_profile ||
        base.intensity_source == IntensitySource::both)
        sources.push_back("true");
    if (base.intensity_source == IntensitySource::estimated ||
        base.intensity_source == IntensitySource::both)
        sources.push_back("est");
    const bool needs_estimates =
        std::find(sources.begin(), sources.end(), "est") != sources.end();

    // learn one estimator per pair from the most recent N_T behavior periods
    Matrix<IntensityEstimate> estimates;
    if (needs_estimates) {
        estimates = Matrix<IntensityEstimate>(n, m);
        int degenerate = 0;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t f = 0; f < m; ++f) {
                SampleSet trace = sample_requests(
                    up.profiles(u, f), base.sample_periods,
                    derive_seed(job.rep_seed, {hash_str("trace"), u, f}));
                double bandwidth;
                if (trace.size() < 2) {
                    bandwidth = period / 10.0;
                    ++degenerate;
                } else {
                    bandwidth = select_bandwidth(trace);
                }
                estimates(u, f) = estimate_intensity(std::move(trace), bandwidth);
            }
        }
        if (degenerate > 0)
            std::cerr << "d2dcache: " << degenerate << " of " << n * m
                      << " traces were too small for cross-validation; default bandwidth used\n";
    }

    // per-cycle weight matrices are also sweep-invariant
    std::vector<WeightMatrix> omega_true_by_cycle;
    std::vector<WeightMatrix> omega_est_by_cycle;
    for (int cycle = 1; cycle <= base.cycles; ++cycle) {
        const double win_start = std::fmod((cycle - 1) * tau, period);
        omega_true_by_cycle.push_back(
            WeightMatrix::normalized(true_expected_requests(up, win_start, tau)));
        if (needs_estimates) {
            MatrixD expected(n, m, 0.0);
            for (std::size_t u = 0; u < n; ++u)
                for (std::size_t f = 0; f < m; ++f)
                    expected(u, f) = expected_requests(estimates(u, f), win_start, tau);
            omega_est_by_cycle.push_back(WeightMatrix::normalized(std::move(expected)));
        }
    }

    const std::vector<int> record_cycles = {1, 25, 75};

    for (const auto& [sweep_value, cfg] : job.points) {
        std::map<std::string, BinaryMatrix> prev_phi;  // per (policy, source) chain
        std::map<std::string, PolicyOutcome> final_outcome;

        for (int cycle = 1; cycle <= cfg.cycles; ++cycle) {
            // caching decisions use the configured intensity source; the
            // reported eta is always evaluated under the true workload
            // weights so perfect and imperfect information runs compare
            const WeightMatrix& omega_true = omega_true_by_cycle[cycle - 1];
            for (const auto& source : sources) {
                const WeightMatrix& omega =
                    source == "est" ? omega_est_by_cycle[cycle - 1] : omega_true;

                for (const auto& policy : cfg.policies) {
                    const std::string chain = policy + "/" + source;
                    PolicyOutcome outcome;
                    if (policy == "proposed") {
                        auto it = prev_phi.find(chain);
                        const BinaryMatrix prev =
                            it == prev_phi.end() ? BinaryMatrix(n, m, 0) : it->second;
                        std::vector<int> budgets;
                        if (cycle > 1 && cfg.update_budget >= 0)
                            budgets.assign(n, cfg.update_budget);
                        CachingResult result =
                            run_caching(omega, t_avg, prev, cfg.cache_mu, std::move(budgets));
                        outcome.eta = average_delay(omega_true, result.state.d_min);
                        outcome.cache = std::move(result.cache);
                        outcome.valid = true;
                        prev_phi[chain] = outcome.cache.phi;
                    } else if (policy == "naive") {
                        outcome.cache = naive_cache(omega.omega, cfg.cache_mu);
                        outcome.eta = average_delay(
                            omega_true, compute_best_sources(t_avg, outcome.cache.phi).d_min);
                        outcome.valid = true;
                    } else if (policy == "probabilistic") {
                        CacheMatrix cache;
                        cache.phi = BinaryMatrix(n, m, 0);
                        cache.capacity = cfg.cache_mu;
                        cache.update_budgets.assign(n, 0);
                        const std::uint64_t prob_seed =
                            derive_seed(job.rep_seed, {hash_str("probabilistic"),
                                                       static_cast<std::uint64_t>(cycle)});
                        for (std::size_t u = 0; u < n; ++u) {
                            std::vector<double> row(m, 0.0);
                            for (std::size_t f = 0; f < m; ++f) row[f] = omega.omega(u, f);
                            const CacheMatrix one = probabilistic_cache(
                                row, 1, cfg.cache_mu, derive_seed(prob_seed, {u}));
                            for (std::size_t f = 0; f < m; ++f) cache.phi(u, f) = one.phi(0, f);
                        }
                        outcome.cache = std::move(cache);
                        outcome.eta = average_delay(
                            omega_true, compute_best_sources(t_avg, outcome.cache.phi).d_min);
                        outcome.valid = true;
                    } else if (policy == "exhaustive") {
                        try {
                            ExhaustiveResult best = exhaustive_optimal(omega, t_avg, cfg.cache_mu);
                            outcome.cache.phi = std::move(best.phi);
                            outcome.cache.capacity = cfg.cache_mu;
                            outcome.cache.update_budgets.assign(n, 0);
                            outcome.eta = average_delay(
                                omega_true, compute_best_sources(t_avg, outcome.cache.phi).d_min);
                            outcome.valid = true;
                        } catch (const std::invalid_argument& e) {
                            std::cerr << "d2dcache: exhaustive policy skipped: " << e.what()
                                      << "\n";
                        }
                    }
                    if (!outcome.valid) continue;

                    const std::string metric =
                        sources.size() > 1 ? std::string("eta_") + source : std::string("eta");
                    if (cycle_labeled) {
                        job.rows.push_back({static_cast<double>(cycle), policy, metric,
                                            outcome.eta, job.rep_seed, job.replicate});
                        if (std::find(record_cycles.begin(), record_cycles.end(), cycle) !=
                            record_cycles.end()) {
                            for (std::size_t u = 0; u < n; ++u) {
                                int slot = 0;
                                for (std::size_t f = 0; f < m; ++f) {
                                    if (!outcome.cache.phi(u, f)) continue;
                                    ++slot;
                                    job.rows.push_back({static_cast<double>(cycle), policy,
                                                        "cache_u" + std::to_string(u + 1) + "_s" +
                                                            std::to_string(slot),
                                                        static_cast<double>(f + 1), job.rep_seed,
                                                        job.replicate});
                                }
                            }
                        }
                    } else if (cycle == cfg.cycles) {
                        job.rows.push_back({sweep_value, policy, metric, outcome.eta,
                                            job.rep_seed, job.replicate});
                    }
                    if (cycle == cfg.cycles) final_outcome[chain] = std::move(outcome);
                }
            }
        }

        if (cfg.transmission_mode == TransmissionSetting::none) continue;

        // transmission phase on the final caches; the request draw and the
        // fading substreams are shared across policies and modes, so the
        // comparisons in the emitted metrics are paired
        const std::string phase_source = needs_estimates ? "est" : "true";
        std::vector<std::vector<double>> file_cdf(n, std::vector<double>(m, 0.0));
        for (std::size_t u = 0; u < n; ++u) {
            double total = 0.0;
            for (std::size_t f = 0; f < m; ++f) total += up.profiles(u, f).mass();
            double acc = 0.0;
            for (std::size_t f = 0; f < m; ++f) {
                acc += up.profiles(u, f).mass() / total;
                file_cdf[u][f] = acc;
            }
            file_cdf[u][m - 1] = 1.0;
        }
        RequestBatch batch;
        batch.slots.resize(static_cast<std::size_t>(cfg.sim_slots));
        for (std::size_t slot = 0; slot < batch.slots.size(); ++slot) {
            for (std::size_t u = 0; u < n; ++u) {
                Rng rng(derive_seed(job.rep_seed, {hash_str("requests"), slot, u}));
                for (int r = 0; r < cfg.requests_per_slot; ++r) {
                    const double x = rng.uniform01();
                    const auto it = std::upper_bound(file_cdf[u].begin(), file_cdf[u].end(), x);
                    const int file = static_cast<int>(std::min<std::ptrdiff_t>(
                        it - file_cdf[u].begin(), static_cast<std::ptrdiff_t>(m) - 1));
                    batch.slots[slot].push_back({static_cast<int>(u), file});
                }
            }
        }
        const std::uint64_t phase_seed = derive_seed(job.rep_seed, {hash_str("phase")});
        for (const auto& policy : cfg.policies) {
            const auto it = final_outcome.find(policy + "/" + phase_source);
            if (it == final_outcome.end() || !it->second.valid) continue;
            const CacheMatrix& cache = it->second.cache;
            const DelayState dstate = compute_best_sources(t_avg, cache.phi);
            const PhaseResult unicast = simulate_phase(batch, cache, dstate, topo, params,
                                                       TransmissionMode::unicast, phase_seed);
            job.rows.push_back({sweep_value, policy, "eta_hat_unicast", unicast.eta_hat,
                                job.rep_seed, job.replicate});
            if (cfg.transmission_mode == TransmissionSetting::broadcast) {
                const PhaseResult broadcast = simulate_phase(
                    batch, cache, dstate, topo, params, TransmissionMode::broadcast, phase_seed);
                job.rows.push_back({sweep_value, policy, "eta_hat_broadcast", broadcast.eta_hat,
                                    job.rep_seed, job.replicate});
            }
        }
    }
}

void append_aggregates(ResultTable& table, int replicates, std::uint64_t master_seed) {
    if (replicates < 2) return;
    struct Key {
        double sweep;
        std::string policy, metric;
        bool operator<(const Key& o) const {
            if (sweep != o.sweep) return sweep < o.sweep;
            if (policy != o.policy) return policy < o.policy;
            return metric < o.metric;
        }
    };
    std::map<Key, std::vector<double>> groups;
    for (const auto& row : table.rows) {
        if (row.replicate < 0 || row.metric.rfind("cache_", 0) == 0) continue;
        groups[{row.sweep_value, row.policy, row.metric}].push_back(row.value);
    }
    for (const auto& [key, values] : groups) {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var = values.size() > 1 ? var / static_cast<double>(values.size() - 1) : 0.0;
        table.rows.push_back({key.sweep, key.policy, key.metric + "_mean", mean, master_seed, -1});
        table.rows.push_back(
            {key.sweep, key.policy, key.metric + "_std", std::sqrt(var), master_seed, -1});
    }
}

}  // namespace

ResultTable run_scenario(const ScenarioConfig& config) {
    validate_config(config);
    const bool real_sweep = config.sweep_param != "none" && config.sweep_param != "cycle";
    const std::vector<double> points =
        real_sweep ? config.sweep_values : std::vector<double>{0.0};

    // cache-size and budget sweeps reuse one prepared replicate (profiles,
    // traces, delay matrix) for every sweep point; the result is bit-identical
    // to running the points separately because the replicate substreams never
    // depend on the swept value
    const bool batch_points =
        real_sweep && (config.sweep_param == "cache_mu" || config.sweep_param == "update_budget");
    std::vector<Job> jobs;
    for (int rep = 0; rep < config.replicates; ++rep) {
        const std::uint64_t rep_seed =
            derive_seed(config.master_seed, {hash_str("replicate"), static_cast<std::uint64_t>(rep)});
        auto make_point = [&](double point) {
            ScenarioConfig cfg = config;
            if (real_sweep) set_config_field(cfg, config.sweep_param, short_value(point));
            return std::make_pair(point, std::move(cfg));
        };
        if (batch_points) {
            Job job;
            job.replicate = rep;
            job.rep_seed = rep_seed;
            for (double point : points) job.points.push_back(make_point(point));
            jobs.push_back(std::move(job));
        } else {
            for (double point : points) {
                Job job;
                job.replicate = rep;
                job.rep_seed = rep_seed;
                job.points.push_back(make_point(point));
                jobs.push_back(std::move(job));
            }
        }
    }

    parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
        if (jobs[i].points.front().second.est_curve_param != "none")
            run_estimation_job(jobs[i]);
        else
            run_policy_job(jobs[i]);
    });

    ResultTable table;
    table.scenario = config.scenario;
    table.sweep_param = config.sweep_param;
    for (auto& job : jobs)
        table.rows.insert(table.rows.end(), job.rows.begin(), job.rows.end());
    append_aggregates(table, config.replicates, config.master_seed);
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        if (a.policy != b.policy) return a.policy < b.policy;
        if (a.replicate != b.replicate) return a.replicate < b.replicate;
        return a.metric < b.metric;
    });
    return table;
}

}  // namespace d2dcache
