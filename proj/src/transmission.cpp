#include "d2dcache/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace d2dcache {

namespace {

struct LinkParams {
    double power = 0.0;
    double fading_mean = 0.0;
};

LinkParams link_params(int source, int receiver, const Topology& topology,
                       const SystemParams& params) {
    LinkParams lp;
    double dist;
    if (source == kBaseStation) {
        lp.power = params.bs_power;
        dist = distance_km(topology.bs_position, topology.user_positions[receiver]);
    } else {
        lp.power = params.user_powers[source];
        dist = distance_km(topology.user_positions[source], topology.user_positions[receiver]);
    }
    lp.fading_mean = std::pow(dist, -params.pathloss_exponent);
    return lp;
}

}  // namespace

std::size_t RequestBatch::total_requests() const {
    std::size_t n = 0;
    for (const auto& slot : slots) n += slot.size();
    return n;
}

void RequestBatch::validate(std::size_t n_users, std::size_t n_files) const {
    for (const auto& slot : slots)
        for (const auto& r : slot)
            if (r.user < 0 || r.user >= static_cast<int>(n_users) || r.file < 0 ||
                r.file >= static_cast<int>(n_files))
                throw std::invalid_argument("request indices out of range");
}

BroadcastPick broadcast_rate(const std::vector<int>& candidates,
                             const std::vector<int>& receivers, const MatrixD& fading,
                             const std::vector<double>& candidate_powers,
                             const SystemParams& params) {
    if (candidates.empty() || receivers.empty())
        throw std::invalid_argument("broadcast_rate needs at least one candidate and receiver");
    if (fading.rows() != candidates.size() || fading.cols() != receivers.size() ||
        candidate_powers.size() != candidates.size())
        throw std::invalid_argument("fading/power dimensions do not match the candidate set");
    BroadcastPick best;
    bool first = true;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        double min_rate = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < receivers.size(); ++r)
            min_rate = std::min(min_rate, channel_capacity(candidate_powers[c], fading(c, r), params));
        if (first || min_rate > best.rate ||
            (min_rate == best.rate && candidates[c] < best.source)) {
            best.source = candidates[c];
            best.rate = min_rate;
            first = false;
        }
    }
    return best;
}

PhaseResult simulate_phase(const RequestBatch& requests, const CacheMatrix& cache,
                           const DelayState& delay_state, const Topology& topology,
                           const SystemParams& params, TransmissionMode mode,
                           std::uint64_t rng_seed) {
    const std::size_t n = cache.users(), m = cache.files();
    requests.validate(n, m);
    params.validate(n);
    if (requests.total_requests() == 0)
        throw std::invalid_argument("simulate_phase: the request batch is empty");

    const std::uint64_t unicast_tag = hash_str("unicast-service");
    const std::uint64_t broadcast_tag = hash_str("broadcast-group");

    double total_delay = 0.0;
    std::int64_t served = 0;
    std::int64_t groups_formed = 0;

    // one point-to-point service; RNG keyed identically in both modes
    auto serve_unicast = [&](std::size_t slot, const Request& req, int occurrence) {
        const int src = delay_state.source(req.user, req.file);
        const LinkParams lp = link_params(src, req.user, topology, params);
        Rng rng(derive_seed(rng_seed, {unicast_tag, slot, static_cast<std::uint64_t>(req.user),
                                       static_cast<std::uint64_t>(req.file),
                                       static_cast<std::uint64_t>(occurrence)}));
        total_delay +=
            static_cast<double>(transmission_delay_sample(lp.power, lp.fading_mean, params, rng));
        ++served;
    };

    for (std::size_t slot = 0; slot < requests.slots.size(); ++slot) {
        const auto& slot_requests = requests.slots[slot];
        std::map<std::pair<int, int>, int> occurrence;

        struct FileGroup {
            std::vector<int> users;  // distinct requesters lacking the file, sorted
            std::vector<std::pair<Request, int>> pending;  // request + occurrence index
        };
        std::map<int, FileGroup> by_file;

        for (const auto& req : slot_requests) {
            if (cache.phi(req.user, req.file)) {
                ++served;  // self-cached: zero delay
                continue;
            }
            const int occ = occurrence[{req.user, req.file}]++;
            if (mode == TransmissionMode::unicast) {
                serve_unicast(slot, req, occ);
                continue;
            }
            auto& group = by_file[req.file];
            if (std::find(group.users.begin(), group.users.end(), req.user) == group.users.end())
                group.users.push_back(req.user);
            group.pending.push_back({req, occ});
        }
        if (mode == TransmissionMode::unicast) continue;

        // broadcast groups first, most-requested file first; a D2D source
        // assigned here is busy for the rest of the slot
        std::vector<int> group_files;
        for (auto& [file, group] : by_file) {
            std::sort(group.users.begin(), group.users.end());
            if (group.users.size() >= 2) group_files.push_back(file);
        }
        std::sort(group_files.begin(), group_files.end(), [&](int a, int b) {
            const auto sa = by_file[a].pending.size(), sb = by_file[b].pending.size();
            return sa != sb ? sa > sb : a < b;
        });

        std::vector<bool> busy(n, false);
        for (int file : group_files) {
            const auto& group = by_file[file];
            std::vector<int> candidates{kBaseStation};
            std::vector<double> powers{params.bs_power};
            for (std::size_t k = 0; k < n; ++k) {
                if (cache.phi(k, file) && !busy[k]) {
                    candidates.push_back(static_cast<int>(k));
                    powers.push_back(params.user_powers[k]);
                }
            }
            Rng rng(derive_seed(rng_seed, {broadcast_tag, slot, static_cast<std::uint64_t>(file)}));
            MatrixD fading(candidates.size(), group.users.size());
            for (std::size_t c = 0; c < candidates.size(); ++c)
                for (std::size_t r = 0; r < group.users.size(); ++r)
                    fading(c, r) =
                        sample_fading(link_params(candidates[c], group.users[r], topology, params)
                                          .fading_mean,
                                      rng);
            const BroadcastPick pick = broadcast_rate(candidates, group.users, fading, powers, params);
            if (pick.source != kBaseStation) busy[pick.source] = true;

            // every frame is served at that frame's max-min rate over the
            // group's candidate set, with fresh fading per link; the busy
            // flag sticks to the first frame's winner
            double sent = params.frame_duration * pick.rate;
            std::int64_t frames = 1;
            while (sent < params.file_size_bits) {
                if (++frames > params.max_delay_frames)
                    throw pathological_link_error("broadcast transmission exceeded the frame cap");
                for (std::size_t c = 0; c < candidates.size(); ++c)
                    for (std::size_t r = 0; r < group.users.size(); ++r)
                        fading(c, r) = sample_fading(
                            link_params(candidates[c], group.users[r], topology, params)
                                .fading_mean,
                            rng);
                sent += params.frame_duration *
                        broadcast_rate(candidates, group.users, fading, powers, params).rate;
            }
            total_delay += static_cast<double>(frames);
            served += static_cast<std::int64_t>(group.pending.size());
            ++groups_formed;
        }

        // files wanted by a single user: point-to-point, exactly as unicast
        for (const auto& [file, group] : by_file) {
            if (group.users.size() >= 2) continue;
            for (const auto& [req, occ] : group.pending) serve_unicast(slot, req, occ);
        }
    }

    PhaseResult out;
    out.requests_served = served;
    out.broadcast_groups = groups_formed;
    out.eta_hat = total_delay / static_cast<double>(served);
    return out;
}

}  // namespace d2dcache
