#include "cowu/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "cowu/rng.hpp"

namespace cowu {

namespace {

struct CampaignContext {
    ScenarioConfig cfg;
    EnergyModel energy;
    std::vector<double> pi_cdf;

    static CampaignContext build(const ScenarioConfig& cfg, const EnergyModel& energy) {
        cfg.validate();
        energy.validate();
        const TransitionMatrix z = TransitionMatrix::birth_death(cfg.num_states, cfg.q);
        StationaryDistribution pi;
        if (cfg.q == 0.0) {
            pi.probs.assign(cfg.num_states, 1.0 / cfg.num_states);
        } else {
            pi = stationary(z);
        }
        CampaignContext ctx{cfg, energy, {}};
        ctx.pi_cdf.resize(cfg.num_states);
        double acc = 0.0;
        for (int i = 0; i < cfg.num_states; ++i) {
            acc += pi.probs[i];
            ctx.pi_cdf[i] = acc;
        }
        ctx.pi_cdf.back() = 1.0;
        return ctx;
    }

    // Draws a 1-based state from the stationary distribution.
    int sample_initial(Xoshiro256& rng) const {
        const double u = rng.next_double();
        const auto it = std::upper_bound(pi_cdf.begin(), pi_cdf.end(), u);
        return static_cast<int>(it - pi_cdf.begin()) + 1;
    }

    // One birth-death step from a 1-based state: up with probability q,
    // down with probability q, boundaries reflect with hold. The branch
    // thresholds reproduce the transition matrix rows exactly.
    int step(int state, Xoshiro256& rng) const {
        const double u = rng.next_double();
        if (state == 1) return u < cfg.q ? 2 : 1;
        if (state == cfg.num_states) return u < cfg.q ? state - 1 : state;
        if (u < cfg.q) return state + 1;
        if (u < 2.0 * cfg.q) return state - 1;
        return state;
    }

    // Walks a state forward `slots` steps by jumping straight to the moving
    // slots: the holding time in a state is geometric with the state's move
    // probability (q at the boundaries, 2q inside), so sampling it directly
    // is distribution-exact and costs one draw per move instead of one per
    // slot. Used where no other event shares the slot clock.
    int skip_walk(int state, std::uint64_t slots, Xoshiro256& rng) const {
        if (cfg.q == 0.0) return state;
        std::uint64_t remaining = slots;
        while (remaining > 0) {
            const bool boundary = state == 1 || state == cfg.num_states;
            const double move_p = boundary ? cfg.q : 2.0 * cfg.q;
            std::uint64_t wait;  // slots up to and including the next move
            if (move_p >= 1.0) {
                wait = 1;
            } else {
                const double u = rng.next_double();
                if (u == 0.0) break;  // astronomically long hold
                const double k = std::ceil(std::log(u) / std::log1p(-move_p));
                if (k > static_cast<double>(remaining)) break;
                wait = static_cast<std::uint64_t>(k);
                if (wait == 0) wait = 1;
            }
            if (wait > remaining) break;
            remaining -= wait;
            if (state == 1) state = 2;
            else if (state == cfg.num_states) state = cfg.num_states - 1;
            else state += rng.next_double() < 0.5 ? 1 : -1;
        }
        return state;
    }
};

RoundResult cowu_round(const CampaignContext& ctx, std::uint64_t zeta, std::uint64_t seed) {
    const ScenarioConfig& cfg = ctx.cfg;
    const int n = cfg.num_nodes;
    const int tx_slots = cfg.csma.tx_slots;
    const double p = cfg.csma.p;
    Xoshiro256 rng(seed);

    std::vector<NodeState> nodes(n);
    int pending = 0;
    for (int i = 0; i < n; ++i) {
        const int value = ctx.sample_initial(rng);
        nodes[i].process_value = value;
        nodes[i].sampled_value = value;
        if (cfg.range.contains(value)) {
            nodes[i].mac_status = MacStatus::contending;
            ++pending;
        }
    }

    RoundResult result;
    result.wake_count = pending;
    result.node_energy_j.assign(n, 0.0);
    std::vector<int> delivered_by_deadline;
    std::vector<int> transmitters;
    int busy_remaining = 0;
    bool deadline_recorded = false;
    const double tx_j = ctx.energy.tx_power_w * ctx.energy.slot_duration_s;
    const double rx_j = ctx.energy.rx_power_w * ctx.energy.slot_duration_s;
    // Safety net against unresolvable contention (p = 1 with >= 2 nodes awake):
    // such a round would otherwise draw energy forever.
    const std::uint64_t slot_cap = std::max<std::uint64_t>(zeta, 1'000'000) + 1;

    for (std::uint64_t slot = 0;; ++slot) {
        if (slot == zeta) {
            for (int i = 0; i < n; ++i)
                if (cfg.range.contains(nodes[i].process_value)) result.true_set.push_back(i);
            result.received_set = delivered_by_deadline;
            deadline_recorded = true;
        }
        if (deadline_recorded && pending == 0) break;
        if (slot >= slot_cap)
            throw std::runtime_error(
                "simulate_cowu_round: contention did not resolve within the slot cap "
                "(is p = 1 with more than one node awake?)");

        // Contention decisions for an idle channel, node-id order.
        if (busy_remaining == 0 && pending > 0) {
            for (int i = 0; i < n; ++i) {
                if (nodes[i].mac_status != MacStatus::contending) continue;
                if (rng.next_double() < p) {
                    nodes[i].mac_status = MacStatus::transmitting;
                    nodes[i].tx_remaining = tx_slots;
                    transmitters.push_back(i);
                }
            }
            if (!transmitters.empty()) busy_remaining = tx_slots;
        }

        // Energy: awake nodes pay Tx while transmitting, Rx otherwise.
        for (int i = 0; i < n; ++i) {
            switch (nodes[i].mac_status) {
                case MacStatus::transmitting: nodes[i].energy_j += tx_j; break;
                case MacStatus::contending: nodes[i].energy_j += rx_j; break;
                default: break;
            }
        }

        // Channel countdown; a window ending in this slot resolves at slot+1.
        if (busy_remaining > 0) {
            --busy_remaining;
            for (const int i : transmitters) --nodes[i].tx_remaining;
            if (busy_remaining == 0) {
                if (transmitters.size() == 1) {
                    const int winner = transmitters.front();
                    nodes[winner].mac_status = MacStatus::done;
                    --pending;
                    result.completion_slot = slot + 1;
                    if (slot + 1 <= zeta) delivered_by_deadline.push_back(winner);
                } else {
                    for (const int i : transmitters)
                        nodes[i].mac_status = MacStatus::contending;
                }
                transmitters.clear();
            }
        }

        // Every process takes one step per slot, deadline or not, so the
        // draw stream does not depend on zeta.
        for (int i = 0; i < n; ++i)
            nodes[i].process_value = ctx.step(nodes[i].process_value, rng);
    }

    std::sort(result.received_set.begin(), result.received_set.end());
    result.success_count = static_cast<int>(result.received_set.size());
    result.exact_match = result.true_set == result.received_set;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        result.node_energy_j[i] = nodes[i].energy_j;
        total += nodes[i].energy_j;
    }
    result.total_energy_j = total;
    return result;
}

RoundResult rr_round(const CampaignContext& ctx, std::uint64_t seed) {
    const ScenarioConfig& cfg = ctx.cfg;
    const int n = cfg.num_nodes;
    const int tx_slots = cfg.csma.tx_slots;
    Xoshiro256 rng(seed);

    RoundResult result;
    result.wake_count = n;
    result.success_count = n;
    result.node_energy_j.assign(n, 0.0);
    const double window_j = ctx.energy.tx_power_w * ctx.energy.slot_duration_s * tx_slots;

    // Node j samples at its own window start and ages (N-j)L slots; nodes are
    // independent and nothing else shares their slot clock, so the walk runs
    // node-major with geometric holding-time skips.
    for (int j = 0; j < n; ++j) {
        const int sampled = ctx.sample_initial(rng);
        const std::uint64_t lag = static_cast<std::uint64_t>(n - j) * tx_slots;
        const int value = ctx.skip_walk(sampled, lag, rng);
        if (cfg.range.contains(sampled)) result.received_set.push_back(j);
        if (cfg.range.contains(value)) result.true_set.push_back(j);
        result.node_energy_j[j] = window_j;
    }
    result.exact_match = result.true_set == result.received_set;
    result.completion_slot = static_cast<std::uint64_t>(n) * tx_slots;
    double total = 0.0;
    for (const double e : result.node_energy_j) total += e;
    result.total_energy_j = total;
    return result;
}

}  // namespace

void EnergyModel::validate() const {
    if (!(tx_power_w >= 0.0)) throw std::invalid_argument("tx_power_w: must be >= 0");
    if (!(rx_power_w >= 0.0)) throw std::invalid_argument("rx_power_w: must be >= 0");
    if (!(slot_duration_s >= 0.0)) throw std::invalid_argument("slot_duration_s: must be >= 0");
    if (!(sleep_power_w >= 0.0)) throw std::invalid_argument("sleep_power_w: must be >= 0");
}

RoundResult simulate_cowu_round(const ScenarioConfig& cfg, const EnergyModel& energy,
                                std::uint64_t zeta, std::uint64_t seed) {
    return cowu_round(CampaignContext::build(cfg, energy), zeta, seed);
}

RoundResult simulate_round_robin_round(const ScenarioConfig& cfg, const EnergyModel& energy,
                                       std::uint64_t seed) {
    return rr_round(CampaignContext::build(cfg, energy), seed);
}

std::vector<RoundResult> run_rounds(const ScenarioConfig& cfg, const EnergyModel& energy,
                                    Scheme scheme, std::uint64_t zeta, std::uint64_t rounds,
                                    std::uint64_t base_seed, int threads) {
    if (rounds < 1) throw std::invalid_argument("rounds: must be >= 1");
    const CampaignContext ctx = CampaignContext::build(cfg, energy);
    std::vector<RoundResult> results(rounds);

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = static_cast<int>(std::min<std::uint64_t>(workers, rounds));

    auto worker = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t r = begin; r < end; ++r) {
            const std::uint64_t seed = derive_seed(base_seed, r);
            results[r] = scheme == Scheme::cowu ? cowu_round(ctx, zeta, seed)
                                                : rr_round(ctx, seed);
        }
    };
    if (workers == 1) {
        worker(0, rounds);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::uint64_t chunk = (rounds + workers - 1) / workers;
        for (int t = 0; t < workers; ++t) {
            const std::uint64_t begin = t * chunk;
            const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, rounds);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return results;
}

CampaignSummary summarize(const std::vector<RoundResult>& rounds) {
    CampaignSummary s;
    s.rounds = rounds.size();
    if (rounds.empty()) return s;
    double match_sum = 0.0, energy_sum = 0.0;
    for (const auto& r : rounds) {
        match_sum += r.exact_match ? 1.0 : 0.0;
        energy_sum += r.total_energy_j;
    }
    const double n = static_cast<double>(rounds.size());
    s.gamma_hat = match_sum / n;
    s.mean_energy_j = energy_sum / n;
    bool all_equal = true;
    for (const auto& r : rounds)
        if (r.total_energy_j != rounds.front().total_energy_j) all_equal = false;
    if (all_equal) s.mean_energy_j = rounds.front().total_energy_j;
    if (rounds.size() < 2) {
        s.ci_degenerate = true;
        return s;
    }
    double energy_var = 0.0;
    if (!all_equal) {
        for (const auto& r : rounds) {
            const double d = r.total_energy_j - s.mean_energy_j;
            energy_var += d * d;
        }
        energy_var /= (n - 1.0);
    }
    constexpr double z95 = 1.959963984540054;
    s.gamma_ci_halfwidth = z95 * std::sqrt(s.gamma_hat * (1.0 - s.gamma_hat) / n);
    s.energy_ci_halfwidth = z95 * std::sqrt(energy_var / n);
    return s;
}

CampaignSummary run_campaign(const ScenarioConfig& cfg, const EnergyModel& energy,
                             Scheme scheme, std::uint64_t zeta, std::uint64_t rounds,
                             std::uint64_t base_seed, int threads) {
    return summarize(run_rounds(cfg, energy, scheme, zeta, rounds, base_seed, threads));
}

AccuracyResult simulated_result(const CampaignSummary& summary, std::uint64_t zeta) {
    return AccuracyResult{summary.gamma_hat, Method::simulated, zeta,
                          summary.ci_degenerate ? std::nullopt
                                                : std::optional<double>(summary.gamma_ci_halfwidth)};
}

std::string to_json(const CampaignSummary& summary) {
    nlohmann::json j;
    j["gamma_hat"] = summary.gamma_hat;
    j["gamma_ci_halfwidth"] = summary.gamma_ci_halfwidth;
    j["mean_energy_J"] = summary.mean_energy_j;
    j["energy_ci_halfwidth_J"] = summary.energy_ci_halfwidth;
    j["rounds"] = summary.rounds;
    j["ci_degenerate"] = summary.ci_degenerate;
    return j.dump();
}

std::string rounds_to_csv(const std::vector<RoundResult>& rounds) {
    std::string out = "round,w,w_s,exact_match,energy_J,completion_slot\n";
    char buf[32];
    for (std::size_t r = 0; r < rounds.size(); ++r) {
        const auto& row = rounds[r];
        out += std::to_string(r);
        out += ',';
        out += std::to_string(row.wake_count);
        out += ',';
        out += std::to_string(row.success_count);
        out += ',';
        out += row.exact_match ? '1' : '0';
        out += ',';
        const auto res = std::to_chars(buf, buf + sizeof(buf), row.total_energy_j);
        out.append(buf, res.ptr);
        out += ',';
        out += std::to_string(row.completion_slot);
        out += '\n';
    }
    return out;
}

}  // namespace cowu
