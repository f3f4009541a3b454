#include "cowu/oracle.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace cowu::oracle {

namespace {

void walk_paths(const TransitionMatrix& z, int state, int remaining, double prob,
                std::vector<double>& out) {
    if (remaining == 0) {
        out[state] += prob;
        return;
    }
    const auto row = z.row(state);
    for (int j = 0; j < z.size(); ++j)
        if (row[j] > 0.0) walk_paths(z, j, remaining - 1, prob * row[j], out);
}

// Channel state for the count-level MAC tree: n pending nodes, r busy slots
// remaining of the ongoing transmission (0 = idle), single = exactly one
// transmitter. A window that consumes its last busy slot resolves at the
// next slot boundary, matching the contention chain's step counting.
void mac_count_tree(int n, int r, bool single, int remaining_slots, double prob,
                    double p, int tx_slots, std::vector<double>& out, int initial) {
    if (remaining_slots == 0) {
        out[initial - n] += prob;
        return;
    }
    if (r > 0) {
        const int next_r = r - 1;
        if (next_r == 0) {
            mac_count_tree(single ? n - 1 : n, 0, false, remaining_slots - 1, prob, p,
                           tx_slots, out, initial);
        } else {
            mac_count_tree(n, next_r, single, remaining_slots - 1, prob, p, tx_slots, out,
                           initial);
        }
        return;
    }
    if (n == 0) {
        mac_count_tree(0, 0, false, remaining_slots - 1, prob, p, tx_slots, out, initial);
        return;
    }
    // Idle slot: k of the n pending nodes start transmitting.
    for (int k = 0; k <= n; ++k) {
        double branch = prob;
        // C(n, k) p^k (1-p)^{n-k}
        double comb = 1.0;
        for (int i = 0; i < k; ++i) comb = comb * (n - i) / (i + 1);
        branch *= comb * std::pow(p, k) * std::pow(1.0 - p, n - k);
        if (branch == 0.0) continue;
        if (k == 0) {
            mac_count_tree(n, 0, false, remaining_slots - 1, branch, p, tx_slots, out,
                           initial);
        } else if (tx_slots == 1) {
            mac_count_tree(k == 1 ? n - 1 : n, 0, false, remaining_slots - 1, branch, p,
                           tx_slots, out, initial);
        } else {
            mac_count_tree(n, tx_slots - 1, k == 1, remaining_slots - 1, branch, p,
                           tx_slots, out, initial);
        }
    }
}

// Identified variant: pending is a bitmask, the transmitter id is tracked so
// the completed subset is exact. Used by the joint accuracy oracle.
void mac_subset_tree(std::uint32_t pending, int r, int transmitter, int remaining_slots,
                     double prob, double p, int tx_slots,
                     std::map<std::uint32_t, double>& out, std::uint32_t initial) {
    if (remaining_slots == 0) {
        out[initial & ~pending] += prob;
        return;
    }
    if (r > 0) {
        const int next_r = r - 1;
        if (next_r == 0) {
            const std::uint32_t next_pending =
                transmitter >= 0 ? pending & ~(1u << transmitter) : pending;
            mac_subset_tree(next_pending, 0, -1, remaining_slots - 1, prob, p, tx_slots,
                            out, initial);
        } else {
            mac_subset_tree(pending, next_r, transmitter, remaining_slots - 1, prob, p,
                            tx_slots, out, initial);
        }
        return;
    }
    if (pending == 0) {
        mac_subset_tree(0, 0, -1, remaining_slots - 1, prob, p, tx_slots, out, initial);
        return;
    }
    // Idle slot: every subset of pending nodes may start.
    const std::uint32_t mask = pending;
    std::uint32_t subset = 0;
    while (true) {
        const int k = __builtin_popcount(subset);
        const int n = __builtin_popcount(mask);
        const double branch = prob * std::pow(p, k) * std::pow(1.0 - p, n - k);
        if (branch > 0.0) {
            if (k == 0) {
                mac_subset_tree(pending, 0, -1, remaining_slots - 1, branch, p, tx_slots,
                                out, initial);
            } else {
                const int tx = k == 1 ? __builtin_ctz(subset) : -1;
                if (tx_slots == 1) {
                    const std::uint32_t next_pending =
                        tx >= 0 ? pending & ~(1u << tx) : pending;
                    mac_subset_tree(next_pending, 0, -1, remaining_slots - 1, branch, p,
                                    tx_slots, out, initial);
                } else {
                    mac_subset_tree(pending, tx_slots - 1, tx, remaining_slots - 1, branch,
                                    p, tx_slots, out, initial);
                }
            }
        }
        if (subset == mask) break;
        subset = (subset - mask) & mask;  // next submask
    }
}

StationaryDistribution stationary_for(const ScenarioConfig& cfg, const TransitionMatrix& z) {
    if (cfg.q == 0.0) {
        StationaryDistribution pi;
        pi.probs.assign(cfg.num_states, 1.0 / cfg.num_states);
        return pi;
    }
    return stationary(z);
}

}  // namespace

std::vector<double> step_distribution_by_paths(const TransitionMatrix& z, int start,
                                               int zeta) {
    if (start < 0 || start >= z.size())
        throw std::invalid_argument("oracle: start state out of range");
    std::vector<double> out(z.size(), 0.0);
    walk_paths(z, start, zeta, 1.0, out);
    return out;
}

std::vector<double> success_distribution_tree(int active_count, CsmaParams params,
                                              int zeta) {
    params.validate();
    std::vector<double> out(active_count + 1, 0.0);
    mac_count_tree(active_count, 0, false, zeta, 1.0, params.p, params.tx_slots, out,
                   active_count);
    return out;
}

std::vector<std::pair<std::uint32_t, double>> success_subset_distribution(int active_count,
                                                                          CsmaParams params,
                                                                          int zeta) {
    params.validate();
    if (active_count > 20) throw std::invalid_argument("oracle: subset tree limited to 20 nodes");
    std::map<std::uint32_t, double> out;
    const std::uint32_t initial = active_count == 0 ? 0u : (1u << active_count) - 1u;
    mac_subset_tree(initial, 0, -1, zeta, 1.0, params.p, params.tx_slots, out, initial);
    return {out.begin(), out.end()};
}

double gamma_cowu_enumeration(const ScenarioConfig& cfg, int zeta, bool ideal_mac) {
    cfg.validate();
    const TransitionMatrix z = TransitionMatrix::birth_death(cfg.num_states, cfg.q);
    const StationaryDistribution pi = stationary_for(cfg, z);
    const int n = cfg.num_nodes;
    const int m = cfg.num_states;

    // Per start state: probability that the walk ends inside the range.
    std::vector<double> end_in_range(m, 0.0);
    for (int s = 0; s < m; ++s) {
        const auto dist = step_distribution_by_paths(z, s, zeta);
        for (int j = 0; j < m; ++j)
            if (cfg.range.contains(j + 1)) end_in_range[s] += dist[j];
    }

    // MAC subset distributions keyed by wake count; node ids inside a wake
    // set map onto bit positions in wake order.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> mac_by_count(n + 1);
    for (int w = 0; w <= n; ++w) {
        if (ideal_mac) {
            const std::uint32_t full = w == 0 ? 0u : (1u << w) - 1u;
            mac_by_count[w] = {{full, 1.0}};
        } else {
            mac_by_count[w] = success_subset_distribution(w, cfg.csma, zeta);
        }
    }

    double gamma = 0.0;
    std::vector<int> values(n, 0);  // 0-indexed initial states, odometer
    while (true) {
        double prob0 = 1.0;
        for (int i = 0; i < n; ++i) prob0 *= pi.probs[values[i]];

        std::vector<int> wake_ids;
        for (int i = 0; i < n; ++i)
            if (cfg.range.contains(values[i] + 1)) wake_ids.push_back(i);
        const int w = static_cast<int>(wake_ids.size());

        // P(node not awake stays consistent) = P(ends outside range).
        double sleep_term = 1.0;
        for (int i = 0; i < n; ++i) {
            bool awake = cfg.range.contains(values[i] + 1);
            if (!awake) sleep_term *= 1.0 - end_in_range[values[i]];
        }

        double awake_term = 0.0;
        for (const auto& [delivered_mask, mask_prob] : mac_by_count[w]) {
            double term = mask_prob;
            for (int b = 0; b < w; ++b) {
                const int node = wake_ids[b];
                const double in_range = end_in_range[values[node]];
                term *= (delivered_mask >> b) & 1u ? in_range : 1.0 - in_range;
            }
            awake_term += term;
        }

        gamma += prob0 * sleep_term * awake_term;

        int pos = 0;
        while (pos < n && ++values[pos] == m) values[pos++] = 0;
        if (pos == n) break;
    }
    return gamma;
}

double gamma_round_robin_enumeration(const ScenarioConfig& cfg) {
    cfg.validate();
    const TransitionMatrix z = TransitionMatrix::birth_death(cfg.num_states, cfg.q);
    const StationaryDistribution pi = stationary_for(cfg, z);
    const int m = cfg.num_states;

    double gamma = 1.0;
    for (int j = 0; j < cfg.num_nodes; ++j) {
        const int lag = (cfg.num_nodes - j) * cfg.csma.tx_slots;
        double consistent = 0.0;
        for (int s = 0; s < m; ++s) {
            const auto dist = step_distribution_by_paths(z, s, lag);
            double same = 0.0;
            const bool sampled_in = cfg.range.contains(s + 1);
            for (int v = 0; v < m; ++v)
                if (cfg.range.contains(v + 1) == sampled_in) same += dist[v];
            consistent += pi.probs[s] * same;
        }
        gamma *= consistent;
    }
    return gamma;
}

}  // namespace cowu::oracle
