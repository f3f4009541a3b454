#pragma once

#include <cstdint>
#include <vector>

#include "cowu/accuracy.hpp"

namespace cowu {

/// Main-radio power draw and slot duration. The wake-up receiver's
/// consumption is orders of magnitude smaller and is not modeled.
struct EnergyModel {
    double tx_power_w = 55e-3;
    double rx_power_w = 50e-3;
    double slot_duration_s = 320e-6;
    double sleep_power_w = 0.0;

    void validate() const;
};

enum class MacStatus : std::uint8_t { asleep, contending, transmitting, done };

/// Per-node bookkeeping during a simulated round.
struct NodeState {
    int process_value = 1;  // 1..M
    MacStatus mac_status = MacStatus::asleep;
    int tx_remaining = 0;   // slots left of the own transmission
    int sampled_value = 0;  // value captured at the wake-up instant
    double energy_j = 0.0;
};

/**
 * Outcome of one simulated collection round.
 *
 * true_set holds the nodes whose process value is in range at the deadline.
 * received_set holds, for content-based wake-up, the nodes fully delivered
 * by the deadline; for round-robin (where every node delivers) it holds the
 * nodes whose received sample is in range, i.e. the sink's estimate of the
 * range set. Both sets are sorted by node id.
 */
struct RoundResult {
    std::vector<int> true_set;
    std::vector<int> received_set;
    bool exact_match = false;
    double total_energy_j = 0.0;
    std::uint64_t completion_slot = 0;  // when the last awakened node succeeded
    int wake_count = 0;
    int success_count = 0;              // delivered by the deadline
    std::vector<double> node_energy_j;
};

/**
 * One content-based wake-up round at the slot level.
 *
 * Initial values are drawn i.i.d. from the stationary distribution; in-range
 * nodes wake and contend. Each slot: if the channel is idle every contender
 * transmits with probability p (draws in node-id order); exactly one starter
 * delivers after L slots and sleeps, two or more collide and return to
 * contention after L slots. Every node's process then takes one step (draws
 * in node-id order). A transmission starting in slot k counts as delivered
 * by the deadline iff k + L <= zeta, matching the contention chain.
 *
 * Awakened nodes keep contending past the deadline until they succeed, with
 * Tx power while transmitting and Rx power in every other awake slot, so the
 * energy total depends only on the wake set and the MAC dynamics, not zeta.
 * Process draws are consumed every slot until the round ends, which keeps
 * the draw stream (and therefore the energy) identical across deadlines for
 * a fixed seed.
 *
 * Deterministic given the seed. Throws std::runtime_error if contention
 * cannot resolve (e.g. p = 1 with two or more awakened nodes).
 */
RoundResult simulate_cowu_round(const ScenarioConfig& cfg, const EnergyModel& energy,
                                std::uint64_t zeta, std::uint64_t seed);

/// One round-robin round: node j samples from the stationary distribution at
/// its own window and its process evolves (N-j)L slots to the deadline; all
/// transmissions succeed in their dedicated windows. Per-node energy is
/// exactly L * slot * tx_power (no idle listening).
RoundResult simulate_round_robin_round(const ScenarioConfig& cfg, const EnergyModel& energy,
                                       std::uint64_t seed);

enum class Scheme { cowu, round_robin };

struct CampaignSummary {
    double gamma_hat = 0.0;
    double gamma_ci_halfwidth = 0.0;
    double mean_energy_j = 0.0;
    double energy_ci_halfwidth = 0.0;
    std::uint64_t rounds = 0;
    bool ci_degenerate = false;  // fewer than 2 rounds
};

/// Runs independent rounds with per-round seeds derived from base_seed;
/// results are indexed by round, so the outcome does not depend on the
/// thread count. threads = 0 uses the hardware concurrency.
std::vector<RoundResult> run_rounds(const ScenarioConfig& cfg, const EnergyModel& energy,
                                    Scheme scheme, std::uint64_t zeta, std::uint64_t rounds,
                                    std::uint64_t base_seed, int threads = 0);

/// Mean accuracy and energy with 95% normal-approximation half-widths.
CampaignSummary summarize(const std::vector<RoundResult>& rounds);

CampaignSummary run_campaign(const ScenarioConfig& cfg, const EnergyModel& energy,
                             Scheme scheme, std::uint64_t zeta, std::uint64_t rounds,
                             std::uint64_t base_seed, int threads = 0);

/// Wraps a campaign's accuracy estimate as an AccuracyResult.
AccuracyResult simulated_result(const CampaignSummary& summary, std::uint64_t zeta);

/// Campaign summary as a JSON record.
std::string to_json(const CampaignSummary& summary);

/// Per-round trace rows (round, w, w_s, exact_match, energy_J,
/// completion_slot) as CSV, for debugging campaigns.
std::string rounds_to_csv(const std::vector<RoundResult>& rounds);

}  // namespace cowu
