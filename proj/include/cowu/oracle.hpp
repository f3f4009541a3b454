#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cowu/accuracy.hpp"
#include "cowu/csma_chain.hpp"
#include "cowu/process_model.hpp"

namespace cowu::oracle {

// Independent reference implementations built by exhaustive enumeration.
// They deliberately avoid the matrix-power and chain-evolution code paths so
// the two routes can cross-validate each other. Costs are exponential in the
// horizon; intended for the small instances used by tests and `validate`.

/// P(v_zeta = j | v_0 = start) by summing the probability of every length-
/// zeta path through the chain. start and the result are 0-indexed.
std::vector<double> step_distribution_by_paths(const TransitionMatrix& z, int start,
                                               int zeta);

/// Success-count pmf P(w_s completed by the horizon) by expanding every
/// channel history of the p-persistent MAC slot by slot.
std::vector<double> success_distribution_tree(int active_count, CsmaParams params, int zeta);

/// Joint distribution over which subset of the active nodes has completed by
/// the horizon; keys are bitmasks over node indices 0..active_count-1.
std::vector<std::pair<std::uint32_t, double>> success_subset_distribution(int active_count,
                                                                          CsmaParams params,
                                                                          int zeta);

/// Accuracy of content-based wake-up by full joint enumeration over initial
/// values, identified MAC outcomes and per-node process paths.
/// ideal_mac replaces the MAC with certain instant delivery of every
/// awakened node.
double gamma_cowu_enumeration(const ScenarioConfig& cfg, int zeta, bool ideal_mac);

/// Accuracy of round-robin scheduling from path-enumerated lag consistencies.
double gamma_round_robin_enumeration(const ScenarioConfig& cfg);

}  // namespace cowu::oracle
