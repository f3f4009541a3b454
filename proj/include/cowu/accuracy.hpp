#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cowu/csma_chain.hpp"
#include "cowu/process_model.hpp"

namespace cowu {

/**
 * One collection scenario: N identical nodes observing independent
 * birth-death processes on M states, a range query, and the CSMA MAC.
 *
 * q is the true per-slot step probability; q_hat is the value the sink
 * assumes when choosing the wake-up timing (defaults to q). zeta_max bounds
 * the timing sweep.
 */
struct ScenarioConfig {
    int num_nodes = 100;
    int num_states = 100;
    double q = 2.0e-4;
    std::optional<double> q_hat;
    RangeQuery range{94, 98};
    CsmaParams csma{0.1, 10};
    std::uint64_t zeta_max = 2000;

    double assumed_q() const noexcept { return q_hat.value_or(q); }

    /// Copy with the true step probability replaced (q_hat cleared).
    ScenarioConfig with_q(double true_q) const;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class Method { cowu_analytical, cowu_upper_bound, round_robin, simulated };

std::string method_name(Method method);

/// Accuracy value gamma with its provenance. zeta is absent for round-robin;
/// ci_halfwidth is present only for simulated results.
struct AccuracyResult {
    double gamma = 0.0;
    Method method = Method::cowu_analytical;
    std::optional<std::uint64_t> zeta;
    std::optional<double> ci_halfwidth;
};

/// Serializes a result (with the scenario it came from) to a JSON record.
std::string to_json(const AccuracyResult& result, const ScenarioConfig& cfg);

/// Binomial pmf of the wake count: P(w of N nodes wake), w = 0..N.
/// Evaluated by the multiplicative recurrence (log-space fallback when the
/// first term underflows) so the mass sums to 1 to near machine precision.
std::vector<double> wake_count_distribution(int num_nodes, double wake_prob);

/// Accuracy of content-based wake-up at lag zeta: the probability that the
/// delivered set equals the in-range set at the deadline, mixing the wake
/// count, the MAC success count and the per-node range-survival terms.
AccuracyResult gamma_cowu(const ScenarioConfig& cfg, std::uint64_t zeta);

/// Same mixture under an ideal MAC where every awakened node delivers. This
/// dominates gamma_cowu whenever staying in range over the lag is at least
/// as likely as leaving it (p_a >= p_b, the slow-process regime); for very
/// fast processes a failed transmission can be the more consistent outcome
/// and the real MAC may exceed this curve.
AccuracyResult gamma_cowu_upper_bound(const ScenarioConfig& cfg, std::uint64_t zeta);

/// Accuracy of round-robin scheduling: all N nodes transmit in consecutive
/// dedicated L-slot windows ending at the deadline, so node i's sample ages
/// (N-i+1)L slots; the sink's estimate is right iff every node's range
/// membership survived its own lag.
AccuracyResult gamma_round_robin(const ScenarioConfig& cfg);

struct ZetaSweepPoint {
    std::uint64_t zeta = 0;
    double gamma_analytical = 0.0;
    double gamma_upper = 0.0;
};

/// gamma and its upper bound for every zeta in 1..zeta_max, computed in one
/// incremental pass over the survival and contention chains.
std::vector<ZetaSweepPoint> zeta_accuracy_sweep(const ScenarioConfig& cfg);

struct ZetaOptimum {
    std::uint64_t zeta = 0;
    double gamma = 0.0;
};

/// Exhaustive argmax of gamma over zeta in 1..zeta_max, evaluated under the
/// assumed step probability; ties resolve toward the smaller zeta.
ZetaOptimum optimize_zeta(const ScenarioConfig& cfg);

struct MismatchPoint {
    double q = 0.0;                      // true step probability
    std::uint64_t zeta_opt = 0;          // chosen under the assumed q_hat
    double gamma = 0.0;                  // achieved under the true q at zeta_opt
    std::uint64_t zeta_opt_perfect = 0;  // chosen with q_hat == q
    double gamma_perfect = 0.0;
    double gamma_round_robin = 0.0;
};

/// Model-mismatch study: for each true q, the timing is optimized under the
/// fixed q_hat and then evaluated under the true q; the perfect-knowledge
/// optimum and the round-robin baseline ride along for comparison.
std::vector<MismatchPoint> mismatch_curve(const ScenarioConfig& cfg,
                                          std::span<const double> q_true_values,
                                          double q_hat);

}  // namespace cowu
