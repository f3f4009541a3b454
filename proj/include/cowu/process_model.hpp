#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cowu {

/**
 * Row-stochastic transition matrix of a finite irreducible Markov chain.
 *
 * States are numbered 1..M at the API surface (range queries, configs);
 * storage and the entry/row accessors are 0-indexed like every other C++
 * container. Construction validates row sums, entry bounds and
 * irreducibility, so downstream code can assume a well-formed chain.
 */
class TransitionMatrix {
public:
    /// Builds from explicit rows. Throws std::invalid_argument if any row
    /// does not sum to 1 within 1e-12, an entry is outside [0, 1], the
    /// matrix is not square, or the chain is reducible.
    static TransitionMatrix from_rows(const std::vector<std::vector<double>>& rows);

    /// Truncated birth-death chain on num_states states: interior states
    /// move up or down with probability step_prob each and hold otherwise;
    /// boundary states reflect with a 1-q hold. This boundary choice keeps
    /// detailed balance symmetric, so the stationary distribution is uniform.
    /// Requires num_states >= 2 and 0 <= step_prob <= 0.5.
    static TransitionMatrix birth_death(int num_states, double step_prob);

    int size() const noexcept { return size_; }

    double entry(int from, int to) const;
    std::span<const double> row(int from) const;

    /// Largest |row sum - 1| over all rows.
    double row_sum_drift() const noexcept;

    /// JSON array-of-rows, e.g. [[0.9,0.1],[0.3,0.7]].
    std::string to_json() const;
    static TransitionMatrix from_json(const std::string& text);

private:
    TransitionMatrix(int size, std::vector<double> entries);
    void validate() const;

    // Powers of a valid chain stay stochastic up to rounding but may drift a
    // few ulps outside [0, 1], so matrix_power bypasses full validation.
    friend TransitionMatrix matrix_power(const TransitionMatrix& z, std::uint64_t zeta);

    int size_ = 0;
    std::vector<double> entries_;  // row-major, size_ * size_
};

/// Stationary distribution pi of an irreducible chain: pi Z = pi, sum pi = 1.
struct StationaryDistribution {
    std::vector<double> probs;  // probs[i] is the mass of state i+1
};

/// Inclusive state interval [lower, upper], 1-indexed like the states.
struct RangeQuery {
    int lower = 1;
    int upper = 1;

    bool contains(int state_1based) const noexcept {
        return state_1based >= lower && state_1based <= upper;
    }
    int width() const noexcept { return upper - lower + 1; }

    /// Throws std::invalid_argument unless 1 <= lower <= upper <= num_states.
    void validate(int num_states) const;
};

/**
 * Range-survival probabilities over a lag of zeta slots.
 *
 * p_a: still in range at the deadline given in range at sampling;
 * p_b: left the range given in range at sampling (1 - p_a);
 * p_c: still outside given outside at sampling;
 * p_d, p_e: the corresponding unconditional joint probabilities,
 *           p_d = p_a * P(in range), p_e = p_c * P(outside).
 *
 * When the range covers every state the "outside" conditions are vacuous and
 * p_c is defined as 1 (and p_e as 0) so downstream products stay total.
 */
struct RangeSurvival {
    double p_a = 1.0;
    double p_b = 0.0;
    double p_c = 1.0;
    double p_d = 0.0;
    double p_e = 0.0;
};

/// Stationary distribution via the GTH (state-censoring) direct solve, which
/// has no subtractive cancellation and handles near-identity chains that
/// defeat power iteration. The result is checked against pi Z = pi to 1e-10;
/// failure throws std::runtime_error.
StationaryDistribution stationary(const TransitionMatrix& z);

/// Z^zeta by exponentiation-by-squaring; Z^0 is the identity.
TransitionMatrix matrix_power(const TransitionMatrix& z, std::uint64_t zeta);

/// P(state in range) under pi: the probability that a node wakes.
double wake_probability(const StationaryDistribution& pi, const RangeQuery& range);

/// All five range-survival probabilities at one lag, from Z^zeta.
RangeSurvival range_survival_probs(const TransitionMatrix& z,
                                   const StationaryDistribution& pi,
                                   const RangeQuery& range,
                                   std::uint64_t zeta);

/**
 * Tracks the range-survival probabilities while the lag advances one slot at
 * a time. Each advance() is one O(M^2) matrix-vector pass, which turns a
 * sweep over zeta_max lags into O(zeta_max * M^2) instead of repeated
 * matrix powers.
 */
class RangeSurvivalSweep {
public:
    RangeSurvivalSweep(const TransitionMatrix& z,
                       const StationaryDistribution& pi,
                       const RangeQuery& range);

    void advance();  // zeta += 1
    std::uint64_t zeta() const noexcept { return zeta_; }
    RangeSurvival current() const;

private:
    const TransitionMatrix* z_;
    std::vector<double> pi_;
    std::vector<char> in_range_;
    std::vector<double> hit_range_;       // [Z^zeta 1_range]_i
    std::vector<double> hit_complement_;  // [Z^zeta 1_complement]_i
    std::vector<double> scratch_;
    double mass_in_ = 0.0;
    double mass_out_ = 0.0;
    std::uint64_t zeta_ = 0;
};

}  // namespace cowu
