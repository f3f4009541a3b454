#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cowu {

/// p-persistent CSMA parameters: per-slot transmission probability p and the
/// fixed transmission duration in slots (L).
struct CsmaParams {
    double p = 0.1;
    int tx_slots = 1;

    /// Throws std::invalid_argument unless 0 < p <= 1 and tx_slots >= 1.
    void validate() const;
};

/**
 * Absorbing contention chain for a fixed initial backlog of w active nodes.
 *
 * States are ordered (w,0), (w,1), ..., (w,L-1), (w-1,0), ..., (1,L-1), (0,0);
 * state (n,l) means n nodes have not completed and the ongoing transmission
 * has occupied l slots. From (n,0) a transmission starts with probability
 * 1-(1-p)^n; it runs for L slots and then resolves: a success (exactly one
 * transmitter, conditional probability S_n = n p (1-p)^{n-1} / (1-(1-p)^n))
 * moves to (n-1,0), a collision returns to (n,0). (0,0) absorbs.
 *
 * For L == 1 the start and resolution compose into a single slot:
 * (n,0) -> (n-1,0) with probability n p (1-p)^{n-1}, else hold.
 *
 * A transmission starting in slot k (0-indexed) occupies slots k..k+L-1 and
 * counts as completed by horizon zeta iff k + L <= zeta. The Monte Carlo
 * simulator uses the identical convention.
 *
 * Only the per-backlog coefficients are stored; the (wL+1)^2 matrix has at
 * most two nonzeros per row and is applied in O(wL) per step.
 */
class CsmaChain {
public:
    CsmaChain(int active_count, CsmaParams params);

    int active_count() const noexcept { return w_; }
    const CsmaParams& params() const noexcept { return params_; }

    int num_states() const noexcept;
    /// Index of state (pending, elapsed); the absorbing state is (0, 0).
    int state_index(int pending, int elapsed) const;

    /// Dense view of the transition matrix entry R[from][to].
    double entry(int from, int to) const;

    /// One step of phi' = phi R.
    void step(std::span<const double> in, std::span<double> out) const;

private:
    int w_;
    CsmaParams params_;
    std::vector<double> start_prob_;    // 1-(1-p)^n, indexed by pending n
    std::vector<double> success_prob_;  // S_n, indexed by pending n
};

/// Probability vector over the chain states after t slots.
struct CsmaChainState {
    int active_count = 0;
    std::uint64_t t = 0;
    std::vector<double> phi;
};

/// Phi(0) = (1, 0, ..., 0): all mass on (w, 0).
CsmaChainState initial_chain_state(const CsmaChain& chain);

/// Advances the state by the given number of slots.
/// Throws std::invalid_argument on a state/chain dimension mismatch.
void evolve(CsmaChainState& state, const CsmaChain& chain, std::uint64_t steps);

/// P(exactly w_s of the w initially active nodes completed by the horizon),
/// indexed by w_s = 0..w.
struct SuccessDistribution {
    std::vector<double> probs;
};

/// Aggregates a chain state into the success-count distribution:
/// w_s = w reads the absorbing mass, w_s < w sums the (w-w_s, l) states.
SuccessDistribution success_distribution(const CsmaChain& chain, const CsmaChainState& state);

/// Builds the chain, evolves zeta slots from Phi(0) and aggregates.
SuccessDistribution success_distribution(int active_count, CsmaParams params, std::uint64_t zeta);

/**
 * Lockstep evolution of the contention chains for every backlog 0..max_active.
 * advance() moves all chains one slot; distribution(w) reads P_s(., zeta) for
 * backlog w at the current horizon. Used by sweeps that need every (w, zeta)
 * pair once, one O(w L) pass per chain per slot.
 */
class SuccessSweeper {
public:
    SuccessSweeper(int max_active, CsmaParams params);

    void advance();
    std::uint64_t zeta() const noexcept { return zeta_; }
    SuccessDistribution distribution(int active_count) const;

private:
    std::vector<CsmaChain> chains_;
    std::vector<CsmaChainState> states_;
    std::vector<double> scratch_;
    std::uint64_t zeta_ = 0;
};

}  // namespace cowu
