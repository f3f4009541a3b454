#include "cowu/csma_chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cowu {

void CsmaParams::validate() const {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("csma: p must lie in (0, 1]");
    if (tx_slots < 1)
        throw std::invalid_argument("csma: tx_slots must be >= 1");
}

CsmaChain::CsmaChain(int active_count, CsmaParams params)
    : w_(active_count), params_(params) {
    params_.validate();
    if (w_ < 0) throw std::invalid_argument("csma: active_count must be >= 0");
    start_prob_.resize(w_ + 1, 0.0);
    success_prob_.resize(w_ + 1, 0.0);
    const double p = params_.p;
    for (int n = 1; n <= w_; ++n) {
        const double idle = std::pow(1.0 - p, n);
        const double start = 1.0 - idle;
        start_prob_[n] = start;
        const double single = n * p * std::pow(1.0 - p, n - 1);
        success_prob_[n] = start > 0.0 ? single / start : 0.0;
    }
}

int CsmaChain::num_states() const noexcept {
    return w_ * params_.tx_slots + 1;
}

int CsmaChain::state_index(int pending, int elapsed) const {
    const int L = params_.tx_slots;
    if (pending == 0) {
        if (elapsed != 0) throw std::out_of_range("csma: absorbing state is (0, 0)");
        return w_ * L;
    }
    if (pending < 0 || pending > w_ || elapsed < 0 || elapsed >= L)
        throw std::out_of_range("csma: no state (" + std::to_string(pending) + ", " +
                                std::to_string(elapsed) + ")");
    return (w_ - pending) * L + elapsed;
}

double CsmaChain::entry(int from, int to) const {
    const int states = num_states();
    if (from < 0 || from >= states || to < 0 || to >= states)
        throw std::out_of_range("csma: state index out of range");
    const int L = params_.tx_slots;
    const int absorbing = w_ * L;
    if (from == absorbing) return to == absorbing ? 1.0 : 0.0;

    const int pending = w_ - from / L;
    const int elapsed = from % L;
    if (L == 1) {
        // Start and resolution compose: (n,0) -> (n-1,0) w.p. n p (1-p)^{n-1}.
        const double down = start_prob_[pending] * success_prob_[pending];
        if (to == from + 1) return down;
        if (to == from) return 1.0 - down;
        return 0.0;
    }
    if (elapsed == 0) {
        if (to == from + 1) return start_prob_[pending];
        if (to == from) return 1.0 - start_prob_[pending];
        return 0.0;
    }
    if (elapsed < L - 1) return to == from + 1 ? 1.0 : 0.0;
    // elapsed == L-1: resolve into (pending-1, 0) on success, (pending, 0) on collision.
    if (to == (w_ - pending + 1) * L) return success_prob_[pending];
    if (to == (w_ - pending) * L) return 1.0 - success_prob_[pending];
    return 0.0;
}

void CsmaChain::step(std::span<const double> in, std::span<double> out) const {
    const int L = params_.tx_slots;
    const int absorbing = w_ * L;
    std::fill(out.begin(), out.end(), 0.0);
    out[absorbing] += in[absorbing];
    for (int n = w_; n >= 1; --n) {
        const int base = (w_ - n) * L;
        if (L == 1) {
            const double down = start_prob_[n] * success_prob_[n];
            out[base + 1] += in[base] * down;
            out[base] += in[base] * (1.0 - down);
            continue;
        }
        out[base + 1] += in[base] * start_prob_[n];
        out[base] += in[base] * (1.0 - start_prob_[n]);
        for (int l = 1; l <= L - 2; ++l) out[base + l + 1] += in[base + l];
        out[base + L] += in[base + L - 1] * success_prob_[n];
        out[base] += in[base + L - 1] * (1.0 - success_prob_[n]);
    }
}

CsmaChainState initial_chain_state(const CsmaChain& chain) {
    CsmaChainState state;
    state.active_count = chain.active_count();
    state.t = 0;
    state.phi.assign(chain.num_states(), 0.0);
    state.phi[0] = 1.0;
    return state;
}

void evolve(CsmaChainState& state, const CsmaChain& chain, std::uint64_t steps) {
    if (static_cast<int>(state.phi.size()) != chain.num_states() ||
        state.active_count != chain.active_count())
        throw std::invalid_argument("evolve: chain state does not match the chain dimensions");
    std::vector<double> scratch(state.phi.size());
    for (std::uint64_t s = 0; s < steps; ++s) {
        chain.step(state.phi, scratch);
        state.phi.swap(scratch);
    }
    state.t += steps;
}

SuccessDistribution success_distribution(const CsmaChain& chain, const CsmaChainState& state) {
    if (static_cast<int>(state.phi.size()) != chain.num_states() ||
        state.active_count != chain.active_count())
        throw std::invalid_argument("success_distribution: state does not match the chain");
    const int w = chain.active_count();
    const int L = chain.params().tx_slots;
    SuccessDistribution dist;
    dist.probs.assign(w + 1, 0.0);
    dist.probs[w] = state.phi[w * L];
    for (int ws = 0; ws < w; ++ws) {
        double mass = 0.0;
        for (int l = 0; l < L; ++l) mass += state.phi[ws * L + l];
        dist.probs[ws] = mass;
    }
    return dist;
}

SuccessDistribution success_distribution(int active_count, CsmaParams params, std::uint64_t zeta) {
    const CsmaChain chain(active_count, params);
    CsmaChainState state = initial_chain_state(chain);
    evolve(state, chain, zeta);
    return success_distribution(chain, state);
}

SuccessSweeper::SuccessSweeper(int max_active, CsmaParams params) {
    if (max_active < 0) throw std::invalid_argument("sweeper: max_active must be >= 0");
    chains_.reserve(max_active + 1);
    states_.reserve(max_active + 1);
    for (int w = 0; w <= max_active; ++w) {
        chains_.emplace_back(w, params);
        states_.push_back(initial_chain_state(chains_.back()));
    }
    scratch_.resize(chains_.back().num_states());
}

void SuccessSweeper::advance() {
    for (std::size_t w = 0; w < chains_.size(); ++w) {
        auto& phi = states_[w].phi;
        const std::span<double> out(scratch_.data(), phi.size());
        chains_[w].step(phi, out);
        std::copy(out.begin(), out.end(), phi.begin());
        states_[w].t += 1;
    }
    ++zeta_;
}

SuccessDistribution SuccessSweeper::distribution(int active_count) const {
    if (active_count < 0 || active_count >= static_cast<int>(chains_.size()))
        throw std::out_of_range("sweeper: active_count out of range");
    return success_distribution(chains_[active_count], states_[active_count]);
}

}  // namespace cowu
