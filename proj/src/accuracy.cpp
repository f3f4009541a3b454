#include "cowu/accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace cowu {

namespace {

// x^k for integer k with 0^0 = 1.
double pow_int(double x, int k) {
    double result = 1.0;
    double base = x;
    for (int e = k; e > 0; e >>= 1) {
        if (e & 1) result *= base;
        if (e > 1) base *= base;
    }
    return result;
}

struct Process {
    TransitionMatrix z;
    StationaryDistribution pi;
};

// Builds the birth-death chain and its stationary distribution for a step
// probability. q = 0 freezes the process; the stationary limit is uniform.
Process make_process(int num_states, double q) {
    TransitionMatrix z = TransitionMatrix::birth_death(num_states, q);
    if (q == 0.0) {
        StationaryDistribution pi;
        pi.probs.assign(num_states, 1.0 / num_states);
        return {std::move(z), std::move(pi)};
    }
    StationaryDistribution pi = stationary(z);
    return {std::move(z), std::move(pi)};
}

// gamma = sum_w P_d(w) P_C^{N-w} sum_{ws<=w} P_A^{ws} P_B^{w-ws} P_s(ws).
// The ideal-MAC variant replaces P_s with a point mass at ws = w.
double mix_gamma(const RangeSurvival& sv,
                 const std::vector<double>& wake_dist,
                 const std::vector<SuccessDistribution>* success,
                 int num_nodes) {
    const int n = num_nodes;
    std::vector<double> pow_a(n + 1), pow_b(n + 1), pow_c(n + 1);
    for (int k = 0; k <= n; ++k) {
        pow_a[k] = pow_int(sv.p_a, k);
        pow_b[k] = pow_int(sv.p_b, k);
        pow_c[k] = pow_int(sv.p_c, k);
    }
    double gamma = 0.0;
    for (int w = 0; w <= n; ++w) {
        const double pd = wake_dist[w];
        if (pd == 0.0) continue;
        double inner;
        if (success == nullptr) {
            inner = pow_a[w];
        } else {
            const auto& ps = (*success)[w].probs;
            inner = 0.0;
            for (int ws = 0; ws <= w; ++ws)
                inner += pow_a[ws] * pow_b[w - ws] * ps[ws];
        }
        gamma += pd * pow_c[n - w] * inner;
    }
    // The exact mixture is a probability; summation may drift an ulp past 1.
    return std::clamp(gamma, 0.0, 1.0);
}

}  // namespace

ScenarioConfig ScenarioConfig::with_q(double true_q) const {
    ScenarioConfig copy = *this;
    copy.q = true_q;
    copy.q_hat.reset();
    return copy;
}

void ScenarioConfig::validate() const {
    if (num_nodes < 1) throw std::invalid_argument("N: must be >= 1");
    if (num_states < 2) throw std::invalid_argument("M: must be >= 2");
    if (!(q >= 0.0 && q <= 0.5)) throw std::invalid_argument("q: must lie in [0, 0.5]");
    if (q_hat && !(*q_hat >= 0.0 && *q_hat <= 0.5))
        throw std::invalid_argument("q_hat: must lie in [0, 0.5]");
    try {
        range.validate(num_states);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("range: need 1 <= lower <= upper <= M");
    }
    csma.validate();  // already names "csma: p" / "csma: tx_slots"
    if (zeta_max < 1) throw std::invalid_argument("zeta_max: must be >= 1");
}

std::string method_name(Method method) {
    switch (method) {
        case Method::cowu_analytical: return "cowu-analytical";
        case Method::cowu_upper_bound: return "cowu-upper-bound";
        case Method::round_robin: return "round-robin";
        case Method::simulated: return "simulated";
    }
    return "unknown";
}

std::string to_json(const AccuracyResult& result, const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["method"] = method_name(result.method);
    j["gamma"] = result.gamma;
    if (result.zeta) j["zeta"] = *result.zeta;
    if (result.ci_halfwidth) j["ci_halfwidth"] = *result.ci_halfwidth;
    j["params"] = {
        {"N", cfg.num_nodes},     {"M", cfg.num_states},
        {"q", cfg.q},             {"q_hat", cfg.assumed_q()},
        {"range", {cfg.range.lower, cfg.range.upper}},
        {"L", cfg.csma.tx_slots}, {"p", cfg.csma.p},
        {"zeta_max", cfg.zeta_max},
    };
    return j.dump();
}

std::vector<double> wake_count_distribution(int num_nodes, double wake_prob) {
    if (num_nodes < 1) throw std::invalid_argument("N: must be >= 1");
    if (!(wake_prob >= 0.0 && wake_prob <= 1.0))
        throw std::invalid_argument("wake_prob: must lie in [0, 1]");
    const int n = num_nodes;
    std::vector<double> dist(n + 1, 0.0);
    if (wake_prob == 0.0) {
        dist[0] = 1.0;
        return dist;
    }
    if (wake_prob == 1.0) {
        dist[n] = 1.0;
        return dist;
    }
    dist[0] = std::pow(1.0 - wake_prob, n);
    if (dist[0] > 0.0) {
        const double ratio = wake_prob / (1.0 - wake_prob);
        for (int w = 0; w < n; ++w)
            dist[w + 1] = dist[w] * ratio * static_cast<double>(n - w) / (w + 1);
    } else {
        // Extreme wake_prob underflowed the first term; evaluate in log space.
        for (int w = 0; w <= n; ++w) {
            const double log_term = std::lgamma(n + 1.0) - std::lgamma(w + 1.0) -
                                    std::lgamma(n - w + 1.0) + w * std::log(wake_prob) +
                                    (n - w) * std::log1p(-wake_prob);
            dist[w] = std::exp(log_term);
        }
    }
    return dist;
}

AccuracyResult gamma_cowu(const ScenarioConfig& cfg, std::uint64_t zeta) {
    cfg.validate();
    const Process proc = make_process(cfg.num_states, cfg.q);
    const RangeSurvival sv = range_survival_probs(proc.z, proc.pi, cfg.range, zeta);
    const auto wake_dist =
        wake_count_distribution(cfg.num_nodes, wake_probability(proc.pi, cfg.range));
    std::vector<SuccessDistribution> success;
    success.reserve(cfg.num_nodes + 1);
    for (int w = 0; w <= cfg.num_nodes; ++w)
        success.push_back(success_distribution(w, cfg.csma, zeta));
    const double gamma = mix_gamma(sv, wake_dist, &success, cfg.num_nodes);
    return AccuracyResult{gamma, Method::cowu_analytical, zeta, std::nullopt};
}

AccuracyResult gamma_cowu_upper_bound(const ScenarioConfig& cfg, std::uint64_t zeta) {
    cfg.validate();
    const Process proc = make_process(cfg.num_states, cfg.q);
    const RangeSurvival sv = range_survival_probs(proc.z, proc.pi, cfg.range, zeta);
    const auto wake_dist =
        wake_count_distribution(cfg.num_nodes, wake_probability(proc.pi, cfg.range));
    const double gamma = mix_gamma(sv, wake_dist, nullptr, cfg.num_nodes);
    return AccuracyResult{gamma, Method::cowu_upper_bound, zeta, std::nullopt};
}

AccuracyResult gamma_round_robin(const ScenarioConfig& cfg) {
    cfg.validate();
    const Process proc = make_process(cfg.num_states, cfg.q);
    const int n = cfg.num_nodes;
    const int lag_step = cfg.csma.tx_slots;
    // Node i's sample ages (N-i+1)L slots; walk the survival sweep once up
    // to NL and take the per-node consistency terms at multiples of L.
    RangeSurvivalSweep sweep(proc.z, proc.pi, cfg.range);
    double gamma = 1.0;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t lag = static_cast<std::uint64_t>(i + 1) * lag_step;
        while (sweep.zeta() < lag) sweep.advance();
        const RangeSurvival sv = sweep.current();
        gamma *= sv.p_d + sv.p_e;
    }
    return AccuracyResult{gamma, Method::round_robin, std::nullopt, std::nullopt};
}

std::vector<ZetaSweepPoint> zeta_accuracy_sweep(const ScenarioConfig& cfg) {
    cfg.validate();
    const Process proc = make_process(cfg.num_states, cfg.q);
    const auto wake_dist =
        wake_count_distribution(cfg.num_nodes, wake_probability(proc.pi, cfg.range));
    RangeSurvivalSweep survival(proc.z, proc.pi, cfg.range);
    SuccessSweeper success(cfg.num_nodes, cfg.csma);

    std::vector<ZetaSweepPoint> points;
    points.reserve(cfg.zeta_max);
    std::vector<SuccessDistribution> dists(cfg.num_nodes + 1);
    for (std::uint64_t zeta = 1; zeta <= cfg.zeta_max; ++zeta) {
        survival.advance();
        success.advance();
        const RangeSurvival sv = survival.current();
        for (int w = 0; w <= cfg.num_nodes; ++w) dists[w] = success.distribution(w);
        ZetaSweepPoint pt;
        pt.zeta = zeta;
        pt.gamma_analytical = mix_gamma(sv, wake_dist, &dists, cfg.num_nodes);
        pt.gamma_upper = mix_gamma(sv, wake_dist, nullptr, cfg.num_nodes);
        points.push_back(pt);
    }
    return points;
}

ZetaOptimum optimize_zeta(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto points = zeta_accuracy_sweep(cfg.with_q(cfg.assumed_q()));
    ZetaOptimum best{0, -1.0};
    for (const auto& pt : points) {
        if (pt.gamma_analytical > best.gamma) {
            best.zeta = pt.zeta;
            best.gamma = pt.gamma_analytical;
        }
    }
    return best;
}

std::vector<MismatchPoint> mismatch_curve(const ScenarioConfig& cfg,
                                          std::span<const double> q_true_values,
                                          double q_hat) {
    cfg.validate();
    ScenarioConfig assumed = cfg.with_q(q_hat);
    const ZetaOptimum chosen = optimize_zeta(assumed);

    std::vector<MismatchPoint> curve;
    curve.reserve(q_true_values.size());
    for (const double q : q_true_values) {
        const ScenarioConfig truth = cfg.with_q(q);
        const auto points = zeta_accuracy_sweep(truth);
        MismatchPoint pt;
        pt.q = q;
        pt.zeta_opt = chosen.zeta;
        pt.gamma = points[chosen.zeta - 1].gamma_analytical;
        ZetaOptimum perfect{0, -1.0};
        for (const auto& sweep_pt : points) {
            if (sweep_pt.gamma_analytical > perfect.gamma) {
                perfect.zeta = sweep_pt.zeta;
                perfect.gamma = sweep_pt.gamma_analytical;
            }
        }
        pt.zeta_opt_perfect = perfect.zeta;
        pt.gamma_perfect = perfect.gamma;
        pt.gamma_round_robin = gamma_round_robin(truth).gamma;
        curve.push_back(pt);
    }
    return curve;
}

}  // namespace cowu
