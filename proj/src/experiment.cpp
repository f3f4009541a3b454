#include "cowu/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string_view>

#include <json.hpp>

#include "cowu/oracle.hpp"

namespace cowu {

namespace {

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt(std::uint64_t v) {
    return std::to_string(v);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("csv: bad number '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("csv: bad integer '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(begin));
            break;
        }
        cells.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
    return cells;
}

std::vector<std::vector<std::string_view>> parse_table(const std::string& text,
                                                       std::string_view header,
                                                       std::size_t columns) {
    std::vector<std::vector<std::string_view>> rows;
    std::string_view rest(text);
    bool first = true;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        const std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (line.empty()) continue;
        if (first) {
            if (line != header)
                throw std::invalid_argument("csv: unexpected header '" + std::string(line) + "'");
            first = false;
            continue;
        }
        auto cells = split_line(line);
        if (cells.size() != columns)
            throw std::invalid_argument("csv: wrong column count in '" + std::string(line) + "'");
        rows.push_back(std::move(cells));
    }
    if (first) throw std::invalid_argument("csv: missing header");
    return rows;
}

constexpr std::string_view kZetaSweepHeader =
    "zeta,gamma_analytical,gamma_upper,gamma_simulated,ci_halfwidth,gamma_round_robin";
constexpr std::string_view kQSweepHeader = "q,q_hat,zeta_opt,gamma_cowu,gamma_round_robin";
constexpr std::string_view kEnergyHeader = "scheme,mean_energy_mJ,ci_halfwidth_mJ";
constexpr std::string_view kCalibrationHeader = "p,mean_energy_mJ,ci_halfwidth_mJ";

}  // namespace

void ExperimentSpec::validate() const {
    scenario.validate();
    energy.validate();
    if (rounds < 1) throw std::invalid_argument("rounds: must be >= 1");
}

std::vector<ZetaSweepRow> run_zeta_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const auto analytic = zeta_accuracy_sweep(spec.scenario);
    const double rr = gamma_round_robin(spec.scenario).gamma;
    const std::uint64_t stride = spec.effective_sim_every();

    std::vector<ZetaSweepRow> rows;
    rows.reserve(analytic.size());
    for (const auto& pt : analytic) {
        ZetaSweepRow row;
        row.zeta = pt.zeta;
        row.gamma_analytical = pt.gamma_analytical;
        row.gamma_upper = pt.gamma_upper;
        row.gamma_round_robin = rr;
        if (pt.zeta % stride == 0) {
            const CampaignSummary s =
                run_campaign(spec.scenario, spec.energy, Scheme::cowu, pt.zeta, spec.rounds,
                             spec.seed, spec.threads);
            row.gamma_simulated = s.gamma_hat;
            row.ci_halfwidth = s.gamma_ci_halfwidth;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<QSweepRow> run_q_sweep(const ExperimentSpec& spec,
                                   std::span<const double> q_values,
                                   std::span<const double> q_hat_values) {
    spec.validate();
    if (q_values.empty()) throw std::invalid_argument("q_values: must not be empty");

    struct SweepCache {
        std::vector<ZetaSweepPoint> points;
        std::uint64_t zeta_opt = 0;
        double gamma_opt = 0.0;
    };
    std::map<double, SweepCache> cache;
    auto sweep_for = [&](double q) -> const SweepCache& {
        auto it = cache.find(q);
        if (it == cache.end()) {
            SweepCache entry;
            entry.points = zeta_accuracy_sweep(spec.scenario.with_q(q));
            double best = -1.0;
            for (const auto& pt : entry.points) {
                if (pt.gamma_analytical > best) {
                    best = pt.gamma_analytical;
                    entry.zeta_opt = pt.zeta;
                }
            }
            entry.gamma_opt = best;
            it = cache.emplace(q, std::move(entry)).first;
        }
        return it->second;
    };
    std::map<double, double> rr_cache;
    auto rr_for = [&](double q) {
        auto it = rr_cache.find(q);
        if (it == rr_cache.end())
            it = rr_cache.emplace(q, gamma_round_robin(spec.scenario.with_q(q)).gamma).first;
        return it->second;
    };

    std::vector<QSweepRow> rows;
    rows.reserve(q_values.size() * (1 + q_hat_values.size()));
    for (const double q : q_values) {
        const SweepCache& sw = sweep_for(q);
        rows.push_back({q, q, sw.zeta_opt, sw.gamma_opt, rr_for(q)});
    }
    for (const double q_hat : q_hat_values) {
        const std::uint64_t zeta_opt = sweep_for(q_hat).zeta_opt;
        for (const double q : q_values) {
            const SweepCache& sw = sweep_for(q);
            rows.push_back({q, q_hat, zeta_opt,
                            sw.points[zeta_opt - 1].gamma_analytical, rr_for(q)});
        }
    }
    return rows;
}

std::vector<EnergyRow> run_energy(const ExperimentSpec& spec, std::string* cowu_trace_csv) {
    spec.validate();
    // Energy of the wake-up scheme does not depend on the deadline (awakened
    // nodes run to completion), so the shortest meaningful lag is used.
    const std::uint64_t zeta = spec.scenario.csma.tx_slots;
    const auto cowu_rounds = run_rounds(spec.scenario, spec.energy, Scheme::cowu, zeta,
                                        spec.rounds, spec.seed, spec.threads);
    if (cowu_trace_csv != nullptr) *cowu_trace_csv = rounds_to_csv(cowu_rounds);
    const CampaignSummary cowu = summarize(cowu_rounds);
    const CampaignSummary rr = run_campaign(spec.scenario, spec.energy, Scheme::round_robin,
                                            0, spec.rounds, spec.seed, spec.threads);
    return {
        {"cowu", cowu.mean_energy_j * 1e3, cowu.energy_ci_halfwidth * 1e3},
        {"round-robin", rr.mean_energy_j * 1e3, rr.energy_ci_halfwidth * 1e3},
    };
}

std::vector<CalibrationRow> run_calibrate_p(const ExperimentSpec& spec,
                                            std::span<const double> p_values) {
    spec.validate();
    if (p_values.empty()) throw std::invalid_argument("p_values: must not be empty");
    std::vector<CalibrationRow> rows;
    rows.reserve(p_values.size());
    for (const double p : p_values) {
        ExperimentSpec point = spec;
        point.scenario.csma.p = p;
        point.scenario.validate();
        const std::uint64_t zeta = point.scenario.csma.tx_slots;
        const CampaignSummary s = run_campaign(point.scenario, point.energy, Scheme::cowu,
                                               zeta, point.rounds, point.seed, point.threads);
        rows.push_back({p, s.mean_energy_j * 1e3, s.energy_ci_halfwidth * 1e3});
    }
    return rows;
}

std::vector<double> default_q_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 8; ++k) grid.push_back((2 + 5 * k) * 1e-4);
    return grid;
}

std::vector<double> default_q_hat_grid() {
    return {0.2e-3, 4.2e-3};
}

std::vector<double> default_p_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 15; ++k) grid.push_back(0.02 * k);
    return grid;
}

std::string to_csv(const std::vector<ZetaSweepRow>& rows) {
    std::string out(kZetaSweepHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += fmt(r.zeta) + ',' + fmt(r.gamma_analytical) + ',' + fmt(r.gamma_upper) + ',';
        if (r.gamma_simulated) out += fmt(*r.gamma_simulated);
        out += ',';
        if (r.ci_halfwidth) out += fmt(*r.ci_halfwidth);
        out += ',' + fmt(r.gamma_round_robin) + '\n';
    }
    return out;
}

std::string to_csv(const std::vector<QSweepRow>& rows) {
    std::string out(kQSweepHeader);
    out += '\n';
    for (const auto& r : rows)
        out += fmt(r.q) + ',' + fmt(r.q_hat) + ',' + fmt(r.zeta_opt) + ',' +
               fmt(r.gamma_cowu) + ',' + fmt(r.gamma_round_robin) + '\n';
    return out;
}

std::string to_csv(const std::vector<EnergyRow>& rows) {
    std::string out(kEnergyHeader);
    out += '\n';
    for (const auto& r : rows)
        out += r.scheme + ',' + fmt(r.mean_energy_mj) + ',' + fmt(r.ci_halfwidth_mj) + '\n';
    return out;
}

std::string to_csv(const std::vector<CalibrationRow>& rows) {
    std::string out(kCalibrationHeader);
    out += '\n';
    for (const auto& r : rows)
        out += fmt(r.p) + ',' + fmt(r.mean_energy_mj) + ',' + fmt(r.ci_halfwidth_mj) + '\n';
    return out;
}

std::vector<ZetaSweepRow> zeta_sweep_from_csv(const std::string& text) {
    std::vector<ZetaSweepRow> rows;
    for (const auto& cells : parse_table(text, kZetaSweepHeader, 6)) {
        ZetaSweepRow r;
        r.zeta = parse_u64(cells[0]);
        r.gamma_analytical = parse_double(cells[1]);
        r.gamma_upper = parse_double(cells[2]);
        if (!cells[3].empty()) r.gamma_simulated = parse_double(cells[3]);
        if (!cells[4].empty()) r.ci_halfwidth = parse_double(cells[4]);
        r.gamma_round_robin = parse_double(cells[5]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<QSweepRow> q_sweep_from_csv(const std::string& text) {
    std::vector<QSweepRow> rows;
    for (const auto& cells : parse_table(text, kQSweepHeader, 5))
        rows.push_back({parse_double(cells[0]), parse_double(cells[1]), parse_u64(cells[2]),
                        parse_double(cells[3]), parse_double(cells[4])});
    return rows;
}

std::vector<EnergyRow> energy_from_csv(const std::string& text) {
    std::vector<EnergyRow> rows;
    for (const auto& cells : parse_table(text, kEnergyHeader, 3))
        rows.push_back({std::string(cells[0]), parse_double(cells[1]), parse_double(cells[2])});
    return rows;
}

std::vector<CalibrationRow> calibration_from_csv(const std::string& text) {
    std::vector<CalibrationRow> rows;
    for (const auto& cells : parse_table(text, kCalibrationHeader, 3))
        rows.push_back({parse_double(cells[0]), parse_double(cells[1]), parse_double(cells[2])});
    return rows;
}

std::string to_json(const std::vector<ZetaSweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json rec;
        rec["zeta"] = r.zeta;
        rec["gamma_analytical"] = r.gamma_analytical;
        rec["gamma_upper"] = r.gamma_upper;
        rec["gamma_simulated"] =
            r.gamma_simulated ? nlohmann::json(*r.gamma_simulated) : nlohmann::json();
        rec["ci_halfwidth"] = r.ci_halfwidth ? nlohmann::json(*r.ci_halfwidth) : nlohmann::json();
        rec["gamma_round_robin"] = r.gamma_round_robin;
        arr.push_back(std::move(rec));
    }
    return arr.dump(2);
}

std::string to_json(const std::vector<QSweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"q", r.q},
                       {"q_hat", r.q_hat},
                       {"zeta_opt", r.zeta_opt},
                       {"gamma_cowu", r.gamma_cowu},
                       {"gamma_round_robin", r.gamma_round_robin}});
    return arr.dump(2);
}

std::string to_json(const std::vector<EnergyRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"scheme", r.scheme},
                       {"mean_energy_mJ", r.mean_energy_mj},
                       {"ci_halfwidth_mJ", r.ci_halfwidth_mj}});
    return arr.dump(2);
}

std::string to_json(const std::vector<CalibrationRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"p", r.p},
                       {"mean_energy_mJ", r.mean_energy_mj},
                       {"ci_halfwidth_mJ", r.ci_halfwidth_mj}});
    return arr.dump(2);
}

// ---------------------------------------------------------------------------
// validate: oracle comparisons and invariant suites on small instances.
// ---------------------------------------------------------------------------

namespace {

struct Checker {
    std::vector<CheckResult> results;

    void add(std::string module, std::string name, bool pass, std::string details) {
        results.push_back({std::move(module), std::move(name), pass, std::move(details)});
    }

    void close(const std::string& module, const std::string& name, double observed,
               double expected, double tol, const std::string& inputs) {
        const bool pass = std::abs(observed - expected) <= tol;
        add(module, name, pass,
            inputs + " observed=" + fmt(observed) + " expected=" + fmt(expected) +
                " tol=" + fmt(tol));
    }
};

std::vector<std::vector<double>> dense_from_chain(const CsmaChain& chain) {
    const int n = chain.num_states();
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dense[i][j] = chain.entry(i, j);
    return dense;
}

std::vector<double> dense_evolve(const std::vector<std::vector<double>>& r,
                                 std::vector<double> phi, int steps) {
    const int n = static_cast<int>(phi.size());
    std::vector<double> next(n);
    for (int s = 0; s < steps; ++s) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) next[j] += phi[i] * r[i][j];
        phi.swap(next);
    }
    return phi;
}

// Schoolbook multiply, independent of the library's power routine.
std::vector<std::vector<double>> naive_multiply(const TransitionMatrix& a,
                                                const TransitionMatrix& b) {
    const int m = a.size();
    std::vector<std::vector<double>> c(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) c[i][j] += a.entry(i, k) * b.entry(k, j);
    return c;
}

void check_process_model(Checker& ck) {
    const std::string mod = "process-model";

    {
        const auto z = TransitionMatrix::birth_death(100, 2e-4);
        double worst = 0.0;
        for (const std::uint64_t zeta : {1ULL, 10ULL, 100ULL, 10000ULL})
            worst = std::max(worst, matrix_power(z, zeta).row_sum_drift());
        ck.add(mod, "row-stochastic-powers", worst < 1e-9,
               "birth-death M=100 q=2e-4, zeta up to 1e4, max drift=" + fmt(worst));
    }
    {
        const auto z = TransitionMatrix::from_rows({{0.9, 0.1}, {0.3, 0.7}});
        const auto pi = stationary(z);
        ck.close(mod, "stationary-two-state", pi.probs[0], 0.75, 1e-12, "Z=[[.9,.1],[.3,.7]]");
    }
    {
        const auto z = TransitionMatrix::birth_death(100, 2e-4);
        const auto pi = stationary(z);
        double worst = 0.0;
        for (double v : pi.probs) worst = std::max(worst, std::abs(v - 0.01));
        ck.add(mod, "stationary-uniform", worst < 1e-12,
               "birth-death M=100 q=2e-4, max deviation from 1/100=" + fmt(worst));
    }
    {
        const auto z = TransitionMatrix::birth_death(3, 0.1);
        const auto z2 = matrix_power(z, 2);
        const auto ref = naive_multiply(z, z);
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                worst = std::max(worst, std::abs(z2.entry(i, j) - ref[i][j]));
        ck.add(mod, "matrix-power-schoolbook", worst <= 1e-12,
               "birth-death M=3 q=0.1 zeta=2, max entry diff=" + fmt(worst));
    }
    {
        const auto z = TransitionMatrix::birth_death(5, 0.2);
        const auto pi = stationary(z);
        const RangeQuery range{2, 4};
        bool ok = true;
        std::string detail;
        for (const std::uint64_t zeta : {0ULL, 1ULL, 3ULL, 17ULL}) {
            const RangeSurvival sv = range_survival_probs(z, pi, range, zeta);
            const double mass_in = wake_probability(pi, range);
            const double mass_out = 1.0 - mass_in;
            const bool bounds = sv.p_a >= 0 && sv.p_a <= 1 && sv.p_b >= 0 && sv.p_b <= 1 &&
                                sv.p_c >= 0 && sv.p_c <= 1 && sv.p_d >= 0 && sv.p_e >= 0;
            if (!bounds || std::abs(sv.p_a + sv.p_b - 1.0) > 1e-12 ||
                std::abs(sv.p_d - sv.p_a * mass_in) > 1e-12 ||
                std::abs(sv.p_e - sv.p_c * mass_out) > 1e-12) {
                ok = false;
                detail = "failed at zeta=" + fmt(zeta);
                break;
            }
        }
        ck.add(mod, "range-survival-identities", ok,
               ok ? "M=5 q=0.2 range=[2,4], zeta in {0,1,3,17}" : detail);
    }
    {
        const auto z = TransitionMatrix::birth_death(3, 0.1);
        const auto pi = stationary(z);
        const RangeSurvival sv = range_survival_probs(z, pi, RangeQuery{3, 3}, 1);
        ck.close(mod, "range-survival-readoff", sv.p_a, 0.9, 1e-12,
                 "birth-death M=3 q=0.1 range=[3,3] zeta=1");
    }
    {
        const auto z = TransitionMatrix::birth_death(4, 0.3);
        const auto pi = stationary(z);
        const RangeSurvival sv = range_survival_probs(z, pi, RangeQuery{1, 4}, 5);
        const bool ok = sv.p_c == 1.0 && sv.p_e == 0.0;
        ck.add(mod, "full-range-convention", ok,
               "range=[1,M]: p_c=" + fmt(sv.p_c) + " p_e=" + fmt(sv.p_e));
    }
    {
        const auto z = TransitionMatrix::birth_death(10, 0.2);
        const auto pi = stationary(z);
        const double narrow = wake_probability(pi, RangeQuery{4, 6});
        const double wide = wake_probability(pi, RangeQuery{3, 7});
        const double full = wake_probability(pi, RangeQuery{1, 10});
        ck.add(mod, "wake-probability-monotone",
               narrow <= wide && wide <= full && std::abs(full - 1.0) <= 1e-12,
               "nested ranges [4,6] -> [3,7] -> [1,10]: " + fmt(narrow) + " <= " + fmt(wide) +
                   " <= " + fmt(full));
    }
}

void check_csma_chain(Checker& ck) {
    const std::string mod = "csma-chain";

    {
        const CsmaChain chain(3, CsmaParams{0.25, 2});
        CsmaChainState state = initial_chain_state(chain);
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            evolve(state, chain, 1);
            double sum = 0.0, least = 0.0;
            for (double v : state.phi) {
                sum += v;
                least = std::min(least, v);
            }
            worst = std::max({worst, std::abs(sum - 1.0), -least});
        }
        ck.add(mod, "phi-normalization", worst <= 1e-12,
               "w=3 p=0.25 L=2 over 200 slots, worst drift=" + fmt(worst));
    }
    {
        const CsmaParams params{0.4, 2};
        double worst = 0.0;
        for (int zeta = 0; zeta <= 100; ++zeta) {
            const auto dist = success_distribution(1, params, zeta);
            const int free_slots = std::max(0, zeta - params.tx_slots + 1);
            const double closed = 1.0 - std::pow(1.0 - params.p, free_slots);
            worst = std::max(worst, std::abs(dist.probs[1] - closed));
        }
        ck.add(mod, "closed-form-single-node", worst <= 1e-12,
               "w=1 p=0.4 L=2, zeta 0..100, worst |chain-closed|=" + fmt(worst));
    }
    {
        double worst = 0.0;
        std::string at;
        for (int w = 0; w <= 3; ++w)
            for (const int L : {1, 2})
                for (const double p : {0.25, 0.5, 1.0})
                    for (int zeta = 0; zeta <= 6; ++zeta) {
                        const CsmaParams params{p, L};
                        const auto chain_dist = success_distribution(w, params, zeta);
                        const auto tree = oracle::success_distribution_tree(w, params, zeta);
                        for (int ws = 0; ws <= w; ++ws) {
                            const double diff = std::abs(chain_dist.probs[ws] - tree[ws]);
                            if (diff > worst) {
                                worst = diff;
                                at = "w=" + std::to_string(w) + " L=" + std::to_string(L) +
                                     " p=" + fmt(p) + " zeta=" + std::to_string(zeta);
                            }
                        }
                    }
        ck.add(mod, "tree-oracle-grid", worst <= 1e-12,
               "w<=3 L<=2 p in {0.25,0.5,1} zeta<=6, worst diff=" + fmt(worst) +
                   (at.empty() ? "" : " at " + at));
    }
    {
        const CsmaParams params{0.5, 1};
        const auto chain_dist = success_distribution(2, params, 3);
        const auto tree = oracle::success_distribution_tree(2, params, 3);
        const double diff = std::max({std::abs(chain_dist.probs[0] - tree[0]),
                                      std::abs(chain_dist.probs[1] - tree[1]),
                                      std::abs(chain_dist.probs[2] - tree[2])});
        ck.add(mod, "tree-oracle-case", diff <= 1e-12,
               "w=2 L=1 p=0.5 zeta=3: chain=[" + fmt(chain_dist.probs[0]) + "," +
                   fmt(chain_dist.probs[1]) + "," + fmt(chain_dist.probs[2]) + "] diff=" +
                   fmt(diff));
    }
    {
        // Mutation sensitivity: corrupting the success-resolution probability
        // must be caught by the tree-oracle comparison.
        const CsmaParams params{0.5, 2};
        const CsmaChain chain(2, params);
        auto dense = dense_from_chain(chain);
        const int states = chain.num_states();
        for (int n = 2; n >= 1; --n) {
            const int from = chain.state_index(n, params.tx_slots - 1);
            const int success_to = n == 1 ? states - 1 : chain.state_index(n - 1, 0);
            const int collide_to = chain.state_index(n, 0);
            const double wrong = dense[from][success_to] * (1.0 - params.p);
            dense[from][collide_to] += dense[from][success_to] - wrong;
            dense[from][success_to] = wrong;
        }
        std::vector<double> phi(states, 0.0);
        phi[0] = 1.0;
        phi = dense_evolve(dense, std::move(phi), 4);
        const auto tree = oracle::success_distribution_tree(2, params, 4);
        // Aggregate the perturbed chain into a success-count pmf.
        const double mutated[3] = {phi[0] + phi[1], phi[2] + phi[3], phi[4]};
        double diff = 0.0;
        for (int ws = 0; ws <= 2; ++ws) diff = std::max(diff, std::abs(mutated[ws] - tree[ws]));
        ck.add(mod, "mutation-sensitivity", diff > 1e-3,
               "perturbed success resolution, w=2 p=0.5 L=2 zeta=4: oracle diff=" + fmt(diff));
    }
}

void check_accuracy(Checker& ck) {
    const std::string mod = "accuracy-engine";

    {
        const auto dist = wake_count_distribution(100, 0.05);
        double sum = 0.0;
        for (double v : dist) sum += v;
        const bool ok = std::abs(sum - 1.0) <= 1e-12 &&
                        std::abs(dist[0] - std::pow(0.95, 100)) <= 1e-15;
        ck.add(mod, "binomial-normalization", ok,
               "N=100 P_w=0.05: sum=" + fmt(sum) + " P_d(0)=" + fmt(dist[0]));
    }
    {
        double worst = 0.0;
        std::string at;
        for (const int n : {1, 2})
            for (const int m : {2, 3})
                for (const int L : {1, 2})
                    for (const double p : {0.25, 0.5, 1.0})
                        for (const double q : {0.1, 0.3}) {
                            ScenarioConfig cfg;
                            cfg.num_nodes = n;
                            cfg.num_states = m;
                            cfg.q = q;
                            cfg.range = RangeQuery{m, m};
                            cfg.csma = CsmaParams{p, L};
                            cfg.zeta_max = 8;
                            for (int zeta = 0; zeta <= 6; ++zeta) {
                                const double lib = gamma_cowu(cfg, zeta).gamma;
                                const double ref =
                                    oracle::gamma_cowu_enumeration(cfg, zeta, false);
                                const double lib_ub = gamma_cowu_upper_bound(cfg, zeta).gamma;
                                const double ref_ub =
                                    oracle::gamma_cowu_enumeration(cfg, zeta, true);
                                const double diff = std::max(std::abs(lib - ref),
                                                             std::abs(lib_ub - ref_ub));
                                const bool bounds = lib >= 0.0 && lib <= 1.0 &&
                                                    lib_ub >= 0.0 && lib_ub <= 1.0;
                                if (diff > worst || !bounds) {
                                    worst = std::max(worst, diff);
                                    at = "N=" + std::to_string(n) + " M=" + std::to_string(m) +
                                         " L=" + std::to_string(L) + " p=" + fmt(p) +
                                         " q=" + fmt(q) + " zeta=" + std::to_string(zeta);
                                    if (!bounds) worst = 1.0;
                                }
                            }
                        }
        ck.add(mod, "gamma-enumeration-grid", worst <= 1e-12,
               "N<=2 M<=3 L<=2 zeta<=6, worst diff=" + fmt(worst) +
                   (at.empty() ? "" : " at " + at));
    }
    {
        double worst = 0.0;
        for (const int n : {1, 2})
            for (const int L : {1, 2})
                for (const double q : {0.1, 0.3}) {
                    ScenarioConfig cfg;
                    cfg.num_nodes = n;
                    cfg.num_states = 3;
                    cfg.q = q;
                    cfg.range = RangeQuery{3, 3};
                    cfg.csma = CsmaParams{0.5, L};
                    const double lib = gamma_round_robin(cfg).gamma;
                    const double ref = oracle::gamma_round_robin_enumeration(cfg);
                    worst = std::max(worst, std::abs(lib - ref));
                }
        ck.add(mod, "round-robin-enumeration", worst <= 1e-12,
               "N<=2 M=3 L<=2, worst diff=" + fmt(worst));
    }
    {
        // The ideal-MAC curve dominates whenever staying in range is at
        // least as likely as leaving it; assert it on a slow process.
        ScenarioConfig cfg;
        cfg.num_nodes = 5;
        cfg.num_states = 10;
        cfg.q = 0.01;
        cfg.range = RangeQuery{8, 10};
        cfg.csma = CsmaParams{0.25, 2};
        cfg.zeta_max = 60;
        bool ok = true;
        std::string detail = "slow process, zeta 1..60";
        const auto points = zeta_accuracy_sweep(cfg);
        for (const auto& pt : points) {
            if (pt.gamma_upper + 1e-12 < pt.gamma_analytical) {
                ok = false;
                detail = "violated at zeta=" + fmt(pt.zeta) + ": upper=" + fmt(pt.gamma_upper) +
                         " analytical=" + fmt(pt.gamma_analytical);
                break;
            }
        }
        ck.add(mod, "upper-bound-dominance-slow-regime", ok, detail);
    }
    {
        ScenarioConfig cfg;
        cfg.num_nodes = 1;
        cfg.num_states = 3;
        cfg.q = 0.1;
        cfg.range = RangeQuery{3, 3};
        cfg.csma = CsmaParams{0.5, 1};
        // One node, lag L: pi uniform, consistency = (0.9 + 1.0 + 0.9) / 3.
        ck.close(mod, "round-robin-hand-value", gamma_round_robin(cfg).gamma, 2.8 / 3.0, 1e-12,
                 "N=1 M=3 q=0.1 range=[3,3] L=1");
    }
    {
        ScenarioConfig cfg;
        cfg.num_nodes = 2;
        cfg.num_states = 3;
        cfg.q = 0.1;
        cfg.range = RangeQuery{3, 3};
        cfg.csma = CsmaParams{0.5, 1};
        cfg.zeta_max = 20;
        const ZetaOptimum opt = optimize_zeta(cfg);
        std::uint64_t best_zeta = 0;
        double best = -1.0;
        for (std::uint64_t zeta = 1; zeta <= cfg.zeta_max; ++zeta) {
            const double g = oracle::gamma_cowu_enumeration(cfg, static_cast<int>(zeta), false);
            if (g > best) {
                best = g;
                best_zeta = zeta;
            }
        }
        ck.add(mod, "optimizer-matches-oracle",
               opt.zeta == best_zeta && std::abs(opt.gamma - best) <= 1e-12,
               "N=2 M=3 q=0.1 L=1 p=0.5 zeta_max=20: lib zeta_opt=" + fmt(opt.zeta) +
                   " oracle=" + fmt(best_zeta));
    }
    {
        ScenarioConfig cfg;
        cfg.num_nodes = 3;
        cfg.num_states = 4;
        cfg.q = 0.0;
        cfg.range = RangeQuery{3, 4};
        cfg.csma = CsmaParams{0.5, 2};
        const double rr = gamma_round_robin(cfg).gamma;
        ck.close(mod, "frozen-process-round-robin", rr, 1.0, 0.0, "q=0");
    }
}

void check_simulator(Checker& ck, std::uint64_t seed) {
    const std::string mod = "simulator";

    ScenarioConfig small;
    small.num_nodes = 4;
    small.num_states = 5;
    small.q = 0.05;
    small.range = RangeQuery{4, 5};
    small.csma = CsmaParams{0.5, 2};
    small.zeta_max = 100;
    const EnergyModel energy;

    {
        const auto a = run_rounds(small, energy, Scheme::cowu, 30, 300, seed, 2);
        const auto b = run_rounds(small, energy, Scheme::cowu, 30, 300, seed, 1);
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].exact_match == b[i].exact_match &&
                   a[i].total_energy_j == b[i].total_energy_j &&
                   a[i].true_set == b[i].true_set && a[i].received_set == b[i].received_set;
        ck.add(mod, "campaign-determinism", same,
               "two cowu campaigns, same seed, different thread counts, 300 rounds");
    }
    {
        const auto a = run_rounds(small, energy, Scheme::cowu, 25, 200, seed + 1, 0);
        const auto b = run_rounds(small, energy, Scheme::cowu, 80, 200, seed + 1, 0);
        bool same = true;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].total_energy_j != b[i].total_energy_j) same = false;
        ck.add(mod, "energy-deadline-independence", same,
               "same seeds, zeta=25 vs zeta=80: per-round energies bitwise equal");
    }
    {
        bool ok = true;
        std::string detail = "per-node energies sum to the round total";
        const auto rounds = run_rounds(small, energy, Scheme::cowu, 40, 100, seed + 2, 0);
        for (const auto& r : rounds) {
            double sum = 0.0;
            for (double e : r.node_energy_j) sum += e;
            const double scale = std::max(1.0, std::abs(r.total_energy_j));
            if (std::abs(sum - r.total_energy_j) > 1e-12 * scale) {
                ok = false;
                detail = "mismatch: sum=" + fmt(sum) + " total=" + fmt(r.total_energy_j);
                break;
            }
        }
        ck.add(mod, "per-node-energy-sum", ok, detail);
    }
    {
        const auto rounds = run_rounds(small, energy, Scheme::round_robin, 0, 50, seed + 3, 0);
        const double expected = small.num_nodes * small.csma.tx_slots *
                                energy.slot_duration_s * energy.tx_power_w;
        bool exact = true;
        for (const auto& r : rounds)
            if (std::abs(r.total_energy_j - expected) > 1e-12 * expected) exact = false;
        const CampaignSummary s = summarize(rounds);
        ck.add(mod, "round-robin-energy-exact", exact && s.energy_ci_halfwidth == 0.0,
               "N*L*slot*tx_power=" + fmt(expected) + " J, ci=" + fmt(s.energy_ci_halfwidth));
    }
    {
        // Wake everyone so the MAC sees a fixed backlog, then compare the
        // empirical success-count pmf against the contention chain.
        ScenarioConfig all = small;
        all.num_nodes = 3;
        all.range = RangeQuery{1, all.num_states};
        const std::uint64_t zeta = 6;
        const std::uint64_t rounds_n = 20000;
        const auto rounds = run_rounds(all, energy, Scheme::cowu, zeta, rounds_n, seed + 4, 0);
        std::vector<double> empirical(all.num_nodes + 1, 0.0);
        for (const auto& r : rounds) empirical[r.success_count] += 1.0;
        for (double& v : empirical) v /= static_cast<double>(rounds_n);
        const auto expected = success_distribution(all.num_nodes, all.csma, zeta);
        bool ok = true;
        std::string detail = "w=3 p=0.5 L=2 zeta=6, 20000 rounds";
        for (int ws = 0; ws <= all.num_nodes; ++ws) {
            const double se =
                std::sqrt(expected.probs[ws] * (1.0 - expected.probs[ws]) / rounds_n);
            if (std::abs(empirical[ws] - expected.probs[ws]) > 3.0 * std::max(se, 1e-9)) {
                ok = false;
                detail = "w_s=" + std::to_string(ws) + " empirical=" + fmt(empirical[ws]) +
                         " expected=" + fmt(expected.probs[ws]) + " se=" + fmt(se);
                break;
            }
        }
        ck.add(mod, "success-count-agreement", ok, detail);
    }
    {
        const std::uint64_t zeta = 10;
        const std::uint64_t rounds_n = 20000;
        const double analytic = gamma_cowu(small, zeta).gamma;
        const CampaignSummary s =
            run_campaign(small, energy, Scheme::cowu, zeta, rounds_n, seed + 5, 0);
        const double se = std::sqrt(analytic * (1.0 - analytic) / rounds_n);
        ck.add(mod, "gamma-agreement-cowu", std::abs(s.gamma_hat - analytic) <= 3.0 * se,
               "zeta=10: empirical=" + fmt(s.gamma_hat) + " analytic=" + fmt(analytic) +
                   " se=" + fmt(se));
    }
    {
        const std::uint64_t rounds_n = 20000;
        const double analytic = gamma_round_robin(small).gamma;
        const CampaignSummary s =
            run_campaign(small, energy, Scheme::round_robin, 0, rounds_n, seed + 6, 0);
        const double se = std::sqrt(analytic * (1.0 - analytic) / rounds_n);
        ck.add(mod, "gamma-agreement-round-robin", std::abs(s.gamma_hat - analytic) <= 3.0 * se,
               "empirical=" + fmt(s.gamma_hat) + " analytic=" + fmt(analytic) +
                   " se=" + fmt(se));
    }
}

void check_experiment(Checker& ck) {
    const std::string mod = "experiment-cli";

    {
        std::vector<ZetaSweepRow> rows(3);
        rows[0] = {1, 0.125, 0.5, std::nullopt, std::nullopt, 0.25};
        rows[1] = {2, 0.3, 0.6, 0.305, 0.0125, 0.25};
        rows[2] = {3, 1.0 / 3.0, 0.75, std::nullopt, std::nullopt, 0.25};
        const std::string csv = to_csv(rows);
        const std::string again = to_csv(zeta_sweep_from_csv(csv));
        ck.add(mod, "csv-round-trip-zeta-sweep", csv == again, "3 rows, optional cells");
    }
    {
        const std::vector<QSweepRow> rows = {{2e-4, 2e-4, 313, 0.9125, 0.8},
                                             {7e-4, 2e-4, 313, 0.85, 0.71}};
        const std::string csv = to_csv(rows);
        ck.add(mod, "csv-round-trip-q-sweep", csv == to_csv(q_sweep_from_csv(csv)), "2 rows");
    }
    {
        const std::vector<EnergyRow> rows = {{"cowu", 4.5, 0.06}, {"round-robin", 17.6, 0.0}};
        const std::string csv = to_csv(rows);
        ck.add(mod, "csv-round-trip-energy", csv == to_csv(energy_from_csv(csv)), "2 rows");
    }
    {
        const std::vector<CalibrationRow> rows = {{0.02, 7.1, 0.1}, {0.1, 4.4, 0.05}};
        const std::string csv = to_csv(rows);
        ck.add(mod, "csv-round-trip-calibration", csv == to_csv(calibration_from_csv(csv)),
               "2 rows");
    }
}

}  // namespace

std::vector<CheckResult> run_validate(std::uint64_t seed) {
    Checker ck;
    check_process_model(ck);
    check_csma_chain(ck);
    check_accuracy(ck);
    check_simulator(ck, seed);
    check_experiment(ck);
    return std::move(ck.results);
}

}  // namespace cowu
