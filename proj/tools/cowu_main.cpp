// Command-line front-end: defines, runs and exports the timing, process-speed
// and energy experiments, plus the self-validation gate.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cowu/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitIoError = 3;

struct CommonOptions {
    cowu::ExperimentSpec spec;
    std::string out;
    std::string format = "csv";
    std::string range_text;
    double q_hat = 0.0;
    double tx_mw = 55.0;
    double rx_mw = 50.0;
    double slot_us = 320.0;
    CLI::Option* q_hat_opt = nullptr;
    CLI::Option* tx_opt = nullptr;
    CLI::Option* rx_opt = nullptr;
    CLI::Option* slot_opt = nullptr;
};

void add_common_options(CLI::App& app, CommonOptions& opts) {
    auto& sc = opts.spec.scenario;
    app.add_option("--N", sc.num_nodes, "Number of sensor nodes");
    app.add_option("--M", sc.num_states, "Number of process states");
    app.add_option("--q", sc.q, "True per-slot step probability of the birth-death process");
    opts.q_hat_opt = app.add_option("--q-hat", opts.q_hat,
                                    "Assumed step probability used to pick the timing "
                                    "(defaults to q)");
    app.add_option("--p", sc.csma.p, "CSMA per-slot transmission probability");
    app.add_option("--L", sc.csma.tx_slots, "Transmission duration in slots");
    app.add_option("--range", opts.range_text, "Queried state interval LO:HI (1-indexed)");
    app.add_option("--zeta-max", sc.zeta_max, "Upper limit of the timing sweep in slots");
    app.add_option("--rounds", opts.spec.rounds, "Monte Carlo rounds per campaign");
    app.add_option("--seed", opts.spec.seed, "Base RNG seed");
    app.add_option("--threads", opts.spec.threads, "Worker threads (0 = hardware)");
    opts.tx_opt = app.add_option("--tx-mw", opts.tx_mw, "Transmit power in mW (default 55)");
    opts.rx_opt = app.add_option("--rx-mw", opts.rx_mw, "Receive/listen power in mW (default 50)");
    opts.slot_opt =
        app.add_option("--slot-us", opts.slot_us, "Slot duration in microseconds (default 320)");
    app.add_option("--out", opts.out, "Output file (default: stdout)");
    app.add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

void finalize_options(CommonOptions& opts) {
    if (!opts.range_text.empty()) {
        const std::size_t colon = opts.range_text.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("range: expected LO:HI, got '" + opts.range_text + "'");
        opts.spec.scenario.range.lower = std::stoi(opts.range_text.substr(0, colon));
        opts.spec.scenario.range.upper = std::stoi(opts.range_text.substr(colon + 1));
    }
    if (opts.q_hat_opt && opts.q_hat_opt->count() > 0) opts.spec.scenario.q_hat = opts.q_hat;
    if (opts.tx_opt && opts.tx_opt->count() > 0) opts.spec.energy.tx_power_w = opts.tx_mw * 1e-3;
    if (opts.rx_opt && opts.rx_opt->count() > 0) opts.spec.energy.rx_power_w = opts.rx_mw * 1e-3;
    if (opts.slot_opt && opts.slot_opt->count() > 0)
        opts.spec.energy.slot_duration_s = opts.slot_us * 1e-6;
    opts.spec.validate();
    if (opts.spec.scenario.q == 0.5 || opts.spec.scenario.assumed_q() == 0.5)
        std::cerr << "note: q = 0.5 leaves interior states with no hold probability; "
                     "the boundary holds keep the chain aperiodic\n";
}

int write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        std::cerr << "error: cannot open '" << out_path << "' for writing\n";
        return kExitIoError;
    }
    file << text;
    file.flush();
    if (!file) {
        std::cerr << "error: failed while writing '" << out_path << "'\n";
        return kExitIoError;
    }
    return kExitOk;
}

template <typename Rows>
int emit(const Rows& rows, const CommonOptions& opts) {
    const std::string text = opts.format == "json" ? cowu::to_json(rows) : cowu::to_csv(rows);
    return write_output(text, opts.out);
}

int cmd_validate(std::uint64_t seed, const std::string& out_path) {
    const auto checks = cowu::run_validate(seed);
    std::string report;
    std::size_t failures = 0;
    for (const auto& c : checks) {
        if (!c.pass) ++failures;
        report += (c.pass ? "[PASS] " : "[FAIL] ") + c.module + "/" + c.name + " - " +
                  c.details + "\n";
    }
    report += std::to_string(checks.size() - failures) + "/" + std::to_string(checks.size()) +
              " checks passed\n";
    const int io = write_output(report, out_path);
    if (io != kExitOk) return io;
    return failures == 0 ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wake-up timing analysis for content-based data collection"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Configuration file with key=value lines");

    CommonOptions opts;
    add_common_options(app, opts);

    auto* zeta_sweep = app.add_subcommand(
        "zeta-sweep", "Accuracy against the wake-up lag, analysis vs simulation");
    std::uint64_t sim_every = 0;
    zeta_sweep->add_option("--sim-every", sim_every,
                           "Simulate every k-th zeta (0 = about 20 points)");

    auto* q_sweep = app.add_subcommand(
        "q-sweep", "Accuracy against the process speed, with model mismatch");
    std::vector<double> q_values;
    std::vector<double> q_hat_values;
    q_sweep->add_option("--q-values", q_values, "True q grid")->delimiter(',');
    q_sweep->add_option("--q-hat-values", q_hat_values, "Assumed q values")->delimiter(',');

    auto* energy = app.add_subcommand("energy", "Mean total energy of both schemes");
    std::string trace_path;
    energy->add_option("--trace", trace_path,
                       "Write the per-round trace of the wake-up campaign to this CSV file");

    auto* calibrate = app.add_subcommand(
        "calibrate-p", "Sweep the persistence probability against an energy target");
    std::vector<double> p_values;
    double target_mj = 4.50;
    calibrate->add_option("--p-values", p_values, "Persistence probabilities to try")
        ->delimiter(',');
    calibrate->add_option("--target-mj", target_mj, "Energy target in millijoules");

    auto* validate = app.add_subcommand("validate", "Run oracle comparisons and invariants");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadConfig;
    }

    try {
        finalize_options(opts);
        if (zeta_sweep->parsed()) {
            opts.spec.sim_every = sim_every;
            return emit(cowu::run_zeta_sweep(opts.spec), opts);
        }
        if (q_sweep->parsed()) {
            if (q_values.empty()) q_values = cowu::default_q_grid();
            if (q_hat_values.empty()) q_hat_values = cowu::default_q_hat_grid();
            return emit(cowu::run_q_sweep(opts.spec, q_values, q_hat_values), opts);
        }
        if (energy->parsed()) {
            std::string trace;
            const auto rows = cowu::run_energy(opts.spec, trace_path.empty() ? nullptr : &trace);
            if (!trace_path.empty()) {
                const int io = write_output(trace, trace_path);
                if (io != kExitOk) return io;
            }
            return emit(rows, opts);
        }
        if (calibrate->parsed()) {
            if (p_values.empty()) p_values = cowu::default_p_grid();
            const auto rows = cowu::run_calibrate_p(opts.spec, p_values);
            const cowu::CalibrationRow* best = &rows.front();
            for (const auto& r : rows)
                if (std::abs(r.mean_energy_mj - target_mj) <
                    std::abs(best->mean_energy_mj - target_mj))
                    best = &r;
            std::cerr << "calibrated p = " << best->p << " (mean " << best->mean_energy_mj
                      << " mJ, target " << target_mj << " mJ)\n";
            return emit(rows, opts);
        }
        if (validate->parsed()) {
            return cmd_validate(opts.spec.seed, opts.out);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    }
    return kExitOk;
}
