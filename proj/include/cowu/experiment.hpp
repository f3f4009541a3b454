#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cowu/accuracy.hpp"
#include "cowu/simulator.hpp"

namespace cowu {

/// Everything one experiment run needs: scenario, energy model, Monte Carlo
/// size and seeding. sim_every controls which zeta points of a sweep are
/// also simulated (0 picks a stride that yields about 20 points).
struct ExperimentSpec {
    ScenarioConfig scenario;
    EnergyModel energy;
    std::uint64_t rounds = 10000;
    std::uint64_t seed = 123456789;
    std::uint64_t sim_every = 0;
    int threads = 0;

    std::uint64_t effective_sim_every() const noexcept {
        if (sim_every > 0) return sim_every;
        return std::max<std::uint64_t>(1, scenario.zeta_max / 20);
    }

    void validate() const;
};

struct ZetaSweepRow {
    std::uint64_t zeta = 0;
    double gamma_analytical = 0.0;
    double gamma_upper = 0.0;
    std::optional<double> gamma_simulated;
    std::optional<double> ci_halfwidth;
    double gamma_round_robin = 0.0;
};

struct QSweepRow {
    double q = 0.0;
    double q_hat = 0.0;
    std::uint64_t zeta_opt = 0;
    double gamma_cowu = 0.0;
    double gamma_round_robin = 0.0;
};

struct EnergyRow {
    std::string scheme;  // "cowu" or "round-robin"
    double mean_energy_mj = 0.0;
    double ci_halfwidth_mj = 0.0;
};

struct CalibrationRow {
    double p = 0.0;
    double mean_energy_mj = 0.0;
    double ci_halfwidth_mj = 0.0;
};

struct CheckResult {
    std::string module;
    std::string name;
    bool pass = false;
    std::string details;  // inputs plus observed/expected on failure
};

/// Accuracy against the wake-up lag: analytical, upper bound and round-robin
/// for every zeta in 1..zeta_max, plus simulated estimates at the sim_every
/// stride. Deterministic given the spec.
std::vector<ZetaSweepRow> run_zeta_sweep(const ExperimentSpec& spec);

/// Accuracy against the process speed: the perfect-knowledge diagonal
/// (q_hat = q) over q_values, then one block per fixed q_hat.
std::vector<QSweepRow> run_q_sweep(const ExperimentSpec& spec,
                                   std::span<const double> q_values,
                                   std::span<const double> q_hat_values);

/// Mean total energy per round for both schemes, in millijoules. Round-robin
/// consumes exactly N * L * slot * tx_power every round (zero variance).
/// When cowu_trace_csv is non-null it receives the per-round trace of the
/// wake-up campaign.
std::vector<EnergyRow> run_energy(const ExperimentSpec& spec,
                                  std::string* cowu_trace_csv = nullptr);

/// Energy of the wake-up scheme across a grid of persistence probabilities,
/// for calibrating p against a target mean.
std::vector<CalibrationRow> run_calibrate_p(const ExperimentSpec& spec,
                                            std::span<const double> p_values);

/// Small-instance oracle comparisons plus every module invariant; the
/// release gate behind the `validate` subcommand.
std::vector<CheckResult> run_validate(std::uint64_t seed);

std::vector<double> default_q_grid();
std::vector<double> default_q_hat_grid();
std::vector<double> default_p_grid();

// CSV serialization. Numbers are printed in shortest round-trip form, so
// parsing an emitted file and re-serializing reproduces it byte for byte.
std::string to_csv(const std::vector<ZetaSweepRow>& rows);
std::string to_csv(const std::vector<QSweepRow>& rows);
std::string to_csv(const std::vector<EnergyRow>& rows);
std::string to_csv(const std::vector<CalibrationRow>& rows);

std::vector<ZetaSweepRow> zeta_sweep_from_csv(const std::string& text);
std::vector<QSweepRow> q_sweep_from_csv(const std::string& text);
std::vector<EnergyRow> energy_from_csv(const std::string& text);
std::vector<CalibrationRow> calibration_from_csv(const std::string& text);

// JSON mirrors of the CSV tables (array of records, same keys).
std::string to_json(const std::vector<ZetaSweepRow>& rows);
std::string to_json(const std::vector<QSweepRow>& rows);
std::string to_json(const std::vector<EnergyRow>& rows);
std::string to_json(const std::vector<CalibrationRow>& rows);

}  // namespace cowu
