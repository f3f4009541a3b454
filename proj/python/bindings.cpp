#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cowu/accuracy.hpp"
#include "cowu/csma_chain.hpp"
#include "cowu/experiment.hpp"
#include "cowu/oracle.hpp"
#include "cowu/process_model.hpp"
#include "cowu/simulator.hpp"

namespace py = pybind11;
using namespace cowu;

namespace {

std::vector<std::vector<double>> matrix_rows(const TransitionMatrix& z) {
    std::vector<std::vector<double>> rows;
    rows.reserve(z.size());
    for (int i = 0; i < z.size(); ++i) {
        const auto r = z.row(i);
        rows.emplace_back(r.begin(), r.end());
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wake-up timing analysis for content-based data collection";

    py::class_<TransitionMatrix>(m, "TransitionMatrix")
        .def_static("from_rows", &TransitionMatrix::from_rows, py::arg("rows"))
        .def_static("birth_death", &TransitionMatrix::birth_death, py::arg("num_states"),
                    py::arg("step_prob"))
        .def_static("from_json", &TransitionMatrix::from_json, py::arg("text"))
        .def_property_readonly("size", &TransitionMatrix::size)
        .def("entry", &TransitionMatrix::entry, py::arg("row"), py::arg("col"))
        .def("rows", &matrix_rows)
        .def("row_sum_drift", &TransitionMatrix::row_sum_drift)
        .def("to_json", &TransitionMatrix::to_json);

    py::class_<StationaryDistribution>(m, "StationaryDistribution")
        .def_readonly("probs", &StationaryDistribution::probs);

    py::class_<RangeQuery>(m, "RangeQuery")
        .def(py::init<int, int>(), py::arg("lower"), py::arg("upper"))
        .def_readwrite("lower", &RangeQuery::lower)
        .def_readwrite("upper", &RangeQuery::upper)
        .def("contains", &RangeQuery::contains, py::arg("state"))
        .def("width", &RangeQuery::width);

    py::class_<RangeSurvival>(m, "RangeSurvival")
        .def_readonly("p_a", &RangeSurvival::p_a)
        .def_readonly("p_b", &RangeSurvival::p_b)
        .def_readonly("p_c", &RangeSurvival::p_c)
        .def_readonly("p_d", &RangeSurvival::p_d)
        .def_readonly("p_e", &RangeSurvival::p_e);

    py::class_<CsmaParams>(m, "CsmaParams")
        .def(py::init<double, int>(), py::arg("p"), py::arg("tx_slots"))
        .def_readwrite("p", &CsmaParams::p)
        .def_readwrite("tx_slots", &CsmaParams::tx_slots);

    py::class_<SuccessDistribution>(m, "SuccessDistribution")
        .def_readonly("probs", &SuccessDistribution::probs);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init([](int num_nodes, int num_states, double q, std::optional<double> q_hat,
                         RangeQuery range, double p, int tx_slots, std::uint64_t zeta_max) {
                 ScenarioConfig cfg;
                 cfg.num_nodes = num_nodes;
                 cfg.num_states = num_states;
                 cfg.q = q;
                 cfg.q_hat = q_hat;
                 cfg.range = range;
                 cfg.csma = CsmaParams{p, tx_slots};
                 cfg.zeta_max = zeta_max;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("num_nodes") = 100, py::arg("num_states") = 100, py::arg("q") = 2e-4,
             py::arg("q_hat") = std::nullopt, py::arg("range") = RangeQuery{94, 98},
             py::arg("p") = 0.1, py::arg("tx_slots") = 10, py::arg("zeta_max") = 2000)
        .def_readwrite("num_nodes", &ScenarioConfig::num_nodes)
        .def_readwrite("num_states", &ScenarioConfig::num_states)
        .def_readwrite("q", &ScenarioConfig::q)
        .def_readwrite("q_hat", &ScenarioConfig::q_hat)
        .def_readwrite("range", &ScenarioConfig::range)
        .def_readwrite("csma", &ScenarioConfig::csma)
        .def_readwrite("zeta_max", &ScenarioConfig::zeta_max)
        .def("assumed_q", &ScenarioConfig::assumed_q)
        .def("with_q", &ScenarioConfig::with_q, py::arg("true_q"))
        .def("validate", &ScenarioConfig::validate);

    py::enum_<Method>(m, "Method")
        .value("cowu_analytical", Method::cowu_analytical)
        .value("cowu_upper_bound", Method::cowu_upper_bound)
        .value("round_robin", Method::round_robin)
        .value("simulated", Method::simulated);

    py::class_<AccuracyResult>(m, "AccuracyResult")
        .def_readonly("gamma", &AccuracyResult::gamma)
        .def_readonly("method", &AccuracyResult::method)
        .def_readonly("zeta", &AccuracyResult::zeta)
        .def_readonly("ci_halfwidth", &AccuracyResult::ci_halfwidth)
        .def("to_json", [](const AccuracyResult& r, const ScenarioConfig& cfg) {
            return to_json(r, cfg);
        }, py::arg("config"));

    py::class_<ZetaSweepPoint>(m, "ZetaSweepPoint")
        .def_readonly("zeta", &ZetaSweepPoint::zeta)
        .def_readonly("gamma_analytical", &ZetaSweepPoint::gamma_analytical)
        .def_readonly("gamma_upper", &ZetaSweepPoint::gamma_upper);

    py::class_<ZetaOptimum>(m, "ZetaOptimum")
        .def_readonly("zeta", &ZetaOptimum::zeta)
        .def_readonly("gamma", &ZetaOptimum::gamma);

    py::class_<MismatchPoint>(m, "MismatchPoint")
        .def_readonly("q", &MismatchPoint::q)
        .def_readonly("zeta_opt", &MismatchPoint::zeta_opt)
        .def_readonly("gamma", &MismatchPoint::gamma)
        .def_readonly("zeta_opt_perfect", &MismatchPoint::zeta_opt_perfect)
        .def_readonly("gamma_perfect", &MismatchPoint::gamma_perfect)
        .def_readonly("gamma_round_robin", &MismatchPoint::gamma_round_robin);

    py::class_<EnergyModel>(m, "EnergyModel")
        .def(py::init<>())
        .def_readwrite("tx_power_w", &EnergyModel::tx_power_w)
        .def_readwrite("rx_power_w", &EnergyModel::rx_power_w)
        .def_readwrite("slot_duration_s", &EnergyModel::slot_duration_s)
        .def_readwrite("sleep_power_w", &EnergyModel::sleep_power_w);

    py::class_<RoundResult>(m, "RoundResult")
        .def_readonly("true_set", &RoundResult::true_set)
        .def_readonly("received_set", &RoundResult::received_set)
        .def_readonly("exact_match", &RoundResult::exact_match)
        .def_readonly("total_energy_j", &RoundResult::total_energy_j)
        .def_readonly("completion_slot", &RoundResult::completion_slot)
        .def_readonly("wake_count", &RoundResult::wake_count)
        .def_readonly("success_count", &RoundResult::success_count)
        .def_readonly("node_energy_j", &RoundResult::node_energy_j);

    py::enum_<Scheme>(m, "Scheme")
        .value("cowu", Scheme::cowu)
        .value("round_robin", Scheme::round_robin);

    py::class_<CampaignSummary>(m, "CampaignSummary")
        .def_readonly("gamma_hat", &CampaignSummary::gamma_hat)
        .def_readonly("gamma_ci_halfwidth", &CampaignSummary::gamma_ci_halfwidth)
        .def_readonly("mean_energy_j", &CampaignSummary::mean_energy_j)
        .def_readonly("energy_ci_halfwidth", &CampaignSummary::energy_ci_halfwidth)
        .def_readonly("rounds", &CampaignSummary::rounds)
        .def_readonly("ci_degenerate", &CampaignSummary::ci_degenerate)
        .def("to_json", [](const CampaignSummary& s) { return to_json(s); });

    m.def("stationary", &stationary, py::arg("z"));
    m.def("matrix_power", &matrix_power, py::arg("z"), py::arg("zeta"));
    m.def("wake_probability", &wake_probability, py::arg("pi"), py::arg("range"));
    m.def("range_survival_probs", &range_survival_probs, py::arg("z"), py::arg("pi"),
          py::arg("range"), py::arg("zeta"));
    m.def("success_distribution",
          py::overload_cast<int, CsmaParams, std::uint64_t>(&success_distribution),
          py::arg("active_count"), py::arg("params"), py::arg("zeta"));
    m.def("wake_count_distribution", &wake_count_distribution, py::arg("num_nodes"),
          py::arg("wake_prob"));
    m.def("gamma_cowu", &gamma_cowu, py::arg("config"), py::arg("zeta"));
    m.def("gamma_cowu_upper_bound", &gamma_cowu_upper_bound, py::arg("config"), py::arg("zeta"));
    m.def("gamma_round_robin", &gamma_round_robin, py::arg("config"));
    m.def("zeta_accuracy_sweep", &zeta_accuracy_sweep, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("optimize_zeta", &optimize_zeta, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("mismatch_curve",
          [](const ScenarioConfig& cfg, const std::vector<double>& q_true, double q_hat) {
              return mismatch_curve(cfg, q_true, q_hat);
          },
          py::arg("config"), py::arg("q_true_values"), py::arg("q_hat"),
          py::call_guard<py::gil_scoped_release>());
    m.def("simulate_cowu_round", &simulate_cowu_round, py::arg("config"), py::arg("energy"),
          py::arg("zeta"), py::arg("seed"));
    m.def("simulate_round_robin_round", &simulate_round_robin_round, py::arg("config"),
          py::arg("energy"), py::arg("seed"));
    m.def("run_campaign", &run_campaign, py::arg("config"), py::arg("energy"), py::arg("scheme"),
          py::arg("zeta"), py::arg("rounds"), py::arg("base_seed"), py::arg("threads") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("simulated_result", &simulated_result, py::arg("summary"), py::arg("zeta"));
}
