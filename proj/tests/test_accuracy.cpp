#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cowu/accuracy.hpp"
#include "cowu/oracle.hpp"

using namespace cowu;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig cfg;
    cfg.num_nodes = 2;
    cfg.num_states = 3;
    cfg.q = 0.1;
    cfg.range = RangeQuery{3, 3};
    cfg.csma = CsmaParams{0.5, 1};
    cfg.zeta_max = 20;
    return cfg;
}

}  // namespace

TEST_SUITE("accuracy-engine") {

TEST_CASE("wake count distribution: point masses and fair coin") {
    const auto none = wake_count_distribution(100, 0.0);
    CHECK(none[0] == 1.0);
    CHECK(none[100] == 0.0);

    const auto all = wake_count_distribution(100, 1.0);
    CHECK(all[100] == 1.0);

    const auto coin = wake_count_distribution(2, 0.5);
    CHECK(coin[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(coin[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(coin[2] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("wake count distribution: spec scenario values and normalization") {
    const auto dist = wake_count_distribution(100, 0.05);
    CHECK(dist[0] == doctest::Approx(0.0059205292203339975).epsilon(1e-13));
    double sum = 0.0;
    for (const double v : dist) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    // Near-one wake probability exercises the log-space fallback.
    const auto extreme = wake_count_distribution(100, 1.0 - 1e-12);
    double esum = 0.0;
    for (const double v : extreme) esum += v;
    CHECK(std::abs(esum - 1.0) <= 1e-9);
}

TEST_CASE("vacuous query: one node, full range, reliable MAC") {
    ScenarioConfig cfg;
    cfg.num_nodes = 1;
    cfg.num_states = 2;
    cfg.q = 0.37;
    cfg.range = RangeQuery{1, 2};
    cfg.csma = CsmaParams{1.0, 3};
    cfg.zeta_max = 10;
    CHECK(gamma_cowu(cfg, 3).gamma == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_cowu(cfg, 9).gamma == doctest::Approx(1.0).epsilon(1e-14));
    // The transmission does not fit before the deadline.
    CHECK(gamma_cowu(cfg, 2).gamma == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("zero lag: only the all-asleep event can match") {
    ScenarioConfig cfg;
    cfg.num_nodes = 3;
    cfg.num_states = 4;
    cfg.q = 0.1;
    cfg.range = RangeQuery{3, 4};
    cfg.csma = CsmaParams{0.5, 2};
    cfg.zeta_max = 10;
    const double p_sleep_all = std::pow(0.5, 3);  // pi uniform, half the states in range
    CHECK(gamma_cowu(cfg, 0).gamma == doctest::Approx(p_sleep_all).epsilon(1e-13));
    CHECK(gamma_cowu_upper_bound(cfg, 0).gamma == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("full joint enumeration oracle across the small grid") {
    for (const int n : {1, 2})
        for (const int L : {1, 2})
            for (const double p : {0.25, 0.5, 1.0})
                for (const double q : {0.1, 0.3})
                    for (const auto& range : {RangeQuery{3, 3}, RangeQuery{2, 3}}) {
                        ScenarioConfig cfg;
                        cfg.num_nodes = n;
                        cfg.num_states = 3;
                        cfg.q = q;
                        cfg.range = range;
                        cfg.csma = CsmaParams{p, L};
                        cfg.zeta_max = 8;
                        for (int zeta = 0; zeta <= 6; ++zeta) {
                            const double lib = gamma_cowu(cfg, zeta).gamma;
                            const double ref = oracle::gamma_cowu_enumeration(cfg, zeta, false);
                            CHECK(std::abs(lib - ref) <= 1e-12);
                            const double lib_ub = gamma_cowu_upper_bound(cfg, zeta).gamma;
                            const double ref_ub = oracle::gamma_cowu_enumeration(cfg, zeta, true);
                            CHECK(std::abs(lib_ub - ref_ub) <= 1e-12);
                        }
                    }
}

TEST_CASE("frozen joint-enumeration value for the spec instance") {
    // N=2, M=3, q=0.1, range=[3,3], L=1, p=0.5, zeta=2.
    const ScenarioConfig cfg = small_config();
    const double frozen = 0.66275555555555543;
    CHECK(gamma_cowu(cfg, 2).gamma == doctest::Approx(frozen).epsilon(1e-13));
    CHECK(oracle::gamma_cowu_enumeration(cfg, 2, false) == doctest::Approx(frozen).epsilon(1e-13));
    CHECK(gamma_cowu_upper_bound(cfg, 2).gamma ==
          doctest::Approx(0.77439999999999998).epsilon(1e-13));
}

TEST_CASE("round-robin: frozen process is always right") {
    ScenarioConfig cfg;
    cfg.num_nodes = 5;
    cfg.num_states = 6;
    cfg.q = 0.0;
    cfg.range = RangeQuery{2, 4};
    cfg.csma = CsmaParams{0.5, 3};
    CHECK(gamma_round_robin(cfg).gamma == 1.0);
    const auto result = gamma_round_robin(cfg);
    CHECK(result.method == Method::round_robin);
    CHECK_FALSE(result.zeta.has_value());
}

TEST_CASE("round-robin: single-node hand value and enumeration oracle") {
    ScenarioConfig cfg;
    cfg.num_nodes = 1;
    cfg.num_states = 3;
    cfg.q = 0.1;
    cfg.range = RangeQuery{3, 3};
    cfg.csma = CsmaParams{0.5, 1};
    // Lag L = 1, pi uniform: (0.9 + 1.0 + 0.9) / 3.
    CHECK(gamma_round_robin(cfg).gamma == doctest::Approx(2.8 / 3.0).epsilon(1e-13));
    CHECK(gamma_round_robin(cfg).gamma ==
          doctest::Approx(oracle::gamma_round_robin_enumeration(cfg)).epsilon(1e-13));

    const ScenarioConfig two = small_config();
    CHECK(gamma_round_robin(two).gamma ==
          doctest::Approx(0.82133333333333336).epsilon(1e-13));
}

TEST_CASE("optimizer: frozen assumed process pushes the timing to the horizon") {
    ScenarioConfig cfg = small_config();
    cfg.q_hat = 0.0;
    cfg.zeta_max = 30;
    const ZetaOptimum opt = optimize_zeta(cfg);
    CHECK(opt.zeta == 30);
}

TEST_CASE("optimizer matches the enumeration-oracle argmax") {
    const ScenarioConfig cfg = small_config();
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
    CHECK(opt.zeta == best_zeta);
    CHECK(opt.gamma == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("sweep agrees with the single-shot evaluations") {
    const ScenarioConfig cfg = small_config();
    const auto points = zeta_accuracy_sweep(cfg);
    REQUIRE(points.size() == cfg.zeta_max);
    for (const std::uint64_t zeta : {1ULL, 2ULL, 7ULL, 20ULL}) {
        const auto& pt = points[zeta - 1];
        CHECK(pt.zeta == zeta);
        CHECK(std::abs(pt.gamma_analytical - gamma_cowu(cfg, zeta).gamma) <= 1e-12);
        CHECK(std::abs(pt.gamma_upper - gamma_cowu_upper_bound(cfg, zeta).gamma) <= 1e-12);
    }
}

TEST_CASE("mismatch: assumed-equals-true coincides with the perfect curve") {
    ScenarioConfig cfg = small_config();
    const std::vector<double> qs = {0.05, 0.1, 0.2};
    for (const double q : qs) {
        const auto curve = mismatch_curve(cfg, std::vector<double>{q}, q);
        REQUIRE(curve.size() == 1);
        CHECK(curve[0].gamma == doctest::Approx(curve[0].gamma_perfect).epsilon(1e-13));
        CHECK(curve[0].zeta_opt == curve[0].zeta_opt_perfect);
    }
}

TEST_CASE("mismatch: the wrong model never beats the right one") {
    ScenarioConfig cfg = small_config();
    const std::vector<double> qs = {0.02, 0.05, 0.1, 0.2, 0.3};
    for (const double q_hat : {0.02, 0.3}) {
        const auto curve = mismatch_curve(cfg, qs, q_hat);
        for (const auto& pt : curve)
            CHECK(pt.gamma <= pt.gamma_perfect + 1e-12);
    }
}

TEST_CASE("gamma values stay in [0, 1] across a sweep") {
    ScenarioConfig cfg = small_config();
    cfg.zeta_max = 50;
    for (const auto& pt : zeta_accuracy_sweep(cfg)) {
        CHECK(pt.gamma_analytical >= 0.0);
        CHECK(pt.gamma_analytical <= 1.0);
        CHECK(pt.gamma_upper >= 0.0);
        CHECK(pt.gamma_upper <= 1.0);
    }
}

TEST_CASE("result serialization carries method, zeta and parameters") {
    const ScenarioConfig cfg = small_config();
    const AccuracyResult r = gamma_cowu(cfg, 2);
    const std::string json = to_json(r, cfg);
    CHECK(json.find("\"method\":\"cowu-analytical\"") != std::string::npos);
    CHECK(json.find("\"zeta\":2") != std::string::npos);
    CHECK(json.find("\"N\":2") != std::string::npos);
    CHECK(method_name(Method::round_robin) == "round-robin");
    CHECK(method_name(Method::cowu_upper_bound) == "cowu-upper-bound");
    CHECK(method_name(Method::simulated) == "simulated");
}

TEST_CASE("scenario validation names the offending field") {
    ScenarioConfig cfg = small_config();
    cfg.num_nodes = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), "N: must be >= 1", std::invalid_argument);
    cfg = small_config();
    cfg.q = 0.7;
    CHECK_THROWS_WITH_AS(cfg.validate(), "q: must lie in [0, 0.5]", std::invalid_argument);
    cfg = small_config();
    cfg.range = RangeQuery{2, 9};
    CHECK_THROWS_WITH_AS(cfg.validate(), "range: need 1 <= lower <= upper <= M",
                         std::invalid_argument);
    cfg = small_config();
    cfg.zeta_max = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), "zeta_max: must be >= 1", std::invalid_argument);
}

}  // TEST_SUITE
