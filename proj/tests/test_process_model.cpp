#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cowu/oracle.hpp"
#include "cowu/process_model.hpp"

using namespace cowu;

namespace {

// Schoolbook multiply, kept independent of matrix_power.
std::vector<std::vector<double>> naive_multiply(const TransitionMatrix& a,
                                                const TransitionMatrix& b) {
    const int m = a.size();
    std::vector<std::vector<double>> c(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) c[i][j] += a.entry(i, k) * b.entry(k, j);
    return c;
}

}  // namespace

TEST_SUITE("process-model") {

TEST_CASE("birth-death construction matches the interior/boundary rule") {
    const auto z2 = TransitionMatrix::birth_death(2, 0.5);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(z2.entry(i, j) == 0.5);

    const auto z3 = TransitionMatrix::birth_death(3, 0.1);
    const double expected[3][3] = {{0.9, 0.1, 0.0}, {0.1, 0.8, 0.1}, {0.0, 0.1, 0.9}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(z3.entry(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-15));
}

TEST_CASE("birth-death rejects bad parameters") {
    CHECK_THROWS_AS(TransitionMatrix::birth_death(1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(TransitionMatrix::birth_death(5, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(TransitionMatrix::birth_death(5, -0.1), std::invalid_argument);
}

TEST_CASE("from_rows validates shape, mass and irreducibility") {
    CHECK_THROWS_AS(TransitionMatrix::from_rows({{0.5, 0.5}, {0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(TransitionMatrix::from_rows({{0.6, 0.5}, {0.5, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(TransitionMatrix::from_rows({{1.2, -0.2}, {0.5, 0.5}}), std::invalid_argument);
    // State 1 is absorbing: reducible.
    CHECK_THROWS_AS(TransitionMatrix::from_rows({{1.0, 0.0}, {0.5, 0.5}}), std::invalid_argument);
    CHECK_NOTHROW(TransitionMatrix::from_rows({{0.9, 0.1}, {0.3, 0.7}}));
}

TEST_CASE("stationary: symmetric chains are uniform") {
    const auto pi2 = stationary(TransitionMatrix::birth_death(2, 0.3));
    CHECK(pi2.probs[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(pi2.probs[1] == doctest::Approx(0.5).epsilon(1e-13));

    const auto pi100 = stationary(TransitionMatrix::birth_death(100, 0.0002));
    for (const double v : pi100.probs) CHECK(std::abs(v - 0.01) < 1e-14);
}

TEST_CASE("stationary: two-state hand-solved balance") {
    // pi_1 * 0.1 = pi_2 * 0.3 with pi_1 + pi_2 = 1 gives (0.75, 0.25).
    const auto pi = stationary(TransitionMatrix::from_rows({{0.9, 0.1}, {0.3, 0.7}}));
    CHECK(std::abs(pi.probs[0] - 0.75) < 1e-12);
    CHECK(std::abs(pi.probs[1] - 0.25) < 1e-12);
}

TEST_CASE("stationary satisfies pi Z = pi on assorted chains") {
    const std::vector<TransitionMatrix> chains = {
        TransitionMatrix::birth_death(7, 0.31),
        TransitionMatrix::birth_death(100, 0.0002),
        TransitionMatrix::from_rows({{0.2, 0.5, 0.3}, {0.1, 0.1, 0.8}, {0.45, 0.45, 0.1}}),
    };
    for (const auto& z : chains) {
        const auto pi = stationary(z);
        double sum = 0.0;
        for (const double v : pi.probs) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (int j = 0; j < z.size(); ++j) {
            double acc = 0.0;
            for (int i = 0; i < z.size(); ++i) acc += pi.probs[i] * z.entry(i, j);
            CHECK(std::abs(acc - pi.probs[j]) < 1e-10);
        }
    }
}

TEST_CASE("matrix_power: identity, base case and schoolbook oracle") {
    const auto z = TransitionMatrix::birth_death(3, 0.1);

    const auto z0 = matrix_power(z, 0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(z0.entry(i, j) == (i == j ? 1.0 : 0.0));

    const auto z1 = matrix_power(z, 1);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(z1.entry(i, j) == z.entry(i, j));

    const auto z2 = matrix_power(z, 2);
    const auto ref2 = naive_multiply(z, z);
    const auto z3 = matrix_power(z, 3);
    const auto ref3 = naive_multiply(TransitionMatrix::from_rows(ref2), z);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(z2.entry(i, j) - ref2[i][j]) <= 1e-12);
            CHECK(std::abs(z3.entry(i, j) - ref3[i][j]) <= 1e-12);
        }
}

TEST_CASE("matrix_power keeps rows stochastic out to zeta = 1e4") {
    const auto z = TransitionMatrix::birth_death(100, 0.0002);
    for (const std::uint64_t zeta : {10ULL, 1000ULL, 10000ULL})
        CHECK(matrix_power(z, zeta).row_sum_drift() < 1e-9);
}

TEST_CASE("matrix_power mixes to the stationary distribution") {
    // Fast-mixing chain: relaxation time ~2e2 slots, fully mixed at 1e5.
    const auto fast = matrix_power(TransitionMatrix::birth_death(10, 0.05), 100000);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) CHECK(std::abs(fast.entry(i, j) - 0.1) < 1e-3);

    // The default scenario's chain relaxes in ~5e6 slots, so the horizon has
    // to go far beyond that; squaring makes 2^35 slots cheap.
    const auto slow = matrix_power(TransitionMatrix::birth_death(100, 0.0002), 1ULL << 35);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j)
            worst = std::max(worst, std::abs(slow.entry(i, j) - 0.01));
    CHECK(worst < 1e-3);
}

TEST_CASE("wake_probability on spec ranges") {
    const auto pi100 = stationary(TransitionMatrix::birth_death(100, 0.0002));
    CHECK(wake_probability(pi100, RangeQuery{94, 98}) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(std::abs(wake_probability(pi100, RangeQuery{1, 100}) - 1.0) < 1e-12);

    StationaryDistribution two;
    two.probs = {0.75, 0.25};
    CHECK(wake_probability(two, RangeQuery{2, 2}) == 0.25);
}

TEST_CASE("wake_probability is monotone under range inclusion") {
    const auto pi = stationary(TransitionMatrix::birth_death(12, 0.2));
    double prev = 0.0;
    for (int widen = 0; widen <= 5; ++widen) {
        const double v = wake_probability(pi, RangeQuery{6 - widen, 6 + widen});
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("range query validation") {
    CHECK_THROWS_AS((RangeQuery{0, 3}.validate(5)), std::invalid_argument);
    CHECK_THROWS_AS((RangeQuery{4, 3}.validate(5)), std::invalid_argument);
    CHECK_THROWS_AS((RangeQuery{2, 6}.validate(5)), std::invalid_argument);
    CHECK_NOTHROW((RangeQuery{1, 5}.validate(5)));
}

TEST_CASE("range survival at zeta = 0 collapses to the stationary masses") {
    const auto z = TransitionMatrix::birth_death(5, 0.2);
    const auto pi = stationary(z);
    const RangeQuery range{4, 5};
    const RangeSurvival sv = range_survival_probs(z, pi, range, 0);
    const double mass = wake_probability(pi, range);
    CHECK(sv.p_a == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sv.p_b == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(sv.p_c == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(sv.p_d - mass) < 1e-14);
    CHECK(std::abs(sv.p_e - (1.0 - mass)) < 1e-14);
}

TEST_CASE("range survival identities hold") {
    const auto z = TransitionMatrix::birth_death(6, 0.17);
    const auto pi = stationary(z);
    const RangeQuery range{2, 4};
    const double mass_in = wake_probability(pi, range);
    for (const std::uint64_t zeta : {0ULL, 1ULL, 2ULL, 9ULL, 64ULL}) {
        const RangeSurvival sv = range_survival_probs(z, pi, range, zeta);
        CHECK(std::abs(sv.p_a + sv.p_b - 1.0) <= 1e-12);
        CHECK(std::abs(sv.p_d - sv.p_a * mass_in) <= 1e-12);
        CHECK(std::abs(sv.p_e - sv.p_c * (1.0 - mass_in)) <= 1e-12);
        for (const double v : {sv.p_a, sv.p_b, sv.p_c, sv.p_d, sv.p_e}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("range survival single-row read-off, checked against path enumeration") {
    const auto z = TransitionMatrix::birth_death(3, 0.1);
    const auto pi = stationary(z);
    const RangeSurvival sv = range_survival_probs(z, pi, RangeQuery{3, 3}, 1);
    CHECK(std::abs(sv.p_a - 0.9) < 1e-12);
    CHECK(std::abs(sv.p_b - 0.1) < 1e-12);

    // Independent route: length-1 paths from state 3.
    const auto paths = oracle::step_distribution_by_paths(z, 2, 1);
    CHECK(std::abs(sv.p_a - paths[2]) < 1e-14);
}

TEST_CASE("full-range query leaves the outside conditions vacuous") {
    const auto z = TransitionMatrix::birth_death(4, 0.25);
    const auto pi = stationary(z);
    const RangeSurvival sv = range_survival_probs(z, pi, RangeQuery{1, 4}, 7);
    CHECK(sv.p_c == 1.0);
    CHECK(sv.p_e == 0.0);
}

TEST_CASE("incremental sweep agrees with matrix powers") {
    const auto z = TransitionMatrix::birth_death(8, 0.12);
    const auto pi = stationary(z);
    const RangeQuery range{6, 8};
    RangeSurvivalSweep sweep(z, pi, range);
    for (std::uint64_t zeta = 1; zeta <= 40; ++zeta) {
        sweep.advance();
        const RangeSurvival a = sweep.current();
        const RangeSurvival b = range_survival_probs(z, pi, range, zeta);
        CHECK(std::abs(a.p_a - b.p_a) < 1e-12);
        CHECK(std::abs(a.p_b - b.p_b) < 1e-12);
        CHECK(std::abs(a.p_c - b.p_c) < 1e-12);
        CHECK(std::abs(a.p_d - b.p_d) < 1e-12);
        CHECK(std::abs(a.p_e - b.p_e) < 1e-12);
    }
}

TEST_CASE("survival converges to the stationary mass on a fast chain") {
    const auto z = TransitionMatrix::birth_death(10, 0.05);
    const auto pi = stationary(z);
    const RangeQuery range{8, 10};
    const double mass = wake_probability(pi, range);
    const RangeSurvival sv = range_survival_probs(z, pi, range, 100000);
    CHECK(std::abs(sv.p_a - mass) < 1e-3);
}

TEST_CASE("JSON round trip and rejection") {
    const auto z = TransitionMatrix::from_rows({{0.9, 0.1}, {0.3, 0.7}});
    const auto back = TransitionMatrix::from_json(z.to_json());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(back.entry(i, j) == z.entry(i, j));
    CHECK_THROWS(TransitionMatrix::from_json("{\"rows\": 3}"));
    CHECK_THROWS(TransitionMatrix::from_json("[[0.9, 0.2], [0.3, 0.7]]"));
}

}  // TEST_SUITE
