#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "switched/certify.hpp"
#include "test_util.hpp"

using namespace switched;
using switched::testing::delay_free_bounds;
using switched::testing::example1_system;
using switched::testing::example3_system;
using switched::testing::random_matrix;
using switched::testing::uniform;

namespace {

ActivationBounds random_bounds(std::mt19937_64& rng, int m) {
    for (;;) {
        std::vector<double> lo(m), hi(m);
        for (int s = 0; s < m; ++s) {
            lo[s] = uniform(rng, 0.0, 1.0 / m);
            hi[s] = std::min(1.0, lo[s] + uniform(rng, 0.0, 1.0));
        }
        double lo_sum = 0.0, hi_sum = 0.0;
        for (int s = 0; s < m; ++s) {
            lo_sum += lo[s];
            hi_sum += hi[s];
        }
        if (lo_sum <= 1.0 && hi_sum >= 1.0) return ActivationBounds(lo, hi);
    }
}

}  // namespace

TEST_CASE("activation bounds invariants") {
    CHECK_THROWS_AS(ActivationBounds({0.6, 0.6}, {1.0, 1.0}), std::invalid_argument);  // sum lo > 1
    CHECK_THROWS_AS(ActivationBounds({0.0, 0.0}, {0.4, 0.4}), std::invalid_argument);  // sum hi < 1
    CHECK_THROWS_AS(ActivationBounds({0.5, 0.2}, {0.4, 1.0}), std::invalid_argument);  // lo > hi
    CHECK_THROWS_AS(ActivationBounds({-0.1, 0.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_NOTHROW(ActivationBounds({0.25, 0.75}, {0.25, 0.75}));
}

TEST_CASE("full program is guarded at 2^24 sequences") {
    const SwitchedSystem sys = example3_system();
    CHECK_THROWS_AS(
        worst_case_growth(sys, delay_free_bounds(0.5), 25, Norm::spectral(), 1e-24, LpChoice::Lp1),
        std::invalid_argument);
}

TEST_CASE("LP construction shapes") {
    const SwitchedSystem sys = example3_system();
    const ActivationBounds bounds = delay_free_bounds(0.5);
    const GainTables t = build_gain_tables(sys, 2, Norm::spectral(), 1e-24, true);
    const LpModel lp1 = build_lp1(t, bounds);
    CHECK(lp1.num_vars() == 4);
    CHECK(lp1.num_rows() == 3);
    CHECK(lp1.rows[0].lo == 1.0);
    CHECK(lp1.rows[0].hi == 1.0);
    // reordered sequences (1,2) and (2,1) share constraint columns
    for (const LpRow& row : lp1.rows) CHECK(row.coeffs[1] == row.coeffs[2]);

    const LpModel lp2 = build_lp2(t, bounds);
    CHECK(lp2.num_vars() == 3);
    CHECK(lp2.num_rows() == 3);

    const GainTables t_unmaterialized = build_gain_tables(sys, 2, Norm::spectral(), 1e-24);
    CHECK_THROWS_AS(build_lp1(t_unmaterialized, bounds), std::invalid_argument);

    const GainTables t22 = build_gain_tables(example1_system(), 5, Norm::spectral(), 1e-24);
    CHECK(build_lp2(t22, bounds).num_vars() == 6);
}

TEST_CASE("published optimal values for the small closed loop") {
    const SwitchedSystem sys = example3_system();
    const auto j = [&](double rho, double eps, const Norm& n) {
        return worst_case_growth(sys, delay_free_bounds(rho), 2, n, eps, LpChoice::Lp2).value;
    };
    CHECK(j(0.5, 1e-24, Norm::spectral()) == doctest::Approx(0.8047).epsilon(2e-3));
    CHECK(j(0.48, 1e-16, Norm::spectral()) == doctest::Approx(-0.7011).epsilon(2e-3));
    CHECK(j(0.49, 1e-24, Norm::spectral()) == doctest::Approx(-0.3166).epsilon(2e-3));
    CHECK(j(0.6, 1e-24, Norm::spectral()) == doctest::Approx(0.9274).epsilon(2e-3));
    CHECK(j(0.6, 1e-24, Norm::frobenius()) == doctest::Approx(0.9328).epsilon(2e-3));
    CHECK(j(0.7, 1e-24, Norm::spectral()) == doctest::Approx(1.0502).epsilon(2e-3));
    CHECK(j(0.7, 1e-24, Norm::frobenius()) == doctest::Approx(1.0609).epsilon(2e-3));
    // LP1 and LP2 agree
    const double j1 = worst_case_growth(sys, delay_free_bounds(0.5), 2, Norm::spectral(), 1e-24,
                                        LpChoice::Lp1)
                          .value;
    CHECK(j1 == doctest::Approx(j(0.5, 1e-24, Norm::spectral())).epsilon(1e-12));
}

TEST_CASE("explicit feasible point") {
    const auto p1 = constant_sequence_feasible_point(ActivationBounds({0.4, 0.0}, {1.0, 0.5}), 1);
    REQUIRE(p1.size() == 2);
    CHECK(p1[0].first == ModeSequence{1});
    CHECK(p1[0].second == doctest::Approx(0.4 + 0.6 * 0.6 / 1.1).epsilon(1e-12));
    CHECK(p1[1].second == doctest::Approx(0.5 * 0.6 / 1.1).epsilon(1e-12));
    CHECK(p1[0].second + p1[1].second == doctest::Approx(1.0).epsilon(1e-12));

    // stationary bounds: weights equal the lower bounds
    const auto p2 = constant_sequence_feasible_point(ActivationBounds({0.25, 0.75}, {0.25, 0.75}), 3);
    CHECK(p2[0].second == doctest::Approx(0.25));
    CHECK(p2[1].second == doctest::Approx(0.75));
    CHECK(p2[0].first == ModeSequence{1, 1, 1});

    // vacuous bounds put 1/M on every constant sequence
    const auto p3 = constant_sequence_feasible_point(ActivationBounds({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), 2);
    for (const auto& [q, w] : p3) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("feasible point satisfies the constraints and the LP solves") {
    std::mt19937_64 rng(515);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 4);
        const int h = 1 + static_cast<int>(rng() % 8);
        const ActivationBounds bounds = random_bounds(rng, m);
        const auto point = constant_sequence_feasible_point(bounds, h);
        double total = 0.0;
        std::vector<double> usage(m, 0.0);
        for (const auto& [q, w] : point) {
            CHECK(w >= -1e-15);
            total += w;
            for (int s : q) usage[s - 1] += w / h;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        for (int s = 1; s <= m; ++s) {
            CHECK(usage[s - 1] >= bounds.lower(s) - 1e-12);
            CHECK(usage[s - 1] <= bounds.upper(s) + 1e-12);
        }
    }
}

TEST_CASE("verdicts and worst occupancy") {
    const SwitchedSystem sys = example3_system();
    const StabilityCertificate stable = certify(sys, delay_free_bounds(0.48), 2, Norm::spectral(), 1e-16);
    CHECK(stable.verdict == Verdict::CertifiedStable);
    CHECK(stable.objective < 0.0);
    const StabilityCertificate inconclusive = certify(sys, delay_free_bounds(0.5), 2);
    CHECK(inconclusive.verdict == Verdict::Inconclusive);
    CHECK(inconclusive.objective > 0.0);

    double total = 0.0;
    for (const auto& [z, w] : inconclusive.worst_occupancy) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0 + 1e-12);
        total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(!inconclusive.witness_schedule.empty());
    CHECK(inconclusive.witness_schedule[0].first == ModeSequence{2, 1});
    CHECK(inconclusive.witness_schedule[0].second == doctest::Approx(1.0).epsilon(1e-9));

    // single Schur mode certified at h = 1
    const SwitchedSystem schur({Mat{{0.5, 0.0}, {0.0, 0.4}}});
    const StabilityCertificate single =
        certify(schur, ActivationBounds({1.0}, {1.0}), 1);
    CHECK(single.verdict == Verdict::CertifiedStable);
}

TEST_CASE("recovered full solution reproduces the optimum") {
    const SwitchedSystem sys = example3_system();
    const GainTables t = build_gain_tables(sys, 2, Norm::spectral(), 1e-24, true);
    const LpModel lp2 = build_lp2(t, delay_free_bounds(0.5));
    const LpSolution sol = solve(lp2);
    REQUIRE(sol.status == LpStatus::Optimal);
    const auto recovered = recover_lp1_solution(sol, t);
    double obj = 0.0, total = 0.0;
    std::vector<double> usage(2, 0.0);
    for (const auto& [q, w] : recovered) {
        obj += w * (*t.by_sequence)[sequence_rank(q, 2)];
        total += w;
        for (int s : q) usage[s - 1] += w / 2.0;
    }
    CHECK(obj == doctest::Approx(sol.objective_value).epsilon(1e-9));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(usage[1] <= 0.5 + 1e-9);
}

TEST_CASE("equivalence of the two programs") {
    const EquivalenceReport quick =
        equivalence_suite(example3_system(), delay_free_bounds(0.5), Norm::spectral(), 1e-24, 6);
    CHECK(quick.all_ok);

    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Mat> mats = {random_matrix(rng, 2, 2), random_matrix(rng, 2, 2)};
        const SwitchedSystem sys(std::move(mats));
        const ActivationBounds bounds = random_bounds(rng, 2);
        const EquivalenceReport rep = equivalence_suite(sys, bounds, Norm::spectral(), 1e-24, 5);
        for (const EquivalenceEntry& e : rep.entries) {
            INFO("h = ", e.h, " lp1 = ", e.lp1_value, " lp2 = ", e.lp2_value);
            CHECK(e.ok);
        }
    }
}

TEST_CASE("attack extraction from the worst occupancy") {
    const SwitchedSystem sys = example3_system();
    const GainTables t = build_gain_tables(sys, 2, Norm::spectral(), 1e-24);
    const LpSolution sol = solve(build_lp2(t, delay_free_bounds(0.5)));
    REQUIRE(sol.status == LpStatus::Optimal);
    const AttackPlan plan = extract_attack(sys, t, sol, 100);
    CHECK(plan.period == 2);
    CHECK(plan.schedule == std::vector<int>{2, 1});
    CHECK(plan.monodromy_radius == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(plan.mode_frequencies[0] == doctest::Approx(0.5));
    CHECK(plan.mode_frequencies[1] == doctest::Approx(0.5));

    // equal weights on two compositions round at denominator 2
    const StabilityCertificate cert = certify(sys, delay_free_bounds(0.5), 2);
    StabilityCertificate even = cert;
    even.witness_schedule = {{{1, 1}, 0.5}, {{2, 1}, 0.5}};
    const AttackPlan half = extract_attack(sys, even, 10);
    CHECK(half.period == 4);
    CHECK(half.schedule == std::vector<int>{1, 1, 2, 1});
}

TEST_CASE("monodromy checks") {
    const SwitchedSystem sys = example3_system();
    const MonodromyResult r1 = monodromy_check(sys, {2, 1});
    CHECK(r1.radius == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r1.unstable);
    const MonodromyResult r2 = monodromy_check(sys, {1, 1});
    CHECK(r2.radius == 0.0);
    CHECK(!r2.unstable);
    const SwitchedSystem schur({Mat{{0.9, 0.0}, {0.0, 0.1}}});
    const MonodromyResult r3 = monodromy_check(schur, {1});
    CHECK(r3.radius == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(!r3.unstable);
}

TEST_CASE("epsilon and bound monotonicity") {
    const SwitchedSystem sys = example3_system();
    const std::vector<double> eps_grid = {1e-4, 1e-8, 1e-12, 1e-16, 1e-24};
    const std::vector<double> rho_grid = {0.3, 0.4, 0.5, 0.6, 0.7};
    std::vector<std::vector<double>> j(eps_grid.size(), std::vector<double>(rho_grid.size()));
    for (std::size_t ei = 0; ei < eps_grid.size(); ++ei)
        for (std::size_t ri = 0; ri < rho_grid.size(); ++ri)
            j[ei][ri] = worst_case_growth(sys, delay_free_bounds(rho_grid[ri]), 2,
                                          Norm::spectral(), eps_grid[ei], LpChoice::Lp2)
                            .value;
    for (std::size_t ei = 0; ei + 1 < eps_grid.size(); ++ei)
        for (std::size_t ri = 0; ri < rho_grid.size(); ++ri)
            CHECK(j[ei + 1][ri] <= j[ei][ri] + 1e-12);  // smaller eps never raises J
    for (std::size_t ei = 0; ei < eps_grid.size(); ++ei)
        for (std::size_t ri = 0; ri + 1 < rho_grid.size(); ++ri)
            CHECK(j[ei][ri + 1] >= j[ei][ri] - 1e-12);  // larger rho-bar never lowers J
}
