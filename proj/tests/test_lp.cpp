#include <doctest.h>

#include <cmath>
#include <random>

#include "lp_oracle.hpp"
#include "switched/lp.hpp"
#include "test_util.hpp"

using namespace switched;
using switched::testing::brute_force_lp;
using switched::testing::uniform;

namespace {

// Occupancy-style model for two modes at h = 2 with explicit objective
// coefficients; variables ordered (1,1), (1,2), (2,1), (2,2).
LpModel two_mode_h2(double g11, double g12, double g21, double g22, double lo1, double hi1,
                    double lo2, double hi2) {
    LpModel lp;
    lp.objective = {g11, g12, g21, g22};
    lp.var_bounds.assign(4, {0.0, 1.0});
    lp.rows.push_back({{1.0, 1.0, 1.0, 1.0}, 1.0, 1.0});
    lp.rows.push_back({{1.0, 0.5, 0.5, 0.0}, lo1, hi1});
    lp.rows.push_back({{0.0, 0.5, 0.5, 1.0}, lo2, hi2});
    return lp;
}

const double kLnEps16 = std::log(1e-16);
const double kLnSqrt5 = std::log(std::sqrt(5.0));
const double kLn2 = std::log(2.0);
const double kLnA2Sq = std::log(std::sqrt((18.0 + std::sqrt(260.0)) / 2.0));

}  // namespace

TEST_CASE("forced single point") {
    LpModel lp;
    lp.objective = {0.8047};
    lp.var_bounds = {{0.0, 1.0}};
    lp.rows.push_back({{1.0}, 1.0, 1.0});
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.objective_value == doctest::Approx(0.8047).epsilon(1e-12));
    CHECK(verify_certificate(lp, sol).ok);
}

TEST_CASE("published two-mode instances") {
    // rho = 0.5, eps = 1e-16
    LpModel lp = two_mode_h2(kLnEps16, kLn2, kLnSqrt5, kLnA2Sq, 0.5, 1.0, 0.0, 0.5);
    LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(0.8047).epsilon(1e-3));
    CHECK(verify_certificate(lp, sol).ok);

    // rho = 0.48, eps = 1e-16
    lp = two_mode_h2(kLnEps16, kLn2, kLnSqrt5, kLnA2Sq, 0.52, 1.0, 0.0, 0.48);
    sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(-0.7011).epsilon(1e-3));
    CHECK(sol.objective_value ==
          doctest::Approx(0.96 * kLnSqrt5 + 0.04 * kLnEps16).epsilon(1e-10));
    CHECK(verify_certificate(lp, sol).ok);
}

TEST_CASE("perturbing a tight solution breaks verification") {
    LpModel lp = two_mode_h2(kLnEps16, kLn2, kLnSqrt5, kLnA2Sq, 0.5, 1.0, 0.0, 0.5);
    LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    sol.x[2] += 1e-3;  // equality row now violated
    const CertificateReport rep = verify_certificate(lp, sol);
    CHECK(!rep.ok);
    CHECK(rep.primal_infeasibility > 1e-7);
}

TEST_CASE("duplicate columns keep the certificate valid") {
    // (1,2) and (2,1) share constraint columns; equal objective entries make
    // the optimum non-unique.
    const LpModel lp = two_mode_h2(-1.0, kLnSqrt5, kLnSqrt5, 0.3, 0.5, 1.0, 0.0, 0.5);
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(kLnSqrt5).epsilon(1e-9));
    CHECK(verify_certificate(lp, sol).ok);
}

TEST_CASE("infeasible and unbounded detection") {
    LpModel lp;
    lp.objective = {1.0};
    lp.var_bounds = {{0.0, 1.0}};
    lp.rows.push_back({{1.0}, -5.0, -1.0});
    CHECK(solve(lp).status == LpStatus::Infeasible);

    LpModel ub;
    ub.objective = {1.0};
    ub.var_bounds = {{0.0, lp_inf}};
    CHECK(solve(ub).status == LpStatus::Unbounded);

    LpModel blocked = ub;
    blocked.rows.push_back({{1.0}, -lp_inf, 7.5});
    const LpSolution sol = solve(blocked);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(7.5));
    CHECK(verify_certificate(blocked, sol).ok);
}

TEST_CASE("random instances match vertex enumeration") {
    std::mt19937_64 rng(2024);
    int optimal_count = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const int m = static_cast<int>(rng() % 5);
        LpModel lp;
        lp.objective.resize(n);
        for (double& c : lp.objective) c = uniform(rng, -3.0, 3.0);
        for (int j = 0; j < n; ++j) {
            const double lo = uniform(rng, -2.0, 1.0);
            lp.var_bounds.push_back({lo, lo + uniform(rng, 0.0, 3.0)});
        }
        for (int i = 0; i < m; ++i) {
            LpRow row;
            row.coeffs.resize(n);
            for (double& a : row.coeffs) a = uniform(rng, -2.0, 2.0);
            const int shape = static_cast<int>(rng() % 4);
            const double mid = uniform(rng, -2.0, 2.0);
            if (shape == 0) {
                row.lo = row.hi = mid;  // equality
            } else if (shape == 1) {
                row.lo = mid;
                row.hi = mid + uniform(rng, 0.0, 2.0);
            } else if (shape == 2) {
                row.lo = -lp_inf;
                row.hi = mid;
            } else {
                row.lo = mid;
                row.hi = lp_inf;
            }
            lp.rows.push_back(std::move(row));
        }

        const LpSolution sol = solve(lp);
        const auto ref = brute_force_lp(lp);
        if (sol.status == LpStatus::Optimal) {
            ++optimal_count;
            REQUIRE(ref.feasible);
            CHECK(sol.objective_value == doctest::Approx(ref.objective).epsilon(1e-9));
            CHECK(verify_certificate(lp, sol).ok);
        } else {
            REQUIRE(sol.status == LpStatus::Infeasible);
            CHECK(!ref.feasible);
        }
    }
    CHECK(optimal_count > 150);  // the generator must exercise the optimal path
}

TEST_CASE("relaxing an upper bound never lowers the optimum") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const double rho = uniform(rng, 0.2, 0.8);
        LpModel lp = two_mode_h2(uniform(rng, -40.0, 0.0), uniform(rng, -1.0, 1.0),
                                 uniform(rng, -1.0, 1.5), uniform(rng, 0.0, 2.0), 1.0 - rho, 1.0,
                                 0.0, rho);
        const LpSolution before = solve(lp);
        REQUIRE(before.status == LpStatus::Optimal);
        lp.rows[2].hi = std::min(1.0, lp.rows[2].hi + uniform(rng, 0.0, 0.3));
        const LpSolution after = solve(lp);
        REQUIRE(after.status == LpStatus::Optimal);
        CHECK(after.objective_value >= before.objective_value - 1e-12);
    }
}
