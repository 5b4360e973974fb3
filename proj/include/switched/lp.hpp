#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace switched {

inline constexpr double lp_inf = std::numeric_limits<double>::infinity();

struct LpRow {
    std::vector<double> coeffs;
    double lo = -lp_inf;  // lo == hi encodes an equality row
    double hi = lp_inf;
};

/// maximize c^T x subject to lo_i <= a_i^T x <= hi_i and per-variable bounds.
struct LpModel {
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<std::pair<double, double>> var_bounds;  // default (0,1) per variable

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
    std::pair<double, double> bounds_of(int j) const {
        return j < static_cast<int>(var_bounds.size()) ? var_bounds[j] : std::pair<double, double>{0.0, 1.0};
    }
    void validate() const;  // throws std::invalid_argument on malformed input
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective_value = 0.0;
    std::vector<double> duals;          // one per row
    std::vector<double> reduced_costs;  // one per variable
    long iterations = 0;
};

/// Two-phase bounded-variable revised simplex. Dantzig pricing with Bland's
/// rule engaged after 10*(vars+rows) iterations; feasibility and optimality
/// tolerances 1e-9; iteration cap 10^6 reported as IterationLimit.
LpSolution solve(const LpModel& model);

struct CertificateReport {
    bool ok = false;
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    double complementarity = 0.0;
    double duality_gap = 0.0;
    std::vector<std::string> violations;
};

/// Independent optimality check: primal feasibility, reduced-cost sign
/// conditions, complementary slackness, and strong duality, all at 1e-7.
CertificateReport verify_certificate(const LpModel& model, const LpSolution& solution);

}  // namespace switched
