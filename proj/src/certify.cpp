#include "switched/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace switched {

namespace {

constexpr double kStableMargin = 1e-9;   // strict-negativity margin for the verdict
constexpr double kEquivTol = 1e-9;
constexpr double kAttackDeviationCap = 1e-3;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void decode_sequence(std::size_t rank, int h, int mode_count, ModeSequence& q) {
    for (int j = h - 1; j >= 0; --j) {
        q[j] = static_cast<int>(rank % mode_count) + 1;
        rank /= mode_count;
    }
}

LpModel occupancy_lp(const ActivationBounds& bounds, int h, std::size_t num_vars,
                     const std::vector<double>& objective,
                     const std::vector<std::vector<double>>& mode_usage) {
    LpModel lp;
    lp.objective = objective;
    lp.var_bounds.assign(num_vars, {0.0, 1.0});
    LpRow total;
    total.coeffs.assign(num_vars, 1.0);
    total.lo = total.hi = 1.0;
    lp.rows.push_back(std::move(total));
    for (int s = 1; s <= bounds.mode_count(); ++s) {
        LpRow row;
        row.coeffs = mode_usage[s - 1];
        row.lo = bounds.lower(s);
        row.hi = bounds.upper(s);
        lp.rows.push_back(std::move(row));
    }
    (void)h;
    return lp;
}

}  // namespace

LpModel build_lp1(const GainTables& tables, const ActivationBounds& bounds) {
    require(tables.by_sequence.has_value(), "full LP requires the per-sequence table");
    require(bounds.mode_count() == tables.mode_count, "bounds / tables mode count mismatch");
    const std::size_t nv = tables.by_sequence->size();
    const int h = tables.h, m = tables.mode_count;
    std::vector<std::vector<double>> usage(m, std::vector<double>(nv, 0.0));
    ModeSequence q(h);
    for (std::size_t r = 0; r < nv; ++r) {
        decode_sequence(r, h, m, q);
        for (int s : q) usage[s - 1][r] += 1.0 / h;
    }
    return occupancy_lp(bounds, h, nv, *tables.by_sequence, usage);
}

LpModel build_lp2(const GainTables& tables, const ActivationBounds& bounds) {
    require(bounds.mode_count() == tables.mode_count, "bounds / tables mode count mismatch");
    const std::size_t nv = tables.by_composition.size();
    const int h = tables.h, m = tables.mode_count;
    std::vector<double> objective(nv);
    std::vector<std::vector<double>> usage(m, std::vector<double>(nv, 0.0));
    for (std::size_t zi = 0; zi < nv; ++zi) {
        objective[zi] = tables.by_composition[zi].gain;
        for (int s = 0; s < m; ++s) {
            usage[s][zi] = static_cast<double>(tables.by_composition[zi].z[s]) / h;
        }
    }
    return occupancy_lp(bounds, h, nv, objective, usage);
}

namespace {

GrowthResult solve_or_throw(const LpModel& lp) {
    GrowthResult res;
    res.solution = solve(lp);
    switch (res.solution.status) {
        case LpStatus::Optimal:
            res.value = res.solution.objective_value;
            return res;
        case LpStatus::Infeasible:
            throw std::runtime_error(
                "occupancy LP reported infeasible; activation bounds violate feasibility");
        case LpStatus::Unbounded:
            throw std::runtime_error("occupancy LP reported unbounded");
        case LpStatus::IterationLimit:
            throw std::runtime_error("LP solver hit the iteration cap");
    }
    throw std::logic_error("unreachable");
}

}  // namespace

GrowthResult worst_case_growth(const SwitchedSystem& system, const ActivationBounds& bounds,
                               int h, const Norm& norm, double epsilon, LpChoice choice,
                               int workers) {
    const bool materialize = choice == LpChoice::Lp1;
    const GainTables tables = build_gain_tables(system, h, norm, epsilon, materialize, workers);
    const LpModel lp = materialize ? build_lp1(tables, bounds) : build_lp2(tables, bounds);
    return solve_or_throw(lp);
}

StabilityCertificate certify(const SwitchedSystem& system, const ActivationBounds& bounds,
                             int h, const Norm& norm, double epsilon, int workers) {
    const GainTables tables = build_gain_tables(system, h, norm, epsilon, false, workers);
    const LpModel lp = build_lp2(tables, bounds);
    const GrowthResult res = solve_or_throw(lp);

    StabilityCertificate cert;
    cert.h = h;
    cert.norm = norm;
    cert.epsilon = epsilon;
    cert.objective = res.value;
    cert.verdict = res.value < -kStableMargin ? Verdict::CertifiedStable : Verdict::Inconclusive;

    const std::size_t nv = tables.by_composition.size();
    cert.worst_occupancy.reserve(nv);
    for (std::size_t zi = 0; zi < nv; ++zi) {
        const double w = res.solution.x[zi];
        cert.worst_occupancy.emplace_back(tables.by_composition[zi].z, w);
        if (w > 0.0) {
            cert.witness_schedule.emplace_back(tables.by_composition[zi].witness, w);
        }
    }

    // The returned occupancy must imply per-mode frequencies inside the bounds.
    for (int s = 1; s <= bounds.mode_count(); ++s) {
        double freq = 0.0;
        for (const auto& [z, w] : cert.worst_occupancy) {
            freq += w * static_cast<double>(z[s - 1]) / h;
        }
        if (freq < bounds.lower(s) - 1e-7 || freq > bounds.upper(s) + 1e-7) {
            throw std::runtime_error("optimal occupancy violates the activation bounds");
        }
    }
    return cert;
}

std::vector<std::pair<ModeSequence, double>> constant_sequence_feasible_point(const ActivationBounds& bounds,
                                                                   int h) {
    require(h >= 1, "h must be positive");
    const int m = bounds.mode_count();
    const double lo_sum = std::accumulate(bounds.lower_vec().begin(), bounds.lower_vec().end(), 0.0);
    const double hi_sum = std::accumulate(bounds.upper_vec().begin(), bounds.upper_vec().end(), 0.0);
    std::vector<std::pair<ModeSequence, double>> point;
    point.reserve(m);
    for (int s = 1; s <= m; ++s) {
        double beta = 0.0;
        if (hi_sum > lo_sum) {
            beta = (bounds.upper(s) - bounds.lower(s)) * (1.0 - lo_sum) / (hi_sum - lo_sum);
        }
        point.emplace_back(ModeSequence(h, s), bounds.lower(s) + beta);
    }
    return point;
}

std::vector<std::pair<ModeSequence, double>> recover_lp1_solution(const LpSolution& lp2_solution,
                                                                  const GainTables& tables) {
    require(lp2_solution.status == LpStatus::Optimal, "recovery needs an optimal reduced solution");
    require(lp2_solution.x.size() == tables.by_composition.size(),
            "solution does not match the composition table");
    std::vector<std::pair<ModeSequence, double>> point;
    for (std::size_t zi = 0; zi < tables.by_composition.size(); ++zi) {
        const double w = lp2_solution.x[zi];
        if (w != 0.0) point.emplace_back(tables.by_composition[zi].witness, w);
    }
    return point;
}

MonodromyResult monodromy_check(const SwitchedSystem& system, const std::vector<int>& schedule) {
    require(!schedule.empty(), "schedule must be nonempty");
    Mat p = Mat::identity(system.dim());
    Mat tmp(system.dim(), system.dim());
    for (int s : schedule) {
        require(s >= 1 && s <= system.mode_count(), "mode id out of range");
        mat_mul_into(system.mode(s), p, tmp);
        std::swap(p, tmp);
    }
    MonodromyResult res;
    res.radius = spectral_radius(p);
    res.unstable = res.radius > 1.0 + 1e-9;
    return res;
}

namespace {

AttackPlan attack_from_weights(const SwitchedSystem& system, int h,
                               const std::vector<std::pair<ModeSequence, double>>& weighted_witnesses,
                               int max_denominator) {
    require(max_denominator >= 1 && max_denominator <= 10000,
            "max denominator must lie in [1, 10^4]");
    const std::size_t k = weighted_witnesses.size();

    int best_den = 0;
    double best_dev = lp_inf;
    std::vector<int> best_counts;
    std::vector<int> counts(k);
    std::vector<std::size_t> order(k);
    for (int den = 1; den <= max_denominator; ++den) {
        int assigned = 0;
        for (std::size_t i = 0; i < k; ++i) {
            counts[i] = static_cast<int>(std::floor(weighted_witnesses[i].second * den));
            assigned += counts[i];
        }
        int rem = den - assigned;
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double fa = weighted_witnesses[a].second * den - counts[a];
            const double fb = weighted_witnesses[b].second * den - counts[b];
            return fa > fb;  // stable: ties keep table order
        });
        for (int r = 0; r < rem && r < static_cast<int>(k); ++r) ++counts[order[r]];
        double dev = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            dev = std::max(dev, std::abs(static_cast<double>(counts[i]) / den -
                                         weighted_witnesses[i].second));
        }
        if (dev < best_dev - 1e-15) {  // strictly better only: smaller D wins ties
            best_dev = dev;
            best_den = den;
            best_counts = counts;
        }
    }
    if (best_dev > kAttackDeviationCap) {
        throw std::runtime_error("no rational occupancy approximation within 1e-3 deviation");
    }

    AttackPlan plan;
    plan.period = best_den * h;
    plan.schedule.reserve(static_cast<std::size_t>(plan.period));
    for (std::size_t i = 0; i < k; ++i) {
        for (int r = 0; r < best_counts[i]; ++r) {
            plan.schedule.insert(plan.schedule.end(), weighted_witnesses[i].first.begin(),
                                 weighted_witnesses[i].first.end());
        }
    }
    plan.mode_frequencies.assign(system.mode_count(), 0.0);
    for (int s : plan.schedule) plan.mode_frequencies[s - 1] += 1.0 / plan.period;
    plan.monodromy_radius = monodromy_check(system, plan.schedule).radius;
    return plan;
}

}  // namespace

AttackPlan extract_attack(const SwitchedSystem& system, const GainTables& tables,
                          const LpSolution& lp2_solution, int max_denominator) {
    require(lp2_solution.status == LpStatus::Optimal, "attack extraction needs an optimal solution");
    require(lp2_solution.x.size() == tables.by_composition.size(),
            "solution does not match the composition table");
    std::vector<std::pair<ModeSequence, double>> weighted;
    for (std::size_t zi = 0; zi < tables.by_composition.size(); ++zi) {
        weighted.emplace_back(tables.by_composition[zi].witness, lp2_solution.x[zi]);
    }
    return attack_from_weights(system, tables.h, weighted, max_denominator);
}

AttackPlan extract_attack(const SwitchedSystem& system, const StabilityCertificate& certificate,
                          int max_denominator) {
    return attack_from_weights(system, certificate.h, certificate.witness_schedule,
                               max_denominator);
}

EquivalenceReport equivalence_suite(const SwitchedSystem& system, const ActivationBounds& bounds,
                                    const Norm& norm, double epsilon, int h_max, int workers) {
    EquivalenceReport report;
    for (int h = 1; h <= h_max; ++h) {
        const GainTables tables = build_gain_tables(system, h, norm, epsilon, true, workers);
        const LpModel lp1 = build_lp1(tables, bounds);
        const LpModel lp2 = build_lp2(tables, bounds);
        GrowthResult r1, r2;
        r1.solution = solve(lp1);
        r2.solution = solve(lp2);

        EquivalenceEntry e;
        e.h = h;
        e.ok = r1.solution.status == LpStatus::Optimal && r2.solution.status == LpStatus::Optimal;
        if (e.ok) {
            e.lp1_value = r1.solution.objective_value;
            e.lp2_value = r2.solution.objective_value;
            double recovered = 0.0;
            for (const auto& [q, w] : recover_lp1_solution(r2.solution, tables)) {
                recovered += w * (*tables.by_sequence)[sequence_rank(q, tables.mode_count)];
            }
            e.recovered_value = recovered;
            const double tol = kEquivTol * (1.0 + std::abs(e.lp1_value));
            e.ok = std::abs(e.lp1_value - e.lp2_value) <= tol &&
                   std::abs(e.recovered_value - e.lp1_value) <= tol;
        }
        report.all_ok = report.all_ok && e.ok;
        report.entries.push_back(e);
    }
    return report;
}

}  // namespace switched
