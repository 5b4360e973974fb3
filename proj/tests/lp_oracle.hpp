#pragma once

// Test-only reference solver: enumerates candidate vertices from every
// combination of n active constraints (row sides and variable bounds),
// independent of the simplex implementation.

#include <cmath>
#include <optional>
#include <vector>

#include "switched/lp.hpp"
#include "switched/matrix.hpp"

namespace switched::testing {

struct BruteForceResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

inline BruteForceResult brute_force_lp(const LpModel& model) {
    const int n = model.num_vars();
    const int m = model.num_rows();

    struct Constraint {
        std::vector<double> coeffs;
        double rhs;
    };
    std::vector<Constraint> pool;
    for (int i = 0; i < m; ++i) {
        if (std::isfinite(model.rows[i].lo)) pool.push_back({model.rows[i].coeffs, model.rows[i].lo});
        if (std::isfinite(model.rows[i].hi) && model.rows[i].hi != model.rows[i].lo) {
            pool.push_back({model.rows[i].coeffs, model.rows[i].hi});
        }
    }
    for (int j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        const auto [lo, hi] = model.bounds_of(j);
        if (std::isfinite(lo)) pool.push_back({e, lo});
        if (std::isfinite(hi) && hi != lo) pool.push_back({e, hi});
    }

    BruteForceResult best;
    const int p = static_cast<int>(pool.size());
    std::vector<int> pick(n);
    auto feasible_point = [&](const std::vector<double>& x) {
        for (int j = 0; j < n; ++j) {
            const auto [lo, hi] = model.bounds_of(j);
            if (x[j] < lo - 1e-9 || x[j] > hi + 1e-9) return false;
        }
        for (int i = 0; i < m; ++i) {
            double a = 0.0;
            for (int j = 0; j < n; ++j) a += model.rows[i].coeffs[j] * x[j];
            if (a < model.rows[i].lo - 1e-9 || a > model.rows[i].hi + 1e-9) return false;
        }
        return true;
    };
    auto consider = [&](const std::vector<double>& x) {
        if (!feasible_point(x)) return;
        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += model.objective[j] * x[j];
        if (!best.feasible || obj > best.objective) {
            best.feasible = true;
            best.objective = obj;
            best.x = x;
        }
    };
    auto rec = [&](auto&& self, int start, int depth) -> void {
        if (depth == n) {
            Mat a(n, n);
            Mat b(n, 1);
            for (int r = 0; r < n; ++r) {
                for (int j = 0; j < n; ++j) a(r, j) = pool[pick[r]].coeffs[j];
                b(r, 0) = pool[pick[r]].rhs;
            }
            try {
                const Mat x = solve_linear(a, b);
                std::vector<double> point(n);
                for (int j = 0; j < n; ++j) point[j] = x(j, 0);
                consider(point);
            } catch (const std::exception&) {
                // singular active set: not a vertex
            }
            return;
        }
        for (int c = start; c < p - (n - depth - 1); ++c) {
            pick[depth] = c;
            self(self, c + 1, depth + 1);
        }
    };
    if (p >= n) rec(rec, 0, 0);
    return best;
}

}  // namespace switched::testing
