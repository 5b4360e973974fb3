#include "switched/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace switched {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kVerifyTol = 1e-7;
constexpr long kIterationCap = 1000000;

std::string describe(const char* what, int idx, double amount) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s %d by %.3e", what, idx, amount);
    return buf;
}

// Columns: [0, n) structural, [n, n+m) logical (one per row, coefficient -1),
// [n+m, n+m+na) artificial (+/-1 in its row). The equality system is
// A x - s + E a = 0 with all variables box-bounded.
class Simplex {
public:
    explicit Simplex(const LpModel& model)
        : model_(model), n_(model.num_vars()), m_(model.num_rows()) {}

    LpSolution run() {
        init();
        LpSolution out;

        // Phase 1: maximize -(sum of artificials).
        if (num_artificials_ > 0) {
            std::vector<double> phase1_cost(total_, 0.0);
            for (int k = n_ + m_; k < total_; ++k) phase1_cost[k] = -1.0;
            const LpStatus st = iterate(phase1_cost, /*phase1=*/true);
            if (st == LpStatus::IterationLimit) return finish(out, st);
            double infeasibility = 0.0;
            for (int k = n_ + m_; k < total_; ++k) infeasibility += std::max(0.0, x_[k]);
            if (infeasibility > kFeasTol * static_cast<double>(std::max(1, m_))) {
                return finish(out, LpStatus::Infeasible);
            }
            for (int k = n_ + m_; k < total_; ++k) {  // pin artificials at zero
                lb_[k] = ub_[k] = 0.0;
                x_[k] = 0.0;
            }
        }

        std::vector<double> cost(total_, 0.0);
        for (int j = 0; j < n_; ++j) cost[j] = model_.objective[j];
        const LpStatus st = iterate(cost, /*phase1=*/false);
        return finish(out, st);
    }

private:
    void init() {
        total_ = n_ + m_;
        lb_.resize(total_);
        ub_.resize(total_);
        x_.assign(total_, 0.0);
        for (int j = 0; j < n_; ++j) {
            const auto [lo, hi] = model_.bounds_of(j);
            lb_[j] = lo;
            ub_[j] = hi;
            x_[j] = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
        }
        for (int i = 0; i < m_; ++i) {
            lb_[n_ + i] = model_.rows[i].lo;
            ub_[n_ + i] = model_.rows[i].hi;
        }

        basis_.clear();
        in_basis_.assign(total_, false);
        art_row_.clear();
        art_sign_.clear();
        for (int i = 0; i < m_; ++i) {
            double r = 0.0;
            for (int j = 0; j < n_; ++j) r += model_.rows[i].coeffs[j] * x_[j];
            const double lo = model_.rows[i].lo, hi = model_.rows[i].hi;
            if (r > hi + kFeasTol) {
                x_[n_ + i] = hi;
                art_row_.push_back(i);
                art_sign_.push_back(-1.0);  // r - hi - a = 0
            } else if (r < lo - kFeasTol) {
                x_[n_ + i] = lo;
                art_row_.push_back(i);
                art_sign_.push_back(+1.0);  // r - lo + a = 0
            } else {
                x_[n_ + i] = r;
                basis_.push_back(n_ + i);
                in_basis_[n_ + i] = true;
            }
        }
        num_artificials_ = static_cast<int>(art_row_.size());
        total_ += num_artificials_;
        lb_.resize(total_, 0.0);
        ub_.resize(total_, lp_inf);
        x_.resize(total_, 0.0);
        in_basis_.resize(total_, false);
        for (int k = 0; k < num_artificials_; ++k) {
            const int i = art_row_[k];
            const int col = n_ + m_ + k;
            const double resid = row_value(i) - x_[n_ + i];
            x_[col] = art_sign_[k] > 0 ? -resid : resid;  // positive by construction
            basis_.push_back(col);
            in_basis_[col] = true;
        }
        // Keep basis ordered by row for a well-conditioned start.
        std::sort(basis_.begin(), basis_.end(), [&](int a, int b) {
            return basis_row(a) < basis_row(b);
        });
        iterations_ = 0;
    }

    int basis_row(int col) const {
        if (col >= n_ + m_) return art_row_[col - n_ - m_];
        return col - n_;  // logicals only enter the initial basis
    }

    double row_value(int i) const {
        double r = 0.0;
        for (int j = 0; j < n_; ++j) r += model_.rows[i].coeffs[j] * x_[j];
        return r;
    }

    double coeff(int i, int col) const {
        if (col < n_) return model_.rows[i].coeffs[col];
        if (col < n_ + m_) return col - n_ == i ? -1.0 : 0.0;
        return art_row_[col - n_ - m_] == i ? art_sign_[col - n_ - m_] : 0.0;
    }

    // Dense inverse of the current basis matrix (m <= a handful of rows).
    bool refactorize() {
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int p = 0; p < m_; ++p)
            for (int i = 0; i < m_; ++i) b[static_cast<std::size_t>(i) * m_ + p] = coeff(i, basis_[p]);
        for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
        for (int k = 0; k < m_; ++k) {
            int piv = k;
            for (int i = k + 1; i < m_; ++i)
                if (std::abs(b[static_cast<std::size_t>(i) * m_ + k]) >
                    std::abs(b[static_cast<std::size_t>(piv) * m_ + k]))
                    piv = i;
            if (std::abs(b[static_cast<std::size_t>(piv) * m_ + k]) < 1e-13) return false;
            if (piv != k)
                for (int j = 0; j < m_; ++j) {
                    std::swap(b[static_cast<std::size_t>(k) * m_ + j], b[static_cast<std::size_t>(piv) * m_ + j]);
                    std::swap(binv_[static_cast<std::size_t>(k) * m_ + j], binv_[static_cast<std::size_t>(piv) * m_ + j]);
                }
            const double d = b[static_cast<std::size_t>(k) * m_ + k];
            for (int j = 0; j < m_; ++j) {
                b[static_cast<std::size_t>(k) * m_ + j] /= d;
                binv_[static_cast<std::size_t>(k) * m_ + j] /= d;
            }
            for (int i = 0; i < m_; ++i) {
                if (i == k) continue;
                const double f = b[static_cast<std::size_t>(i) * m_ + k];
                if (f == 0.0) continue;
                for (int j = 0; j < m_; ++j) {
                    b[static_cast<std::size_t>(i) * m_ + j] -= f * b[static_cast<std::size_t>(k) * m_ + j];
                    binv_[static_cast<std::size_t>(i) * m_ + j] -= f * binv_[static_cast<std::size_t>(k) * m_ + j];
                }
            }
        }
        return true;
    }

    // Recompute basic values from the nonbasic ones: x_B = -B^{-1} N x_N.
    void recompute_basics() {
        std::vector<double> rhs(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double r = 0.0;
            for (int col = 0; col < total_; ++col) {
                if (in_basis_[col] || x_[col] == 0.0) continue;
                r += coeff(i, col) * x_[col];
            }
            rhs[i] = -r;
        }
        for (int p = 0; p < m_; ++p) {
            double v = 0.0;
            for (int i = 0; i < m_; ++i) v += binv_[static_cast<std::size_t>(p) * m_ + i] * rhs[i];
            x_[basis_[p]] = v;
        }
    }

    LpStatus iterate(const std::vector<double>& cost, bool phase1) {
        const long bland_after = 10L * (total_ + m_);
        refactorize();
        recompute_basics();
        for (;;) {
            if (iterations_ >= kIterationCap) return LpStatus::IterationLimit;
            ++iterations_;
            const bool bland = iterations_ > bland_after;

            // y = c_B^T B^{-1}
            std::vector<double> y(m_, 0.0);
            for (int i = 0; i < m_; ++i) {
                double v = 0.0;
                for (int p = 0; p < m_; ++p) v += cost[basis_[p]] * binv_[static_cast<std::size_t>(p) * m_ + i];
                y[i] = v;
            }

            // Pricing: most attractive reduced cost (Dantzig) or smallest
            // eligible index (Bland).
            int enter = -1;
            double best = 0.0;
            int enter_dir = 0;
            for (int col = 0; col < total_; ++col) {
                if (in_basis_[col]) continue;
                if (ub_[col] - lb_[col] <= 0.0) continue;  // fixed
                double d = cost[col];
                if (col < n_) {
                    for (int i = 0; i < m_; ++i) d -= y[i] * model_.rows[i].coeffs[col];
                } else if (col < n_ + m_) {
                    d += y[col - n_];
                } else {
                    d -= y[art_row_[col - n_ - m_]] * art_sign_[col - n_ - m_];
                }
                const bool at_lb = std::isfinite(lb_[col]) && x_[col] <= lb_[col] + kFeasTol;
                const bool at_ub = std::isfinite(ub_[col]) && x_[col] >= ub_[col] - kFeasTol;
                int dir = 0;
                if (at_lb && d > kOptTol) dir = +1;
                else if (at_ub && d < -kOptTol) dir = -1;
                else if (!at_lb && !at_ub) {  // free or mid-range nonbasic
                    if (d > kOptTol) dir = +1;
                    else if (d < -kOptTol) dir = -1;
                }
                if (dir == 0) continue;
                if (bland) { enter = col; enter_dir = dir; break; }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    enter = col;
                    enter_dir = dir;
                }
            }
            if (enter < 0) return LpStatus::Optimal;

            // w = B^{-1} A_enter
            std::vector<double> acol(m_);
            for (int i = 0; i < m_; ++i) acol[i] = coeff(i, enter);
            std::vector<double> w(m_, 0.0);
            for (int p = 0; p < m_; ++p) {
                double v = 0.0;
                for (int i = 0; i < m_; ++i) v += binv_[static_cast<std::size_t>(p) * m_ + i] * acol[i];
                w[p] = v;
            }

            // Ratio test. Basic p moves at rate -enter_dir * w_p.
            double t_limit = lp_inf;
            if (std::isfinite(lb_[enter]) && std::isfinite(ub_[enter]))
                t_limit = ub_[enter] - lb_[enter];
            int leave_pos = -1;       // -1: bound flip
            double leave_to = 0.0;    // bound the leaving variable hits
            for (int p = 0; p < m_; ++p) {
                const double rate = -enter_dir * w[p];
                const int col = basis_[p];
                double t;
                double hit;
                if (rate > kPivotTol) {
                    if (!std::isfinite(ub_[col])) continue;
                    t = (ub_[col] - x_[col]) / rate;
                    hit = ub_[col];
                } else if (rate < -kPivotTol) {
                    if (!std::isfinite(lb_[col])) continue;
                    t = (x_[col] - lb_[col]) / (-rate);
                    hit = lb_[col];
                } else {
                    continue;
                }
                t = std::max(t, 0.0);
                constexpr double kTie = 1e-12;
                if (t < t_limit - kTie) {
                    t_limit = t;
                    leave_pos = p;
                    leave_to = hit;
                } else if (t <= t_limit + kTie && leave_pos >= 0) {
                    // Tied blockers: largest pivot for stability, smallest
                    // index under Bland.
                    const bool prefer = bland ? col < basis_[leave_pos]
                                              : std::abs(w[p]) > std::abs(w[leave_pos]);
                    if (prefer) {
                        t_limit = std::min(t_limit, t);
                        leave_pos = p;
                        leave_to = hit;
                    }
                }
            }
            if (!std::isfinite(t_limit)) {
                return phase1 ? LpStatus::Infeasible : LpStatus::Unbounded;
            }

            // Apply the step.
            x_[enter] += enter_dir * t_limit;
            for (int p = 0; p < m_; ++p) x_[basis_[p]] -= enter_dir * w[p] * t_limit;
            if (leave_pos < 0) continue;  // entering flipped to its other bound

            const int leave_col = basis_[leave_pos];
            x_[leave_col] = leave_to;  // snap to the bound it hit
            basis_[leave_pos] = enter;
            in_basis_[enter] = true;
            in_basis_[leave_col] = false;
            if (!refactorize()) {
                // Numerically singular basis: undo by reverting roles.
                basis_[leave_pos] = leave_col;
                in_basis_[enter] = false;
                in_basis_[leave_col] = true;
                refactorize();
                recompute_basics();
                continue;
            }
            if (iterations_ % 64 == 0) recompute_basics();
        }
    }

    LpSolution finish(LpSolution& out, LpStatus st) {
        out.status = st;
        out.iterations = iterations_;
        out.x.assign(model_.num_vars(), 0.0);
        out.duals.assign(m_, 0.0);
        out.reduced_costs.assign(model_.num_vars(), 0.0);
        if (st != LpStatus::Optimal) return out;

        refactorize();
        recompute_basics();
        for (int j = 0; j < n_; ++j) {
            double v = x_[j];
            v = std::min(v, ub_[j]);
            v = std::max(v, lb_[j]);
            out.x[j] = v;
        }
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += model_.objective[j] * out.x[j];
        out.objective_value = obj;

        std::vector<double> y(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double v = 0.0;
            for (int p = 0; p < m_; ++p) {
                const int col = basis_[p];
                const double cb = col < n_ ? model_.objective[col] : 0.0;
                v += cb * binv_[static_cast<std::size_t>(p) * m_ + i];
            }
            y[i] = v;
        }
        out.duals = y;
        for (int j = 0; j < n_; ++j) {
            double d = model_.objective[j];
            for (int i = 0; i < m_; ++i) d -= y[i] * model_.rows[i].coeffs[j];
            out.reduced_costs[j] = in_basis_[j] ? 0.0 : d;
        }
        return out;
    }

    const LpModel& model_;
    const int n_;
    const int m_;
    int total_ = 0;
    int num_artificials_ = 0;
    std::vector<double> lb_, ub_, x_;
    std::vector<int> basis_;
    std::vector<bool> in_basis_;
    std::vector<int> art_row_;
    std::vector<double> art_sign_;
    std::vector<double> binv_;
    long iterations_ = 0;
};

}  // namespace

void LpModel::validate() const {
    const int n = num_vars();
    for (const LpRow& r : rows) {
        if (static_cast<int>(r.coeffs.size()) != n)
            throw std::invalid_argument("row coefficient count mismatch");
        for (double v : r.coeffs)
            if (!std::isfinite(v)) throw std::invalid_argument("row coefficient is not finite");
        if (std::isnan(r.lo) || std::isnan(r.hi) || r.lo > r.hi)
            throw std::invalid_argument("row range must satisfy lo <= hi");
    }
    for (double v : objective)
        if (!std::isfinite(v)) throw std::invalid_argument("objective coefficient is not finite");
    for (const auto& [lo, hi] : var_bounds) {
        if (std::isnan(lo) || std::isnan(hi) || lo > hi)
            throw std::invalid_argument("variable bounds must satisfy lb <= ub");
    }
}

LpSolution solve(const LpModel& model) {
    model.validate();
    Simplex s(model);
    return s.run();
}

CertificateReport verify_certificate(const LpModel& model, const LpSolution& solution) {
    CertificateReport rep;
    if (solution.status != LpStatus::Optimal) {
        rep.violations.push_back("solution status is not Optimal");
        return rep;
    }
    const int n = model.num_vars(), m = model.num_rows();

    for (int j = 0; j < n; ++j) {
        const auto [lo, hi] = model.bounds_of(j);
        const double below = lo - solution.x[j], above = solution.x[j] - hi;
        const double v = std::max(below, above);
        if (v > rep.primal_infeasibility) rep.primal_infeasibility = v;
        if (v > kVerifyTol) rep.violations.push_back(describe("variable bound violated at", j, v));
    }
    std::vector<double> activity(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double a = 0.0;
        for (int j = 0; j < n; ++j) a += model.rows[i].coeffs[j] * solution.x[j];
        activity[i] = a;
        const double v = std::max(model.rows[i].lo - a, a - model.rows[i].hi);
        if (v > rep.primal_infeasibility) rep.primal_infeasibility = v;
        if (v > kVerifyTol) rep.violations.push_back(describe("row violated at", i, v));
    }

    // Reduced-cost sign conditions for a maximization.
    for (int j = 0; j < n; ++j) {
        const auto [lo, hi] = model.bounds_of(j);
        if (lo >= hi) continue;  // fixed variable: any reduced cost is valid
        const double d = solution.reduced_costs[j];
        const bool at_lb = std::isfinite(lo) && solution.x[j] <= lo + kVerifyTol;
        const bool at_ub = std::isfinite(hi) && solution.x[j] >= hi - kVerifyTol;
        double v = 0.0;
        if (at_lb && at_ub) {
            v = 0.0;
        } else if (at_lb) {
            v = d;  // increasing x_j must not improve
        } else if (at_ub) {
            v = -d;
        } else {
            v = std::abs(d);
        }
        if (v > rep.dual_infeasibility) rep.dual_infeasibility = v;
        if (v > kVerifyTol) rep.violations.push_back(describe("reduced cost sign at variable", j, v));
    }
    for (int i = 0; i < m; ++i) {
        const double y = solution.duals[i];
        const bool active_hi = std::isfinite(model.rows[i].hi) && activity[i] >= model.rows[i].hi - kVerifyTol;
        const bool active_lo = std::isfinite(model.rows[i].lo) && activity[i] <= model.rows[i].lo + kVerifyTol;
        double v = 0.0;
        if (y > kVerifyTol && !active_hi) v = y;
        if (y < -kVerifyTol && !active_lo) v = -y;
        if (v > rep.complementarity) rep.complementarity = v;
        if (v > kVerifyTol) rep.violations.push_back(describe("dual sign/slackness at row", i, v));
    }

    double dual_obj = 0.0;
    bool dual_finite = true;
    for (int i = 0; i < m; ++i) {
        const double y = solution.duals[i];
        if (std::abs(y) <= kVerifyTol) continue;
        const double b = y > 0.0 ? model.rows[i].hi : model.rows[i].lo;
        if (!std::isfinite(b)) { dual_finite = false; break; }
        dual_obj += y * b;
    }
    for (int j = 0; j < n && dual_finite; ++j) {
        const double d = solution.reduced_costs[j];
        if (std::abs(d) <= kVerifyTol) continue;
        const auto [lo, hi] = model.bounds_of(j);
        const double b = d > 0.0 ? hi : lo;
        if (!std::isfinite(b)) { dual_finite = false; break; }
        dual_obj += d * b;
    }
    if (!dual_finite) {
        rep.duality_gap = lp_inf;
        rep.violations.push_back("dual objective is unbounded for the reported multipliers");
    } else {
        rep.duality_gap = std::abs(solution.objective_value - dual_obj);
        if (rep.duality_gap > kVerifyTol * (1.0 + std::abs(solution.objective_value))) {
            rep.violations.push_back(describe("duality gap", 0, rep.duality_gap));
        }
    }

    rep.ok = rep.violations.empty();
    return rep;
}

}  // namespace switched
