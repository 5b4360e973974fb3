#pragma once

#include <utility>
#include <vector>

#include "switched/lifting.hpp"
#include "switched/lp.hpp"
#include "switched/matrix.hpp"
#include "switched/system.hpp"

namespace switched {

enum class Verdict { CertifiedStable, Inconclusive };

/// Result of the worst-case growth analysis at one (h, norm, epsilon).
/// CertifiedStable iff the optimal objective is strictly below -1e-9; a
/// nonnegative objective never proves instability.
struct StabilityCertificate {
    int h = 0;
    Norm norm;
    double epsilon = 0.0;
    double objective = 0.0;  // worst-case average log gain per h-step block
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::pair<Composition, double>> worst_occupancy;       // all z, lex order
    std::vector<std::pair<ModeSequence, double>> witness_schedule;     // nonzero weights
};

enum class LpChoice { Lp1, Lp2 };

/// One variable per length-h sequence; requires tables.by_sequence.
LpModel build_lp1(const GainTables& tables, const ActivationBounds& bounds);

/// One variable per composition.
LpModel build_lp2(const GainTables& tables, const ActivationBounds& bounds);

struct GrowthResult {
    double value = 0.0;
    LpSolution solution;
};

/// Builds the gain tables and the chosen LP, solves it, and returns the
/// optimal objective. Both choices agree within 1e-9; Lp1 is restricted to
/// M^h <= 2^24 and exists for cross-validation.
GrowthResult worst_case_growth(const SwitchedSystem& system, const ActivationBounds& bounds,
                               int h, const Norm& norm, double epsilon, LpChoice choice,
                               int workers = 0);

StabilityCertificate certify(const SwitchedSystem& system, const ActivationBounds& bounds,
                             int h, const Norm& norm = Norm::spectral(),
                             double epsilon = 1e-24, int workers = 0);

/// Explicit feasible occupancy supported on the constant sequences
/// (s,...,s): each mode gets its lower bound plus a share of the remaining
/// mass proportional to its slack. Satisfies the constraints exactly for
/// every valid ActivationBounds.
std::vector<std::pair<ModeSequence, double>> constant_sequence_feasible_point(
    const ActivationBounds& bounds, int h);

/// Maps a reduced-LP optimum back to a full-LP optimum by loading each
/// composition's weight onto its witness sequence.
std::vector<std::pair<ModeSequence, double>> recover_lp1_solution(const LpSolution& lp2_solution,
                                                                  const GainTables& tables);

struct AttackPlan {
    int period = 0;
    std::vector<int> schedule;  // mode ids, length == period
    std::vector<double> mode_frequencies;
    double monodromy_radius = 0.0;
};

/// Rounds the occupancy weights to k_z/D with a common denominator
/// D <= max_denominator (largest-remainder rounding, smallest max deviation,
/// smaller D on ties) and emits the periodic schedule that repeats each
/// composition's witness k_z times. Throws if no denominator gets within
/// 1e-3 of the weights.
AttackPlan extract_attack(const SwitchedSystem& system, const GainTables& tables,
                          const LpSolution& lp2_solution, int max_denominator);
AttackPlan extract_attack(const SwitchedSystem& system, const StabilityCertificate& certificate,
                          int max_denominator);

struct MonodromyResult {
    double radius = 0.0;
    bool unstable = false;  // radius > 1 + 1e-9
};

/// Spectral radius of the ordered product over one period of the schedule.
MonodromyResult monodromy_check(const SwitchedSystem& system, const std::vector<int>& schedule);

struct EquivalenceEntry {
    int h = 0;
    double lp1_value = 0.0;
    double lp2_value = 0.0;
    double recovered_value = 0.0;
    bool ok = false;
};

struct EquivalenceReport {
    std::vector<EquivalenceEntry> entries;
    bool all_ok = true;
};

/// Checks |J_h - J'_h| <= 1e-9 (1 + |J_h|) for h = 1..h_max and that the
/// recovered full-LP point reproduces the optimum.
EquivalenceReport equivalence_suite(const SwitchedSystem& system, const ActivationBounds& bounds,
                                    const Norm& norm, double epsilon, int h_max,
                                    int workers = 0);

}  // namespace switched
