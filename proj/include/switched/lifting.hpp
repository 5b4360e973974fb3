#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "switched/matrix.hpp"
#include "switched/system.hpp"

namespace switched {

/// Length-h run of mode ids, entries in {1..M}. q[0] is the first mode
/// applied; the product over the run multiplies later modes on the left.
using ModeSequence = std::vector<int>;

/// Per-mode occurrence counts of a length-h sequence; counts sum to h.
using Composition = std::vector<int>;

/// Ordered product A_{q_h} * ... * A_{q_1} (last sequence entry leftmost).
Mat lifted_product(const SwitchedSystem& system, const ModeSequence& q);

/// ln(max(||product over q||, epsilon)); epsilon in (0,1) keeps the
/// coefficient finite when the product vanishes.
double log_gain(const SwitchedSystem& system, const ModeSequence& q, const Norm& norm,
                double epsilon);

Composition count_vector(const ModeSequence& q, int mode_count);

/// All count vectors summing to h over mode_count modes, lexicographic.
std::vector<Composition> enumerate_compositions(int h, int mode_count);

struct VariableCounts {
    unsigned __int128 full;     // M^h
    unsigned __int128 reduced;  // binomial(h+M-1, M-1)
};
/// Exact 128-bit arithmetic; throws std::overflow_error if M^h does not fit.
VariableCounts variable_counts(int h, int mode_count);

std::string u128_to_string(unsigned __int128 v);

/// Lexicographic rank of q among all M^h sequences (q[0] most significant).
std::size_t sequence_rank(const ModeSequence& q, int mode_count);

struct GainEntry {
    Composition z;
    double gain;           // max log gain over sequences with count vector z
    ModeSequence witness;  // lexicographically smallest attaining sequence
};

/// Worst log gains per composition (and optionally per sequence) for one
/// (system, h, norm, epsilon) tuple. Immutable once built.
struct GainTables {
    int h = 0;
    int mode_count = 0;
    Norm norm;
    double epsilon = 0.0;
    std::vector<GainEntry> by_composition;          // lexicographic z order
    std::optional<std::vector<double>> by_sequence; // indexed by sequence_rank

    std::size_t composition_rank(const Composition& z) const;
    const GainEntry& entry(const Composition& z) const;
};

/// Depth-first traversal of the M-ary sequence tree carrying the running
/// prefix product, split at a fixed depth into subtrees processed by a
/// worker pool and merged in subtree order, so results are identical for
/// any worker count. materialize_sequences requires M^h <= 2^24.
/// workers == 0 picks the hardware concurrency.
GainTables build_gain_tables(const SwitchedSystem& system, int h, const Norm& norm,
                             double epsilon, bool materialize_sequences = false,
                             int workers = 0);

}  // namespace switched
