#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "switched/lifting.hpp"
#include "switched/matrix.hpp"
#include "switched/system.hpp"

namespace switched {

/// Mode signal produced by projecting an irreducible finite-state Markov
/// chain through a partition of its state space. The mode signal itself is
/// generally not Markov.
class HiddenMarkovSpec {
public:
    /// transition: row-stochastic (rows sum to 1 within 1e-12);
    /// partition[s] lists the 0-based states mapped to mode s+1 and the
    /// cells must cover every state exactly once. Irreducibility is checked
    /// where required (limit_oracle, chain_period).
    HiddenMarkovSpec(Mat transition, int initial_state,
                     std::vector<std::vector<int>> partition);

    int state_count() const { return transition_.rows(); }
    int mode_count() const { return static_cast<int>(partition_.size()); }
    int initial_state() const { return initial_state_; }
    const Mat& transition() const { return transition_; }
    const std::vector<std::vector<int>>& partition() const { return partition_; }
    int mode_of(int state) const { return mode_of_[static_cast<std::size_t>(state)]; }

private:
    Mat transition_;
    int initial_state_;
    std::vector<std::vector<int>> partition_;
    std::vector<int> mode_of_;
};

std::vector<int> sample_signal(const HiddenMarkovSpec& spec, long steps, std::uint64_t seed);
std::vector<int> sample_signal_periodic(const std::vector<int>& pattern, long steps);

/// gcd of return-time residues over any breadth-first layering; the common
/// period of every state of an irreducible chain.
int chain_period(const HiddenMarkovSpec& spec);

/// Exact long-run frequencies of the length-h blocks of the mode signal,
/// from the invariant distribution of the lifted path chain over blocks of
/// length period*h.
struct LimitTable {
    int h = 0;
    int period = 0;        // chain period tau
    int block_length = 0;  // tau * h
    std::size_t lifted_state_count = 0;
    std::vector<std::pair<ModeSequence, double>> entries;  // nonzero limits, lex order

    double at(const ModeSequence& q) const;  // zero when absent
};

/// Rejects reducible chains; the reachable lifted path space is guarded at
/// 2*10^5 states.
LimitTable limit_oracle(const HiddenMarkovSpec& spec, int h);

struct FrequencyStats {
    long steps = 0;
    int h = 1;
    std::vector<double> per_mode;                           // averages over all steps
    std::vector<std::pair<ModeSequence, double>> per_sequence;  // disjoint h-blocks from 0
    // min/max of the per-mode running averages over the last 10% of steps;
    // heuristic liminf/limsup evidence only.
    std::vector<double> tail_min, tail_max;
};

FrequencyStats empirical_frequencies(const std::vector<int>& signal, int mode_count, int h);

struct Assumption1Report {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Checks the empirical per-mode averages and the per-sequence aggregation
/// against the bounds, within the given tolerance.
Assumption1Report check_assumption1(const FrequencyStats& stats, const ActivationBounds& bounds,
                                    double tolerance);

}  // namespace switched
