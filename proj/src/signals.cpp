#include "switched/signals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>

namespace switched {

namespace {

constexpr std::size_t kLiftedStateGuard = 200000;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// 53-bit uniform in [0,1); bit-stable across standard library versions.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::vector<int>> positive_successors(const Mat& p) {
    std::vector<std::vector<int>> adj(p.rows());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j)
            if (p(i, j) > 0.0) adj[i].push_back(j);
    return adj;
}

bool reaches_all(const std::vector<std::vector<int>>& adj, int start) {
    std::vector<bool> seen(adj.size(), false);
    std::queue<int> fifo;
    fifo.push(start);
    seen[start] = true;
    std::size_t count = 1;
    while (!fifo.empty()) {
        const int u = fifo.front();
        fifo.pop();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                fifo.push(v);
            }
    }
    return count == adj.size();
}

void require_irreducible(const HiddenMarkovSpec& spec) {
    const auto adj = positive_successors(spec.transition());
    std::vector<std::vector<int>> radj(adj.size());
    for (std::size_t u = 0; u < adj.size(); ++u)
        for (int v : adj[u]) radj[v].push_back(static_cast<int>(u));
    if (!reaches_all(adj, spec.initial_state()) || !reaches_all(radj, spec.initial_state())) {
        throw std::invalid_argument("chain must be irreducible");
    }
}

}  // namespace

HiddenMarkovSpec::HiddenMarkovSpec(Mat transition, int initial_state,
                                   std::vector<std::vector<int>> partition)
    : transition_(std::move(transition)),
      initial_state_(initial_state),
      partition_(std::move(partition)) {
    require(transition_.is_square(), "transition matrix must be square");
    const int n = transition_.rows();
    require(initial_state_ >= 0 && initial_state_ < n, "initial state out of range");
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            require(transition_(i, j) >= 0.0, "transition probabilities must be nonnegative");
            row += transition_(i, j);
        }
        require(std::abs(row - 1.0) <= 1e-12, "transition rows must sum to 1");
    }
    require(!partition_.empty(), "partition must have at least one cell");
    mode_of_.assign(n, 0);
    std::vector<int> covered(n, 0);
    for (std::size_t s = 0; s < partition_.size(); ++s) {
        for (int state : partition_[s]) {
            require(state >= 0 && state < n, "partition state out of range");
            ++covered[state];
            mode_of_[state] = static_cast<int>(s) + 1;
        }
    }
    for (int c : covered) require(c == 1, "partition must cover every state exactly once");
}

std::vector<int> sample_signal(const HiddenMarkovSpec& spec, long steps, std::uint64_t seed) {
    require(steps >= 1, "steps must be positive");
    std::mt19937_64 rng(seed);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(steps));
    int state = spec.initial_state();
    const Mat& p = spec.transition();
    for (long t = 0; t < steps; ++t) {
        out.push_back(spec.mode_of(state));
        const double u = next_uniform(rng);
        double acc = 0.0;
        int next = p.cols() - 1;  // inverse CDF on the current row
        for (int j = 0; j < p.cols(); ++j) {
            acc += p(state, j);
            if (u < acc) {
                next = j;
                break;
            }
        }
        state = next;
    }
    return out;
}

std::vector<int> sample_signal_periodic(const std::vector<int>& pattern, long steps) {
    require(!pattern.empty(), "pattern must be nonempty");
    require(steps >= 1, "steps must be positive");
    std::vector<int> out(static_cast<std::size_t>(steps));
    for (long t = 0; t < steps; ++t) out[t] = pattern[t % pattern.size()];
    return out;
}

int chain_period(const HiddenMarkovSpec& spec) {
    require_irreducible(spec);
    const auto adj = positive_successors(spec.transition());
    std::vector<int> layer(adj.size(), -1);
    std::queue<int> fifo;
    fifo.push(spec.initial_state());
    layer[spec.initial_state()] = 0;
    while (!fifo.empty()) {
        const int u = fifo.front();
        fifo.pop();
        for (int v : adj[u])
            if (layer[v] < 0) {
                layer[v] = layer[u] + 1;
                fifo.push(v);
            }
    }
    long long g = 0;
    for (std::size_t u = 0; u < adj.size(); ++u)
        for (int v : adj[u]) g = std::gcd(g, static_cast<long long>(layer[u]) + 1 - layer[v]);
    return static_cast<int>(g == 0 ? 1 : std::llabs(g));
}

double LimitTable::at(const ModeSequence& q) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), q,
                                     [](const auto& e, const ModeSequence& key) { return e.first < key; });
    return it != entries.end() && it->first == q ? it->second : 0.0;
}

LimitTable limit_oracle(const HiddenMarkovSpec& spec, int h) {
    require(h >= 1, "h must be positive");
    require_irreducible(spec);
    const int n = spec.state_count();
    const int tau = chain_period(spec);
    const int d = tau * h;
    const auto adj = positive_successors(spec.transition());

    // Reachability in exactly d steps, then its transitive closure from the
    // initial state: the block starts of the lifted chain.
    std::vector<std::vector<bool>> step(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) step[i][i] = true;
    for (int k = 0; k < d; ++k) {
        std::vector<std::vector<bool>> nxt(n, std::vector<bool>(n, false));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (step[i][j])
                    for (int v : adj[j]) nxt[i][v] = true;
        step = std::move(nxt);
    }
    std::vector<bool> start_state(n, false);
    {
        std::queue<int> fifo;
        for (int j = 0; j < n; ++j)
            if (step[spec.initial_state()][j] && !start_state[j]) {
                start_state[j] = true;
                fifo.push(j);
            }
        while (!fifo.empty()) {
            const int u = fifo.front();
            fifo.pop();
            for (int j = 0; j < n; ++j)
                if (step[u][j] && !start_state[j]) {
                    start_state[j] = true;
                    fifo.push(j);
                }
        }
    }

    // Enumerate positive-probability d-step paths from every block start.
    std::vector<std::vector<int>> paths;
    std::vector<double> path_weight;
    std::vector<int> cur(d);
    auto extend = [&](auto&& self, int depth, double w) -> void {
        if (depth == d) {
            if (paths.size() >= kLiftedStateGuard) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "lifted path space exceeds %zu states",
                              kLiftedStateGuard);
                throw std::invalid_argument(buf);
            }
            paths.push_back(cur);
            path_weight.push_back(w);
            return;
        }
        const int u = cur[depth - 1];
        for (int v : adj[u]) {
            cur[depth] = v;
            self(self, depth + 1, w * spec.transition()(u, v));
        }
    };
    for (int s = 0; s < n; ++s) {
        if (!start_state[s]) continue;
        cur[0] = s;
        if (d == 1) {
            paths.push_back(cur);
            path_weight.push_back(1.0);
        } else {
            extend(extend, 1, 1.0);
        }
    }
    const std::size_t f = paths.size();
    require(f > 0, "no reachable lifted states");

    // Invariant distribution of the path chain: least squares on
    // (Pbar^T - I) stacked with the normalization row.
    std::vector<int> head(f), tail(f);
    for (std::size_t p = 0; p < f; ++p) {
        head[p] = paths[p][0];
        tail[p] = paths[p][d - 1];
    }
    // Normal equations of (Pbar^T - I) stacked with the all-ones row, where
    // Pbar(p,p') = T(tail_p, head_p') * weight_p'. The Gram matrix reduces to
    // G(tail_i, tail_j) - Pbar(i,j) - Pbar(j,i) + delta_ij + 1 with
    // G(a,b) = sum_r T(a, head_r) T(b, head_r) weight_r^2.
    Mat ata(static_cast<int>(f), static_cast<int>(f));
    Mat atb(static_cast<int>(f), 1);
    {
        const Mat& t = spec.transition();
        Mat g(n, n);
        for (std::size_t r = 0; r < f; ++r) {
            const double w2 = path_weight[r] * path_weight[r];
            for (int a = 0; a < n; ++a) {
                const double ta = t(a, head[r]);
                if (ta == 0.0) continue;
                for (int b = 0; b < n; ++b) g(a, b) += ta * t(b, head[r]) * w2;
            }
        }
        for (std::size_t i = 0; i < f; ++i) {
            for (std::size_t j = 0; j < f; ++j) {
                const double pij = t(tail[i], head[j]) * path_weight[j];
                const double pji = t(tail[j], head[i]) * path_weight[i];
                ata(static_cast<int>(i), static_cast<int>(j)) =
                    g(tail[i], tail[j]) - pij - pji + (i == j ? 1.0 : 0.0) + 1.0;
            }
            atb(static_cast<int>(i), 0) = 1.0;
        }
    }
    const Mat pi = solve_linear(std::move(ata), std::move(atb));

    LimitTable table;
    table.h = h;
    table.period = tau;
    table.block_length = d;
    table.lifted_state_count = f;

    std::map<ModeSequence, double> acc;
    ModeSequence block(h);
    for (std::size_t p = 0; p < f; ++p) {
        const double mass = pi(static_cast<int>(p), 0) / tau;
        for (int j = 0; j < tau; ++j) {
            for (int t = 0; t < h; ++t) block[t] = spec.mode_of(paths[p][j * h + t]);
            acc[block] += mass;
        }
    }
    table.entries.assign(acc.begin(), acc.end());
    return table;
}

FrequencyStats empirical_frequencies(const std::vector<int>& signal, int mode_count, int h) {
    require(h >= 1, "h must be positive");
    require(static_cast<long>(signal.size()) >= h, "signal shorter than one block");
    FrequencyStats stats;
    stats.steps = static_cast<long>(signal.size());
    stats.h = h;
    stats.per_mode.assign(mode_count, 0.0);
    stats.tail_min.assign(mode_count, 1.0);
    stats.tail_max.assign(mode_count, 0.0);

    std::vector<long> counts(mode_count, 0);
    const long tail_start = stats.steps - std::max<long>(1, stats.steps / 10);
    for (long t = 0; t < stats.steps; ++t) {
        const int s = signal[t];
        require(s >= 1 && s <= mode_count, "mode id out of range");
        ++counts[s - 1];
        if (t >= tail_start) {
            for (int m = 0; m < mode_count; ++m) {
                const double avg = static_cast<double>(counts[m]) / static_cast<double>(t + 1);
                stats.tail_min[m] = std::min(stats.tail_min[m], avg);
                stats.tail_max[m] = std::max(stats.tail_max[m], avg);
            }
        }
    }
    for (int m = 0; m < mode_count; ++m)
        stats.per_mode[m] = static_cast<double>(counts[m]) / static_cast<double>(stats.steps);

    std::map<ModeSequence, long> block_counts;
    const long blocks = stats.steps / h;
    ModeSequence block(h);
    for (long b = 0; b < blocks; ++b) {
        for (int t = 0; t < h; ++t) block[t] = signal[b * h + t];
        ++block_counts[block];
    }
    for (const auto& [q, c] : block_counts) {
        stats.per_sequence.emplace_back(q, static_cast<double>(c) / static_cast<double>(blocks));
    }
    return stats;
}

Assumption1Report check_assumption1(const FrequencyStats& stats, const ActivationBounds& bounds,
                                    double tolerance) {
    require(stats.steps >= 1000, "statistics need a run of at least 1000 steps");
    require(static_cast<int>(stats.per_mode.size()) == bounds.mode_count(),
            "mode count mismatch");
    Assumption1Report rep;
    char buf[160];
    for (int s = 1; s <= bounds.mode_count(); ++s) {
        const double avg = stats.per_mode[s - 1];
        if (avg < bounds.lower(s) - tolerance || avg > bounds.upper(s) + tolerance) {
            std::snprintf(buf, sizeof(buf), "mode %d average %.6f outside [%.6f, %.6f]", s, avg,
                          bounds.lower(s), bounds.upper(s));
            rep.violations.push_back(buf);
        }
        double agg = 0.0;  // sequence-frequency aggregation of the same ratio
        for (const auto& [q, freq] : stats.per_sequence) {
            int c = 0;
            for (int mode : q) c += mode == s ? 1 : 0;
            agg += freq * static_cast<double>(c) / stats.h;
        }
        if (agg < bounds.lower(s) - tolerance || agg > bounds.upper(s) + tolerance) {
            std::snprintf(buf, sizeof(buf), "mode %d block aggregate %.6f outside [%.6f, %.6f]",
                          s, agg, bounds.lower(s), bounds.upper(s));
            rep.violations.push_back(buf);
        }
    }
    rep.ok = rep.violations.empty();
    return rep;
}

}  // namespace switched
