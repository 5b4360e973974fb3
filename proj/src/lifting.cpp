#include "switched/lifting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace switched {

namespace {

constexpr int kSplitDepth = 4;  // subtree fan-out depth for the worker pool

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

unsigned __int128 checked_mul(unsigned __int128 a, unsigned __int128 b) {
    if (a != 0 && b > std::numeric_limits<unsigned __int128>::max() / a) {
        throw std::overflow_error("variable count overflows 128-bit arithmetic");
    }
    return a * b;
}

unsigned __int128 ipow128(unsigned __int128 base, int exp) {
    unsigned __int128 r = 1;
    for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

// Binomial coefficients up to n, for composition ranking. Values stay within
// the reduced variable count, which is validated to fit in 64 bits upstream.
std::vector<std::vector<std::uint64_t>> pascal_triangle(int n) {
    std::vector<std::vector<std::uint64_t>> c(n + 1);
    for (int i = 0; i <= n; ++i) {
        c[i].assign(i + 1, 1);
        for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
    }
    return c;
}

}  // namespace

Mat lifted_product(const SwitchedSystem& system, const ModeSequence& q) {
    require(!q.empty(), "mode sequence must be nonempty");
    Mat p = Mat::identity(system.dim());
    Mat tmp(system.dim(), system.dim());
    for (int s : q) {
        require(s >= 1 && s <= system.mode_count(), "mode id out of range");
        mat_mul_into(system.mode(s), p, tmp);
        std::swap(p, tmp);
    }
    return p;
}

double log_gain(const SwitchedSystem& system, const ModeSequence& q, const Norm& norm,
                double epsilon) {
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
    return std::log(std::max(mat_norm(lifted_product(system, q), norm), epsilon));
}

Composition count_vector(const ModeSequence& q, int mode_count) {
    Composition z(mode_count, 0);
    for (int s : q) {
        require(s >= 1 && s <= mode_count, "mode id out of range");
        ++z[s - 1];
    }
    return z;
}

std::vector<Composition> enumerate_compositions(int h, int mode_count) {
    require(h >= 1 && mode_count >= 1, "h and mode count must be positive");
    std::vector<Composition> out;
    Composition z(mode_count, 0);
    auto rec = [&](auto&& self, int idx, int remaining) -> void {
        if (idx == mode_count - 1) {
            z[idx] = remaining;
            out.push_back(z);
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            z[idx] = v;
            self(self, idx + 1, remaining - v);
        }
    };
    rec(rec, 0, h);
    return out;
}

VariableCounts variable_counts(int h, int mode_count) {
    require(h >= 1 && mode_count >= 1, "h and mode count must be positive");
    VariableCounts vc;
    vc.full = ipow128(static_cast<unsigned __int128>(mode_count), h);
    // binomial(h+M-1, M-1) with exact stepwise division
    unsigned __int128 r = 1;
    const int n = h + mode_count - 1, k = mode_count - 1;
    for (int i = 1; i <= k; ++i) {
        r = checked_mul(r, static_cast<unsigned __int128>(n - k + i));
        r /= static_cast<unsigned __int128>(i);
    }
    vc.reduced = r;
    return vc;
}

std::string u128_to_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::size_t sequence_rank(const ModeSequence& q, int mode_count) {
    std::size_t rank = 0;
    for (int s : q) rank = rank * static_cast<std::size_t>(mode_count) + static_cast<std::size_t>(s - 1);
    return rank;
}

std::size_t GainTables::composition_rank(const Composition& z) const {
    require(static_cast<int>(z.size()) == mode_count, "composition length mismatch");
    const auto binom = pascal_triangle(h + mode_count);
    std::size_t rank = 0;
    int remaining = h;
    for (int i = 0; i < mode_count - 1; ++i) {
        const int parts_left = mode_count - 1 - i;
        for (int v = 0; v < z[i]; ++v) {
            rank += binom[remaining - v + parts_left - 1][parts_left - 1];
        }
        remaining -= z[i];
    }
    return rank;
}

const GainEntry& GainTables::entry(const Composition& z) const {
    return by_composition[composition_rank(z)];
}

namespace {

// Rank of a composition in lexicographic order, with a shared binomial table.
std::size_t comp_rank(const std::vector<int>& z, int h, int mode_count,
                      const std::vector<std::vector<std::uint64_t>>& binom) {
    std::size_t rank = 0;
    int remaining = h;
    for (int i = 0; i < mode_count - 1; ++i) {
        const int parts_left = mode_count - 1 - i;
        for (int v = 0; v < z[i]; ++v) {
            rank += binom[remaining - v + parts_left - 1][parts_left - 1];
        }
        remaining -= z[i];
    }
    return rank;
}

struct SubtreeTable {
    std::vector<double> gain;             // -inf = unset
    std::vector<ModeSequence> witness;
};

// Depth-first walk below one fixed prefix. Prefix products live on a
// preallocated stack, one multiply per visited node.
class SubtreeWalker {
public:
    SubtreeWalker(const SwitchedSystem& system, int h, const Norm& norm, double epsilon,
                  std::size_t comp_count,
                  const std::vector<std::vector<std::uint64_t>>& binom,
                  std::vector<double>* by_sequence)
        : system_(system),
          h_(h),
          m_(system.mode_count()),
          norm_(norm),
          epsilon_(epsilon),
          binom_(binom),
          by_sequence_(by_sequence),
          comp_count_(comp_count) {
        stack_.assign(h + 1, Mat(system.dim(), system.dim()));
        stack_[0] = Mat::identity(system.dim());
        seq_.assign(h, 0);
        counts_.assign(m_, 0);
    }

    SubtreeTable run(const ModeSequence& prefix, std::size_t first_leaf_rank) {
        table_.gain.assign(comp_count_, -std::numeric_limits<double>::infinity());
        table_.witness.assign(comp_count_, {});
        leaf_rank_ = first_leaf_rank;
        for (std::size_t j = 0; j < prefix.size(); ++j) {
            const int s = prefix[j];
            seq_[j] = s;
            ++counts_[s - 1];
            mat_mul_into(system_.mode(s), stack_[j], stack_[j + 1]);
        }
        walk(static_cast<int>(prefix.size()));
        for (int s : prefix) --counts_[s - 1];
        return std::move(table_);
    }

private:
    void walk(int depth) {
        if (depth == h_) {
            const double g = std::log(std::max(mat_norm(stack_[h_], norm_), epsilon_));
            const std::size_t zr = comp_rank(counts_, h_, m_, binom_);
            if (g > table_.gain[zr]) {  // ties keep the first (lex-smallest) witness
                table_.gain[zr] = g;
                table_.witness[zr] = seq_;
            }
            if (by_sequence_) (*by_sequence_)[leaf_rank_] = g;
            ++leaf_rank_;
            return;
        }
        for (int s = 1; s <= m_; ++s) {
            seq_[depth] = s;
            ++counts_[s - 1];
            mat_mul_into(system_.mode(s), stack_[depth], stack_[depth + 1]);
            walk(depth + 1);
            --counts_[s - 1];
        }
    }

    const SwitchedSystem& system_;
    const int h_, m_;
    const Norm& norm_;
    const double epsilon_;
    const std::vector<std::vector<std::uint64_t>>& binom_;
    std::vector<double>* by_sequence_;
    const std::size_t comp_count_;
    std::vector<Mat> stack_;
    ModeSequence seq_;
    std::vector<int> counts_;
    SubtreeTable table_;
    std::size_t leaf_rank_ = 0;
};

}  // namespace

GainTables build_gain_tables(const SwitchedSystem& system, int h, const Norm& norm,
                             double epsilon, bool materialize_sequences, int workers) {
    require(h >= 1, "h must be positive");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
    const int m = system.mode_count();
    const unsigned __int128 full = ipow128(static_cast<unsigned __int128>(m), h);
    if (full > (static_cast<unsigned __int128>(1) << 32)) {
        throw std::invalid_argument("sequence space exceeds the 2^32 enumeration guard");
    }
    if (materialize_sequences && full > (static_cast<unsigned __int128>(1) << 24)) {
        throw std::invalid_argument("per-sequence table requires M^h <= 2^24");
    }

    GainTables tables;
    tables.h = h;
    tables.mode_count = m;
    tables.norm = norm;
    tables.epsilon = epsilon;

    const std::vector<Composition> comps = enumerate_compositions(h, m);
    const std::size_t comp_count = comps.size();
    const auto binom = pascal_triangle(h + m);

    std::vector<double> by_sequence;
    if (materialize_sequences) {
        by_sequence.assign(static_cast<std::size_t>(full), 0.0);
    }

    const int d0 = std::min(kSplitDepth, h);
    const std::size_t subtree_count = static_cast<std::size_t>(ipow128(m, d0));
    const std::size_t leaves_per_subtree = static_cast<std::size_t>(full) / subtree_count;

    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(subtree_count)));

    std::vector<SubtreeTable> results(subtree_count);
    std::atomic<std::size_t> next{0};
    auto worker_fn = [&]() {
        SubtreeWalker walker(system, h, norm, epsilon, comp_count, binom,
                             materialize_sequences ? &by_sequence : nullptr);
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= subtree_count) break;
            ModeSequence prefix(d0);
            std::size_t v = idx;
            for (int j = d0 - 1; j >= 0; --j) {
                prefix[j] = static_cast<int>(v % m) + 1;
                v /= m;
            }
            results[idx] = walker.run(prefix, idx * leaves_per_subtree);
        }
    };
    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }

    // Merge in subtree order: max with first-wins ties keeps the
    // lexicographically smallest witness independent of scheduling.
    tables.by_composition.resize(comp_count);
    for (std::size_t zi = 0; zi < comp_count; ++zi) {
        GainEntry e;
        e.z = comps[zi];
        e.gain = -std::numeric_limits<double>::infinity();
        for (const SubtreeTable& st : results) {
            if (st.gain[zi] > e.gain) {
                e.gain = st.gain[zi];
                e.witness = st.witness[zi];
            }
        }
        tables.by_composition[zi] = std::move(e);
    }
    if (materialize_sequences) tables.by_sequence = std::move(by_sequence);
    return tables;
}

}  // namespace switched
