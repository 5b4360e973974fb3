// swcert: stability certification for switched linear systems under
// bounded mode-activation ratios, with simulation and oracle cross-checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "switched/certify.hpp"
#include "switched/config.hpp"
#include "switched/lifting.hpp"
#include "switched/ncs.hpp"
#include "switched/signals.hpp"

using namespace switched;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<int> h;
    std::optional<int> h_max;
    std::optional<std::string> norm;
    std::optional<double> epsilon;
    std::optional<std::uint64_t> seed;
    std::optional<int> lp;
    int workers = 0;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    cmd->set_help_flag("--help", "print this help");  // keep -h free for --h
    auto* cfg = cmd->add_option("--config", opts.config_path, "scenario config (JSON)");
    if (config_required) cfg->required();
    cmd->add_option("--h", opts.h, "block length h");
    cmd->add_option("--h-max", opts.h_max, "largest block length for sweeps");
    cmd->add_option("--norm", opts.norm, "one|inf|spectral|frobenius|weighted");
    cmd->add_option("--epsilon", opts.epsilon, "zero-product guard in (0,1), default 1e-24");
    cmd->add_option("--seed", opts.seed, "64-bit seed for all randomness");
    cmd->add_option("--lp", opts.lp, "1 = full program, 2 = reduced (default)")
        ->check(CLI::IsMember({1, 2}));
    cmd->add_option("--workers", opts.workers, "worker threads (0 = hardware)");
    cmd->add_option("--out", opts.out, "output file (default stdout)");
}

ScenarioConfig load_config(const CommonOpts& opts) {
    ScenarioConfig cfg = ScenarioConfig::load(opts.config_path);
    if (opts.h) cfg.analysis.h = *opts.h;
    if (opts.h_max) cfg.analysis.h_max = *opts.h_max;
    if (opts.norm) {
        const std::optional<Mat> weight =
            cfg.analysis.norm.kind == NormKind::Weighted ? cfg.analysis.norm.weight : std::nullopt;
        cfg.analysis.norm = norm_from_name(*opts.norm, weight);
    }
    if (opts.epsilon) cfg.analysis.epsilon = *opts.epsilon;
    if (opts.seed) cfg.analysis.seed = *opts.seed;
    if (opts.lp) cfg.analysis.lp = *opts.lp;
    return cfg;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

std::string join_modes(const std::vector<int>& q) {
    std::string s;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(q[i]);
    }
    return s;
}

int run_certify(const CommonOpts& opts) {
    const ScenarioConfig cfg = load_config(opts);
    const auto [system, bounds] = cfg.build();
    const int h = cfg.analysis.h;
    const StabilityCertificate cert =
        certify(system, bounds, h, cfg.analysis.norm, cfg.analysis.epsilon, opts.workers);

    if (cfg.analysis.lp == 1) {
        // Cross-validate the reduced program against the full one.
        const GrowthResult full = worst_case_growth(system, bounds, h, cfg.analysis.norm,
                                                    cfg.analysis.epsilon, LpChoice::Lp1,
                                                    opts.workers);
        const double gap = std::abs(full.value - cert.objective);
        if (gap > 1e-9 * (1.0 + std::abs(full.value))) {
            std::cerr << "error: full and reduced programs disagree by " << gap << "\n";
            return 1;
        }
        std::cout << "full-program cross-check: objective " << format_full(full.value) << "\n";
    }

    std::cout << "h = " << cert.h << ", norm = " << norm_name(cert.norm)
              << ", epsilon = " << format_full(cert.epsilon) << "\n";
    std::cout << "objective J'_" << cert.h << " = " << format_full(cert.objective) << "\n";
    std::cout << "verdict: "
              << (cert.verdict == Verdict::CertifiedStable ? "CERTIFIED STABLE" : "INCONCLUSIVE")
              << "\n";
    std::cout << "worst-case occupancy (nonzero weights):\n";
    for (const auto& [z, w] : cert.worst_occupancy) {
        if (w <= 0.0) continue;
        std::cout << "  counts [" << join_modes(z) << "]  weight " << format_full(w) << "\n";
    }
    std::cout << "witness sequences:\n";
    for (const auto& [q, w] : cert.witness_schedule) {
        std::cout << "  (" << join_modes(q) << ")  weight " << format_full(w) << "\n";
    }
    if (!opts.out.empty()) write_output(opts.out, certificate_to_json(cert) + "\n");
    return cert.verdict == Verdict::CertifiedStable ? 0 : 2;
}

struct SweepCell {
    int h;
    std::string param;
    double value;
};

int run_sweep(const CommonOpts& opts, const std::string& param, const std::string& grid_csv,
              bool no_timing) {
    const ScenarioConfig base = load_config(opts);
    std::vector<double> grid;
    if (!grid_csv.empty()) {
        std::stringstream ss(grid_csv);
        std::string item;
        while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
    }
    const int h_lo = base.analysis.h;
    const int h_hi = base.analysis.h_max.value_or(h_lo);
    if (h_hi < h_lo) throw std::invalid_argument("h_max must be at least h");

    std::vector<SweepCell> cells;
    for (int h = h_lo; h <= h_hi; ++h) {
        if (grid.empty()) {
            cells.push_back({h, "none", 0.0});
        } else {
            for (double v : grid) cells.push_back({h, param, v});
        }
    }

    std::vector<std::string> lines(cells.size());
    std::atomic<std::size_t> next{0};
    const int pool = opts.workers > 0 ? opts.workers
                                      : static_cast<int>(std::thread::hardware_concurrency());
    const int table_workers = cells.size() > 1 ? 1 : pool;

    auto run_cell = [&](std::size_t idx) {
        const SweepCell& cell = cells[idx];
        const auto start = std::chrono::steady_clock::now();
        std::string j_text = "", verdict = "", status = "ok";
        try {
            ScenarioConfig cfg = base;
            if (cell.param == "rho") {
                if (cfg.kind != ScenarioConfig::Kind::DelayFreeNcs) {
                    throw std::invalid_argument("parameter 'rho' needs a delay_free_ncs scenario");
                }
                cfg.failure_ratio = cell.value;
            } else if (cell.param == "rho_n") {
                if (cfg.kind != ScenarioConfig::Kind::TwoChannelNcs) {
                    throw std::invalid_argument("parameter 'rho_n' needs a two_channel_ncs scenario");
                }
                cfg.direct_upper = cell.value;
            } else if (cell.param == "rho_d") {
                if (cfg.kind != ScenarioConfig::Kind::TwoChannelNcs) {
                    throw std::invalid_argument("parameter 'rho_d' needs a two_channel_ncs scenario");
                }
                cfg.delayed_upper = cell.value;
            } else if (cell.param != "none") {
                throw std::invalid_argument("unknown sweep parameter '" + cell.param + "'");
            }
            const auto [system, bounds] = cfg.build();
            const StabilityCertificate cert = certify(system, bounds, cell.h, cfg.analysis.norm,
                                                      cfg.analysis.epsilon, table_workers);
            j_text = format_full(cert.objective);
            verdict = cert.verdict == Verdict::CertifiedStable ? "certified_stable" : "inconclusive";
        } catch (const std::exception& e) {
            status = std::string("error: ") + e.what();
        }
        const auto end = std::chrono::steady_clock::now();
        const long ms = no_timing ? 0
                                  : std::chrono::duration_cast<std::chrono::milliseconds>(end - start)
                                        .count();
        std::ostringstream line;
        line << cell.h << ',' << cell.param << ',' << format_full(cell.value) << ',' << j_text
             << ',' << verdict << ',' << status << ',' << ms << '\n';
        lines[idx] = line.str();
    };

    if (pool <= 1 || cells.size() <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < pool; ++w) {
            threads.emplace_back([&]() {
                for (;;) {
                    const std::size_t idx = next.fetch_add(1);
                    if (idx >= cells.size()) return;
                    run_cell(idx);
                }
            });
        }
        for (auto& t : threads) t.join();
    }

    std::string csv = "h,param,value,J,verdict,status,wall_ms\n";
    for (const std::string& line : lines) csv += line;
    write_output(opts.out, csv);
    return 0;
}

int run_attack(const CommonOpts& opts, int max_denominator) {
    const ScenarioConfig cfg = load_config(opts);
    const auto [system, bounds] = cfg.build();
    const GainTables tables = build_gain_tables(system, cfg.analysis.h, cfg.analysis.norm,
                                                cfg.analysis.epsilon, false, opts.workers);
    const LpSolution sol = solve(build_lp2(tables, bounds));
    if (sol.status != LpStatus::Optimal) throw std::runtime_error("occupancy LP did not solve");
    const AttackPlan plan = extract_attack(system, tables, sol, max_denominator);

    std::ostringstream out;
    out << "period: " << plan.period << "\n";
    out << "schedule: " << join_modes(plan.schedule) << "\n";
    out << "mode frequencies:";
    for (double f : plan.mode_frequencies) out << ' ' << format_full(f);
    out << "\nmonodromy radius: " << format_full(plan.monodromy_radius) << "\n";
    out << "destabilizing: " << (plan.monodromy_radius > 1.0 + 1e-9 ? "yes" : "no") << "\n";
    write_output(opts.out, out.str());
    return 0;
}

int run_simulate(const CommonOpts& opts, long steps_flag, int log_every) {
    const ScenarioConfig cfg = load_config(opts);
    if (!cfg.signal) throw std::invalid_argument("simulate needs a 'signal' block in the config");
    const auto [system, bounds] = cfg.build();
    const long steps = steps_flag > 0 ? steps_flag : cfg.analysis.simulation_steps;
    const std::vector<int> signal = cfg.signal->sample(steps, cfg.analysis.seed);

    const int n = system.dim();
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n, 0.0);
    std::string csv = "t,state_norm\n";
    auto norm2 = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e * e;
        return std::sqrt(s);
    };
    csv += "0," + format_full(norm2(x)) + "\n";
    for (long t = 0; t < steps; ++t) {
        const Mat& a = system.mode(signal[t]);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
            y[i] = s;
        }
        std::swap(x, y);
        if ((t + 1) % log_every == 0 || t + 1 == steps) {
            csv += std::to_string(t + 1) + "," + format_full(norm2(x)) + "\n";
        }
    }
    write_output(opts.out, csv);
    return 0;
}

int run_oracle(const CommonOpts& opts) {
    const ScenarioConfig cfg = load_config(opts);
    if (!cfg.signal || cfg.signal->kind != SignalSpec::Kind::HiddenMarkov) {
        throw std::invalid_argument("oracle needs a hidden_markov 'signal' block");
    }
    const LimitTable table = limit_oracle(*cfg.signal->hidden_markov, cfg.analysis.h);
    std::cerr << "period tau = " << table.period << ", block length = " << table.block_length
              << ", lifted states = " << table.lifted_state_count << "\n";
    std::string csv = "sequence,limit\n";
    for (const auto& [q, v] : table.entries) {
        csv += join_modes(q) + "," + format_full(v) + "\n";
    }
    write_output(opts.out, csv);
    return 0;
}

int run_bench(const CommonOpts& opts, int h_max, int m_max) {
    std::string csv = "h,M,full_variables,reduced_variables\n";
    for (int h = 1; h <= h_max; ++h) {
        for (int m = 2; m <= m_max; ++m) {
            const VariableCounts c = variable_counts(h, m);
            csv += std::to_string(h) + "," + std::to_string(m) + "," + u128_to_string(c.full) +
                   "," + u128_to_string(c.reduced) + "\n";
        }
    }
    write_output(opts.out, csv);
    return 0;
}

int run_lp_debug(const CommonOpts& opts) {
    const ScenarioConfig cfg = load_config(opts);
    const auto [system, bounds] = cfg.build();
    const bool full = cfg.analysis.lp == 1;
    const GainTables tables = build_gain_tables(system, cfg.analysis.h, cfg.analysis.norm,
                                                cfg.analysis.epsilon, full, opts.workers);
    const LpModel lp = full ? build_lp1(tables, bounds) : build_lp2(tables, bounds);
    const LpSolution sol = solve(lp);
    std::cout << "variables: " << lp.num_vars() << ", rows: " << lp.num_rows() << "\n";
    std::cout << "status: ";
    switch (sol.status) {
        case LpStatus::Optimal: std::cout << "optimal\n"; break;
        case LpStatus::Infeasible: std::cout << "infeasible\n"; break;
        case LpStatus::Unbounded: std::cout << "unbounded\n"; break;
        case LpStatus::IterationLimit: std::cout << "iteration-limit\n"; break;
    }
    if (sol.status != LpStatus::Optimal) return 1;
    std::cout << "objective: " << format_full(sol.objective_value) << "\n";
    std::cout << "iterations: " << sol.iterations << "\n";
    std::cout << "row duals:";
    for (double y : sol.duals) std::cout << ' ' << format_full(y);
    std::cout << "\n";
    const CertificateReport rep = verify_certificate(lp, sol);
    std::cout << "certificate: " << (rep.ok ? "verified" : "FAILED") << "\n";
    std::cout << "  primal infeasibility: " << format_full(rep.primal_infeasibility) << "\n";
    std::cout << "  dual infeasibility:   " << format_full(rep.dual_infeasibility) << "\n";
    std::cout << "  complementarity:      " << format_full(rep.complementarity) << "\n";
    std::cout << "  duality gap:          " << format_full(rep.duality_gap) << "\n";
    for (const std::string& v : rep.violations) std::cout << "  violation: " << v << "\n";
    return rep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability certification for switched systems under activation-ratio bounds"};
    app.set_help_flag("--help", "print this help");
    app.require_subcommand(1);

    CommonOpts certify_opts, sweep_opts, attack_opts, simulate_opts, oracle_opts, bench_opts,
        lp_opts;
    std::string sweep_param = "rho", sweep_grid;
    bool sweep_no_timing = false;
    int attack_max_den = 1000;
    long simulate_steps = 0;
    int simulate_log_every = 1;
    int bench_h_max = 15, bench_m_max = 5;

    CLI::App* c_certify = app.add_subcommand("certify", "solve the occupancy program and report");
    add_common(c_certify, certify_opts);

    CLI::App* c_sweep = app.add_subcommand("sweep", "tabulate the objective over h and a grid");
    add_common(c_sweep, sweep_opts);
    c_sweep->add_option("--param", sweep_param, "rho | rho_n | rho_d | none");
    c_sweep->add_option("--grid", sweep_grid, "comma-separated parameter values");
    c_sweep->add_flag("--no-timing", sweep_no_timing, "write 0 in wall_ms for reproducible output");

    CLI::App* c_attack = app.add_subcommand("attack", "extract a periodic worst-case schedule");
    add_common(c_attack, attack_opts);
    c_attack->add_option("--max-denominator", attack_max_den, "rounding denominator cap")
        ->check(CLI::Range(1, 10000));

    CLI::App* c_simulate = app.add_subcommand("simulate", "run a trajectory under the signal");
    add_common(c_simulate, simulate_opts);
    c_simulate->add_option("--steps", simulate_steps, "simulation length");
    c_simulate->add_option("--log-every", simulate_log_every, "log every N steps")
        ->check(CLI::PositiveNumber);

    CLI::App* c_oracle = app.add_subcommand("oracle", "exact block frequencies of the signal");
    add_common(c_oracle, oracle_opts);

    CLI::App* c_bench = app.add_subcommand("bench", "variable counts of both programs");
    add_common(c_bench, bench_opts, /*config_required=*/false);
    c_bench->add_option("--bench-h-max", bench_h_max, "largest h");
    c_bench->add_option("--bench-m-max", bench_m_max, "largest mode count");

    CLI::App* c_lp = app.add_subcommand("lp-debug", "solve one program and verify optimality");
    add_common(c_lp, lp_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_certify->parsed()) return run_certify(certify_opts);
        if (c_sweep->parsed()) return run_sweep(sweep_opts, sweep_param, sweep_grid, sweep_no_timing);
        if (c_attack->parsed()) return run_attack(attack_opts, attack_max_den);
        if (c_simulate->parsed()) return run_simulate(simulate_opts, simulate_steps, simulate_log_every);
        if (c_oracle->parsed()) return run_oracle(oracle_opts);
        if (c_bench->parsed()) return run_bench(bench_opts, bench_h_max, bench_m_max);
        if (c_lp->parsed()) return run_lp_debug(lp_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
