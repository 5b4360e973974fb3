#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "switched/certify.hpp"
#include "switched/matrix.hpp"
#include "switched/signals.hpp"
#include "switched/system.hpp"

namespace switched {

/// Mode-signal description for simulation and oracle runs.
struct SignalSpec {
    enum class Kind { HiddenMarkov, Periodic, Schedule };
    Kind kind = Kind::Periodic;
    std::optional<HiddenMarkovSpec> hidden_markov;
    std::vector<int> pattern;  // periodic pattern or explicit schedule

    std::vector<int> sample(long steps, std::uint64_t seed) const;
};

struct AnalysisOptions {
    int h = 1;
    std::optional<int> h_max;
    Norm norm = Norm::spectral();
    double epsilon = 1e-24;
    int lp = 2;
    std::uint64_t seed = 12345;
    long simulation_steps = 10000;
};

/// A scenario file: the switched system (raw or built from a networked
/// control loop), its activation bounds, an optional signal block, and
/// analysis defaults. Unknown fields are rejected.
struct ScenarioConfig {
    enum class Kind { RawSwitched, DelayFreeNcs, TwoChannelNcs };
    Kind kind = Kind::RawSwitched;

    // raw_switched
    std::vector<Mat> matrices;
    std::vector<double> bounds_lower, bounds_upper;
    // ncs kinds
    std::optional<Mat> plant_a, plant_b;
    std::optional<Mat> gain;                         // delay_free_ncs
    double failure_ratio = 0.0;                      // delay_free_ncs
    std::optional<Mat> gain_direct, gain_delayed;    // two_channel_ncs
    double direct_lower = 0.0, direct_upper = 1.0;   // two_channel_ncs
    double delayed_lower = 0.0, delayed_upper = 1.0;

    std::optional<SignalSpec> signal;
    AnalysisOptions analysis;

    static ScenarioConfig load(const std::string& path);
    static ScenarioConfig parse(const std::string& text);

    std::pair<SwitchedSystem, ActivationBounds> build() const;
};

std::string norm_name(const Norm& norm);
Norm norm_from_name(const std::string& name, const std::optional<Mat>& weight);

std::string certificate_to_json(const StabilityCertificate& cert);
StabilityCertificate certificate_from_json(const std::string& text);

bool operator==(const Norm& a, const Norm& b);
bool operator==(const StabilityCertificate& a, const StabilityCertificate& b);

/// %.17g formatting used by every CSV writer.
std::string format_full(double v);

}  // namespace switched
