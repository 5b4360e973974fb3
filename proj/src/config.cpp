#include "switched/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "switched/ncs.hpp"

namespace switched {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument("config: " + where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) fail(where, "unknown field '" + key + "'");
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) fail(where, "missing field '" + key + "'");
    if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
    return obj[key].get<double>();
}

Mat parse_matrix(const json& value, const std::string& where) {
    if (!value.is_array() || value.empty()) fail(where, "expected an array of row arrays");
    const int rows = static_cast<int>(value.size());
    int cols = -1;
    std::vector<double> entries;
    for (int i = 0; i < rows; ++i) {
        const json& row = value[i];
        if (!row.is_array() || row.empty()) fail(where, "expected an array of row arrays");
        if (cols < 0) cols = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != cols) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "row %d has a different length", i);
            fail(where, buf);
        }
        for (const json& v : row) {
            if (!v.is_number()) fail(where, "matrix entries must be numbers");
            entries.push_back(v.get<double>());
        }
    }
    try {
        return Mat(rows, cols, std::move(entries));
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
}

std::vector<double> parse_vector(const json& value, const std::string& where) {
    if (!value.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const json& v : value) {
        if (!v.is_number()) fail(where, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<int> parse_int_vector(const json& value, const std::string& where) {
    if (!value.is_array()) fail(where, "expected an array of integers");
    std::vector<int> out;
    for (const json& v : value) {
        if (!v.is_number_integer()) fail(where, "expected an array of integers");
        out.push_back(v.get<int>());
    }
    return out;
}

SignalSpec parse_signal(const json& obj) {
    reject_unknown(obj, "signal",
                   {"type", "transition", "initial_state", "partition", "pattern", "schedule"});
    if (!obj.contains("type") || !obj["type"].is_string()) fail("signal", "missing 'type'");
    const std::string type = obj["type"].get<std::string>();
    SignalSpec spec;
    if (type == "hidden_markov") {
        spec.kind = SignalSpec::Kind::HiddenMarkov;
        if (!obj.contains("transition") || !obj.contains("partition")) {
            fail("signal", "hidden_markov needs 'transition' and 'partition'");
        }
        const Mat trans = parse_matrix(obj["transition"], "signal.transition");
        const int g0 = obj.contains("initial_state")
                           ? static_cast<int>(get_number(obj, "signal", "initial_state"))
                           : 0;
        if (!obj["partition"].is_array()) fail("signal.partition", "expected an array of arrays");
        std::vector<std::vector<int>> partition;
        for (const json& cell : obj["partition"]) {
            partition.push_back(parse_int_vector(cell, "signal.partition"));
        }
        try {
            spec.hidden_markov.emplace(trans, g0, std::move(partition));
        } catch (const std::exception& e) {
            fail("signal", e.what());
        }
    } else if (type == "periodic") {
        spec.kind = SignalSpec::Kind::Periodic;
        if (!obj.contains("pattern")) fail("signal", "periodic needs 'pattern'");
        spec.pattern = parse_int_vector(obj["pattern"], "signal.pattern");
    } else if (type == "schedule") {
        spec.kind = SignalSpec::Kind::Schedule;
        if (!obj.contains("schedule")) fail("signal", "schedule needs 'schedule'");
        spec.pattern = parse_int_vector(obj["schedule"], "signal.schedule");
    } else {
        fail("signal.type", "expected hidden_markov, periodic or schedule");
    }
    return spec;
}

AnalysisOptions parse_analysis(const json& obj) {
    reject_unknown(obj, "analysis",
                   {"h", "h_max", "norm", "epsilon", "lp", "seed", "simulation_steps", "weight"});
    AnalysisOptions opts;
    if (obj.contains("h")) opts.h = static_cast<int>(get_number(obj, "analysis", "h"));
    if (obj.contains("h_max")) opts.h_max = static_cast<int>(get_number(obj, "analysis", "h_max"));
    std::optional<Mat> weight;
    if (obj.contains("weight")) weight = parse_matrix(obj["weight"], "analysis.weight");
    if (obj.contains("norm")) {
        if (!obj["norm"].is_string()) fail("analysis.norm", "expected a string");
        try {
            opts.norm = norm_from_name(obj["norm"].get<std::string>(), weight);
        } catch (const std::exception& e) {
            fail("analysis.norm", e.what());
        }
    } else if (weight) {
        opts.norm = Norm::weighted(*weight);
    }
    if (obj.contains("epsilon")) opts.epsilon = get_number(obj, "analysis", "epsilon");
    if (obj.contains("lp")) {
        opts.lp = static_cast<int>(get_number(obj, "analysis", "lp"));
        if (opts.lp != 1 && opts.lp != 2) fail("analysis.lp", "expected 1 or 2");
    }
    if (obj.contains("seed")) opts.seed = obj["seed"].get<std::uint64_t>();
    if (obj.contains("simulation_steps")) {
        opts.simulation_steps = static_cast<long>(get_number(obj, "analysis", "simulation_steps"));
    }
    return opts;
}

}  // namespace

std::vector<int> SignalSpec::sample(long steps, std::uint64_t seed) const {
    switch (kind) {
        case Kind::HiddenMarkov:
            return sample_signal(*hidden_markov, steps, seed);
        case Kind::Periodic:
            return sample_signal_periodic(pattern, steps);
        case Kind::Schedule: {
            if (static_cast<long>(pattern.size()) < steps) {
                throw std::invalid_argument("explicit schedule shorter than the requested run");
            }
            return {pattern.begin(), pattern.begin() + steps};
        }
    }
    throw std::logic_error("unknown signal kind");
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!root.is_object()) fail("top level", "expected an object");
    reject_unknown(root, "top level",
                   {"schema_version", "kind", "matrices", "bounds", "plant", "gain",
                    "failure_ratio", "gain_direct", "gain_delayed", "channel_bounds", "signal",
                    "analysis"});
    if (!root.contains("schema_version") || !root["schema_version"].is_number_integer() ||
        root["schema_version"].get<int>() != 1) {
        fail("schema_version", "expected the integer 1");
    }
    if (!root.contains("kind") || !root["kind"].is_string()) fail("kind", "missing scenario kind");

    ScenarioConfig cfg;
    const std::string kind = root["kind"].get<std::string>();
    if (kind == "raw_switched") {
        cfg.kind = Kind::RawSwitched;
        if (!root.contains("matrices") || !root["matrices"].is_array() || root["matrices"].empty()) {
            fail("matrices", "expected a nonempty array of matrices");
        }
        for (std::size_t s = 0; s < root["matrices"].size(); ++s) {
            cfg.matrices.push_back(parse_matrix(root["matrices"][s], "matrices[" + std::to_string(s) + "]"));
        }
        if (!root.contains("bounds") || !root["bounds"].is_object()) fail("bounds", "missing object");
        reject_unknown(root["bounds"], "bounds", {"lower", "upper"});
        cfg.bounds_lower = parse_vector(root["bounds"]["lower"], "bounds.lower");
        cfg.bounds_upper = parse_vector(root["bounds"]["upper"], "bounds.upper");
    } else if (kind == "delay_free_ncs" || kind == "two_channel_ncs") {
        cfg.kind = kind == "delay_free_ncs" ? Kind::DelayFreeNcs : Kind::TwoChannelNcs;
        if (!root.contains("plant") || !root["plant"].is_object()) fail("plant", "missing object");
        reject_unknown(root["plant"], "plant", {"A", "B"});
        if (!root["plant"].contains("A") || !root["plant"].contains("B")) {
            fail("plant", "needs matrices 'A' and 'B'");
        }
        cfg.plant_a = parse_matrix(root["plant"]["A"], "plant.A");
        cfg.plant_b = parse_matrix(root["plant"]["B"], "plant.B");
        if (cfg.kind == Kind::DelayFreeNcs) {
            if (!root.contains("gain")) fail("gain", "missing feedback gain");
            cfg.gain = parse_matrix(root["gain"], "gain");
            cfg.failure_ratio = get_number(root, "top level", "failure_ratio");
        } else {
            if (!root.contains("gain_direct") || !root.contains("gain_delayed")) {
                fail("top level", "two_channel_ncs needs 'gain_direct' and 'gain_delayed'");
            }
            cfg.gain_direct = parse_matrix(root["gain_direct"], "gain_direct");
            cfg.gain_delayed = parse_matrix(root["gain_delayed"], "gain_delayed");
            if (!root.contains("channel_bounds") || !root["channel_bounds"].is_object()) {
                fail("channel_bounds", "missing object");
            }
            const json& cb = root["channel_bounds"];
            reject_unknown(cb, "channel_bounds",
                           {"direct_lower", "direct_upper", "delayed_lower", "delayed_upper"});
            cfg.direct_lower = get_number(cb, "channel_bounds", "direct_lower");
            cfg.direct_upper = get_number(cb, "channel_bounds", "direct_upper");
            cfg.delayed_lower = get_number(cb, "channel_bounds", "delayed_lower");
            cfg.delayed_upper = get_number(cb, "channel_bounds", "delayed_upper");
        }
    } else {
        fail("kind", "expected raw_switched, delay_free_ncs or two_channel_ncs");
    }

    if (root.contains("signal")) {
        if (!root["signal"].is_object()) fail("signal", "expected an object");
        cfg.signal = parse_signal(root["signal"]);
    }
    if (root.contains("analysis")) {
        if (!root["analysis"].is_object()) fail("analysis", "expected an object");
        cfg.analysis = parse_analysis(root["analysis"]);
    }
    cfg.build();  // validate module-level invariants eagerly
    return cfg;
}

std::pair<SwitchedSystem, ActivationBounds> ScenarioConfig::build() const {
    switch (kind) {
        case Kind::RawSwitched:
            return {SwitchedSystem(matrices), ActivationBounds(bounds_lower, bounds_upper)};
        case Kind::DelayFreeNcs: {
            const Plant plant(*plant_a, *plant_b);
            return delay_free_loop(plant, *gain, failure_ratio);
        }
        case Kind::TwoChannelNcs: {
            const Plant plant(*plant_a, *plant_b);
            return two_channel_loop(plant, *gain_direct, *gain_delayed,
                                    RatioBounds(direct_lower, direct_upper),
                                    RatioBounds(delayed_lower, delayed_upper));
        }
    }
    throw std::logic_error("unknown scenario kind");
}

std::string norm_name(const Norm& norm) {
    switch (norm.kind) {
        case NormKind::One: return "one";
        case NormKind::Inf: return "inf";
        case NormKind::Spectral: return "spectral";
        case NormKind::Frobenius: return "frobenius";
        case NormKind::Weighted: return "weighted";
    }
    throw std::logic_error("unknown norm kind");
}

Norm norm_from_name(const std::string& name, const std::optional<Mat>& weight) {
    if (name == "one") return Norm::one();
    if (name == "inf") return Norm::inf();
    if (name == "spectral") return Norm::spectral();
    if (name == "frobenius") return Norm::frobenius();
    if (name == "weighted") {
        if (!weight) throw std::invalid_argument("weighted norm requires an inline weight matrix");
        return Norm::weighted(*weight);
    }
    throw std::invalid_argument("unknown norm '" + name + "'");
}

namespace {

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string certificate_to_json(const StabilityCertificate& cert) {
    json j;
    j["schema_version"] = 1;
    j["h"] = cert.h;
    j["norm"] = norm_name(cert.norm);
    if (cert.norm.weight) j["weight"] = matrix_to_json(*cert.norm.weight);
    j["epsilon"] = cert.epsilon;
    j["objective"] = cert.objective;
    j["verdict"] = cert.verdict == Verdict::CertifiedStable ? "certified_stable" : "inconclusive";
    json occ = json::array();
    for (const auto& [z, w] : cert.worst_occupancy) {
        occ.push_back(json{{"composition", z}, {"weight", w}});
    }
    j["worst_occupancy"] = std::move(occ);
    json wit = json::array();
    for (const auto& [q, w] : cert.witness_schedule) {
        wit.push_back(json{{"sequence", q}, {"weight", w}});
    }
    j["witness_schedule"] = std::move(wit);
    return j.dump(2);
}

StabilityCertificate certificate_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("certificate: ") + e.what());
    }
    StabilityCertificate cert;
    cert.h = j.at("h").get<int>();
    std::optional<Mat> weight;
    if (j.contains("weight")) weight = parse_matrix(j["weight"], "certificate.weight");
    cert.norm = norm_from_name(j.at("norm").get<std::string>(), weight);
    cert.epsilon = j.at("epsilon").get<double>();
    cert.objective = j.at("objective").get<double>();
    const std::string verdict = j.at("verdict").get<std::string>();
    cert.verdict = verdict == "certified_stable" ? Verdict::CertifiedStable : Verdict::Inconclusive;
    for (const json& e : j.at("worst_occupancy")) {
        cert.worst_occupancy.emplace_back(e.at("composition").get<std::vector<int>>(),
                                          e.at("weight").get<double>());
    }
    for (const json& e : j.at("witness_schedule")) {
        cert.witness_schedule.emplace_back(e.at("sequence").get<std::vector<int>>(),
                                           e.at("weight").get<double>());
    }
    return cert;
}

bool operator==(const Norm& a, const Norm& b) {
    if (a.kind != b.kind) return false;
    if (a.weight.has_value() != b.weight.has_value()) return false;
    return !a.weight || *a.weight == *b.weight;
}

bool operator==(const StabilityCertificate& a, const StabilityCertificate& b) {
    return a.h == b.h && a.norm == b.norm && a.epsilon == b.epsilon &&
           a.objective == b.objective && a.verdict == b.verdict &&
           a.worst_occupancy == b.worst_occupancy && a.witness_schedule == b.witness_schedule;
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace switched
