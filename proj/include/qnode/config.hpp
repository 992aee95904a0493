#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnode/node_params.hpp"
#include "qnode/types.hpp"

namespace qnode {

enum class RunMode { feasibility, trap, generate, adiabatic, simulate, sweep };

RunMode run_mode_from_string(const std::string& s);
std::string to_string(RunMode m);

enum class CheckKind { lossless, trap, generate };

struct EnvelopeSpec {
    std::string family;  // "gaussian" | "sech" | "csv"
    double t0 = 0.0;
    double tau = 0.0;
    double chirp = 0.0;
    std::string path;    // csv only
};

struct GridSpec {
    double t_start = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    bool present = false;
};

struct SweepSpec {
    std::string parameter;        // dotted path into the config, e.g. "envelope.tau"
    std::vector<double> values;
    bool present = false;
};

struct OutputSpec {
    std::string directory = "out";
    std::string prefix = "run";
};

struct PulseSpec {
    bool zero = true;
    std::string csv;
    bool present = false;
};

struct InputSpec {
    bool zero = true;
    std::optional<EnvelopeSpec> envelope;
    bool present = false;
};

struct InitSpec {
    Complex g{0.0, 0.0};
    std::vector<Complex> r;  // one entry per excited level
    Complex e{0.0, 0.0};
    bool present = false;
};

/// Parsed and validated scenario. Exactly one of node / node_multi is set.
struct ScenarioConfig {
    RunMode mode = RunMode::feasibility;
    GridSpec grid;
    std::optional<EnvelopeSpec> envelope;
    std::optional<NodeParams> node;
    std::optional<MultiNodeParams> node_multi;
    SweepSpec sweep;
    OutputSpec output;
    PulseSpec pulse;
    InputSpec input;
    InitSpec init;
    CheckKind check = CheckKind::trap;
    int workers = 0;  // 0 = hardware concurrency
    nlohmann::json raw;
};

/// Parses a JSON config document. Unknown keys are ParseError (naming the
/// key); semantic violations accumulate into one ValidationError listing
/// every violation.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_json(const nlohmann::json& doc);

} // namespace qnode
