#include "qnode/config.hpp"

#include <set>
#include <sstream>

#include "qnode/errors.hpp"

namespace qnode {

namespace {

using nlohmann::json;

// Collects every semantic violation so the user sees all of them at once.
struct Violations {
    std::vector<std::string> items;

    void add(const std::string& msg) { items.push_back(msg); }
    void raise_if_any() const {
        if (items.empty()) return;
        std::ostringstream out;
        out << "invalid config:";
        for (const auto& item : items) out << "\n  - " << item;
        throw ValidationError(out.str());
    }
};

void require_known_keys(const json& obj, const std::set<std::string>& allowed,
                        const std::string& context) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.contains(it.key())) {
            throw ParseError("unknown key '" + it.key() + "' in " + context);
        }
    }
}

double get_number(const json& obj, const std::string& key, const std::string& context,
                  Violations& v, double fallback = 0.0, bool required = true) {
    if (!obj.contains(key)) {
        if (required) v.add(context + ": missing key '" + key + "'");
        return fallback;
    }
    if (!obj.at(key).is_number()) {
        v.add(context + ": '" + key + "' must be a number");
        return fallback;
    }
    return obj.at(key).get<double>();
}

Complex get_complex(const json& node, const std::string& context, Violations& v) {
    if (node.is_number()) return Complex(node.get<double>(), 0.0);
    if (node.is_array() && node.size() == 2 && node[0].is_number() && node[1].is_number()) {
        return Complex(node[0].get<double>(), node[1].get<double>());
    }
    v.add(context + ": expected a number or [re, im] pair");
    return Complex(0.0, 0.0);
}

EnvelopeSpec parse_envelope(const json& obj, const std::string& context, Violations& v) {
    require_known_keys(obj, {"family", "t0", "tau", "chirp", "path"}, context);
    EnvelopeSpec spec;
    if (!obj.contains("family") || !obj.at("family").is_string()) {
        v.add(context + ": missing string key 'family'");
        return spec;
    }
    spec.family = obj.at("family").get<std::string>();
    if (spec.family == "gaussian" || spec.family == "sech") {
        spec.t0 = get_number(obj, "t0", context, v, 0.0, false);
        spec.tau = get_number(obj, "tau", context, v);
        spec.chirp = get_number(obj, "chirp", context, v, 0.0, false);
        if (spec.tau <= 0.0) v.add(context + ": tau must be > 0");
        if (obj.contains("path")) v.add(context + ": 'path' is only valid for family csv");
    } else if (spec.family == "csv") {
        if (!obj.contains("path") || !obj.at("path").is_string()) {
            v.add(context + ": family csv requires a string 'path'");
        } else {
            spec.path = obj.at("path").get<std::string>();
        }
        spec.chirp = get_number(obj, "chirp", context, v, 0.0, false);
        for (const char* key : {"t0", "tau"}) {
            if (obj.contains(key)) {
                v.add(context + ": '" + std::string(key) + "' is not valid for family csv");
            }
        }
    } else {
        v.add(context + ": family must be gaussian, sech or csv");
    }
    return spec;
}

NodeParams parse_node(const json& obj, Violations& v) {
    require_known_keys(obj, {"kappa", "gamma_c", "gamma_sp", "g0", "delta"}, "node");
    NodeParams p;
    p.kappa = get_number(obj, "kappa", "node", v);
    p.gamma_c = get_number(obj, "gamma_c", "node", v, 0.0, false);
    p.gamma_sp = get_number(obj, "gamma_sp", "node", v, 0.0, false);
    p.delta = get_number(obj, "delta", "node", v, 0.0, false);
    if (obj.contains("g0")) {
        p.g0 = get_complex(obj.at("g0"), "node.g0", v);
    } else {
        v.add("node: missing key 'g0'");
    }
    return p;
}

MultiNodeParams parse_node_multi(const json& obj, Violations& v) {
    require_known_keys(obj, {"kappa", "gamma_c", "levels"}, "node_multi");
    MultiNodeParams m;
    m.kappa = get_number(obj, "kappa", "node_multi", v);
    m.gamma_c = get_number(obj, "gamma_c", "node_multi", v, 0.0, false);
    if (!obj.contains("levels") || !obj.at("levels").is_array() || obj.at("levels").empty()) {
        v.add("node_multi: 'levels' must be a non-empty array");
        return m;
    }
    const auto& levels = obj.at("levels");
    const auto n = static_cast<Eigen::Index>(levels.size());
    m.couplings.resize(n);
    m.branching.resize(n);
    m.deltas.resize(n);
    m.gammas.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::string context = "node_multi.levels[" + std::to_string(k) + "]";
        const auto& level = levels[static_cast<size_t>(k)];
        if (!level.is_object()) {
            v.add(context + ": must be an object");
            continue;
        }
        require_known_keys(level, {"g", "v", "delta", "gamma"}, context);
        m.couplings[k] = level.contains("g")
                             ? get_complex(level.at("g"), context + ".g", v)
                             : (v.add(context + ": missing key 'g'"), Complex(0, 0));
        m.branching[k] = level.contains("v")
                             ? get_complex(level.at("v"), context + ".v", v)
                             : (v.add(context + ": missing key 'v'"), Complex(0, 0));
        m.deltas[k] = get_number(level, "delta", context, v, 0.0, false);
        m.gammas[k] = get_number(level, "gamma", context, v, 0.0, false);
        if (m.gammas[k] < 0.0) v.add(context + ": gamma must be >= 0");
    }
    // Users supply V to finite precision; normalize exactly, reject only
    // grossly non-unit vectors.
    const double nrm = m.branching.norm();
    if (std::abs(nrm - 1.0) > 1e-6) {
        v.add("node_multi: branching vector norm " + std::to_string(nrm) +
              " is not 1 (tolerance 1e-6)");
    } else if (nrm > 0.0) {
        m.branching /= nrm;
    }
    return m;
}

Complex parse_init_component(const json& node, const std::string& context, Violations& v) {
    return get_complex(node, context, v);
}

} // namespace

RunMode run_mode_from_string(const std::string& s) {
    if (s == "feasibility") return RunMode::feasibility;
    if (s == "trap") return RunMode::trap;
    if (s == "generate") return RunMode::generate;
    if (s == "adiabatic") return RunMode::adiabatic;
    if (s == "simulate") return RunMode::simulate;
    if (s == "sweep") return RunMode::sweep;
    throw ValidationError("unknown mode '" + s + "'");
}

std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::feasibility: return "feasibility";
        case RunMode::trap: return "trap";
        case RunMode::generate: return "generate";
        case RunMode::adiabatic: return "adiabatic";
        case RunMode::simulate: return "simulate";
        case RunMode::sweep: return "sweep";
    }
    return "?";
}

ScenarioConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ParseError(std::string("config is not valid JSON: ") + err.what());
    }
    return parse_config_json(doc);
}

ScenarioConfig parse_config_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("config root must be a JSON object");
    require_known_keys(doc,
                       {"mode", "grid", "envelope", "node", "node_multi", "sweep", "output",
                        "pulse", "input", "init", "check", "workers"},
                       "config root");

    Violations v;
    ScenarioConfig cfg;
    cfg.raw = doc;

    if (!doc.contains("mode") || !doc.at("mode").is_string()) {
        throw ParseError("config: missing string key 'mode'");
    }
    cfg.mode = run_mode_from_string(doc.at("mode").get<std::string>());

    if (doc.contains("grid")) {
        const auto& grid = doc.at("grid");
        require_known_keys(grid, {"t_start", "t_end", "dt"}, "grid");
        cfg.grid.present = true;
        cfg.grid.t_start = get_number(grid, "t_start", "grid", v);
        cfg.grid.t_end = get_number(grid, "t_end", "grid", v);
        cfg.grid.dt = get_number(grid, "dt", "grid", v);
        if (cfg.grid.dt <= 0.0) v.add("grid: dt must be > 0");
        if (cfg.grid.t_end <= cfg.grid.t_start) v.add("grid: t_end must exceed t_start");
        if (cfg.grid.dt > 0.0 && cfg.grid.t_end > cfg.grid.t_start) {
            const double steps = (cfg.grid.t_end - cfg.grid.t_start) / cfg.grid.dt;
            if (std::abs(steps - std::round(steps)) > 1e-6) {
                v.add("grid: (t_end - t_start)/dt must be an integer step count");
            }
        }
    }

    if (doc.contains("envelope")) {
        cfg.envelope = parse_envelope(doc.at("envelope"), "envelope", v);
    }

    if (doc.contains("node") && doc.contains("node_multi")) {
        v.add("exactly one of 'node' / 'node_multi' may be present, found both");
    }
    if (doc.contains("node")) cfg.node = parse_node(doc.at("node"), v);
    if (doc.contains("node_multi")) cfg.node_multi = parse_node_multi(doc.at("node_multi"), v);
    if (!cfg.node && !cfg.node_multi) v.add("one of 'node' / 'node_multi' is required");

    if (doc.contains("sweep")) {
        const auto& sweep = doc.at("sweep");
        require_known_keys(sweep, {"parameter", "values"}, "sweep");
        cfg.sweep.present = true;
        if (!sweep.contains("parameter") || !sweep.at("parameter").is_string()) {
            v.add("sweep: missing string key 'parameter'");
        } else {
            cfg.sweep.parameter = sweep.at("parameter").get<std::string>();
        }
        if (!sweep.contains("values") || !sweep.at("values").is_array() ||
            sweep.at("values").empty()) {
            v.add("sweep: 'values' must be a non-empty array of numbers");
        } else {
            for (const auto& value : sweep.at("values")) {
                if (!value.is_number()) {
                    v.add("sweep: 'values' must contain only numbers");
                    break;
                }
                cfg.sweep.values.push_back(value.get<double>());
            }
        }
    }

    if (doc.contains("output")) {
        const auto& output = doc.at("output");
        require_known_keys(output, {"directory", "prefix"}, "output");
        if (output.contains("directory")) {
            if (output.at("directory").is_string()) {
                cfg.output.directory = output.at("directory").get<std::string>();
            } else {
                v.add("output: 'directory' must be a string");
            }
        }
        if (output.contains("prefix")) {
            if (output.at("prefix").is_string()) {
                cfg.output.prefix = output.at("prefix").get<std::string>();
            } else {
                v.add("output: 'prefix' must be a string");
            }
        }
    }

    if (doc.contains("pulse")) {
        const auto& pulse = doc.at("pulse");
        require_known_keys(pulse, {"zero", "csv"}, "pulse");
        cfg.pulse.present = true;
        if (pulse.contains("csv")) {
            if (!pulse.at("csv").is_string()) {
                v.add("pulse: 'csv' must be a string path");
            } else {
                cfg.pulse.csv = pulse.at("csv").get<std::string>();
                cfg.pulse.zero = false;
            }
        }
        if (pulse.contains("zero")) {
            if (!pulse.at("zero").is_boolean()) {
                v.add("pulse: 'zero' must be a boolean");
            } else if (pulse.at("zero").get<bool>() == !cfg.pulse.csv.empty()) {
                v.add("pulse: give either zero=true or a csv path, not both");
            }
        }
    }

    if (doc.contains("input")) {
        const auto& input = doc.at("input");
        require_known_keys(input, {"zero", "envelope"}, "input");
        cfg.input.present = true;
        if (input.contains("envelope")) {
            cfg.input.envelope = parse_envelope(input.at("envelope"), "input.envelope", v);
            cfg.input.zero = false;
        }
        if (input.contains("zero")) {
            if (!input.at("zero").is_boolean()) {
                v.add("input: 'zero' must be a boolean");
            } else if (input.at("zero").get<bool>() == cfg.input.envelope.has_value()) {
                v.add("input: give either zero=true or an envelope, not both");
            }
        }
    }

    if (doc.contains("init")) {
        const auto& init = doc.at("init");
        require_known_keys(init, {"g", "r", "e"}, "init");
        cfg.init.present = true;
        if (init.contains("g")) cfg.init.g = parse_init_component(init.at("g"), "init.g", v);
        if (init.contains("e")) cfg.init.e = parse_init_component(init.at("e"), "init.e", v);
        if (init.contains("r")) {
            const auto& r = init.at("r");
            // single complex for one excited level, array of pairs for several
            if (r.is_array() && !r.empty() && r[0].is_array()) {
                for (size_t j = 0; j < r.size(); ++j) {
                    cfg.init.r.push_back(
                        parse_init_component(r[j], "init.r[" + std::to_string(j) + "]", v));
                }
            } else {
                cfg.init.r.push_back(parse_init_component(r, "init.r", v));
            }
        }
    }

    if (doc.contains("check")) {
        if (!doc.at("check").is_string()) {
            v.add("check: must be one of lossless, trap, generate");
        } else {
            const std::string check = doc.at("check").get<std::string>();
            if (check == "lossless") cfg.check = CheckKind::lossless;
            else if (check == "trap") cfg.check = CheckKind::trap;
            else if (check == "generate") cfg.check = CheckKind::generate;
            else v.add("check: must be one of lossless, trap, generate, got '" + check + "'");
        }
    }

    if (doc.contains("workers")) {
        if (!doc.at("workers").is_number_integer() || doc.at("workers").get<int>() < 1) {
            v.add("workers: must be a positive integer");
        } else {
            cfg.workers = doc.at("workers").get<int>();
        }
    }

    // mode-specific requirements
    const bool needs_envelope = cfg.mode == RunMode::feasibility || cfg.mode == RunMode::trap ||
                                cfg.mode == RunMode::generate || cfg.mode == RunMode::adiabatic ||
                                cfg.mode == RunMode::sweep;
    if (needs_envelope && !cfg.envelope) {
        v.add(to_string(cfg.mode) + " mode requires an 'envelope' block");
    }
    const bool csv_envelope = cfg.envelope && cfg.envelope->family == "csv";
    if (!cfg.grid.present && !(csv_envelope || cfg.mode == RunMode::simulate)) {
        v.add("missing 'grid' block");
    }
    if (cfg.mode == RunMode::sweep && !cfg.sweep.present) {
        v.add("sweep mode requires a 'sweep' block");
    }
    if (cfg.mode != RunMode::sweep && cfg.sweep.present) {
        v.add("'sweep' block is only valid in sweep mode");
    }
    if (cfg.mode == RunMode::simulate) {
        if (!cfg.pulse.present) v.add("simulate mode requires a 'pulse' block");
        if (!cfg.grid.present && cfg.pulse.zero && !cfg.input.envelope) {
            v.add("simulate mode needs a grid (directly, via pulse csv, or via input envelope)");
        }
    } else {
        if (cfg.pulse.present) v.add("'pulse' block is only valid in simulate mode");
        if (cfg.input.present) v.add("'input' block is only valid in simulate mode");
        if (cfg.init.present) v.add("'init' block is only valid in simulate mode");
    }
    if (cfg.mode == RunMode::adiabatic && cfg.node_multi) {
        v.add("adiabatic mode supports single-level nodes only");
    }
    if (cfg.node_multi && cfg.check == CheckKind::lossless) {
        v.add("check: lossless is defined for single-level nodes only");
    }

    // kappa = 0 (closed cavity) is meaningful only for plain simulation
    const bool open_cavity_needed = cfg.mode != RunMode::simulate;
    if (cfg.node) {
        if (cfg.node->kappa < 0.0 || (open_cavity_needed && cfg.node->kappa == 0.0)) {
            v.add(std::string("node: kappa must be ") + (open_cavity_needed ? "> 0" : ">= 0"));
        }
        if (cfg.node->gamma_c < 0.0) v.add("node: gamma_c must be >= 0");
        if (cfg.node->gamma_sp < 0.0) v.add("node: gamma_sp must be >= 0");
        if (std::abs(cfg.node->g0) <= 0.0) v.add("node: |g0| must be > 0");
    }
    if (cfg.node_multi &&
        (cfg.node_multi->kappa < 0.0 || (open_cavity_needed && cfg.node_multi->kappa == 0.0))) {
        v.add("node_multi: kappa must be > 0");
    }

    v.raise_if_any();
    return cfg;
}

} // namespace qnode
