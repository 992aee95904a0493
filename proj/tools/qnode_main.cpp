#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qnode/config.hpp"
#include "qnode/csv.hpp"
#include "qnode/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qnode::IoError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decide whether a single-photon waveform can be trapped by (or generated "
                 "from) a three-level cavity node, synthesize the control pulse that does "
                 "it, and verify by forward simulation."};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int workers = 0;

    app.add_option("--config,-c", config_path, "scenario config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out,-o", out_dir, "output directory (overrides config)");
    app.add_option("--workers,-w", workers, "sweep worker threads (overrides config)");

    const std::vector<std::pair<std::string, std::string>> verbs = {
        {"feasibility", "evaluate the pointwise existence margins"},
        {"trap", "synthesize the trapping pulse and verify by simulation"},
        {"generate", "synthesize the emission pulse and verify by simulation"},
        {"adiabatic", "slow-pulse control approximation and its envelope inverse"},
        {"simulate", "integrate the node dynamics for a given pulse and input"},
        {"sweep", "evaluate margins and efficiencies over a parameter range"},
    };
    for (const auto& [name, description] : verbs) {
        app.add_subcommand(name, description)->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        qnode::ScenarioConfig cfg = qnode::parse_config(read_file(config_path));
        const std::string verb = app.get_subcommands().front()->get_name();
        if (verb != qnode::to_string(cfg.mode)) {
            std::cerr << "error: config mode '" << qnode::to_string(cfg.mode)
                      << "' does not match subcommand '" << verb << "'\n";
            return qnode::kExitError;
        }
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        if (workers > 0) cfg.workers = workers;

        const qnode::RunReport report = qnode::run(cfg);
        std::cout << report.text;
        return report.exit_code;
    } catch (const qnode::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return qnode::kExitError;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << '\n';
        return qnode::kExitError;
    }
}
