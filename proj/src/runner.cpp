#include "qnode/runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qnode/csv.hpp"
#include "qnode/feasibility.hpp"
#include "qnode/multilevel.hpp"
#include "qnode/quadrature.hpp"
#include "qnode/synthesis.hpp"

namespace qnode {

namespace {

using nlohmann::json;

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

TimeGrid grid_from_spec(const GridSpec& spec) {
    return TimeGrid::from_span(spec.t_start, spec.t_end, spec.dt);
}

PhotonEnvelope envelope_from_spec(const EnvelopeSpec& spec, const GridSpec& grid_spec) {
    PhotonEnvelope env;
    if (spec.family == "csv") {
        env = load_envelope_csv(spec.path);
        if (grid_spec.present && !(env.grid == grid_from_spec(grid_spec))) {
            throw ValidationError("envelope csv grid differs from the configured grid");
        }
    } else {
        const TimeGrid grid = grid_from_spec(grid_spec);
        env = spec.family == "gaussian" ? make_gaussian(spec.t0, spec.tau, grid)
                                        : make_sech(spec.t0, spec.tau, grid);
    }
    if (spec.chirp != 0.0) env = apply_chirp(env, spec.chirp);
    return env;
}

struct ReportBuilder {
    std::ostringstream text;
    json summary;

    void line(const std::string& key, const std::string& value) {
        text << key << ": " << value << '\n';
        summary[key] = value;
    }
    void number(const std::string& key, double value) {
        text << key << ": " << format_double(value) << '\n';
        summary[key] = value;
    }
};

void describe_scenario(ReportBuilder& rb, const ScenarioConfig& cfg, const TimeGrid* grid) {
    rb.line("mode", to_string(cfg.mode));
    if (grid) {
        rb.text << "grid: t in [" << format_double(grid->t_start) << ", "
                << format_double(grid->t_end()) << "], dt = " << format_double(grid->dt)
                << ", n = " << grid->n_points << '\n';
        rb.summary["grid"] = {{"t_start", grid->t_start},
                              {"dt", grid->dt},
                              {"n_points", grid->n_points}};
    }
    if (cfg.envelope) {
        rb.text << "envelope: " << cfg.envelope->family;
        if (cfg.envelope->family == "csv") {
            rb.text << " path=" << cfg.envelope->path;
        } else {
            rb.text << " t0=" << format_double(cfg.envelope->t0)
                    << " tau=" << format_double(cfg.envelope->tau);
        }
        if (cfg.envelope->chirp != 0.0) {
            rb.text << " chirp=" << format_double(cfg.envelope->chirp);
        }
        rb.text << '\n';
    }
    if (cfg.node) {
        rb.text << "node: kappa=" << format_double(cfg.node->kappa)
                << " gamma_c=" << format_double(cfg.node->gamma_c)
                << " gamma_sp=" << format_double(cfg.node->gamma_sp) << " g0=("
                << format_double(cfg.node->g0.real()) << ", "
                << format_double(cfg.node->g0.imag())
                << ") delta=" << format_double(cfg.node->delta)
                << " [" << to_string(coupling_regime(*cfg.node)) << " coupling]" << '\n';
    }
    if (cfg.node_multi) {
        rb.text << "node: multilevel, N=" << cfg.node_multi->n_levels()
                << " kappa=" << format_double(cfg.node_multi->kappa)
                << " gamma_c=" << format_double(cfg.node_multi->gamma_c) << '\n';
    }
}

void add_budgets(ReportBuilder& rb, const Budgets& b) {
    rb.text << "budgets: input=" << format_double(b.input)
            << " emitted=" << format_double(b.emitted)
            << " spurious_cavity=" << format_double(b.spurious_cavity)
            << " spontaneous=" << format_double(b.spontaneous)
            << " node_prob=" << format_double(b.node_prob)
            << " initial=" << format_double(b.initial) << '\n';
    rb.number("flux_residual", b.flux_residual());
    rb.summary["budgets"] = {{"input", b.input},
                             {"emitted", b.emitted},
                             {"spurious_cavity", b.spurious_cavity},
                             {"spontaneous", b.spontaneous},
                             {"node_prob", b.node_prob},
                             {"initial", b.initial}};
}

void write_margin_csv(const std::string& path, const TimeGrid& grid,
                      const Eigen::VectorXd& margin, RunReport& report) {
    write_csv(path, {{"t", "margin"}, {grid.times(), margin}});
    report.files.push_back(path);
}

Eigen::VectorXd real_part(const Eigen::VectorXcd& v) { return v.real(); }
Eigen::VectorXd imag_part(const Eigen::VectorXcd& v) { return v.imag(); }

void write_pulse_csv(const std::string& path, const ControlPulse& pulse,
                     const Eigen::VectorXcd& g, const Eigen::VectorXcd* r,
                     const Eigen::MatrixXcd* levels, const Eigen::VectorXcd& e,
                     RunReport& report) {
    CsvTable table;
    table.header = {"t", "omega_mag", "omega_phase", "re_g", "im_g"};
    table.columns = {pulse.grid.times(), pulse.magnitude, pulse.phase, real_part(g),
                     imag_part(g)};
    if (r) {
        table.header.insert(table.header.end(), {"re_r", "im_r"});
        table.columns.push_back(real_part(*r));
        table.columns.push_back(imag_part(*r));
    }
    if (levels) {
        for (Eigen::Index j = 0; j < levels->rows(); ++j) {
            const std::string idx = std::to_string(j + 1);
            table.header.insert(table.header.end(), {"re_R_" + idx, "im_R_" + idx});
            table.columns.push_back(levels->row(j).real().transpose());
            table.columns.push_back(levels->row(j).imag().transpose());
        }
    }
    table.header.insert(table.header.end(), {"re_e", "im_e"});
    table.columns.push_back(real_part(e));
    table.columns.push_back(imag_part(e));
    write_csv(path, table);
    report.files.push_back(path);
}

void write_trajectory_csv(const std::string& path, const TimeGrid& grid,
                          const Eigen::VectorXcd& ain, const Eigen::VectorXcd& aout,
                          const Eigen::VectorXcd& g, const Eigen::VectorXcd* r,
                          const Eigen::MatrixXcd* levels, const Eigen::VectorXcd& e,
                          const Eigen::VectorXd& node_prob, RunReport& report) {
    CsvTable table;
    table.header = {"t", "re_ain", "im_ain", "re_aout", "im_aout", "re_g", "im_g"};
    table.columns = {grid.times(),   real_part(ain), imag_part(ain), real_part(aout),
                     imag_part(aout), real_part(g),   imag_part(g)};
    if (r) {
        table.header.insert(table.header.end(), {"re_r", "im_r"});
        table.columns.push_back(real_part(*r));
        table.columns.push_back(imag_part(*r));
    }
    if (levels) {
        for (Eigen::Index j = 0; j < levels->rows(); ++j) {
            const std::string idx = std::to_string(j + 1);
            table.header.insert(table.header.end(), {"re_R_" + idx, "im_R_" + idx});
            table.columns.push_back(levels->row(j).real().transpose());
            table.columns.push_back(levels->row(j).imag().transpose());
        }
    }
    table.header.insert(table.header.end(), {"re_e", "im_e", "node_prob"});
    table.columns.push_back(real_part(e));
    table.columns.push_back(imag_part(e));
    table.columns.push_back(node_prob);
    write_csv(path, table);
    report.files.push_back(path);
}

void finish_report(RunReport& report, ReportBuilder& rb, const std::string& dir,
                   const std::string& prefix) {
    rb.line("verdict", report.verdict);
    if (!report.warnings.empty()) {
        for (const auto& w : report.warnings) rb.text << "warning: " << w << '\n';
        rb.summary["warnings"] = report.warnings;
    }

    const std::string report_path = join_path(dir, prefix + "_report.txt");
    const std::string summary_path = join_path(dir, prefix + "_summary.json");
    report.files.push_back(report_path);
    report.files.push_back(summary_path);

    rb.text << "files:" << '\n';
    for (const auto& f : report.files) rb.text << "  " << f << '\n';
    rb.summary["files"] = report.files;
    rb.summary["exit_code"] = report.exit_code;

    report.text = rb.text.str();
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + report_path + "'");
    out << report.text;
    std::ofstream summary(summary_path, std::ios::binary);
    if (!summary) throw IoError("cannot write '" + summary_path + "'");
    summary << rb.summary.dump(2) << '\n';
}

FeasibilityReport run_check(CheckKind check, const PhotonEnvelope& env,
                            const ScenarioConfig& cfg) {
    if (cfg.node_multi) {
        if (check == CheckKind::generate) return margin_gen_n(env, *cfg.node_multi);
        return margin_trap_n(env, *cfg.node_multi);
    }
    switch (check) {
        case CheckKind::lossless: return margin_lossless(env, *cfg.node);
        case CheckKind::trap: return margin_trap(env, *cfg.node);
        case CheckKind::generate: return margin_gen(env, *cfg.node);
    }
    throw InvalidArgument("run_check: bad check kind");
}

RunReport run_feasibility(const ScenarioConfig& cfg) {
    const PhotonEnvelope env = envelope_from_spec(*cfg.envelope, cfg.grid);
    RunReport report;
    ReportBuilder rb;
    describe_scenario(rb, cfg, &env.grid);

    const std::string& dir = cfg.output.directory;
    const std::string& prefix = cfg.output.prefix;

    if (cfg.node_multi) {
        const FeasibilityReport trap = margin_trap_n(env, *cfg.node_multi);
        const FeasibilityReport gen = margin_gen_n(env, *cfg.node_multi);
        write_margin_csv(join_path(dir, prefix + "_margin_trap.csv"), env.grid, trap.margin,
                         report);
        write_margin_csv(join_path(dir, prefix + "_margin_gen.csv"), env.grid, gen.margin,
                         report);
        rb.number("min_margin_trap", trap.min_margin);
        rb.number("min_margin_gen", gen.min_margin);
        rb.line("feasible_trap", trap.feasible ? "true" : "false");
        rb.line("feasible_gen", gen.feasible ? "true" : "false");
        if (trap.predicted_efficiency) rb.number("eta_trap", *trap.predicted_efficiency);
        if (gen.predicted_efficiency) rb.number("eta_gen", *gen.predicted_efficiency);
        const DarkStateReport dark = dark_state_check(decompose(*cfg.node_multi));
        if (dark.any_flagged()) {
            report.warnings.push_back(
                "dark state: the closed excited-level block has a near-real eigenvalue; "
                "population can stay trapped outside the control's reach");
        }
        const FeasibilityReport& checked = cfg.check == CheckKind::generate ? gen : trap;
        report.min_margin = checked.min_margin;
        report.argmin_t = checked.argmin_t;
        report.predicted_efficiency = checked.predicted_efficiency;
        report.verdict = checked.feasible ? "feasible" : "infeasible";
        report.exit_code = checked.feasible ? kExitOk : kExitInfeasible;
    } else {
        const FeasibilityReport lossless = margin_lossless(env, *cfg.node);
        const FeasibilityReport trap = margin_trap(env, *cfg.node);
        const FeasibilityReport gen = margin_gen(env, *cfg.node);
        write_margin_csv(join_path(dir, prefix + "_margin_lossless.csv"), env.grid,
                         lossless.margin, report);
        write_margin_csv(join_path(dir, prefix + "_margin_trap.csv"), env.grid, trap.margin,
                         report);
        write_margin_csv(join_path(dir, prefix + "_margin_gen.csv"), env.grid, gen.margin,
                         report);
        rb.number("min_margin_lossless", lossless.min_margin);
        rb.number("min_margin_trap", trap.min_margin);
        rb.number("min_margin_gen", gen.min_margin);
        rb.line("feasible_lossless", lossless.feasible ? "true" : "false");
        rb.line("feasible_trap", trap.feasible ? "true" : "false");
        rb.line("feasible_gen", gen.feasible ? "true" : "false");
        rb.number("eta_trap", eta_trap(env, *cfg.node));
        rb.number("eta_gen", eta_gen(env, *cfg.node));

        const FeasibilityReport& checked = cfg.check == CheckKind::lossless ? lossless
                                           : cfg.check == CheckKind::generate ? gen
                                                                              : trap;
        report.min_margin = checked.min_margin;
        report.argmin_t = checked.argmin_t;
        report.predicted_efficiency = checked.predicted_efficiency;
        report.verdict = checked.feasible ? "feasible" : "infeasible";
        report.exit_code = checked.feasible ? kExitOk : kExitInfeasible;
    }

    rb.number("min_margin", *report.min_margin);
    rb.number("argmin_t", *report.argmin_t);
    finish_report(report, rb, dir, prefix);
    return report;
}

RunReport run_transfer(const ScenarioConfig& cfg) {
    const bool trapping = cfg.mode == RunMode::trap;
    const PhotonEnvelope env = envelope_from_spec(*cfg.envelope, cfg.grid);
    RunReport report;
    ReportBuilder rb;
    describe_scenario(rb, cfg, &env.grid);

    const std::string& dir = cfg.output.directory;
    const std::string& prefix = cfg.output.prefix;
    const std::string margin_name = trapping ? "_margin_trap.csv" : "_margin_gen.csv";

    try {
        if (cfg.node_multi) {
            const MultiSynthesisResult syn = trapping ? synthesize_trap_n(env, *cfg.node_multi)
                                                      : synthesize_gen_n(env, *cfg.node_multi);
            if (syn.dark_warning) {
                report.warnings.push_back(
                    "dark state: the closed excited-level block has a near-real eigenvalue");
            }
            write_margin_csv(join_path(dir, prefix + margin_name), env.grid, syn.margin, report);
            write_pulse_csv(join_path(dir, prefix + "_pulse.csv"), syn.pulse, syn.traj.g,
                            nullptr, &syn.traj.R, syn.traj.e, report);

            const InputField in_field = trapping ? InputField::from_envelope(env)
                                                 : InputField::zero(env.grid);
            MultiInit init;
            init.r = Eigen::VectorXcd::Zero(cfg.node_multi->n_levels());
            if (!trapping) init.e = 1.0;
            const MultiSimOutcome sim = simulate_n(in_field, syn.pulse, *cfg.node_multi, init);
            write_trajectory_csv(join_path(dir, prefix + "_trajectory.csv"), env.grid,
                                 in_field.series, sim.alpha_out, sim.g, nullptr, &sim.R, sim.e,
                                 sim.node_prob, report);

            report.predicted_efficiency = syn.efficiency;
            report.simulated_efficiency =
                trapping ? std::norm(sim.e[env.size() - 1])
                         : trapezoid(sim.alpha_out.cwiseAbs2().eval(), env.grid.dt);
            report.budgets = sim.budgets;
            if (!trapping) {
                rb.number("target_overlap", output_overlap(sim.alpha_out, env));
            }
        } else {
            const SynthesisResult syn = trapping ? synthesize_trap(env, *cfg.node)
                                                 : synthesize_gen(env, *cfg.node);
            const FeasibilityReport margin = trapping ? margin_trap(env, *cfg.node)
                                                      : margin_gen(env, *cfg.node);
            write_margin_csv(join_path(dir, prefix + margin_name), env.grid, margin.margin,
                             report);
            write_pulse_csv(join_path(dir, prefix + "_pulse.csv"), syn.pulse, syn.g_traj,
                            &syn.r_traj, nullptr, syn.e_traj, report);
            report.min_margin = margin.min_margin;
            report.argmin_t = margin.argmin_t;

            const InputField in_field = trapping ? InputField::from_envelope(env)
                                                 : InputField::zero(env.grid);
            const Eigen::Vector3cd init =
                trapping ? Eigen::Vector3cd::Zero().eval()
                         : Eigen::Vector3cd(Complex(0, 0), Complex(0, 0), Complex(1, 0));
            const SimOutcome sim = simulate(in_field, syn.pulse, *cfg.node, init);
            write_trajectory_csv(join_path(dir, prefix + "_trajectory.csv"), env.grid,
                                 in_field.series, sim.alpha_out, sim.g, &sim.r, nullptr, sim.e,
                                 sim.node_prob, report);

            report.predicted_efficiency = syn.efficiency;
            report.simulated_efficiency =
                trapping ? std::norm(sim.e[env.size() - 1])
                         : trapezoid(sim.alpha_out.cwiseAbs2().eval(), env.grid.dt);
            report.budgets = sim.budgets;
            if (!trapping) {
                rb.number("target_overlap", output_overlap(sim.alpha_out, env));
            }
        }
    } catch (const Infeasible& err) {
        const FeasibilityReport margin = run_check(
            trapping ? CheckKind::trap : CheckKind::generate, env, cfg);
        write_margin_csv(join_path(dir, prefix + margin_name), env.grid, margin.margin, report);
        report.min_margin = margin.min_margin;
        report.argmin_t = margin.argmin_t;
        rb.number("min_margin", margin.min_margin);
        rb.number("argmin_t", margin.argmin_t);
        rb.line("detail", err.what());
        report.verdict = "infeasible";
        report.exit_code = kExitInfeasible;
        finish_report(report, rb, dir, prefix);
        return report;
    }

    if (report.min_margin) rb.number("min_margin", *report.min_margin);
    rb.number("predicted_efficiency", *report.predicted_efficiency);
    rb.number("simulated_efficiency", *report.simulated_efficiency);
    rb.number("efficiency_abs_difference",
              std::abs(*report.predicted_efficiency - *report.simulated_efficiency));
    add_budgets(rb, *report.budgets);
    report.verdict = "feasible";
    report.exit_code = kExitOk;
    finish_report(report, rb, dir, prefix);
    return report;
}

RunReport run_adiabatic(const ScenarioConfig& cfg) {
    const PhotonEnvelope env = envelope_from_spec(*cfg.envelope, cfg.grid);
    RunReport report;
    ReportBuilder rb;
    describe_scenario(rb, cfg, &env.grid);
    const std::string& dir = cfg.output.directory;
    const std::string& prefix = cfg.output.prefix;

    const ControlPulse pulse = adiabatic_pulse(env, *cfg.node);
    const std::string pulse_path = join_path(dir, prefix + "_pulse.csv");
    write_csv(pulse_path,
              {{"t", "omega_mag", "omega_phase"},
               {env.grid.times(), pulse.magnitude, pulse.phase}});
    report.files.push_back(pulse_path);

    const AdiabaticInversion inv = envelope_from_adiabatic_pulse(pulse, *cfg.node);
    const std::string env_path = join_path(dir, prefix + "_recovered_envelope.csv");
    write_csv(env_path, {{"t", "re", "im"},
                         {env.grid.times(), real_part(inv.envelope.values),
                          imag_part(inv.envelope.values)}});
    report.files.push_back(env_path);
    rb.number("recovered_norm_before_renormalization", inv.norm_before_renormalization);

    // l1 distance between |alpha|^2 of source and round-tripped envelope
    const Eigen::VectorXd diff =
        (env.values.cwiseAbs2() - inv.envelope.values.cwiseAbs2()).cwiseAbs();
    rb.number("round_trip_l1_error", trapezoid(diff, env.grid.dt));

    const FeasibilityReport trap = margin_trap(env, *cfg.node);
    if (trap.feasible) {
        const SynthesisResult exact = synthesize_trap(env, *cfg.node);
        const Eigen::VectorXd cum = cumulative_norm(env);
        double worst = 0.0;
        for (Eigen::Index k = 0; k < env.size(); ++k) {
            if (cum[k] < 0.01 || cum[k] > 0.99) continue;
            const double exact_sq = exact.pulse.magnitude[k] * exact.pulse.magnitude[k];
            const double approx_sq = pulse.magnitude[k] * pulse.magnitude[k];
            if (exact_sq > 0.0) {
                worst = std::max(worst, std::abs(approx_sq - exact_sq) / exact_sq);
            }
        }
        rb.number("max_relative_deviation_from_exact", worst);
    } else {
        report.warnings.push_back("exact trapping construction infeasible for this envelope; "
                                  "slow-pulse approximation reported on its own");
    }

    report.verdict = "ok";
    report.exit_code = kExitOk;
    finish_report(report, rb, dir, prefix);
    return report;
}

RunReport run_simulate(const ScenarioConfig& cfg) {
    // The grid comes from the config, the pulse csv, or the input envelope,
    // in that order of preference; everything must agree.
    std::optional<TimeGrid> grid;
    if (cfg.grid.present) grid = grid_from_spec(cfg.grid);

    std::optional<ControlPulse> pulse;
    if (!cfg.pulse.zero) {
        const CsvTable table = read_csv(cfg.pulse.csv);
        if (table.header.size() < 3 || table.header[0] != "t" ||
            table.header[1] != "omega_mag" || table.header[2] != "omega_phase") {
            throw ParseError("pulse csv '" + cfg.pulse.csv +
                             "': header must start with t,omega_mag,omega_phase");
        }
        const Eigen::VectorXd& t = table.columns[0];
        if (t.size() < 2) throw ParseError("pulse csv: need at least 2 rows");
        const double dt = (t[t.size() - 1] - t[0]) / static_cast<double>(t.size() - 1);
        const TimeGrid pulse_grid{t[0], dt, t.size()};
        validate(pulse_grid);
        if (grid && !(*grid == pulse_grid)) {
            // allow round-off level disagreement between csv and config
            if (std::abs(grid->t_start - pulse_grid.t_start) > 1e-9 * grid->dt ||
                std::abs(grid->dt - pulse_grid.dt) > 1e-9 * grid->dt ||
                grid->n_points != pulse_grid.n_points) {
                throw GridMismatch("pulse csv grid differs from configured grid");
            }
        }
        if (!grid) grid = pulse_grid;
        ControlPulse p;
        p.grid = *grid;
        p.magnitude = table.columns[1];
        p.phase = table.columns[2];
        pulse = std::move(p);
    }

    std::optional<PhotonEnvelope> input_env;
    if (cfg.input.envelope) {
        input_env = envelope_from_spec(*cfg.input.envelope, cfg.grid);
        if (grid && !(input_env->grid == *grid)) {
            throw GridMismatch("input envelope grid differs from configured grid");
        }
        if (!grid) grid = input_env->grid;
    }
    if (!grid) throw ValidationError("simulate: no grid available");

    if (!pulse) {
        ControlPulse p;
        p.grid = *grid;
        p.magnitude = Eigen::VectorXd::Zero(grid->n_points);
        p.phase = Eigen::VectorXd::Zero(grid->n_points);
        pulse = std::move(p);
    }
    const InputField in_field =
        input_env ? InputField::from_envelope(*input_env) : InputField::zero(*grid);

    RunReport report;
    ReportBuilder rb;
    describe_scenario(rb, cfg, &*grid);
    const std::string& dir = cfg.output.directory;
    const std::string& prefix = cfg.output.prefix;

    if (cfg.node_multi) {
        MultiInit init;
        init.g = cfg.init.g;
        init.e = cfg.init.e;
        init.r = Eigen::VectorXcd::Zero(cfg.node_multi->n_levels());
        for (size_t j = 0; j < cfg.init.r.size() && j < static_cast<size_t>(init.r.size()); ++j) {
            init.r[static_cast<Eigen::Index>(j)] = cfg.init.r[j];
        }
        const MultiSimOutcome sim = simulate_n(in_field, *pulse, *cfg.node_multi, init);
        write_trajectory_csv(join_path(dir, prefix + "_trajectory.csv"), *grid, in_field.series,
                             sim.alpha_out, sim.g, nullptr, &sim.R, sim.e, sim.node_prob,
                             report);
        report.budgets = sim.budgets;
    } else {
        Eigen::Vector3cd init(cfg.init.g, cfg.init.r.empty() ? Complex(0, 0) : cfg.init.r[0],
                              cfg.init.e);
        const SimOutcome sim = simulate(in_field, *pulse, *cfg.node, init);
        write_trajectory_csv(join_path(dir, prefix + "_trajectory.csv"), *grid, in_field.series,
                             sim.alpha_out, sim.g, &sim.r, nullptr, sim.e, sim.node_prob,
                             report);
        report.budgets = sim.budgets;
    }

    add_budgets(rb, *report.budgets);
    report.verdict = "ok";
    report.exit_code = kExitOk;
    finish_report(report, rb, dir, prefix);
    return report;
}

// One sweep point: margins and closed-form efficiencies, no simulation.
struct SweepRow {
    double value = 0.0;
    std::string status = "ok";
    double min_margin_lossless = std::nan("");
    double min_margin_trap = std::nan("");
    double min_margin_gen = std::nan("");
    double eta_trap_value = std::nan("");
    double eta_gen_value = std::nan("");
    bool feasible_trap = false;
    bool feasible_gen = false;
    std::string message;
};

json patch_raw(const json& raw, const std::string& dotted, double value) {
    std::string pointer = "/" + dotted;
    for (auto& c : pointer) {
        if (c == '.') c = '/';
    }
    json patched = raw;
    patched.erase("sweep");
    patched["mode"] = "feasibility";
    const json::json_pointer jp(pointer);
    if (!patched.contains(jp)) {
        throw ValidationError("sweep: parameter path '" + dotted + "' not found in config");
    }
    patched[jp] = value;
    return patched;
}

SweepRow eval_sweep_point(const json& raw, const std::string& parameter, double value) {
    SweepRow row;
    row.value = value;
    try {
        const ScenarioConfig cfg = parse_config_json(patch_raw(raw, parameter, value));
        const PhotonEnvelope env = envelope_from_spec(*cfg.envelope, cfg.grid);
        if (cfg.node_multi) {
            const FeasibilityReport trap = margin_trap_n(env, *cfg.node_multi);
            const FeasibilityReport gen = margin_gen_n(env, *cfg.node_multi);
            row.min_margin_trap = trap.min_margin;
            row.min_margin_gen = gen.min_margin;
            row.feasible_trap = trap.feasible;
            row.feasible_gen = gen.feasible;
            if (trap.predicted_efficiency) row.eta_trap_value = *trap.predicted_efficiency;
            row.eta_gen_value = eta_gen_n(env, *cfg.node_multi);
        } else {
            row.min_margin_lossless = margin_lossless(env, *cfg.node).min_margin;
            const FeasibilityReport trap = margin_trap(env, *cfg.node);
            const FeasibilityReport gen = margin_gen(env, *cfg.node);
            row.min_margin_trap = trap.min_margin;
            row.min_margin_gen = gen.min_margin;
            row.feasible_trap = trap.feasible;
            row.feasible_gen = gen.feasible;
            row.eta_trap_value = eta_trap(env, *cfg.node);
            row.eta_gen_value = eta_gen(env, *cfg.node);
        }
    } catch (const Error& err) {
        row.status = "error";
        row.message = err.what();
    }
    return row;
}

RunReport run_sweep(const ScenarioConfig& cfg) {
    const size_t n_points = cfg.sweep.values.size();
    std::vector<SweepRow> rows(n_points);

    unsigned workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n_points));

    // Points are pure and independent; results land in preallocated slots so
    // output order matches config order no matter the completion order.
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n_points) break;
            rows[i] = eval_sweep_point(cfg.raw, cfg.sweep.parameter, cfg.sweep.values[i]);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    RunReport report;
    ReportBuilder rb;
    describe_scenario(rb, cfg, nullptr);
    rb.line("sweep_parameter", cfg.sweep.parameter);
    rb.number("sweep_points", static_cast<double>(n_points));

    const std::string& dir = cfg.output.directory;
    const std::string& prefix = cfg.output.prefix;
    const std::string sweep_path = join_path(dir, prefix + "_sweep.csv");

    const auto n = static_cast<Eigen::Index>(n_points);
    CsvTable table;
    table.header = {"index",    "value",   "ok",
                    "min_margin_lossless", "min_margin_trap", "min_margin_gen",
                    "eta_trap", "eta_gen", "feasible_trap",   "feasible_gen"};
    table.columns.assign(table.header.size(), Eigen::VectorXd(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const SweepRow& row = rows[static_cast<size_t>(i)];
        table.columns[0][i] = static_cast<double>(i);
        table.columns[1][i] = row.value;
        table.columns[2][i] = row.status == "ok" ? 1.0 : 0.0;
        table.columns[3][i] = row.min_margin_lossless;
        table.columns[4][i] = row.min_margin_trap;
        table.columns[5][i] = row.min_margin_gen;
        table.columns[6][i] = row.eta_trap_value;
        table.columns[7][i] = row.eta_gen_value;
        table.columns[8][i] = row.feasible_trap ? 1.0 : 0.0;
        table.columns[9][i] = row.feasible_gen ? 1.0 : 0.0;
        if (row.status != "ok") {
            report.warnings.push_back("point " + std::to_string(i) + " (value " +
                                      format_double(row.value) + "): " + row.message);
        }
    }
    write_csv(sweep_path, table);
    report.files.push_back(sweep_path);

    report.verdict = "ok";
    report.exit_code = kExitOk;
    finish_report(report, rb, dir, prefix);
    return report;
}

} // namespace

RunReport run(const ScenarioConfig& cfg) {
    std::filesystem::create_directories(cfg.output.directory);
    switch (cfg.mode) {
        case RunMode::feasibility: return run_feasibility(cfg);
        case RunMode::trap:
        case RunMode::generate: return run_transfer(cfg);
        case RunMode::adiabatic: return run_adiabatic(cfg);
        case RunMode::simulate: return run_simulate(cfg);
        case RunMode::sweep: return run_sweep(cfg);
    }
    throw InvalidArgument("run: bad mode");
}

} // namespace qnode
