#include "cli.hpp"

#include "config.hpp"
#include "gradnet/dynamics.hpp"
#include "gradnet/errors.hpp"
#include "gradnet/scenarios.hpp"
#include "gradnet/selftest.hpp"
#include "gradnet/synthesis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

namespace gradnet::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string scenario;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

fs::path output_dir(const Flags& flags, const RunConfig& cfg) {
    return flags.out.empty() ? fs::path(cfg.output.dir) : fs::path(flags.out);
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::ofstream f(dir / name);
    if (!f) throw IoError("cannot write " + (dir / name).string());
    return f;
}

void close_output(std::ofstream& f, const fs::path& path) {
    f.close();
    if (!f) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& dir, const std::string& name, const json& doc) {
    std::ofstream f = open_output(dir, name);
    f << doc.dump(2) << '\n';
    close_output(f, dir / name);
}

RunConfig load(const Flags& flags) {
    RunConfig cfg = flags.config.empty() ? parse_config(json{{"scenario", flags.scenario}}) : load_config(flags.config);
    if (flags.threads > 0) cfg.sweep.threads = flags.threads;
    return cfg;
}

const ModelSpec& require_model(const RunConfig& cfg) {
    if (!cfg.model) throw ConfigError("config needs a model block or a scenario");
    return *cfg.model;
}

ValidationReport validated(const RunConfig& cfg, std::ostream& out) {
    const ModelSpec& model = require_model(cfg);
    check_well_formed(model);
    std::optional<double> eps0;
    if (!cfg.sweep_sites.empty())
        eps0 = model.length / static_cast<double>(*std::min_element(cfg.sweep_sites.begin(), cfg.sweep_sites.end()));
    ValidationReport report = validate_model(model, eps0);
    out << report.to_text();
    return report;
}

int cmd_validate(const Flags& flags, std::ostream& out) {
    const RunConfig cfg = load(flags);
    return validated(cfg, out).ok ? kOk : kCheckFailed;
}

int cmd_synthesize(const Flags& flags, std::ostream& out) {
    const RunConfig cfg = load(flags);
    if (!validated(cfg, out).ok) return kCheckFailed;
    const ModelSpec& model = *cfg.model;
    const Lattice lattice = make_lattice(model.length, cfg.network_sites, model.bc, model.order);
    const StiffnessNetwork net = assemble_stiffness(model.coeffs, lattice);
    const RealizabilityReport rep = verify_realizability(net, flags.seed);

    const fs::path dir = output_dir(flags, cfg);
    std::ofstream csv = open_output(dir, "netlist.csv");
    csv << "i,j,k_ij\n";
    std::size_t springs = 0;
    for (Index i = 0; i < Index(net.rows()); ++i) {
        for (int d = 1; d <= net.reach(); ++d) {
            const Index j = net.partner(i, d);
            const double k = net.offset_coupling(i, d);
            if (j < 0 || k == 0.0) continue;
            // Springs between two frozen masses carry no force.
            if (lattice.is_frozen(i) && lattice.is_frozen(j)) continue;
            csv << i << ',' << j << ',' << format_number(k) << '\n';
            ++springs;
        }
    }
    if (net.grounding() != 0.0)
        for (Index i = lattice.first_free(); i <= lattice.last_free(); ++i)
            csv << i << ',' << i << ',' << format_number(net.grounding()) << '\n';
    close_output(csv, dir / "netlist.csv");

    json doc;
    doc["N"] = lattice.sites;
    doc["eps"] = num(lattice.spacing());
    doc["bc"] = std::string(to_string(lattice.bc));
    doc["order"] = model.order;
    doc["springs"] = springs;
    doc["grounding"] = num(net.grounding());
    json band = json::array();
    for (double k : net.band()) band.push_back(num(k));
    doc["band"] = band;
    doc["band_ok"] = rep.band_ok;
    doc["max_offset"] = rep.max_offset;
    doc["symmetric"] = rep.symmetric;
    doc["translation_invariant"] = rep.translation_invariant;
    doc["force_ok"] = rep.force_ok;
    doc["force_residual"] = num(rep.force_residual);
    json negative = json::array();
    for (const auto& s : rep.negative_springs) negative.push_back({{"offset", s.offset}, {"k", num(s.stiffness)}});
    doc["negative_springs"] = negative;
    doc["messages"] = rep.messages;
    doc["normalization"] = rep.normalization;
    doc["seed"] = flags.seed;
    doc["passed"] = rep.passed;
    write_json(dir, "realizability.json", doc);

    out << "network: N = " << lattice.sites << ", " << springs << " springs, band";
    for (double k : net.band()) out << ' ' << format_number(k);
    out << "\nrealizability: " << (rep.passed ? "PASS" : "FAIL") << '\n';
    for (const auto& m : rep.messages) out << "  " << m << '\n';
    return rep.passed ? kOk : kCheckFailed;
}

int cmd_simulate(const Flags& flags, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load(flags);
    const ModelSpec& model = require_model(cfg);
    check_well_formed(model);
    const SimulationBlock& sim = cfg.simulation;
    const Lattice lattice = make_lattice(model.length, sim.sites, model.bc, model.order);
    const StiffnessNetwork net = assemble_stiffness(model.coeffs, lattice);
    const SimState init = initial_state(model, lattice);

    bool exact = model.is_linear() && model.bc == Boundary::periodic;
    if (sim.integrator == IntegratorChoice::verlet) exact = false;
    if (sim.integrator == IntegratorChoice::exact && !exact)
        throw ConfigError("exact integrator is only valid for linear periodic models");

    std::vector<SimState> states{init};
    std::optional<DivergenceError> diverged;
    double dt = 0.0;
    try {
        if (exact) {
            ExactPropagator prop(model, init);
            for (double t : sim.times) states.push_back(prop.at(t));
        } else {
            dt = stable_dt(model, lattice.spacing(), sim.cfl);
            VerletIntegrator integrator(model, net, init);
            for (double t : sim.times) {
                integrator.advance_to(t, dt);
                states.push_back(integrator.state());
            }
        }
    } catch (const DivergenceError& e) {
        diverged = e;
    }

    const fs::path dir = output_dir(flags, cfg);
    std::ofstream traj = open_output(dir, "trajectory.csv");
    traj << "t,i,u_i,v_i\n";
    for (const SimState& s : states)
        for (Index i = 0; i <= lattice.last_site(); ++i)
            traj << format_number(s.t) << ',' << i << ',' << format_number(s.u[i]) << ',' << format_number(s.v[i])
                 << '\n';
    close_output(traj, dir / "trajectory.csv");

    std::ofstream en = open_output(dir, "energy.csv");
    en << "t,kinetic,quadratic,nonlinear,total\n";
    for (const SimState& s : states) {
        const EnergyBreakdown e = energy(model, s);
        en << format_number(s.t) << ',' << format_number(e.kinetic) << ',' << format_number(e.quadratic) << ','
           << format_number(e.nonlinear) << ',' << format_number(e.total) << '\n';
    }
    close_output(en, dir / "energy.csv");

    out << "simulated N = " << lattice.sites << " with " << (exact ? "exact propagator" : "velocity Verlet");
    if (!exact) out << " (dt = " << format_number(dt) << ")";
    out << ", " << states.size() << " snapshots written to " << dir.string() << '\n';
    if (diverged) {
        err << "error: " << diverged->what() << "; last finite time " << format_number(diverged->last_finite_time())
            << '\n';
        return kDiverged;
    }
    return kOk;
}

json summary_json(const ScenarioResult& result) {
    const ConvergenceReport& rep = result.report;
    json doc;
    doc["scenario"] = rep.scenario;
    doc["reference"] = rep.reference;
    doc["extrapolated"] = rep.extrapolated;
    if (rep.fit) {
        doc["order"] = num(rep.fit->slope);
        doc["residual"] = num(rep.fit->residual);
        doc["points"] = rep.fit->points;
    } else {
        doc["order"] = nullptr;
        doc["fit_message"] = rep.fit_message;
    }
    if (result.self_check_W) doc["self_check_W"] = num(*result.self_check_W);
    json rows = json::array();
    for (const SweepRow& r : rep.rows) {
        json row;
        row["eps"] = num(r.eps);
        row["N"] = r.sites;
        row["W_T"] = num(r.terminal_W());
        row["W_interval_T"] = r.W_interval.empty() ? json(nullptr) : num(r.W_interval.back());
        row["E0"] = num(r.initial_energy);
        row["max_drift"] = num(r.max_drift);
        row["integrator"] = r.integrator;
        row["dt"] = num(r.dt);
        row["steps"] = r.steps;
        row["max_laplacian"] = num(r.max_laplacian);
        row["laplacian_bound"] = num(r.laplacian_bound);
        row["max_top_derivative"] = num(r.max_top_derivative);
        row["top_derivative_bound"] = num(r.top_derivative_bound);
        json flux = json::array();
        for (double f : r.boundary_flux) flux.push_back(num(f));
        row["boundary_flux"] = flux;
        row["failed"] = r.failed;
        if (r.failed) row["message"] = r.message;
        rows.push_back(row);
    }
    doc["rows"] = rows;
    json checks = json::array();
    for (const CheckOutcome& c : result.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    doc["checks"] = checks;
    doc["passed"] = result.passed;
    return doc;
}

int cmd_converge(const Flags& flags, std::ostream& out) {
    const RunConfig cfg = load(flags);
    Scenario scenario;
    scenario.id = cfg.scenario.value_or("custom");
    scenario.model = require_model(cfg);
    check_well_formed(scenario.model);
    scenario.sites = cfg.sweep_sites;
    scenario.options = cfg.sweep;
    scenario.self_check_ratio = cfg.self_check_ratio;
    if (cfg.thresholds_given) scenario.thresholds = cfg.thresholds;

    const ScenarioResult result = run_scenario(scenario);
    const ConvergenceReport& rep = result.report;

    const fs::path dir = output_dir(flags, cfg);
    std::ofstream csv = open_output(dir, "report.csv");
    csv << "scenario,eps,N,t,W,E_total,E_drift_rel,wall_s\n";
    for (const SweepRow& r : rep.rows)
        for (std::size_t k = 0; k < r.times.size(); ++k)
            csv << rep.scenario << ',' << format_number(r.eps) << ',' << r.sites << ',' << format_number(r.times[k])
                << ',' << format_number(r.W[k]) << ',' << format_number(r.energy[k]) << ','
                << format_number(r.drift[k]) << ',' << format_number(r.wall_seconds) << '\n';
    close_output(csv, dir / "report.csv");
    write_json(dir, "summary.json", summary_json(result));

    out << "scenario " << rep.scenario << " (reference: " << rep.reference << ")\n";
    for (const SweepRow& r : rep.rows) {
        out << "  N = " << r.sites << "  W(T) = " << format_number(r.terminal_W())
            << "  drift = " << format_number(r.max_drift);
        if (r.failed) out << "  FAILED: " << r.message;
        out << '\n';
    }
    if (rep.fit) out << "  fitted order " << format_number(rep.fit->slope) << '\n';
    if (rep.extrapolated) out << "  note: Dirichlet with n != 2 is an extrapolated scenario\n";
    for (const CheckOutcome& c : result.checks)
        out << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << (c.detail.empty() ? "" : ": ") << c.detail
            << '\n';
    if (!rep.fit) {
        out << "  " << rep.fit_message << '\n';
        return kInsufficientData;
    }
    return result.passed ? kOk : kCheckFailed;
}

int cmd_selftest(const Flags& flags, std::ostream& out) {
    SelftestOptions options;
    options.seed = flags.seed;
    bool ok = true;
    for (const SuiteResult& r : run_selftest(options)) {
        out << '[' << (r.passed ? "PASS" : "FAIL") << "] " << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    return ok ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synthesize, simulate and verify higher-gradient spring networks"};
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--seed", flags.seed, "seed for randomized checks")->capture_default_str();
    app.add_option("--threads", flags.threads, "worker threads for sweeps");
    app.add_option("--out", flags.out, "output directory (overrides output.dir)");

    auto add = [&](const char* name, const char* help, bool needs_config) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto* opt = sub->add_option("--config", flags.config, "JSON run configuration");
        if (needs_config) {
            sub->add_option("--scenario", flags.scenario, "built-in scenario instead of a config file");
            opt->excludes(sub->get_option("--scenario"));
        }
        sub->add_option("--out", flags.out, "output directory (overrides output.dir)");
        sub->add_option("--seed", flags.seed, "seed for randomized checks");
        sub->add_option("--threads", flags.threads, "worker threads for sweeps");
        return sub;
    };
    CLI::App* validate = add("validate", "check a model for admissibility", true);
    CLI::App* synthesize = add("synthesize", "write the spring netlist and realizability report", true);
    CLI::App* simulate = add("simulate", "integrate one lattice and write trajectory and energy series", true);
    CLI::App* converge = add("converge", "run a mesh sweep against the reference solution", true);
    CLI::App* selftest = add("selftest", "run the built-in property suites", false);

    std::vector<std::string> argv_tail(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(argv_tail.begin(), argv_tail.end());
    try {
        app.parse(argv_tail);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (*validate || *synthesize || *simulate || *converge) {
            if (flags.config.empty() && flags.scenario.empty()) throw ConfigError("--config or --scenario is required");
        }
        if (*validate) return cmd_validate(flags, out);
        if (*synthesize) return cmd_synthesize(flags, out);
        if (*simulate) return cmd_simulate(flags, out, err);
        if (*converge) return cmd_converge(flags, out);
        if (*selftest) return cmd_selftest(flags, out);
    } catch (const json::exception& e) {
        err << "error: malformed config: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << "; last finite time " << format_number(e.last_finite_time()) << '\n';
        return kDiverged;
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return kInsufficientData;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kConfigError;
}

}  // namespace gradnet::cli
