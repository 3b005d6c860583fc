#include "config.hpp"

#include "gradnet/errors.hpp"
#include "gradnet/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace gradnet::cli {

using nlohmann::json;

namespace {

void require_object(const json& j, const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* what) {
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw ConfigError(std::string("unknown key '") + k + "' in " + what);
    }
}

double number(const json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return j.get<double>();
}

std::size_t count(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 1) throw ConfigError(std::string(what) + " must be a positive integer");
    return j.get<std::size_t>();
}

std::vector<double> numbers(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const json& x : j) out.push_back(number(x, what));
    return out;
}

std::vector<TrigTerm> trig_terms(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of modes");
    std::vector<TrigTerm> out;
    for (const json& t : j) {
        require_object(t, what);
        reject_unknown(t, {"mode", "cos", "sin"}, what);
        TrigTerm term;
        if (!t.contains("mode") || !t["mode"].is_number_integer() || t["mode"].get<int>() < 0)
            throw ConfigError(std::string(what) + ": mode must be a nonnegative integer");
        term.mode = t["mode"].get<int>();
        term.cos_coeff = t.contains("cos") ? number(t["cos"], "cos") : 0.0;
        term.sin_coeff = t.contains("sin") ? number(t["sin"], "sin") : 0.0;
        out.push_back(term);
    }
    return out;
}

// Sample times: explicit list, or `samples` evenly spaced points ending at T.
std::vector<double> sample_times(const json& block, double horizon) {
    if (block.contains("times")) {
        if (block.contains("samples")) throw ConfigError("give either times or samples, not both");
        return numbers(block["times"], "times");
    }
    const std::size_t n = block.contains("samples") ? count(block["samples"], "samples") : 5;
    std::vector<double> out;
    for (std::size_t k = 1; k <= n; ++k) out.push_back(horizon * static_cast<double>(k) / static_cast<double>(n));
    return out;
}

}  // namespace

double parse_length(const json& value) {
    if (value.is_number()) return value.get<double>();
    if (!value.is_string()) throw ConfigError("length must be a number or a multiple of pi such as \"2pi\"");
    std::string s = value.get<std::string>();
    if (s.size() < 2 || s.substr(s.size() - 2) != "pi") throw ConfigError("cannot read length '" + s + "'");
    s.resize(s.size() - 2);
    double factor = 1.0;
    if (!s.empty()) {
        std::size_t used = 0;
        try {
            factor = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size()) throw ConfigError("cannot read length '" + value.get<std::string>() + "'");
    }
    return factor * std::numbers::pi;
}

ModelSpec parse_model(const json& m) {
    require_object(m, "model");
    reject_unknown(m, {"length", "bc", "coeffs", "Q", "nonlinearity", "initial", "horizon", "order"}, "model");
    ModelSpec spec;
    if (!m.contains("length")) throw ConfigError("model.length is required");
    spec.length = parse_length(m["length"]);
    if (m.contains("bc")) {
        try {
            spec.bc = parse_boundary(m["bc"].get<std::string>());
        } catch (const ValidationError& e) {
            throw ConfigError(e.what());
        }
    }
    if (m.contains("horizon")) spec.horizon = number(m["horizon"], "model.horizon");

    if (m.contains("coeffs") == m.contains("Q")) throw ConfigError("model needs exactly one of coeffs or Q");
    if (m.contains("coeffs")) {
        spec.coeffs = numbers(m["coeffs"], "model.coeffs");
        if (spec.coeffs.size() < 2) throw ConfigError("model.coeffs needs A_0..A_n with n >= 1");
        spec.order = static_cast<int>(spec.coeffs.size()) - 1;
    } else {
        const json& q = m["Q"];
        if (!q.is_array() || q.empty()) throw ConfigError("model.Q must be a square array");
        SquareMatrix mat(q.size());
        for (std::size_t r = 0; r < q.size(); ++r) {
            const std::vector<double> row = numbers(q[r], "model.Q row");
            if (row.size() != q.size()) throw ConfigError("model.Q must be square");
            for (std::size_t c = 0; c < row.size(); ++c) mat(r, c) = row[c];
        }
        spec.order = static_cast<int>(q.size()) - 1;
        spec = with_quadratic(std::move(spec), std::move(mat));
    }
    if (m.contains("order") && m["order"].get<int>() != spec.order)
        throw ConfigError("model.order disagrees with the number of coefficients");

    if (m.contains("nonlinearity")) {
        const json& r = m["nonlinearity"];
        if (!r.is_array()) throw ConfigError("model.nonlinearity must be an array of {p, q, c} terms");
        std::vector<Monomial> terms;
        for (const json& t : r) {
            require_object(t, "nonlinearity term");
            reject_unknown(t, {"p", "q", "c"}, "nonlinearity term");
            Monomial mono;
            mono.p = t.value("p", 0);
            mono.q = t.value("q", 0);
            mono.c = number(t.at("c"), "nonlinearity c");
            if (mono.p < 0 || mono.q < 0) throw ConfigError("nonlinearity exponents must be nonnegative");
            terms.push_back(mono);
        }
        spec.nonlinearity = PolynomialR(std::move(terms));
    }

    if (m.contains("initial")) {
        const json& init = m["initial"];
        require_object(init, "model.initial");
        reject_unknown(init, {"kind", "envelope_exponent", "displacement", "velocity"}, "model.initial");
        const std::string kind = init.value("kind", std::string("trig"));
        if (kind == "trig")
            spec.initial.kind = InitialKind::trig;
        else if (kind == "clamped")
            spec.initial.kind = InitialKind::clamped;
        else
            throw ConfigError("model.initial.kind must be trig or clamped");
        if (init.contains("envelope_exponent")) spec.initial.envelope_exponent = init["envelope_exponent"].get<int>();
        if (spec.initial.kind == InitialKind::clamped && !init.contains("envelope_exponent"))
            spec.initial.envelope_exponent = spec.order;
        if (init.contains("displacement")) spec.initial.displacement = trig_terms(init["displacement"], "displacement");
        if (init.contains("velocity")) spec.initial.velocity = trig_terms(init["velocity"], "velocity");
    }
    return spec;
}

RunConfig parse_config(const json& doc) {
    require_object(doc, "config");
    reject_unknown(doc, {"scenario", "model", "sweep", "simulation", "network", "output"}, "config");
    RunConfig cfg;
    // A named scenario supplies defaults; every block below overrides only the keys it sets.
    if (doc.contains("scenario")) {
        cfg.scenario = doc["scenario"].get<std::string>();
        Scenario base = builtin_scenario(*cfg.scenario);
        cfg.model = std::move(base.model);
        cfg.sweep_sites = std::move(base.sites);
        cfg.sweep = std::move(base.options);
        cfg.thresholds = base.thresholds;
        cfg.thresholds_given = true;
        cfg.self_check_ratio = base.self_check_ratio;
    }
    if (doc.contains("model")) cfg.model = parse_model(doc["model"]);
    const double horizon = cfg.model ? cfg.model->horizon : 1.0;

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        require_object(s, "sweep");
        reject_unknown(s, {"N", "eps", "T", "times", "samples", "integrator", "cfl", "reference", "ratio",
                           "reference_dt", "weights", "threads", "thresholds"},
                       "sweep");
        if (s.contains("N") && s.contains("eps")) throw ConfigError("sweep needs exactly one of N or eps");
        if (s.contains("N")) {
            if (!s["N"].is_array()) throw ConfigError("sweep.N must be an array");
            cfg.sweep_sites.clear();
            for (const json& n : s["N"]) cfg.sweep_sites.push_back(count(n, "sweep.N entry"));
        } else if (s.contains("eps")) {
            if (!cfg.model) throw ConfigError("sweep.eps needs a model block to fix L");
            cfg.sweep_sites = sites_from_eps(cfg.model->length, numbers(s["eps"], "sweep.eps"));
        }
        const double t = s.contains("T") ? number(s["T"], "sweep.T") : horizon;
        if (!(t > 0.0)) throw ConfigError("sweep.T must be positive");
        if (s.contains("times") || s.contains("samples") || s.contains("T")) cfg.sweep.times = sample_times(s, t);
        if (s.contains("integrator")) cfg.sweep.integrator = parse_integrator(s["integrator"].get<std::string>());
        if (s.contains("cfl")) cfg.sweep.cfl = number(s["cfl"], "sweep.cfl");
        if (s.contains("reference")) cfg.sweep.reference = parse_reference(s["reference"].get<std::string>());
        if (s.contains("ratio")) cfg.sweep.ratio = number(s["ratio"], "sweep.ratio");
        if (s.contains("reference_dt")) cfg.sweep.reference_dt = number(s["reference_dt"], "sweep.reference_dt");
        if (s.contains("weights")) cfg.sweep.weights = DeviationWeights{numbers(s["weights"], "sweep.weights")};
        if (s.contains("threads")) cfg.sweep.threads = static_cast<unsigned>(count(s["threads"], "sweep.threads"));
        if (s.contains("thresholds")) {
            const json& th = s["thresholds"];
            require_object(th, "sweep.thresholds");
            reject_unknown(th, {"strictly_decreasing", "min_order", "max_terminal_ratio", "max_drift", "laplacian_bound"},
                           "sweep.thresholds");
            cfg.thresholds_given = true;
            cfg.thresholds.strictly_decreasing = th.value("strictly_decreasing", true);
            if (th.contains("min_order")) cfg.thresholds.min_order = number(th["min_order"], "min_order");
            if (th.contains("max_terminal_ratio"))
                cfg.thresholds.max_terminal_ratio = number(th["max_terminal_ratio"], "max_terminal_ratio");
            if (th.contains("max_drift")) cfg.thresholds.max_drift = number(th["max_drift"], "max_drift");
            cfg.thresholds.laplacian_bound = th.value("laplacian_bound", false);
        }
    }

    if (doc.contains("simulation")) {
        const json& s = doc["simulation"];
        require_object(s, "simulation");
        reject_unknown(s, {"N", "T", "times", "samples", "integrator", "cfl"}, "simulation");
        if (s.contains("N")) cfg.simulation.sites = count(s["N"], "simulation.N");
        const double t = s.contains("T") ? number(s["T"], "simulation.T") : horizon;
        if (!(t > 0.0)) throw ConfigError("simulation.T must be positive");
        cfg.simulation.times = sample_times(s, t);
        if (s.contains("integrator")) cfg.simulation.integrator = parse_integrator(s["integrator"].get<std::string>());
        if (s.contains("cfl")) cfg.simulation.cfl = number(s["cfl"], "simulation.cfl");
    } else {
        cfg.simulation.times = sample_times(json::object(), horizon);
    }

    if (doc.contains("network")) {
        const json& n = doc["network"];
        require_object(n, "network");
        reject_unknown(n, {"N"}, "network");
        if (n.contains("N")) cfg.network_sites = count(n["N"], "network.N");
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        require_object(o, "output");
        reject_unknown(o, {"dir"}, "output");
        if (o.contains("dir")) cfg.output.dir = o["dir"].get<std::string>();
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(json::parse(in));
}

}  // namespace gradnet::cli
