#include "mlfsm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "mlfsm/errors.hpp"

namespace mlfsm {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw config_error("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error("bad value for '" + key + "': " + e.what());
    }
}

} // namespace

MomentDesign RunConfig::build_design() const {
    MomentDesign d = (method == "threshold")
                         ? default_threshold_design()
                         : default_adaptive_design(model.q());
    if (method != "adaptive" && method != "threshold")
        throw config_error("design.method must be 'adaptive' or 'threshold'");
    if (!tuples.empty()) d.tuples = tuples;
    d.f1 = make_gauss_bump(decay);
    d.f2 = make_smooth_threshold(eta, width, decay);
    d.w_c0 = w_c0;
    d.w_sigma = (w_sigma > 0.0) ? w_sigma : 1.0;
    d.validate();
    return d;
}

SamplingScheme RunConfig::scheme_for_n(std::size_t n) const {
    SamplingScheme s = scheme;
    s.n = n;
    if (rho > 0.0) s.delta = std::pow(static_cast<double>(n), -rho);
    return s;
}

McPlan RunConfig::build_plan() const {
    McPlan plan;
    plan.model = model;
    for (std::size_t n : n_grid) plan.scheme_grid.push_back(scheme_for_n(n));
    plan.reps = reps;
    plan.design = build_design();
    plan.base_seed = seed;
    plan.threads = threads;
    return plan;
}

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    reject_unknown(j, {"schema_version", "model", "scheme", "design", "solver", "mc",
                       "output", "seed", "threads"},
                   "config root");

    cfg.schema_version = get_or(j, "schema_version", 1);
    if (cfg.schema_version != 1)
        throw config_error("unsupported schema_version " +
                           std::to_string(cfg.schema_version));

    if (!j.contains("model") || !j.at("model").contains("components"))
        throw config_error("config needs model.components");
    reject_unknown(j.at("model"), {"components"}, "model");
    for (const auto& c : j.at("model").at("components")) {
        reject_unknown(c, {"b", "H", "beta"}, "model.components[]");
        Component comp;
        comp.b = get_or(c, "b", 1.0);
        comp.H = get_or(c, "H", 0.5);
        comp.beta = get_or(c, "beta", 2.0);
        cfg.model.components.push_back(comp);
    }
    cfg.model.validate();

    if (j.contains("scheme")) {
        const auto& s = j.at("scheme");
        reject_unknown(s, {"n", "delta", "rho", "k", "mesh", "truncation", "burn_in"},
                       "scheme");
        cfg.scheme.n = get_or<std::size_t>(s, "n", 1000);
        cfg.scheme.delta = get_or(s, "delta", 0.0);
        cfg.rho = get_or(s, "rho", 0.0);
        if (cfg.scheme.delta <= 0.0 && cfg.rho <= 0.0)
            throw config_error("scheme needs delta > 0 or rho > 0");
        if (cfg.rho > 0.0)
            cfg.scheme.delta = std::pow(static_cast<double>(cfg.scheme.n), -cfg.rho);
        cfg.scheme.k = get_or(s, "k", 2);
        cfg.scheme.mesh = get_or(s, "mesh", 16);
        cfg.scheme.truncation = get_or(s, "truncation", 0.0);
        cfg.scheme.burn_in = get_or(s, "burn_in", 0.0);
    } else {
        throw config_error("config needs a scheme block");
    }

    if (j.contains("design")) {
        const auto& d = j.at("design");
        reject_unknown(d, {"method", "tuples", "eta", "width", "decay", "w_c0", "w_sigma"},
                       "design");
        cfg.method = get_or<std::string>(d, "method", "adaptive");
        if (d.contains("tuples")) {
            for (const auto& t : d.at("tuples")) {
                reject_unknown(t, {"lambda", "gamma"}, "design.tuples[]");
                cfg.tuples.push_back({get_or(t, "lambda", 1.0), get_or(t, "gamma", 1)});
            }
        }
        cfg.eta = get_or(d, "eta", 1.0);
        cfg.width = get_or(d, "width", 0.5);
        cfg.decay = get_or(d, "decay", 1.0);
        cfg.w_c0 = get_or(d, "w_c0", 1.0);
        cfg.w_sigma = get_or(d, "w_sigma", 0.0);
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        reject_unknown(s, {"tol", "max_iter", "method", "init"}, "solver");
        cfg.solver_tol = get_or(s, "tol", 1e-9);
        cfg.solver_max_iter = get_or(s, "max_iter", 80);
        cfg.solver_method = get_or<std::string>(s, "method", "auto");
        if (s.contains("init")) cfg.init_override = s.at("init").get<std::vector<double>>();
    }

    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        reject_unknown(m, {"experiment", "n_grid", "reps", "case", "function", "cov_k",
                           "cov_path_length"},
                       "mc");
        cfg.experiment = get_or<std::string>(m, "experiment", "clt");
        if (m.contains("n_grid")) cfg.n_grid = m.at("n_grid").get<std::vector<std::size_t>>();
        cfg.reps = get_or(m, "reps", 200);
        cfg.clt_case = get_or<std::string>(m, "case", "i");
        cfg.mc_function = get_or<std::string>(m, "function", "f1");
        cfg.cov_k = get_or(m, "cov_k", 2);
        cfg.cov_path_length = get_or<std::size_t>(m, "cov_path_length", 65536);
    }

    if (j.contains("output")) {
        const auto& o = j.at("output");
        reject_unknown(o, {"dir", "formats"}, "output");
        cfg.out_dir = get_or<std::string>(o, "dir", "out");
        if (o.contains("formats"))
            cfg.formats = o.at("formats").get<std::vector<std::string>>();
        for (const auto& f : cfg.formats)
            if (f != "csv" && f != "json" && f != "bin")
                throw config_error("output.formats entries must be csv|json|bin, got " + f);
    }

    cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
    cfg.threads = get_or(j, "threads", 1);
    if (cfg.threads < 1) throw config_error("threads must be >= 1");
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw input_error("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(is, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw config_error("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

nlohmann::json RunConfig::resolved() const {
    json comps = json::array();
    for (const auto& c : model.components)
        comps.push_back({{"b", c.b}, {"H", c.H}, {"beta", c.beta}});
    json tup = json::array();
    for (const auto& t : tuples) tup.push_back({{"lambda", t.lambda}, {"gamma", t.gamma}});

    json j = {
        {"schema_version", schema_version},
        {"model", {{"components", comps}}},
        {"scheme",
         {{"n", scheme.n},
          {"delta", scheme.delta},
          {"rho", rho},
          {"k", scheme.k},
          {"mesh", scheme.mesh},
          {"truncation", scheme.truncation},
          {"burn_in", scheme.burn_in}}},
        {"design",
         {{"method", method},
          {"eta", eta},
          {"width", width},
          {"decay", decay},
          {"w_c0", w_c0},
          {"w_sigma", w_sigma}}},
        {"solver",
         {{"tol", solver_tol}, {"max_iter", solver_max_iter}, {"method", solver_method}}},
        {"mc",
         {{"experiment", experiment},
          {"n_grid", n_grid},
          {"reps", reps},
          {"case", clt_case},
          {"function", mc_function},
          {"cov_k", cov_k},
          {"cov_path_length", cov_path_length}}},
        {"output", {{"dir", out_dir}, {"formats", formats}}},
        {"seed", seed},
        {"threads", threads},
    };
    if (!tuples.empty()) j["design"]["tuples"] = tup;
    if (!init_override.empty()) j["solver"]["init"] = init_override;
    return j;
}

} // namespace mlfsm
