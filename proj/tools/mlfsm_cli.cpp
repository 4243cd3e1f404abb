// Command-line front end: simulate | estimate | mc | report.
// Exit codes: 0 ok, 2 config, 3 input, 4 numerical, 5 solver, 6 capacity.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlfsm/config.hpp"
#include "mlfsm/determinants.hpp"
#include "mlfsm/errors.hpp"
#include "mlfsm/estimators.hpp"
#include "mlfsm/identifiability.hpp"
#include "mlfsm/io.hpp"
#include "mlfsm/kernel.hpp"
#include "mlfsm/simulate.hpp"
#include "mlfsm/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
};

mlfsm::RunConfig load_with_overrides(const CommonFlags& flags) {
    auto cfg = mlfsm::load_config_file(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.threads) cfg.threads = *flags.threads;
    if (flags.out_dir) cfg.out_dir = *flags.out_dir;
    if (flags.format) cfg.formats = {*flags.format};
    if (const char* env_out = std::getenv("MLFSM_OUT")) cfg.out_dir = env_out;
    if (const char* env_thr = std::getenv("MLFSM_THREADS")) cfg.threads = std::atoi(env_thr);
    return cfg;
}

bool wants(const mlfsm::RunConfig& cfg, const std::string& fmt) {
    for (const auto& f : cfg.formats)
        if (f == fmt) return true;
    return false;
}

void write_manifest(const mlfsm::RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& files, bool failed,
                    const std::string& message = "") {
    fs::create_directories(cfg.out_dir);
    json m = {{"command", command},
              {"seed", cfg.seed},
              {"version", "mlfsm 1.0"},
              {"status", failed ? "failed" : "ok"},
              {"files", files}};
    if (!message.empty()) m["message"] = message;
    std::ofstream os(fs::path(cfg.out_dir) / "manifest.json");
    os << m.dump(2) << '\n';
}

void write_resolved_config(const mlfsm::RunConfig& cfg, std::vector<std::string>& files) {
    const auto path = fs::path(cfg.out_dir) / "resolved_config.json";
    std::ofstream os(path);
    os << cfg.resolved().dump(2) << '\n';
    files.push_back(path.string());
}

int cmd_simulate(const CommonFlags& flags) {
    auto cfg = load_with_overrides(flags);
    auto scheme = cfg.scheme_for_n(cfg.scheme.n);
    auto design = cfg.build_design();
    scheme.max_gamma = design.max_gamma();
    scheme.validate();

    const auto path = mlfsm::simulate_mixed_path(cfg.model, scheme, cfg.seed, 1);

    fs::create_directories(cfg.out_dir);
    std::vector<std::string> files;
    write_resolved_config(cfg, files);
    if (wants(cfg, "csv")) {
        const auto p = fs::path(cfg.out_dir) / "path.csv";
        mlfsm::write_path_csv(path, p.string());
        files.push_back(p.string());
    }
    if (wants(cfg, "bin")) {
        const auto p = fs::path(cfg.out_dir) / "path.bin";
        mlfsm::write_path_binary(path, p.string());
        files.push_back(p.string());
    }
    if (wants(cfg, "json")) {
        const auto p = fs::path(cfg.out_dir) / "path_meta.json";
        std::ofstream os(p);
        os << json({{"n", scheme.n}, {"delta", scheme.delta}, {"k", scheme.k}}).dump(2)
           << '\n';
        files.push_back(p.string());
    }
    write_manifest(cfg, "simulate", files, false);
    std::cout << "simulate: wrote " << files.size() + 1 << " files to " << cfg.out_dir
              << "\n";
    return 0;
}

int cmd_estimate(const CommonFlags& flags, const std::string& input) {
    auto cfg = load_with_overrides(flags);
    auto design = cfg.build_design();

    mlfsm::PathSample path;
    if (input == "--simulate" || input.empty()) {
        auto scheme = cfg.scheme_for_n(cfg.scheme.n);
        scheme.max_gamma = design.max_gamma();
        scheme.validate();
        path = mlfsm::simulate_mixed_path(cfg.model, scheme, cfg.seed, 1);
    } else {
        path = (input.size() > 4 && input.substr(input.size() - 4) == ".csv")
                   ? mlfsm::read_path_csv(input)
                   : mlfsm::read_path_binary(input);
        path.scheme.k = cfg.scheme.k;
    }

    std::vector<int> gammas;
    for (const auto& t : design.tuples)
        if (std::find(gammas.begin(), gammas.end(), t.gamma) == gammas.end())
            gammas.push_back(t.gamma);
    const auto panel = mlfsm::k_order_increments(path, cfg.scheme.k, gammas);

    auto init = cfg.init_override.empty()
                    ? mlfsm::initial_guess(panel, design.domain, cfg.model.q())
                    : [&] {
                          mlfsm::ParamVector p;
                          p.domain = design.domain;
                          p.coords = cfg.init_override;
                          return p;
                      }();

    // Threshold designs are screened against their known singular locus.
    if (design.domain == mlfsm::ParamDomain::Threshold) {
        const auto comps = init.components();
        const auto det = mlfsm::regularity_determinants(
            mlfsm::RegularityCase::III, comps[2].h, comps[2].beta, comps[3].h,
            comps[3].beta);
        if (std::abs(det.closed_form) < 1e-8)
            throw mlfsm::numerical_error(
                "estimate: design is singular (violated condition: " + det.singular_when +
                "); choose a different initial point or design");
        const double sigma = std::sqrt(std::max(
            mlfsm::kernel_norm(comps[0].h, 2.0, cfg.scheme.k),
            mlfsm::kernel_norm(comps[1].h, 2.0, cfg.scheme.k)));
        design.w_sigma = (cfg.w_sigma > 0.0) ? cfg.w_sigma : sigma;
    }

    auto system = mlfsm::make_moment_system(panel, design);
    mlfsm::SolveOptions opts;
    opts.tol = cfg.solver_tol;
    opts.max_iter = cfg.solver_max_iter;
    if (cfg.solver_method == "contraction") opts.method = mlfsm::SolveMethod::Contraction;
    if (cfg.solver_method == "newton") opts.method = mlfsm::SolveMethod::Newton;

    auto result = mlfsm::solve_estimating_equation(system, init, opts);
    const double rho_eff =
        std::log(1.0 / path.scheme.delta) / std::log(static_cast<double>(path.scheme.n));
    result.identifiability = mlfsm::check_identifiability(result.theta_hat, rho_eff);

    fs::create_directories(cfg.out_dir);
    std::vector<std::string> files;
    write_resolved_config(cfg, files);
    {
        const auto p = fs::path(cfg.out_dir) / "estimate.json";
        std::ofstream os(p);
        os << mlfsm::to_json(result).dump(2) << '\n';
        files.push_back(p.string());
    }
    if (wants(cfg, "csv")) {
        const auto p = fs::path(cfg.out_dir) / "estimate.csv";
        std::ofstream os(p);
        os << "converged,iterations,residual_norm,method,theta...\n"
           << mlfsm::estimation_csv_row(result) << '\n';
        files.push_back(p.string());
    }
    write_manifest(cfg, "estimate", files, !result.converged,
                   result.converged ? "" : "solver did not converge");
    std::cout << "estimate: converged=" << (result.converged ? "true" : "false")
              << " iterations=" << result.iterations
              << " residual=" << result.residual_norm << "\n";
    return result.converged ? 0 : 5;
}

int cmd_mc(const CommonFlags& flags, const std::string& experiment_flag) {
    auto cfg = load_with_overrides(flags);
    if (!experiment_flag.empty()) cfg.experiment = experiment_flag;
    auto plan = cfg.build_plan();
    for (auto& s : plan.scheme_grid) {
        s.max_gamma = plan.design.max_gamma();
        s.validate();
    }

    fs::create_directories(cfg.out_dir);
    std::vector<std::string> files;
    write_resolved_config(cfg, files);
    json out;
    bool pass = true;

    if (cfg.experiment == "variance") {
        const auto f = (cfg.mc_function == "f2") ? plan.design.f2 : plan.design.f1;
        const auto rep = mlfsm::mc_variance_scaling(plan, f);
        out = mlfsm::to_json(rep);
        pass = rep.pass;
    } else if (cfg.experiment == "clt") {
        mlfsm::CltCase c = mlfsm::CltCase::I;
        if (cfg.clt_case == "ii") c = mlfsm::CltCase::II;
        else if (cfg.clt_case == "iii") c = mlfsm::CltCase::III;
        else if (cfg.clt_case == "iv") c = mlfsm::CltCase::IV;
        else if (cfg.clt_case == "v") c = mlfsm::CltCase::V;
        else if (cfg.clt_case != "i")
            throw mlfsm::config_error("mc.case must be one of i|ii|iii|iv|v");
        const auto f = (cfg.mc_function == "f2") ? plan.design.f2 : plan.design.f1;
        const auto rep = mlfsm::mc_clt_check(plan, f, c);
        out = mlfsm::to_json(rep);
        pass = rep.pass;
    } else if (cfg.experiment == "rates") {
        const auto rep = mlfsm::rate_table_experiment(plan);
        out = mlfsm::to_json(rep);
        pass = rep.pass;
        // gnuplot-friendly rate data: log-log RMSE per coordinate
        const auto pd = fs::path(cfg.out_dir) / "mc_rates.dat";
        std::ofstream ds(pd);
        ds << "# n";
        for (const auto& name : rep.coord_names) ds << " rmse_" << name;
        ds << "\n";
        for (const auto& cell : rep.cells) {
            ds << cell.n;
            for (double r : cell.rmse) ds << ' ' << r;
            ds << '\n';
        }
        files.push_back(pd.string());
    } else if (cfg.experiment == "asymcov") {
        mlfsm::McCovOptions copts;
        copts.k = cfg.cov_k;
        copts.path_length = cfg.cov_path_length;
        copts.seed = cfg.seed;
        const auto theta0 =
            mlfsm::ParamVector::adaptive_from_model(cfg.model, cfg.cov_k);
        const auto est = mlfsm::estimate_asymp_cov_G(theta0, plan.design, copts);
        out = {{"experiment", "asymcov"}, {"sigma_G", mlfsm::to_json(est)}};
    } else {
        throw mlfsm::config_error("mc.experiment must be variance|clt|rates|asymcov");
    }

    const auto p = fs::path(cfg.out_dir) / ("mc_" + cfg.experiment + ".json");
    std::ofstream os(p);
    os << out.dump(2) << '\n';
    files.push_back(p.string());

    if (wants(cfg, "csv") && out.contains("cells")) {
        const auto pc = fs::path(cfg.out_dir) / ("mc_" + cfg.experiment + ".csv");
        std::ofstream cs(pc);
        bool header = false;
        for (const auto& cell : out.at("cells")) {
            if (!header) {
                bool first = true;
                for (auto it = cell.begin(); it != cell.end(); ++it) {
                    cs << (first ? "" : ",") << it.key();
                    first = false;
                }
                cs << '\n';
                header = true;
            }
            bool first = true;
            for (auto it = cell.begin(); it != cell.end(); ++it) {
                cs << (first ? "" : ",") << it.value().dump();
                first = false;
            }
            cs << '\n';
        }
        files.push_back(pc.string());
    }

    write_manifest(cfg, "mc", files, false);
    std::cout << "mc " << cfg.experiment << ": " << (pass ? "pass" : "FAIL") << ", report "
              << p.string() << "\n";
    return 0;
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_file) {
    if (inputs.empty()) throw mlfsm::config_error("report: no input report files given");
    std::vector<json> reports;
    std::vector<std::string> names;
    for (const auto& in : inputs) {
        std::ifstream is(in);
        if (!is) throw mlfsm::input_error("report: cannot open " + in);
        json j = json::parse(is, nullptr, true, true);
        if (j.contains("schema_version") && j.at("schema_version") != 1)
            throw mlfsm::config_error("report: schema version mismatch in " + in +
                                      "; regenerate the report with this build");
        reports.push_back(j);
        names.push_back(fs::path(in).stem().string());
    }

    std::ostringstream md;
    if (reports.front().contains("fits")) {
        // rates reports: one row per parameter, one column pair per report
        md << "| parameter |";
        for (const auto& n : names) md << " " << n << " slope | expected |";
        md << "\n|---|";
        for (std::size_t i = 0; i < names.size(); ++i) md << "---|---|";
        md << "\n";
        const auto& first_fits = reports.front().at("fits");
        for (std::size_t row = 0; row < first_fits.size(); ++row) {
            md << "| " << first_fits[row].at("name").get<std::string>() << " |";
            for (const auto& rep : reports) {
                const auto& f = rep.at("fits")[row];
                md << " " << fmt_double(f.at("slope").get<double>()) << " | "
                   << fmt_double(f.at("expected").get<double>()) << " |";
            }
            md << "\n";
        }
    } else if (reports.front().contains("entries") ||
               (reports.front().contains("identifiability"))) {
        md << "| parameter |";
        for (const auto& n : names) md << " " << n << " condition | ok |";
        md << "\n|---|";
        for (std::size_t i = 0; i < names.size(); ++i) md << "---|---|";
        md << "\n";
        const auto entries_of = [](const json& r) {
            return r.contains("identifiability") ? r.at("identifiability").at("entries")
                                                 : r.at("entries");
        };
        const auto& first_entries = entries_of(reports.front());
        for (std::size_t row = 0; row < first_entries.size(); ++row) {
            md << "| " << first_entries[row].at("parameter").get<std::string>() << " |";
            for (const auto& rep : reports) {
                const auto& e = entries_of(rep)[row];
                md << " < " << fmt_double(e.at("bound").get<double>()) << " | "
                   << (e.at("identifiable").get<bool>() ? "yes" : "no") << " |";
            }
            md << "\n";
        }
    } else {
        // generic verdict table
        md << "| verdict | value | pass |\n|---|---|---|\n";
        for (const auto& rep : reports)
            if (rep.contains("verdicts"))
                for (const auto& v : rep.at("verdicts"))
                    md << "| " << v.at("name").get<std::string>() << " | "
                       << fmt_double(v.at("value").get<double>()) << " | "
                       << (v.at("pass").get<bool>() ? "yes" : "no") << " |\n";
    }

    std::cout << md.str();
    if (!out_file.empty()) {
        std::ofstream os(out_file);
        os << md.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed linear fractional stable motion laboratory"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string estimate_input = "--simulate";
    std::string mc_experiment;
    std::vector<std::string> report_inputs;
    std::string report_out;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", flags.config_path, "config file (JSON, // comments ok)");
        if (needs_config) opt->required();
        sub->add_option("--seed", [&flags](const std::vector<std::string>& v) {
            flags.seed = std::stoull(v.at(0));
            return true;
        }, "override top-level seed");
        sub->add_option("--threads", [&flags](const std::vector<std::string>& v) {
            flags.threads = std::stoi(v.at(0));
            return true;
        }, "worker cap for MC plans");
        sub->add_option("--out", [&flags](const std::vector<std::string>& v) {
            flags.out_dir = v.at(0);
            return true;
        }, "output directory");
        sub->add_option("--format", [&flags](const std::vector<std::string>& v) {
            flags.format = v.at(0);
            return true;
        }, "csv|json|bin");
    };

    auto* sim = app.add_subcommand("simulate", "simulate a mixed lfsm path");
    add_common(sim, true);

    auto* est = app.add_subcommand("estimate", "estimate model parameters");
    add_common(est, true);
    est->add_option("--input", estimate_input,
                    "path file (.csv or .bin) or --simulate for self-simulated data");

    auto* mc = app.add_subcommand("mc", "run a Monte Carlo experiment");
    add_common(mc, true);
    mc->add_option("--experiment", mc_experiment, "variance|clt|rates|asymcov");

    auto* rep = app.add_subcommand("report", "summarize report files as tables");
    rep->add_option("inputs", report_inputs, "report JSON files");
    rep->add_option("--out", report_out, "write markdown here as well");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(flags);
        if (est->parsed()) return cmd_estimate(flags, estimate_input);
        if (mc->parsed()) return cmd_mc(flags, mc_experiment);
        if (rep->parsed()) return cmd_report(report_inputs, report_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const mlfsm::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
