#ifndef MLFSM_CONFIG_HPP
#define MLFSM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlfsm/design.hpp"
#include "mlfsm/mclab.hpp"
#include "mlfsm/model.hpp"

namespace mlfsm {

// Run configuration: JSON with // comments allowed, schema-versioned, unknown
// keys rejected, every default echoed back through resolved().
struct RunConfig {
    int schema_version = 1;

    ModelParams model;
    SamplingScheme scheme;
    double rho = 0.0;   // when > 0, delta = n^{-rho} overrides scheme.delta

    std::string method = "adaptive";   // adaptive | threshold
    std::vector<MomentTuple> tuples;   // empty -> default design for the method
    double eta = 1.0;
    double width = 0.5;
    double decay = 1.0;
    double w_c0 = 1.0;
    double w_sigma = 0.0;   // 0 -> derived from the initializer

    double solver_tol = 1e-9;
    int solver_max_iter = 80;
    std::string solver_method = "auto";   // auto | contraction | newton
    std::vector<double> init_override;    // optional explicit theta_init

    // mc block
    std::string experiment = "clt";   // variance | clt | rates | asymcov
    std::vector<std::size_t> n_grid = {1024, 4096, 16384};
    int reps = 200;
    std::string clt_case = "i";
    std::string mc_function = "f1";   // f1 | f2
    int cov_k = 2;
    std::size_t cov_path_length = 65536;

    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};
    std::uint64_t seed = 1;
    int threads = 1;

    MomentDesign build_design() const;
    SamplingScheme scheme_for_n(std::size_t n) const;
    McPlan build_plan() const;

    // Fully-populated JSON round-trippable through parse().
    nlohmann::json resolved() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

} // namespace mlfsm

#endif
