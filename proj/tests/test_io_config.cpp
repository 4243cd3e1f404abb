#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mlfsm/config.hpp"
#include "mlfsm/errors.hpp"
#include "mlfsm/io.hpp"
#include "mlfsm/rng.hpp"

using namespace mlfsm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("mlfsm_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

PathSample sample_path() {
    PathSample p;
    p.scheme.n = 64;
    p.scheme.delta = 0.015625;
    p.scheme.k = 2;
    p.params_hash = 0xabcdef;
    RngHandle rng(5, 5);
    p.values.resize(64);
    for (auto& v : p.values) v = rng.next_gaussian();
    return p;
}

} // namespace

TEST_CASE("binary path round trip is exact") {
    TempDir tmp;
    const auto p = sample_path();
    write_path_binary(p, tmp.file("p.bin"));
    const auto q = read_path_binary(tmp.file("p.bin"));
    CHECK(q.values == p.values);
    CHECK(q.scheme.delta == p.scheme.delta);
    CHECK(q.scheme.n == p.scheme.n);
    CHECK(q.params_hash == p.params_hash);

    // bad magic rejected
    {
        std::ofstream os(tmp.file("bad.bin"), std::ios::binary);
        os << "NOTMAGIC00000000";
    }
    CHECK_THROWS_AS(read_path_binary(tmp.file("bad.bin")), input_error);
}

TEST_CASE("csv path round trip preserves values to full precision") {
    TempDir tmp;
    const auto p = sample_path();
    write_path_csv(p, tmp.file("p.csv"));
    const auto q = read_path_csv(tmp.file("p.csv"));
    REQUIRE(q.values.size() == p.values.size());
    for (std::size_t i = 0; i < p.values.size(); ++i)
        CHECK(q.values[i] == doctest::Approx(p.values[i]).epsilon(1e-15));
    CHECK(q.scheme.delta == doctest::Approx(p.scheme.delta));
}

TEST_CASE("panel binary round trip") {
    TempDir tmp;
    IncrementPanel panel;
    panel.k = 2;
    panel.delta = 0.01;
    panel.n = 20;
    panel.gammas = {1, 3};
    panel.columns = {{1.5, -2.5, 3.25}, {0.0, 1.0}};
    write_panel_binary(panel, tmp.file("panel.bin"));
    const auto q = read_panel_binary(tmp.file("panel.bin"));
    CHECK(q.gammas == panel.gammas);
    CHECK(q.columns == panel.columns);
    CHECK(q.k == panel.k);

    // a path file is not a panel
    const auto p = sample_path();
    write_path_binary(p, tmp.file("p.bin"));
    CHECK_THROWS_AS(read_panel_binary(tmp.file("p.bin")), input_error);
}

TEST_CASE("fourier table disk cache round trip with key check") {
    TempDir tmp;
    const auto f = make_gauss_bump(1.0);
    const auto& table = cached_fourier_table(f);
    const auto key = f.cache_key(0.0, 0);
    save_fourier_table(table, key, tmp.file("ft.bin"));
    const auto back = load_fourier_table(tmp.file("ft.bin"), key);
    CHECK(back.size() == table.size());
    CHECK(back.v_max() == table.v_max());
    CHECK(back.value(back.size() / 2) == table.value(table.size() / 2));
    CHECK_THROWS_AS(load_fourier_table(tmp.file("ft.bin"), "different-key"), input_error);
}

TEST_CASE("config parsing rejects unknown keys and bad enums") {
    nlohmann::json base = {
        {"model", {{"components", {{{"b", 1.0}, {"H", 0.7}, {"beta", 1.5}}}}}},
        {"scheme", {{"n", 1000}, {"delta", 0.001}}},
    };
    CHECK_NOTHROW(parse_config(base));

    auto unknown_root = base;
    unknown_root["surprise"] = 1;
    CHECK_THROWS_WITH_AS(parse_config(unknown_root), doctest::Contains("surprise"),
                         config_error);

    auto unknown_nested = base;
    unknown_nested["scheme"]["meshes"] = 4;
    CHECK_THROWS_WITH_AS(parse_config(unknown_nested), doctest::Contains("meshes"),
                         config_error);

    auto bad_fmt = base;
    bad_fmt["output"] = {{"formats", {"yaml"}}};
    CHECK_THROWS_AS(parse_config(bad_fmt), config_error);

    auto no_delta = base;
    no_delta["scheme"].erase("delta");
    CHECK_THROWS_AS(parse_config(no_delta), config_error);
}

TEST_CASE("resolved config round trips to the identical json") {
    nlohmann::json j = {
        {"model", {{"components", {{{"b", 1.0}, {"H", 0.7}, {"beta", 1.5}}}}}},
        {"scheme", {{"n", 4096}, {"rho", 1.0}, {"k", 2}}},
        {"design", {{"method", "adaptive"}, {"eta", 1.25}}},
        {"seed", 77},
    };
    const auto cfg = parse_config(j);
    const auto resolved = cfg.resolved();
    // defaults are echoed
    CHECK(resolved.at("scheme").at("mesh") == 16);
    CHECK(resolved.at("design").at("width") == 0.5);
    CHECK(resolved.at("mc").at("reps") == 200);
    const auto cfg2 = parse_config(resolved);
    CHECK(cfg2.resolved() == resolved);
    // rho-derived frequency
    CHECK(cfg.scheme.delta == doctest::Approx(1.0 / 4096.0));
}

TEST_CASE("comments are accepted in config files") {
    TempDir tmp;
    {
        std::ofstream os(tmp.file("c.json"));
        os << "{\n// experiment configuration\n"
              "\"model\": {\"components\": [{\"b\": 1.0, \"H\": 0.5, \"beta\": 2.0}]},\n"
              "\"scheme\": {\"n\": 256, \"delta\": 0.01} /* inline */\n}\n";
    }
    const auto cfg = load_config_file(tmp.file("c.json"));
    CHECK(cfg.scheme.n == 256);
}

TEST_CASE("estimation result json carries the diagnostics") {
    EstimationResult r;
    r.theta_hat = ParamVector::adaptive({{1.0, 0.5, 1.5}});
    r.iterations = 7;
    r.residual_norm = 1e-11;
    r.converged = true;
    r.method_used = "contraction";
    const auto j = to_json(r);
    CHECK(j.at("converged") == true);
    CHECK(j.at("iterations") == 7);
    CHECK(j.at("theta_hat").size() == 3);
    CHECK(j.contains("identifiability"));
}
