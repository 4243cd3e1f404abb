#include "mlfsm/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mlfsm/errors.hpp"

namespace mlfsm {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_u64(os, bits);
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

std::ofstream open_out(const std::string& file, bool binary) {
    std::ofstream os(file, binary ? std::ios::binary : std::ios::out);
    if (!os) throw input_error("cannot open for writing: " + file);
    return os;
}

std::ifstream open_in(const std::string& file, bool binary) {
    std::ifstream is(file, binary ? std::ios::binary : std::ios::in);
    if (!is) throw input_error("cannot open for reading: " + file);
    return is;
}

void write_header(std::ostream& os, unsigned char kind) {
    os.write(kBinaryMagic, 8);
    os.put(static_cast<char>(kBinaryVersion));
    os.put(static_cast<char>(kind));
}

unsigned char read_header(std::istream& is, const std::string& file) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kBinaryMagic, 8) != 0)
        throw input_error("bad magic header in " + file);
    const int version = is.get();
    if (version != kBinaryVersion)
        throw input_error("unsupported binary version " + std::to_string(version) +
                          " in " + file);
    return static_cast<unsigned char>(is.get());
}

} // namespace

void write_path_csv(const PathSample& path, const std::string& file) {
    auto os = open_out(file, false);
    os << "index,time,value\n";
    os.precision(17);
    for (std::size_t l = 0; l < path.values.size(); ++l)
        os << (l + 1) << ',' << (static_cast<double>(l + 1) * path.scheme.delta) << ','
           << path.values[l] << '\n';
}

void write_path_binary(const PathSample& path, const std::string& file) {
    auto os = open_out(file, true);
    write_header(os, 0);
    put_u64(os, path.values.size());
    put_f64(os, path.scheme.delta);
    put_u64(os, static_cast<std::uint64_t>(path.scheme.k));
    put_u64(os, path.params_hash);
    for (double x : path.values) put_f64(os, x);
}

PathSample read_path_binary(const std::string& file) {
    auto is = open_in(file, true);
    if (read_header(is, file) != 0) throw input_error(file + " does not hold a path");
    PathSample p;
    const std::uint64_t n = get_u64(is);
    p.scheme.n = n;
    p.scheme.delta = get_f64(is);
    p.scheme.k = static_cast<int>(get_u64(is));
    p.params_hash = get_u64(is);
    p.values.resize(n);
    for (auto& x : p.values) x = get_f64(is);
    if (!is) throw input_error("truncated path file: " + file);
    return p;
}

PathSample read_path_csv(const std::string& file) {
    auto is = open_in(file, false);
    std::string line;
    if (!std::getline(is, line)) throw input_error("empty path csv: " + file);
    PathSample p;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string idx, time, value;
        if (!std::getline(ls, idx, ',') || !std::getline(ls, time, ',') ||
            !std::getline(ls, value, ','))
            throw input_error("malformed path csv row: " + line);
        if (p.values.empty()) p.scheme.delta = std::stod(time);
        p.values.push_back(std::stod(value));
    }
    p.scheme.n = p.values.size();
    return p;
}

void write_panel_csv(const IncrementPanel& panel, const std::string& file) {
    auto os = open_out(file, false);
    os << "l";
    for (int g : panel.gammas) os << ",gamma_" << g;
    os << '\n';
    os.precision(17);
    std::size_t min_first = panel.n + 1;
    for (std::size_t c = 0; c < panel.gammas.size(); ++c)
        min_first = std::min(min_first, panel.first_l(c));
    for (std::size_t l = min_first; l <= panel.n; ++l) {
        os << l;
        for (std::size_t c = 0; c < panel.gammas.size(); ++c) {
            os << ',';
            const std::size_t first = panel.first_l(c);
            if (l >= first) os << panel.columns[c][l - first];
        }
        os << '\n';
    }
}

void write_panel_binary(const IncrementPanel& panel, const std::string& file) {
    auto os = open_out(file, true);
    write_header(os, 1);
    put_u64(os, panel.gammas.size());
    put_u64(os, panel.n);
    put_u64(os, static_cast<std::uint64_t>(panel.k));
    put_f64(os, panel.delta);
    for (std::size_t c = 0; c < panel.gammas.size(); ++c) {
        put_u64(os, static_cast<std::uint64_t>(panel.gammas[c]));
        put_u64(os, panel.columns[c].size());
        for (double x : panel.columns[c]) put_f64(os, x);
    }
}

IncrementPanel read_panel_binary(const std::string& file) {
    auto is = open_in(file, true);
    if (read_header(is, file) != 1) throw input_error(file + " does not hold a panel");
    IncrementPanel p;
    const std::uint64_t cols = get_u64(is);
    p.n = get_u64(is);
    p.k = static_cast<int>(get_u64(is));
    p.delta = get_f64(is);
    for (std::uint64_t c = 0; c < cols; ++c) {
        p.gammas.push_back(static_cast<int>(get_u64(is)));
        const std::uint64_t len = get_u64(is);
        std::vector<double> col(len);
        for (auto& x : col) x = get_f64(is);
        p.columns.push_back(std::move(col));
    }
    if (!is) throw input_error("truncated panel file: " + file);
    return p;
}

void save_fourier_table(const FourierTable& table, const std::string& key,
                        const std::string& file) {
    auto os = open_out(file, true);
    write_header(os, 2);
    put_u64(os, key.size());
    os.write(key.data(), static_cast<std::streamsize>(key.size()));
    put_f64(os, table.v_max());
    put_u64(os, table.size());
    for (std::size_t i = 0; i < table.size(); ++i) put_f64(os, table.value(i));
}

FourierTable load_fourier_table(const std::string& file, const std::string& expected_key) {
    auto is = open_in(file, true);
    if (read_header(is, file) != 2)
        throw input_error(file + " does not hold a Fourier table");
    const std::uint64_t klen = get_u64(is);
    std::string key(klen, '\0');
    is.read(key.data(), static_cast<std::streamsize>(klen));
    if (!expected_key.empty() && key != expected_key)
        throw input_error("Fourier table cache key mismatch in " + file + ": stored '" +
                          key + "'");
    const double v_max = get_f64(is);
    const std::uint64_t n = get_u64(is);
    std::vector<double> vals(n);
    for (auto& x : vals) x = get_f64(is);
    if (!is) throw input_error("truncated Fourier table file: " + file);
    return FourierTable(std::move(vals), v_max);
}

nlohmann::json to_json(const IdentifiabilityReport& r) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"parameter", e.parameter},
                           {"value", e.value},
                           {"bound", e.bound},
                           {"identifiable", e.identifiable}});
    return {{"entries", entries},
            {"minimal_k", r.minimal_k},
            {"all_identifiable", r.all_identifiable}};
}

nlohmann::json to_json(const EstimationResult& r) {
    return {{"theta_hat", r.theta_hat.coords},
            {"domain", r.theta_hat.domain == ParamDomain::Adaptive ? "adaptive" : "threshold"},
            {"iterations", r.iterations},
            {"residual_norm", r.residual_norm},
            {"converged", r.converged},
            {"method_used", r.method_used},
            {"jacobian_condition", r.jacobian_condition},
            {"rate_standardized_errors", r.rate_standardized_errors},
            {"identifiability", to_json(r.identifiability)}};
}

std::string estimation_csv_row(const EstimationResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << r.residual_norm << ','
       << r.method_used;
    for (double x : r.theta_hat.coords) os << ',' << x;
    return os.str();
}

namespace {
nlohmann::json verdicts_json(const std::vector<McVerdict>& vs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : vs)
        arr.push_back({{"name", v.name},
                       {"tolerance", v.tolerance},
                       {"value", v.value},
                       {"pass", v.pass}});
    return arr;
}
} // namespace

nlohmann::json to_json(const VarianceReport& r) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"n", c.n},
                         {"delta", c.delta},
                         {"var_s", c.var_s},
                         {"gauss_term", c.gauss_term},
                         {"stable_term", c.stable_term},
                         {"ratio", c.ratio}});
    return {{"experiment", "variance"},
            {"cells", cells},
            {"verdicts", verdicts_json(r.verdicts)},
            {"pass", r.pass}};
}

nlohmann::json to_json(const CltReport& r) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"n", c.n},
                         {"ks_stat", c.ks_stat},
                         {"ks_p", c.ks_p},
                         {"ad_stat", c.ad_stat},
                         {"cross_corr", c.cross_corr},
                         {"degenerate", c.degenerate}});
    return {{"experiment", "clt"},
            {"cells", cells},
            {"verdicts", verdicts_json(r.verdicts)},
            {"regime_note", r.regime_note},
            {"pass", r.pass}};
}

nlohmann::json to_json(const RateReport& r) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"n", c.n},
                         {"converged", c.converged},
                         {"reps", c.reps},
                         {"rmse", c.rmse},
                         {"reliable", c.reliable}});
    nlohmann::json fits = nlohmann::json::array();
    for (const auto& f : r.fits)
        fits.push_back({{"name", f.name},
                        {"slope", f.slope},
                        {"slope_se", f.slope_se},
                        {"expected", f.expected},
                        {"slack", f.slack},
                        {"pass", f.pass}});
    return {{"experiment", "rates"},
            {"cells", cells},
            {"fits", fits},
            {"coord_names", r.coord_names},
            {"reliable", r.reliable},
            {"pass", r.pass}};
}

nlohmann::json to_json(const CovEstimate& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < r.sigma.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < r.sigma.cols(); ++j) row.push_back(r.sigma(i, j));
        rows.push_back(row);
    }
    return {{"sigma", rows},
            {"z_used", r.z_used},
            {"truncation_warning", r.truncation_warning},
            {"min_eig_before", r.min_eig_before},
            {"richardson_levels", r.richardson_levels}};
}

} // namespace mlfsm
