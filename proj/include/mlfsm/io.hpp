#ifndef MLFSM_IO_HPP
#define MLFSM_IO_HPP

#include <string>

#include <json.hpp>

#include "mlfsm/mclab.hpp"
#include "mlfsm/test_function.hpp"
#include "mlfsm/model.hpp"
#include "mlfsm/solver.hpp"

namespace mlfsm {

// Binary container: 8-byte magic "MLFSMBIN", one version byte, one kind byte
// (0 = path, 1 = panel), then little-endian u64 sizes and f64 payloads.
inline constexpr char kBinaryMagic[8] = {'M', 'L', 'F', 'S', 'M', 'B', 'I', 'N'};
inline constexpr unsigned char kBinaryVersion = 1;

void write_path_csv(const PathSample& path, const std::string& file);
void write_path_binary(const PathSample& path, const std::string& file);
PathSample read_path_binary(const std::string& file);
PathSample read_path_csv(const std::string& file);

void write_panel_csv(const IncrementPanel& panel, const std::string& file);
void write_panel_binary(const IncrementPanel& panel, const std::string& file);
IncrementPanel read_panel_binary(const std::string& file);

// Disk cache for Fourier tables, keyed by the test-function parameters.
void save_fourier_table(const FourierTable& table, const std::string& key,
                        const std::string& file);
FourierTable load_fourier_table(const std::string& file, const std::string& expected_key);

nlohmann::json to_json(const EstimationResult& r);
nlohmann::json to_json(const IdentifiabilityReport& r);
nlohmann::json to_json(const VarianceReport& r);
nlohmann::json to_json(const CltReport& r);
nlohmann::json to_json(const RateReport& r);
nlohmann::json to_json(const CovEstimate& r);

std::string estimation_csv_row(const EstimationResult& r);

} // namespace mlfsm

#endif
