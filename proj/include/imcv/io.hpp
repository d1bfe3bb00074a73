#pragma once

#include "imcv/checker.hpp"
#include "imcv/imc.hpp"
#include "imcv/logic.hpp"
#include "imcv/robustness.hpp"
#include "imcv/system.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imcv {

/// Optional defaults from the [verify] section of a config file.
struct VerifySettings {
    std::optional<double> eta;
    std::optional<double> kappa;
    std::optional<std::string> property;
    std::optional<std::vector<double>> x0;
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<int> horizon;
    std::optional<double> confidence;
    std::optional<double> theta1;
    std::optional<double> theta2;
};

struct Config {
    SystemSpec spec;
    VerifySettings verify;
};

/// Parse a config document:
///
///     [system]
///     n = 1
///     f = ["0.5*x1"]
///     b = [["0.5"]]
///     theta = 0
///     W = [[-1, 1]]
///
///     [labels]
///     goal = [[0.5, 1]]
///
///     [verify]
///     eta = 0.25
///
/// Boxes are lists of [lo, hi] pairs, one per axis; a 1-D box may be written
/// as a bare pair, and a label may list several boxes. Throws parse_error
/// (with line and column) on syntax errors and validation_error naming the
/// offending key otherwise.
Config parse_config_text(std::string_view text);
Config load_config(const std::filesystem::path& path);
SystemSpec parse_config(const std::filesystem::path& path);

nlohmann::json imc_to_json(const Imc& imc);
Imc imc_from_json(const nlohmann::json& doc);
void save_imc(const Imc& imc, const std::filesystem::path& path);
Imc load_imc(const std::filesystem::path& path);

/// DFA document: {"initial": 0, "accepting": [false, true],
/// "edges": [[{"guard": "goal", "target": 1}, {"guard": "true", "target": 0}], ...]}.
Dfa dfa_from_json(const nlohmann::json& doc);
Dfa load_dfa(const std::filesystem::path& path);

/// True when x is a multiple of 2^-max_exponent.
bool is_dyadic(double x, int max_exponent = 20);
/// Reduced fraction "p/q" for a dyadic double ("0" and "1" for the ends).
std::string format_fraction(double x);

/// CSV with columns state,lo,hi,verdict; verdict is empty without a threshold.
void write_results_csv(std::ostream& os, const ProbIntervals& iv, const std::optional<WinningRegion>& region = {});

nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const SandwichReport& r);

} // namespace imcv
