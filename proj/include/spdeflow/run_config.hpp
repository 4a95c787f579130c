#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "spdeflow/distribution.hpp"
#include "spdeflow/model.hpp"

namespace spdeflow::config {

/// Malformed or missing configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

nlohmann::json load_file(const std::string& path);

/// Model spec: {"type": "brownian"|"ou"|"constant"|"polynomial", ...}.
CoefficientModel parse_model(const nlohmann::json& j);

/// Basis spec: {"d": 1, "n_max": 32, "quad_nodes": 0}.
BasisPtr parse_basis(const nlohmann::json& j);

/// Distribution spec: atoms as [c, [gamma...], [x...]]; density terms as
/// {"alpha": [...], "grid": {"lo": [...], "hi": [...], "n": N}, "g": name-or-samples}.
CompactDistribution parse_distribution(const nlohmann::json& j, int d);

struct SolverParams {
    double T = 1.0;
    double dt = 1e-3;
    long paths = 10000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::optional<double> p, q;
};

SolverParams parse_solver(const nlohmann::json& j);

/// FNV-1a hash of the canonical (key-sorted) dump, hex string.
std::string config_hash(const nlohmann::json& j);

/// Standard report envelope. The "result" block is deterministic given config + seed;
/// volatile data (timestamp) lives only in "metadata".
nlohmann::ordered_json make_report(const nlohmann::json& config,
                                   const nlohmann::ordered_json& result);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace spdeflow::config
