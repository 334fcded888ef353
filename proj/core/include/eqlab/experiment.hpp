#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "eqlab/report.hpp"

namespace eqlab {

enum class Subcommand { Sections, Dynamics, Henon, Potential, Constants };

std::string to_string(Subcommand s);
/// Throws SchemaError for an unknown name.
Subcommand subcommand_from_string(const std::string& name);

struct ExperimentConfig {
  Subcommand subcommand = Subcommand::Constants;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Checks a parameter document against the strict schema of the subcommand.
/// Unknown keys, wrong types and out-of-range values raise SchemaError with
/// the key path ("$.mixing.n_max"). An optional "subcommand" key must match.
ExperimentConfig make_config(Subcommand sub, const nlohmann::json& doc, std::uint64_t seed, std::size_t workers = 1);

/// Reads and validates a JSON config file; syntax errors are SchemaErrors at "$".
ExperimentConfig load_config(Subcommand sub, const std::filesystem::path& file, std::uint64_t seed,
                             std::size_t workers = 1);

/// Runs the owning module. Trials are sharded over workers and reduced in
/// trial order, so every table is a function of (params, seed) alone.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace eqlab
