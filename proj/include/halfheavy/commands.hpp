#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace halfheavy {

struct Invocation {
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::filesystem::path output_dir = ".";
  std::vector<std::string> overrides;  // "dotted.key=value", value parsed as JSON when possible
  std::optional<std::uint64_t> master_seed;
  std::optional<int> threads;
};

enum class Outcome { ok, acceptance_failed };

const std::vector<std::string>& subcommands();

/// Applies `key=value` overrides in order. Dotted keys address nested
/// objects; a value that is not valid JSON is taken as a string.
void apply_overrides(nlohmann::json& config, const std::vector<std::string>& overrides);

/// Runs one subcommand and writes its files into output_dir. Throws
/// InputError / DomainError / IoError on failure.
Outcome dispatch(const Invocation& inv);

}  // namespace halfheavy
