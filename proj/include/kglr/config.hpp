#pragma once

#include "kglr/experiments.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Flat key = value config files, one key per line, '#' comments. The
// grammar is documented in the README; parse_config validates every
// ExperimentConfig invariant and rejects unknown or duplicate keys.

namespace kglr {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides = {});

/// Same parser on an in-memory buffer; source_name is used in diagnostics.
ExperimentConfig parse_config_text(std::string_view text, std::string_view source_name,
                                   const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_config_text(format_config(cfg)) == cfg.
std::string format_config(const ExperimentConfig& cfg);

std::string to_token(ExperimentKind kind);
std::string to_token(MethodTag method);
std::string to_token(Nonlinearity nl);

}  // namespace kglr
