#pragma once

#include "rk4/harness.hpp"

#include <optional>
#include <string>

namespace rk4::cli {

std::string sha256_hex(const std::string& data);
std::string base64_encode(const std::string& data);
std::string base64_decode(const std::string& text);

// Checkpoint file: {config_hash, completed_blocks, accumulator_state}.
void write_checkpoint(const std::string& path, const ExperimentConfig& cfg, const ExperimentState& state);
// Empty when the file does not exist; throws std::invalid_argument on a malformed file or a config mismatch.
std::optional<ExperimentState> read_checkpoint(const std::string& path, const ExperimentConfig& cfg);

}  // namespace rk4::cli
