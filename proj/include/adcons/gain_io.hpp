#pragma once

#include <filesystem>
#include <variant>

#include <json.hpp>

#include "adcons/synthesis.hpp"

namespace adcons {

/// Either gain kind, as stored in a gain document.
using GainDocument = std::variant<ConsensusGain, LipschitzGain>;

/// Row-major nested arrays.
nlohmann::json matrix_to_json(const Matrix& m);
/// Throws ConfigError for ragged or non-numeric input.
Matrix matrix_from_json(const nlohmann::json& j, const char* what);
Vector vector_from_json(const nlohmann::json& j, const char* what);

nlohmann::json gain_to_json(const ConsensusGain& g, const ConsensusMargins& margins);
nlohmann::json gain_to_json(const LipschitzGain& g, const LipschitzMargins& margins);

/// Reads {"kind": "consensus" | "lipschitz", ...}; margins are informational
/// and ignored on load. Throws ConfigError on malformed documents.
GainDocument gain_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace adcons
