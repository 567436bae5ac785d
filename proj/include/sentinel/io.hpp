#pragma once

#include "sentinel/chain.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace sentinel::io {

enum class ChainFormat { Dense, Triplets };

/// {"n": <int>, "format": "dense"|"triplets", "data": ...}. Without an
/// explicit format, dense storage is written as "dense" and sparse as
/// "triplets".
nlohmann::json chain_to_json(const MarkovChain& chain,
                             std::optional<ChainFormat> format = std::nullopt);
MarkovChain chain_from_json(const nlohmann::json& doc,
                            StoragePolicy policy = StoragePolicy::Auto);

/// {"n": <int>, "values": [...]}
nlohmann::json dist_to_json(const Dist& dist);
Dist dist_from_json(const nlohmann::json& doc);

/// Doubles are written in shortest round-trip form, so reading a file back
/// reproduces every value bit for bit.
std::string dump(const nlohmann::json& doc);

nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

MarkovChain read_chain(const std::filesystem::path& path,
                       StoragePolicy policy = StoragePolicy::Auto);
void write_chain(const std::filesystem::path& path, const MarkovChain& chain,
                 std::optional<ChainFormat> format = std::nullopt);
Dist read_dist(const std::filesystem::path& path);
void write_dist(const std::filesystem::path& path, const Dist& dist);

}  // namespace sentinel::io
