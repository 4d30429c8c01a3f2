#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "svdpert/linalg.hpp"

namespace svdpert::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

/// Serializes with every floating value at 17 significant digits and
/// non-finite values as null. Key order is insertion order.
std::string dump(const Json& j, int indent = 2);

/// Finite doubles as numbers, everything else as null.
Json num(double x);
Json nums(const std::vector<double>& xs);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t h);

Json pairing_json(PairingNorm p);

}  // namespace svdpert::cli
