#pragma once

// JSON container for networks:
//
//   {"input_dim": N0,
//    "layers": [{"rows": Nk, "cols": Nk-1, "A": [row-major], "b": [...]}, ...],
//    "reduced_basis": {...}}            // optional
//
// Doubles are written in shortest round-trip form, so save/load is bit-exact
// for finite values.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "requ/network.hpp"

namespace requ {

struct ReducedBasis;

void write_network_json(std::ostream& os, const Network& net,
                        const ReducedBasis* basis = nullptr);
std::string network_to_json(const Network& net);

/// Parses a network document. Unknown top-level keys are ignored.
Network network_from_json(const std::string& text);

/// Throws IoError when the file cannot be written or read.
void save_network(const std::filesystem::path& path, const Network& net,
                  const ReducedBasis* basis = nullptr);
Network load_network(const std::filesystem::path& path);

/// Reads the "reduced_basis" key if present.
std::optional<ReducedBasis> load_reduced_basis(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace requ
