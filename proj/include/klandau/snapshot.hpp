#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "klandau/state.hpp"

namespace klandau {

inline constexpr char kSnapshotMagic[4] = {'K', 'L', 'N', 'D'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

/// "KLND", u32 version, u64 n, f64 time, 3n f64 velocity components; all
/// little-endian.
std::vector<unsigned char> encode_snapshot(const SystemState& state);
SystemState decode_snapshot(const std::vector<unsigned char>& bytes);

void write_snapshot(const SystemState& state, const std::string& path);
SystemState read_snapshot(const std::string& path);

}  // namespace klandau
