#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>

#include "shred/net/model.hpp"
#include "shred/rom.hpp"

namespace shred::pipeline {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary container:
///   bytes 0-3   magic "SHRD"
///   u32 LE      format version
///   u64 LE      metadata length n, then n bytes of UTF-8 JSON
///   u64 LE      payload count k, then k little-endian IEEE-754 doubles
///
/// SvdBundle payload: U (column-major), singular values, latent
/// (column-major), discarded energy.
/// ShredModel payload: NetworkParams::blocks() in order, then input scaler
/// min and span, then output scaler min and span.
void save_checkpoint(const std::filesystem::path& path, const SvdBundle& bundle);
void save_checkpoint(const std::filesystem::path& path, const net::ShredModel& model);

using Checkpoint = std::variant<SvdBundle, net::ShredModel>;

/// Throws FormatError on a bad magic or truncated data, UnsupportedVersion
/// on an unknown version.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace shred::pipeline
