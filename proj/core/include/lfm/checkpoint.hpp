// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "lfm/pipeline.hpp"

namespace lfm {

/// Binary checkpoint layout (all integers and reals little-endian):
///
///   "LFM1"                       4 bytes magic
///   u32 format_version           currently 1
///   u8  kind                     0 = LFM model, 1 = distilled model
///   u32 d
///   u32 N                        number of block records
///   N x block record:
///     u32 hidden layer count H, then H x u32 widths
///     u8  activation id          relu 0, softplus 1, elu 2, tanh 3, identity 4
///     u8  time-feature id        raw 0, sinusoidal 1, none 2
///     u32 time-feature k         sin/cos pair count, 0 unless sinusoidal
///     u8  interpolant id         ot 0, trig 1, 0xFF for distilled maps
///     f64 gamma                  0 for distilled maps
///     u64 param count, then that many f64 parameters
///   u32 CRC-32 (IEEE 802.3, as in zlib) of every preceding byte
///
/// The integrator is not stored; it is supplied when loading.
inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class CheckpointKind : std::uint8_t { lfm = 0, distilled = 1 };

using AnyModel = std::variant<LfmModel, DistilledModel>;

std::vector<std::uint8_t> encode_checkpoint(const LfmModel& model);
std::vector<std::uint8_t> encode_checkpoint(const DistilledModel& model);

/// Throws CheckpointError with kind bad_magic, version_mismatch, truncated,
/// malformed, or crc_mismatch.
AnyModel decode_checkpoint(std::span<const std::uint8_t> bytes, const IntegratorConfig& integrator = {});

void save_checkpoint(const std::filesystem::path& path, const LfmModel& model);
void save_checkpoint(const std::filesystem::path& path, const DistilledModel& model);
AnyModel load_checkpoint(const std::filesystem::path& path, const IntegratorConfig& integrator = {});

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes);

}  // namespace lfm
