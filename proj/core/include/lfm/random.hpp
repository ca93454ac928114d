// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace lfm {

using Rng = std::mt19937_64;

/// Sample sets are stored column-wise: one column per point, one row per coordinate.
using Samples = Eigen::MatrixXd;

/// One step of the splitmix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for an independent sub-stream. Every stochastic component derives its
/// generator from (global seed, stream id) through this function, so the same
/// global seed always reproduces the same run.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

inline Rng make_rng(std::uint64_t base, std::uint64_t stream) { return Rng{derive_seed(base, stream)}; }

/// d x n matrix of independent standard normal draws.
Samples standard_normal(Eigen::Index d, Eigen::Index n, Rng& rng);

/// Named sub-streams used by the pipeline and the CLI.
namespace streams {
inline constexpr std::uint64_t data = 0x01;
inline constexpr std::uint64_t split = 0x02;
inline constexpr std::uint64_t training = 0x03;
inline constexpr std::uint64_t generation = 0x04;
inline constexpr std::uint64_t distillation = 0x05;
inline constexpr std::uint64_t evaluation = 0x06;

// Inside one block's training loop.
inline constexpr std::uint64_t init = 0x11;
inline constexpr std::uint64_t left_index = 0x12;
inline constexpr std::uint64_t right = 0x13;
inline constexpr std::uint64_t time = 0x14;
}  // namespace streams

}  // namespace lfm
