// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "lfm/netcore.hpp"

namespace lfm {

enum class Scheme : std::uint8_t { euler = 0, rk4 = 1 };
enum class Direction : std::uint8_t { forward, reverse };

struct IntegratorConfig {
  Scheme scheme = Scheme::rk4;
  int steps = 20;  // per block, over the rescaled interval [0, 1]

  void validate() const;
  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Solves dx/dt = v(x, t) for every column of `x0`: forward from t = 0 to 1,
/// reverse from t = 1 to 0 on the same grid traversed backward.
/// Throws NumericalError naming the step at which the state became non-finite.
Samples integrate(const VelocityField& field, const Samples& x0, Direction direction, const IntegratorConfig& cfg);

Eigen::VectorXd integrate(const VelocityField& field, const Eigen::VectorXd& x0, Direction direction,
                          const IntegratorConfig& cfg);

/// Integration between arbitrary times using `cfg.steps` uniform steps.
Samples integrate_interval(const VelocityField& field, const Samples& x0, double t_begin, double t_end,
                           const IntegratorConfig& cfg);

struct FlowWithDivergence {
  Samples x;
  /// Integral of div v along each trajectory, taken in the direction of travel:
  /// the forward pass yields the integral over [0, 1], the reverse pass its negative.
  Eigen::VectorXd divint;
};

/// Integrates the state jointly with the log-density accumulator dl/dt = div v,
/// using the same scheme and exact divergences at every stage.
FlowWithDivergence integrate_with_divergence(const VelocityField& field, const Samples& x0, Direction direction,
                                             const IntegratorConfig& cfg);

FlowWithDivergence integrate_with_divergence_interval(const VelocityField& field, const Samples& x0, double t_begin,
                                                      double t_end, const IntegratorConfig& cfg);

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

}  // namespace lfm
