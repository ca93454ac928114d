// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lfm/random.hpp"

namespace lfm {

enum class Activation : std::uint8_t { relu = 0, softplus = 1, elu = 2, tanh = 3, identity = 4 };

/// How the time argument enters the network input.
///  raw        - the scalar t is appended to x.
///  sinusoidal - k pairs (sin(pi 2^j t), cos(pi 2^j t)), j = 0..k-1, are appended.
///  none       - no time input (used by the distilled residual maps).
enum class TimeEncoding : std::uint8_t { raw = 0, sinusoidal = 1, none = 2 };

struct TimeFeatures {
  TimeEncoding kind = TimeEncoding::raw;
  int k = 0;  // number of sin/cos pairs, sinusoidal only

  int width() const;
  friend bool operator==(const TimeFeatures&, const TimeFeatures&) = default;
};

/// Fully connected network R^d x [0,1] -> R^d. Hidden layers use `activation`,
/// the output layer is affine.
struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden_widths;
  Activation activation = Activation::softplus;
  TimeFeatures time;

  /// Throws ValidationError when an invariant is violated.
  void validate() const;

  int feature_dim() const { return input_dim + time.width(); }
  Eigen::Index param_count() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// Flat parameter vector: for each layer, the weight matrix row-major
/// (out x in), followed by that layer's bias.
using ParamVector = Eigen::VectorXd;

class VelocityField {
 public:
  /// Validates `spec`, the parameter count, and finiteness of all entries.
  VelocityField(MlpSpec spec, ParamVector params);

  static VelocityField zeros(const MlpSpec& spec);
  /// Per-layer uniform weights in [-a, a], a = sqrt(6 / (fan_in + fan_out)); zero biases.
  static VelocityField glorot(const MlpSpec& spec, Rng& rng);

  const MlpSpec& spec() const noexcept { return spec_; }
  const ParamVector& params() const noexcept { return params_; }
  int dim() const noexcept { return spec_.input_dim; }

  void set_params(ParamVector params);

 private:
  MlpSpec spec_;
  ParamVector params_;
};

Eigen::VectorXd forward(const VelocityField& field, const Eigen::VectorXd& x, double t);

/// Evaluates every column of `x` at the common time `t`.
Samples forward_batch(const VelocityField& field, const Samples& x, double t);

/// Evaluates column j of `x` at time `t[j]`.
Samples forward_batch(const VelocityField& field, const Samples& x, std::span<const double> t);

struct LossGrad {
  double loss = 0.0;
  ParamVector grad;
};

/// Mean over the batch of ||forward(x_j, t_j) - target_j||^2 and its exact
/// gradient with respect to the parameters.
LossGrad loss_and_grad(const VelocityField& field, const Samples& x, std::span<const double> t,
                       const Samples& target);

/// Divergence of the field with respect to x, exact up to round-off
/// (one reverse pass per output coordinate).
double jacobian_trace(const VelocityField& field, const Eigen::VectorXd& x, double t);

struct ValueAndTrace {
  Samples value;
  Eigen::VectorXd trace;
};

/// Field values and divergences for every column at the common time `t`,
/// sharing one forward pass.
ValueAndTrace forward_with_trace(const VelocityField& field, const Samples& x, double t);

/// Number of single-point network evaluations performed by the forward
/// routines on the calling thread. Diagnostic only.
std::uint64_t forward_evaluation_count() noexcept;

std::string_view to_string(Activation a);
std::string_view to_string(TimeEncoding e);
Activation parse_activation(std::string_view name);

}  // namespace lfm
