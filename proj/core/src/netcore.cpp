// SPDX-License-Identifier: Apache-2.0
#include "lfm/netcore.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "lfm/error.hpp"

namespace lfm {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

thread_local std::uint64_t g_forward_evaluations = 0;

struct Layer {
  Eigen::Index in;
  Eigen::Index out;
  Eigen::Index w_offset;
  Eigen::Index b_offset;
};

std::vector<Layer> layout(const MlpSpec& spec) {
  std::vector<Layer> layers;
  layers.reserve(spec.hidden_widths.size() + 1);
  Eigen::Index in = spec.feature_dim();
  Eigen::Index offset = 0;
  auto push = [&](Eigen::Index out) {
    layers.push_back({in, out, offset, offset + in * out});
    offset += in * out + out;
    in = out;
  };
  for (int w : spec.hidden_widths) push(w);
  push(spec.input_dim);
  return layers;
}

Eigen::Map<const RowMat> weights(const ParamVector& p, const Layer& l) {
  return {p.data() + l.w_offset, l.out, l.in};
}

Eigen::Map<const Eigen::VectorXd> bias(const ParamVector& p, const Layer& l) {
  return {p.data() + l.b_offset, l.out};
}

// Eigen vectorizes exp and log for doubles but not log1p, expm1 or tanh. The
// loops below only blend precomputed values so the compiler can vectorize them;
// log1p and expm1 are recovered at full accuracy with Kahan's trick.

/// Applies the activation in place and writes its derivative into `deriv`.
void activate(Activation act, Eigen::MatrixXd& z, Eigen::MatrixXd& deriv) {
  deriv.resize(z.rows(), z.cols());
  const Eigen::Index n = z.size();
  double* zp = z.data();
  double* dp = deriv.data();
  switch (act) {
    case Activation::relu:
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool on = zp[i] > 0.0;
        dp[i] = on ? 1.0 : 0.0;
        zp[i] = on ? zp[i] : 0.0;
      }
      break;
    case Activation::softplus: {
      // max(z, 0) + log1p(e^{-|z|}), exactly linear above 30.
      const Eigen::ArrayXXd e = (-z.array().abs()).exp();
      const Eigen::ArrayXXd lu = (1.0 + e).log();
      const double* ep = e.data();
      const double* lp = lu.data();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double u = 1.0 + ep[i];
        const double r = 1.0 / u;
        const double kahan = lp[i] * ep[i] / (u - 1.0);  // evaluated unconditionally to keep the loop branch-free
        const double l1p = u == 1.0 ? ep[i] : kahan;
        const double x = zp[i];
        const double er = ep[i] * r;
        dp[i] = x >= 0.0 ? r : er;
        zp[i] = x > 30.0 ? x : (x > 0.0 ? x : 0.0) + l1p;
      }
      break;
    }
    case Activation::elu: {
      const Eigen::ArrayXXd u = z.array().min(0.0).exp();
      const Eigen::ArrayXXd lu = u.log();
      const double* up = u.data();
      const double* lp = lu.data();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double x = zp[i];
        const double kahan = (up[i] - 1.0) * x / lp[i];
        const double em1 = up[i] == 1.0 ? x : (up[i] == 0.0 ? -1.0 : kahan);
        dp[i] = x > 0.0 ? 1.0 : up[i];
        zp[i] = x > 0.0 ? x : em1;
      }
      break;
    }
    case Activation::tanh: {
      // tanh z = sign(z) (1 - e) / (1 + e), e = exp(-2|z|), 1 - e = -expm1(-2|z|).
      const Eigen::ArrayXXd m = -2.0 * z.array().abs();
      const Eigen::ArrayXXd u = m.exp();
      const Eigen::ArrayXXd lu = u.log();
      const double* mp = m.data();
      const double* up = u.data();
      const double* lp = lu.data();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double kahan = (up[i] - 1.0) * mp[i] / lp[i];
        const double em1 = up[i] == 1.0 ? mp[i] : (up[i] == 0.0 ? -1.0 : kahan);
        const double th = -em1 / (1.0 + up[i]);
        const double v = zp[i] < 0.0 ? -th : th;
        zp[i] = v;
        dp[i] = 1.0 - v * v;
      }
      break;
    }
    case Activation::identity:
      deriv.setOnes();
      break;
  }
}

void check_input(const VelocityField& field, const Samples& x, Eigen::Index n_times) {
  if (x.rows() != field.dim()) throw DimensionError("network input", field.dim(), x.rows());
  if (n_times != 1 && n_times != x.cols()) {
    throw DimensionError("time vector length", x.cols(), n_times);
  }
}

Eigen::MatrixXd features(const MlpSpec& spec, const Samples& x, std::span<const double> t) {
  const Eigen::Index b = x.cols();
  Eigen::MatrixXd f(spec.feature_dim(), b);
  f.topRows(spec.input_dim) = x;
  auto time_at = [&](Eigen::Index j) { return t.size() == 1 ? t[0] : t[static_cast<std::size_t>(j)]; };
  switch (spec.time.kind) {
    case TimeEncoding::raw:
      for (Eigen::Index j = 0; j < b; ++j) f(spec.input_dim, j) = time_at(j);
      break;
    case TimeEncoding::sinusoidal:
      for (Eigen::Index j = 0; j < b; ++j) {
        const double tj = time_at(j);
        double freq = std::numbers::pi;
        for (int q = 0; q < spec.time.k; ++q, freq *= 2.0) {
          f(spec.input_dim + 2 * q, j) = std::sin(freq * tj);
          f(spec.input_dim + 2 * q + 1, j) = std::cos(freq * tj);
        }
      }
      break;
    case TimeEncoding::none:
      break;
  }
  return f;
}

/// Activations a_0 (features) .. a_H (last hidden) and activation derivatives
/// for each hidden layer; `out` holds the network output.
struct Tape {
  std::vector<Eigen::MatrixXd> acts;
  std::vector<Eigen::MatrixXd> derivs;
  Eigen::MatrixXd out;
};

Tape run_forward(const VelocityField& field, const Samples& x, std::span<const double> t,
                 const std::vector<Layer>& layers) {
  const auto& p = field.params();
  const std::size_t hidden = layers.size() - 1;
  Tape tape;
  tape.acts.reserve(hidden + 1);
  tape.derivs.resize(hidden);
  tape.acts.push_back(features(field.spec(), x, t));
  for (std::size_t l = 0; l < hidden; ++l) {
    Eigen::MatrixXd z = weights(p, layers[l]) * tape.acts.back();
    z.colwise() += bias(p, layers[l]);
    activate(field.spec().activation, z, tape.derivs[l]);
    tape.acts.push_back(std::move(z));
  }
  tape.out = weights(p, layers.back()) * tape.acts.back();
  tape.out.colwise() += bias(p, layers.back());
  g_forward_evaluations += static_cast<std::uint64_t>(x.cols());
  return tape;
}

}  // namespace

int TimeFeatures::width() const {
  switch (kind) {
    case TimeEncoding::raw: return 1;
    case TimeEncoding::sinusoidal: return 2 * k;
    case TimeEncoding::none: return 0;
  }
  return 0;
}

void MlpSpec::validate() const {
  if (input_dim <= 0) throw ValidationError("mlp: input_dim must be positive, got " + std::to_string(input_dim));
  if (hidden_widths.empty()) throw ValidationError("mlp: hidden_widths must be non-empty");
  for (int w : hidden_widths) {
    if (w <= 0) throw ValidationError("mlp: hidden width must be positive, got " + std::to_string(w));
  }
  if (time.kind == TimeEncoding::sinusoidal && time.k < 1) {
    throw ValidationError("mlp: sinusoidal time features need k >= 1, got " + std::to_string(time.k));
  }
  if (static_cast<unsigned>(activation) > static_cast<unsigned>(Activation::identity)) {
    throw ValidationError("mlp: unknown activation id");
  }
}

Eigen::Index MlpSpec::param_count() const {
  Eigen::Index count = 0;
  Eigen::Index in = feature_dim();
  for (int w : hidden_widths) {
    count += in * w + w;
    in = w;
  }
  return count + in * input_dim + input_dim;
}

VelocityField::VelocityField(MlpSpec spec, ParamVector params) : spec_(std::move(spec)) {
  spec_.validate();
  set_params(std::move(params));
}

void VelocityField::set_params(ParamVector params) {
  if (params.size() != spec_.param_count()) {
    throw DimensionError("parameter vector", spec_.param_count(), params.size());
  }
  if (!params.allFinite()) throw NumericalError("parameter vector has non-finite entries");
  params_ = std::move(params);
}

VelocityField VelocityField::zeros(const MlpSpec& spec) {
  spec.validate();
  return {spec, ParamVector::Zero(spec.param_count())};
}

VelocityField VelocityField::glorot(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  ParamVector p = ParamVector::Zero(spec.param_count());
  for (const Layer& l : layout(spec)) {
    const double a = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (Eigen::Index i = 0; i < l.in * l.out; ++i) p[l.w_offset + i] = dist(rng);
  }
  return {spec, std::move(p)};
}

Eigen::VectorXd forward(const VelocityField& field, const Eigen::VectorXd& x, double t) {
  return forward_batch(field, Samples(x), t).col(0);
}

Samples forward_batch(const VelocityField& field, const Samples& x, double t) {
  return forward_batch(field, x, std::span<const double>(&t, 1));
}

Samples forward_batch(const VelocityField& field, const Samples& x, std::span<const double> t) {
  check_input(field, x, static_cast<Eigen::Index>(t.size()));
  const auto layers = layout(field.spec());
  return run_forward(field, x, t, layers).out;
}

LossGrad loss_and_grad(const VelocityField& field, const Samples& x, std::span<const double> t,
                       const Samples& target) {
  if (x.cols() == 0) throw ValidationError("loss_and_grad: empty batch");
  check_input(field, x, static_cast<Eigen::Index>(t.size()));
  if (target.rows() != x.rows() || target.cols() != x.cols()) {
    throw DimensionError("loss_and_grad target columns", x.cols(), target.cols());
  }
  const auto layers = layout(field.spec());
  const auto& p = field.params();
  Tape tape = run_forward(field, x, t, layers);

  const double inv_b = 1.0 / static_cast<double>(x.cols());
  Eigen::MatrixXd g = tape.out - target;
  LossGrad result;
  result.loss = g.squaredNorm() * inv_b;
  g *= 2.0 * inv_b;

  result.grad = ParamVector::Zero(p.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Layer& layer = layers[l];
    Eigen::Map<RowMat>(result.grad.data() + layer.w_offset, layer.out, layer.in).noalias() =
        g * tape.acts[l].transpose();
    Eigen::Map<Eigen::VectorXd>(result.grad.data() + layer.b_offset, layer.out) = g.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = weights(p, layer).transpose() * g;
      g = back.cwiseProduct(tape.derivs[l - 1]);
    }
  }
  return result;
}

ValueAndTrace forward_with_trace(const VelocityField& field, const Samples& x, double t) {
  check_input(field, x, 1);
  const auto layers = layout(field.spec());
  const auto& p = field.params();
  Tape tape = run_forward(field, x, std::span<const double>(&t, 1), layers);

  const std::size_t last = layers.size() - 1;
  const Eigen::Index b = x.cols();
  ValueAndTrace result{std::move(tape.out), Eigen::VectorXd::Zero(b)};
  const auto w_out = weights(p, layers[last]);
  const auto w_in = weights(p, layers[0]);
  for (Eigen::Index i = 0; i < field.dim(); ++i) {
    // Reverse pass seeded with e_i at the output.
    Eigen::MatrixXd g = tape.derivs[last - 1].array().colwise() * w_out.row(i).transpose().array();
    for (std::size_t l = last - 1; l > 0; --l) {
      Eigen::MatrixXd back = weights(p, layers[l]).transpose() * g;
      g = back.cwiseProduct(tape.derivs[l - 1]);
    }
    result.trace += (w_in.col(i).transpose() * g).transpose();
  }
  return result;
}

double jacobian_trace(const VelocityField& field, const Eigen::VectorXd& x, double t) {
  return forward_with_trace(field, Samples(x), t).trace[0];
}

std::uint64_t forward_evaluation_count() noexcept { return g_forward_evaluations; }

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::softplus: return "softplus";
    case Activation::elu: return "elu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "unknown";
}

std::string_view to_string(TimeEncoding e) {
  switch (e) {
    case TimeEncoding::raw: return "raw";
    case TimeEncoding::sinusoidal: return "sinusoidal";
    case TimeEncoding::none: return "none";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  for (auto a : {Activation::relu, Activation::softplus, Activation::elu, Activation::tanh, Activation::identity}) {
    if (to_string(a) == name) return a;
  }
  throw ValidationError("unknown activation '" + std::string(name) +
                        "' (expected relu, softplus, elu, tanh, identity)");
}

}  // namespace lfm
