// SPDX-License-Identifier: Apache-2.0
#include "lfm/odeint.hpp"

#include <string>

#include "lfm/error.hpp"

namespace lfm {
namespace {

void check_finite(const Samples& x, int step) {
  if (!x.allFinite()) {
    throw NumericalError("ODE state became non-finite at integration step " + std::to_string(step));
  }
}

void check_start(const VelocityField& field, const Samples& x0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (x0.rows() != field.dim()) throw DimensionError("ODE initial state", field.dim(), x0.rows());
  if (!x0.allFinite()) throw NumericalError("ODE initial state has non-finite entries");
}

double time_at(double t_begin, double t_end, int step, int steps) {
  // Grid points are computed from the endpoints, so a reverse pass visits the
  // same times as the forward pass.
  const double s = static_cast<double>(step) / static_cast<double>(steps);
  return t_begin + (t_end - t_begin) * s;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (steps < 1) throw ValidationError("integrator: steps must be >= 1, got " + std::to_string(steps));
  if (scheme != Scheme::euler && scheme != Scheme::rk4) throw ValidationError("integrator: unknown scheme id");
}

Samples integrate_interval(const VelocityField& field, const Samples& x0, double t_begin, double t_end,
                           const IntegratorConfig& cfg) {
  check_start(field, x0, cfg);
  Samples x = x0;
  const int n = cfg.steps;
  for (int i = 0; i < n; ++i) {
    const double ta = time_at(t_begin, t_end, i, n);
    const double tb = time_at(t_begin, t_end, i + 1, n);
    const double h = tb - ta;
    if (cfg.scheme == Scheme::euler) {
      x += h * forward_batch(field, x, ta);
    } else {
      const double tm = ta + 0.5 * h;
      const Samples k1 = forward_batch(field, x, ta);
      const Samples k2 = forward_batch(field, x + (0.5 * h) * k1, tm);
      const Samples k3 = forward_batch(field, x + (0.5 * h) * k2, tm);
      const Samples k4 = forward_batch(field, x + h * k3, tb);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    check_finite(x, i);
  }
  return x;
}

Samples integrate(const VelocityField& field, const Samples& x0, Direction direction, const IntegratorConfig& cfg) {
  return direction == Direction::forward ? integrate_interval(field, x0, 0.0, 1.0, cfg)
                                         : integrate_interval(field, x0, 1.0, 0.0, cfg);
}

Eigen::VectorXd integrate(const VelocityField& field, const Eigen::VectorXd& x0, Direction direction,
                          const IntegratorConfig& cfg) {
  return integrate(field, Samples(x0), direction, cfg).col(0);
}

FlowWithDivergence integrate_with_divergence_interval(const VelocityField& field, const Samples& x0, double t_begin,
                                                      double t_end, const IntegratorConfig& cfg) {
  check_start(field, x0, cfg);
  FlowWithDivergence out{x0, Eigen::VectorXd::Zero(x0.cols())};
  Samples& x = out.x;
  Eigen::VectorXd& ell = out.divint;
  const int n = cfg.steps;
  for (int i = 0; i < n; ++i) {
    const double ta = time_at(t_begin, t_end, i, n);
    const double tb = time_at(t_begin, t_end, i + 1, n);
    const double h = tb - ta;
    if (cfg.scheme == Scheme::euler) {
      const auto k = forward_with_trace(field, x, ta);
      x += h * k.value;
      ell += h * k.trace;
    } else {
      const double tm = ta + 0.5 * h;
      const auto k1 = forward_with_trace(field, x, ta);
      const auto k2 = forward_with_trace(field, x + (0.5 * h) * k1.value, tm);
      const auto k3 = forward_with_trace(field, x + (0.5 * h) * k2.value, tm);
      const auto k4 = forward_with_trace(field, x + h * k3.value, tb);
      x += (h / 6.0) * (k1.value + 2.0 * k2.value + 2.0 * k3.value + k4.value);
      ell += (h / 6.0) * (k1.trace + 2.0 * k2.trace + 2.0 * k3.trace + k4.trace);
    }
    check_finite(x, i);
    if (!ell.allFinite()) {
      throw NumericalError("divergence integral became non-finite at integration step " + std::to_string(i));
    }
  }
  return out;
}

FlowWithDivergence integrate_with_divergence(const VelocityField& field, const Samples& x0, Direction direction,
                                             const IntegratorConfig& cfg) {
  return direction == Direction::forward ? integrate_with_divergence_interval(field, x0, 0.0, 1.0, cfg)
                                         : integrate_with_divergence_interval(field, x0, 1.0, 0.0, cfg);
}

std::string_view to_string(Scheme scheme) { return scheme == Scheme::euler ? "euler" : "rk4"; }

Scheme parse_scheme(std::string_view name) {
  if (name == "euler") return Scheme::euler;
  if (name == "rk4") return Scheme::rk4;
  throw ValidationError("unknown integrator scheme '" + std::string(name) + "' (expected euler or rk4)");
}

}  // namespace lfm
