// Copyright 2026 The OptiVote Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "optivote/channel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "optivote/errors.hpp"

namespace optivote {

double ChannelParams::c_fspl() const {
  if (c_fspl_override) return *c_fspl_override;
  const double r = lambda_opt / (4.0 * std::numbers::pi);
  return r * r;
}

void ChannelParams::validate(bool allow_point_shell) const {
  if (!(d_min > 0.0)) throw UsageError("channel: d_min must be > 0");
  if (allow_point_shell ? !(d_min <= d_max) : !(d_min < d_max))
    throw UsageError("channel: d_min must be < d_max");
  if (!(a0 > 0.0 && a0 <= 1.0)) throw UsageError("channel: a0 must lie in (0, 1]");
  if (!(xi_p > 0.0)) throw UsageError("channel: xi_p must be > 0");
  if (!(sigma_n2 >= 0.0)) throw UsageError("channel: sigma_n2 must be >= 0");
  if (!(c_fspl() > 0.0)) throw UsageError("channel: c_fspl must be > 0");
}

double distance_from_uniform(const ChannelParams& p, double u) {
  const double lo = p.d_min * p.d_min * p.d_min;
  const double hi = p.d_max * p.d_max * p.d_max;
  if (u <= 0.0) return p.d_min;
  if (u >= 1.0) return p.d_max;
  const double d = std::cbrt(lo + u * (hi - lo));
  return std::clamp(d, p.d_min, p.d_max);
}

double pointing_from_uniform(const ChannelParams& p, double u) {
  if (u >= 1.0) return p.a0;
  return p.a0 * std::pow(u, 1.0 / (p.xi_p * p.xi_p));
}

double sample_distance(const ChannelParams& params, RandomStream& rng) {
  return distance_from_uniform(params, rng.uniform());
}

double sample_pointing(const ChannelParams& params, RandomStream& rng) {
  // u in (0, 1] keeps h_p strictly positive.
  double h = pointing_from_uniform(params, rng.uniform_pos());
  // Underflow only for absurdly small xi_p; the support is (0, a0].
  if (h <= 0.0) h = std::numeric_limits<double>::min();
  return h;
}

ChannelDraw sample_channel(const ChannelParams& params, RandomStream& rng) {
  ChannelDraw draw;
  draw.distance = sample_distance(params, rng);
  draw.h_l = params.c_fspl() / (draw.distance * draw.distance);
  draw.h_p = sample_pointing(params, rng);
  draw.intensity = draw.h_l * draw.h_p;
  return draw;
}

double geometric_efficiency(const ChannelParams& p) {
  // 3C(b-a)/(b^3-a^3) with the (b-a) factor cancelled; exact at a == b.
  return 3.0 * p.c_fspl() / (p.d_max * p.d_max + p.d_max * p.d_min + p.d_min * p.d_min);
}

double pointing_efficiency(const ChannelParams& p) {
  const double x2 = p.xi_p * p.xi_p;
  return p.a0 * x2 / (x2 + 1.0);
}

double lambda_eff(const ChannelParams& params) {
  params.validate(/*allow_point_shell=*/true);
  return geometric_efficiency(params) * pointing_efficiency(params);
}

namespace {

void check_converged(double value, double error, double rel_tol, const char* what) {
  if (!std::isfinite(value) || error > std::max(1e3 * rel_tol, 1e-9) * std::abs(value))
    throw NumericError(std::string("lambda_oracle: quadrature did not converge for ") + what +
                       " (estimate " + std::to_string(value) + ", error " +
                       std::to_string(error) + ")");
}

template <typename F>
double integrate_gk(F f, double a, double b, double rel_tol, const char* what) {
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, /*max_depth=*/20, rel_tol, &error);
  check_converged(value, error, rel_tol, what);
  return value;
}

// Endpoint singularities (h^(x2-1) with x2 < 1) need the double-exponential rule.
template <typename F>
double integrate_ts(F f, double a, double b, double rel_tol, const char* what) {
  boost::math::quadrature::tanh_sinh<double> rule;
  double error = 0.0;
  const double value = rule.integrate(f, a, b, rel_tol, &error);
  check_converged(value, error, rel_tol, what);
  return value;
}

}  // namespace

QuadratureResult lambda_oracle_detail(const ChannelParams& p, double rel_tol) {
  p.validate(/*allow_point_shell=*/true);
  const double c = p.c_fspl();
  QuadratureResult out;

  if (p.d_max - p.d_min <= 1e-12 * p.d_max) {
    out.geometric = c / (p.d_min * p.d_min);
  } else {
    const double lo3 = p.d_min * p.d_min * p.d_min;
    const double hi3 = p.d_max * p.d_max * p.d_max;
    // Integrate in units of d_max so the integrand is O(1).
    const double s = p.d_max;
    auto f_d = [&](double x) {
      const double d = x * s;
      const double density = 3.0 * d * d / (hi3 - lo3);
      return (c / (d * d)) * density * s;
    };
    out.geometric = integrate_gk(f_d, p.d_min / s, 1.0, rel_tol, "E[h_l]");
  }

  const double x2 = p.xi_p * p.xi_p;
  if (x2 <= 1e6) {
    // h * f(h) with f(h) = x2 / a0^x2 * h^(x2-1), written in t = h / a0.
    auto f_h = [&](double t) { return p.a0 * x2 * std::pow(t, x2); };
    out.pointing = integrate_ts(f_h, 0.0, 1.0, rel_tol, "E[h_p]");
  } else {
    // Near-degenerate jitter: the density is a spike at a0, so integrate the
    // quantile function a0 * u^(1/x2) over the unit interval instead.
    auto q_h = [&](double u) { return p.a0 * std::pow(u, 1.0 / x2); };
    out.pointing = integrate_gk(q_h, 0.0, 1.0, rel_tol, "E[h_p]");
  }

  out.value = out.geometric * out.pointing;
  return out;
}

double lambda_oracle(const ChannelParams& params) { return lambda_oracle_detail(params).value; }

}  // namespace optivote
