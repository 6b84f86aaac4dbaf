#include "sltime/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "sltime/error.hpp"
#include "sltime/numeric.hpp"

namespace sltime {

namespace {

constexpr cplx kI(0.0, 1.0);

void require_positive_stencil(double energy, double h) {
  if (!(h > 0.0)) throw ValidationError("derivative step must be positive");
  if (!(energy - 2.0 * h > 0.0))
    throw NumericError("derivative stencil reaches the lead band bottom at E = " + std::to_string(energy));
}

Eigen::Matrix2cd s_of(const StackModel& stack, double e) { return s_matrix(origin_amplitudes(stack, e)).matrix(); }

}  // namespace

Eigen::Matrix2cd SMatrix::matrix() const {
  Eigen::Matrix2cd s;
  s << r, t, t, r_bar;
  return s;
}

double SMatrix::unitarity_residual() const {
  const Eigen::Matrix2cd s = matrix();
  return (s.adjoint() * s - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

Amplitudes shift_convention(const Amplitudes& amp, double k, double a, double w) {
  if (amp.convention != Convention::cell_referenced)
    throw ValidationError("shift_convention: amplitudes are already origin-referenced");
  Amplitudes out = amp;
  out.t = amp.t * std::polar(1.0, -k * w);
  out.r = amp.r * std::polar(1.0, 2.0 * k * a);
  out.eta = amp.eta - k * w;
  out.delta = amp.delta + 2.0 * k * a;
  out.convention = Convention::origin_referenced;
  return out;
}

Amplitudes unshift_convention(const Amplitudes& amp, double k, double a, double w) {
  if (amp.convention != Convention::origin_referenced)
    throw ValidationError("unshift_convention: amplitudes are already cell-referenced");
  Amplitudes out = amp;
  out.t = amp.t * std::polar(1.0, k * w);
  out.r = amp.r * std::polar(1.0, -2.0 * k * a);
  out.eta = amp.eta + k * w;
  out.delta = amp.delta - 2.0 * k * a;
  out.convention = Convention::cell_referenced;
  return out;
}

SMatrix s_matrix(const Amplitudes& amp) {
  if (amp.convention != Convention::origin_referenced)
    throw ValidationError("s_matrix: expects origin-referenced amplitudes");
  const double t2 = std::norm(amp.t);
  const cplx r_bar = t2 > 0.0 ? -std::conj(amp.r) * amp.t / std::conj(amp.t) : cplx(0.0);
  return {amp.r, amp.t, r_bar};
}

Amplitudes origin_amplitudes(const StackModel& stack, double energy) {
  const Amplitudes cell = amplitudes(stack.matrix(energy));
  return shift_convention(cell, stack.lead_k(energy), stack.left_edge(), stack.width());
}

AmplitudeDerivatives amplitude_derivatives(const StackModel& stack, double energy, double h) {
  require_positive_stencil(energy, h);
  AmplitudeDerivatives d;
  d.amp = origin_amplitudes(stack, energy);
  d.t_p = numeric::richardson_derivative([&](double e) { return origin_amplitudes(stack, e).t; }, energy, h);
  d.r_p = numeric::richardson_derivative([&](double e) { return origin_amplitudes(stack, e).r; }, energy, h);
  return d;
}

SmithMatrix smith_matrix(const StackModel& stack, double energy, double h) {
  require_positive_stencil(energy, h);
  const Eigen::Matrix2cd s = s_of(stack, energy);
  const Eigen::Matrix2cd ds =
      numeric::richardson_derivative([&](double e) -> Eigen::Matrix2cd { return s_of(stack, e); }, energy, h);
  const Eigen::Matrix2cd tau = -kI * stack.constants().hbar * (s.adjoint() * ds);
  SmithMatrix out;
  out.tau11 = tau(0, 0).real();
  out.tau22 = tau(1, 1).real();
  out.tau12 = tau(0, 1);
  out.symmetric_regime = stack.mirror_symmetric();
  return out;
}

SmithMatrix smith_closed_form(const AmplitudeDerivatives& d, double hbar) {
  const cplx t = d.amp.t;
  const cplx r = d.amp.r;
  const double at = std::abs(t);
  const double ar = std::abs(r);
  const double t2_eta_p = std::imag(d.t_p * std::conj(t));  // |t|² η′
  const double r2_delta_p = std::imag(d.r_p * std::conj(r));  // |r|² δ′
  const double eta_p = t2_eta_p / (at * at);
  const double at_p = std::real(d.t_p * std::conj(t)) / at;
  SmithMatrix out;
  out.tau11 = hbar * (t2_eta_p + r2_delta_p);
  if (ar > 0.0) {
    const double delta_p = r2_delta_p / (ar * ar);
    const double ar_p = std::real(d.r_p * std::conj(r)) / ar;
    const double angle_p = ar_p * at - ar * at_p;  // d/dE atan(|r|/|t|)
    const double eta = std::arg(t);
    const double delta = std::arg(r);
    out.tau22 = hbar * (eta_p + ar * ar * (eta_p - delta_p));
    // sign follows directly from -i hbar (S^dagger S')_12
    out.tau12 = kI * hbar * std::polar(1.0, eta - delta) * angle_p - hbar * std::conj(r) * t * (eta_p - delta_p);
  } else {
    out.tau22 = hbar * eta_p;
    out.tau12 = 0.0;
  }
  return out;
}

ScatteringState::ScatteringState(const StackModel& stack, double energy)
    : stack_(&stack), energy_(energy) {
  k_ = stack.lead_k(energy);
  v_ = stack.lead_velocity(energy);
  amp_ = origin_amplitudes(stack, energy);
  const auto& layers = stack.layers();
  const double q = k_ / stack.lead_mass();
  const double b = stack.right_edge();
  WaveState s{amp_.t * std::polar(1.0, k_ * b) / std::sqrt(v_), cplx(0.0)};
  s.dpsi_over_m = kI * q * s.psi;
  left_states_.resize(layers.size());
  for (std::size_t j = layers.size(); j-- > 0;) {
    const Eigen::Matrix2d p = layer_propagator(layers[j], energy, stack.constants());
    // Inverse of a unimodular propagator.
    const WaveState prev{p(1, 1) * s.psi - p(0, 1) * s.dpsi_over_m, -p(1, 0) * s.psi + p(0, 0) * s.dpsi_over_m};
    left_states_[j] = prev;
    s = prev;
  }
}

WaveState ScatteringState::at(double x) const {
  const double q = k_ / stack_->lead_mass();
  const double norm = 1.0 / std::sqrt(v_);
  if (x <= stack_->left_edge()) {
    const cplx in = std::polar(1.0, k_ * x);
    const cplx out = amp_.r * std::polar(1.0, -k_ * x);
    return {norm * (in + out), kI * q * norm * (in - out)};
  }
  if (x >= stack_->right_edge()) {
    const cplx psi = norm * amp_.t * std::polar(1.0, k_ * x);
    return {psi, kI * q * psi};
  }
  const auto& xs = stack_->interfaces();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - xs.begin()) - 1, left_states_.size() - 1);
  Layer partial = stack_->layers()[j];
  partial.width = x - xs[j];
  const Eigen::Matrix2d p = layer_propagator(partial, energy_, stack_->constants());
  const WaveState& s = left_states_[j];
  return {p(0, 0) * s.psi + p(0, 1) * s.dpsi_over_m, p(1, 0) * s.psi + p(1, 1) * s.dpsi_over_m};
}

double ScatteringState::current(double x) const {
  const WaveState s = at(x);
  const PhysConstants& c = stack_->constants();
  return 2.0 * c.hbar2_over_2m0 / c.hbar * std::imag(std::conj(s.psi) * s.dpsi_over_m);
}

std::vector<cplx> interior_wavefunction(const StackModel& stack, double energy, std::span<const double> x) {
  const ScatteringState state(stack, energy);
  std::vector<cplx> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [&](double xi) { return state.at(xi).psi; });
  return out;
}

DwellResult dwell_time(const StackModel& stack, double energy, double x_left, double x_right, double h) {
  if (!(x_left < stack.left_edge() && x_right > stack.right_edge()))
    throw ValidationError("dwell_time: measurement points must enclose the structure");
  const AmplitudeDerivatives d = amplitude_derivatives(stack, energy, h);
  const double hbar = stack.constants().hbar;
  const double k = stack.lead_k(energy);
  const double v = stack.lead_velocity(energy);
  const double t2 = std::norm(d.amp.t);
  const double r2 = std::norm(d.amp.r);

  DwellResult out;
  out.x_left = x_left;
  out.x_right = x_right;
  out.tau_dwell_delay = hbar * (std::imag(d.t_p * std::conj(d.amp.t)) + std::imag(d.r_p * std::conj(d.amp.r)));
  const double delta = std::abs(d.amp.r) > 0.0 ? std::arg(d.amp.r) : 0.0;
  out.oscillatory_term = -hbar * std::abs(d.amp.r) / (2.0 * energy) * std::sin(2.0 * k * x_left - delta);
  out.free_passage = (x_right / v - x_left / v) * t2 - (2.0 * x_left / v) * r2;

  const ScatteringState state(stack, energy);
  std::vector<double> cuts{x_left};
  for (double xi : stack.interfaces())
    if (xi > x_left && xi < x_right) cuts.push_back(xi);
  cuts.push_back(x_right);
  const double tol = 1e-6 / static_cast<double>(cuts.size() - 1);
  auto density = [&](double x) { return state.density(x); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    out.numeric_integral += numeric::adaptive_simpson(density, cuts[i], cuts[i + 1], tol);
  return out;
}

DwellResult dwell_time(const StackModel& stack, double energy, double h) {
  const double margin = stack.stack().spec.core.width();
  return dwell_time(stack, energy, stack.left_edge() - margin, stack.right_edge() + margin, h);
}

}  // namespace sltime
