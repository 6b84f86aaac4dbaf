#include "sltime/tmatrix.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "sltime/error.hpp"

namespace sltime {

double TransferMatrix::flux_residual() const {
  Eigen::Matrix2cd sz;
  sz << 1.0, 0.0, 0.0, -1.0;
  return (m * sz * m.adjoint() - sz).cwiseAbs().maxCoeff();
}

double TransferMatrix::time_reversal_residual() const {
  return std::max(std::abs(m(1, 1) - std::conj(m(0, 0))), std::abs(m(0, 1) - std::conj(m(1, 0))));
}

Eigen::Matrix2d layer_propagator(const Layer& layer, double energy, const PhysConstants& c) {
  const double k2 = signed_k2(energy, layer, c);
  const double d = layer.width;
  const double kd = std::sqrt(std::abs(k2)) * d;
  double cs = 0.0;     // cos(kd) or cosh(κd)
  double sin_k = 0.0;  // sin(kd)/k or sinh(κd)/κ
  if (kd < 1e-6) {
    // Series about k = 0; the k⁴ terms are below double precision here.
    const double x = k2 * d * d;
    cs = 1.0 - 0.5 * x;
    sin_k = d * (1.0 - x / 6.0);
  } else if (k2 > 0.0) {
    cs = std::cos(kd);
    sin_k = std::sin(kd) * d / kd;
  } else {
    cs = std::cosh(kd);
    sin_k = std::sinh(kd) * d / kd;
  }
  const double m = layer.mass_ratio;
  Eigen::Matrix2d p;
  p << cs, m * sin_k, -(k2 / m) * sin_k, cs;
  return p;
}

Eigen::Matrix2d layers_propagator(std::span<const Layer> layers, double energy, const PhysConstants& c) {
  Eigen::Matrix2d p = Eigen::Matrix2d::Identity();
  for (const Layer& l : layers) p = layer_propagator(l, energy, c) * p;
  return p;
}

TransferMatrix plane_wave_matrix(const Eigen::Matrix2d& propagator, double lead_mass, double energy,
                                 double width, const PhysConstants& c) {
  const double q = lead_wavenumber(energy, lead_mass, c) / lead_mass;
  // Inverse of a unimodular real 2x2.
  const double a = propagator(1, 1);
  const double b = -propagator(0, 1);
  const double cc = -propagator(1, 0);
  const double d = propagator(0, 0);
  const cplx m11(0.5 * (a + d), 0.5 * (q * b - cc / q));
  const cplx m21(0.5 * (a - d), 0.5 * (q * b + cc / q));
  TransferMatrix out;
  out.m << m11, std::conj(m21), m21, std::conj(m11);
  out.energy = energy;
  out.width = width;
  return out;
}

TransferMatrix layers_matrix(std::span<const Layer> layers, const Layer& outside, double energy,
                             const PhysConstants& c) {
  double w = 0.0;
  for (const Layer& l : layers) w += l.width;
  return plane_wave_matrix(layers_propagator(layers, energy, c), outside.mass_ratio, energy, w, c);
}

TransferMatrix cell_matrix(const CellSpec& cell, const Layer& outside, double energy, const PhysConstants& c) {
  return layers_matrix(cell.layers, outside, energy, c);
}

TransferMatrix compose(const TransferMatrix& left, const TransferMatrix& right) {
  if (std::abs(left.energy - right.energy) > 1e-12 * std::max(1.0, std::abs(left.energy)))
    throw ValidationError("compose: transfer matrices refer to different energies");
  return {left.m * right.m, left.energy, left.width + right.width};
}

TransferMatrix power(const TransferMatrix& m, int n) {
  if (n < 0) throw ValidationError("power: negative exponent");
  TransferMatrix result = TransferMatrix::identity(m.energy);
  TransferMatrix base = m;
  while (n > 0) {
    if (n & 1) result = compose(result, base);
    n >>= 1;
    if (n > 0) base = compose(base, base);
  }
  return result;
}

Amplitudes amplitudes(const TransferMatrix& m) {
  assert(std::abs(m.m11()) > 0.0);
  Amplitudes a;
  a.t = 1.0 / m.m11();
  a.r = m.m21() / m.m11();
  a.eta = std::arg(a.t);
  a.delta = std::abs(a.r) > 0.0 ? std::arg(a.r) : 0.0;
  return a;
}

double nearest_branch(double raw, double reference, double period) {
  return raw + period * std::round((reference - raw) / period);
}

double PhaseUnwrapper::operator()(double raw) {
  if (!have_prev_) {
    have_prev_ = true;
    prev_ = raw;
    return raw;
  }
  const double next = nearest_branch(raw, prev_, 2.0 * std::numbers::pi);
  if (std::abs(next - prev_) >= max_step_)
    throw NumericError("phase unwrapping: grid too coarse (jump of " + std::to_string(next - prev_) +
                       " rad)");
  prev_ = next;
  return next;
}

}  // namespace sltime
