#include "sltime/playmodel.hpp"

#include <cmath>
#include <limits>

#include "sltime/error.hpp"

namespace sltime {

void PlayModel::check_interior(double energy) const {
  if (!(energy > spec_.band_lo() && energy < spec_.band_hi()))
    throw NumericError("play model: E = " + std::to_string(energy) + " meV is not inside the open band (" +
                       std::to_string(spec_.band_lo()) + ", " + std::to_string(spec_.band_hi()) + ")");
}

double PlayModel::free_transit_time(double) const { return std::numeric_limits<double>::quiet_NaN(); }

double PlayModel::half_trace(double energy) const { return spec_.lambda * (spec_.e_bragg - energy); }

double PlayModel::transmission(double energy) const { return energy / (energy + spec_.t2_scale); }

double PlayModel::eta(double energy) const {
  check_interior(energy);
  return std::acos(std::sqrt(transmission(energy)) * half_trace(energy));
}

KardParams PlayModel::kard(double energy) const {
  check_interior(energy);
  const double c = half_trace(energy);
  const double s = std::sqrt((1.0 - c) * (1.0 + c));
  KardParams k;
  k.phi = std::acos(c);
  // cosh²μ = (|t|⁻² − cos²φ)/sin²φ, hence sinh μ = sqrt(|t|⁻² − 1)/sin φ.
  k.mu = std::asinh(std::sqrt(spec_.t2_scale / energy) / s);
  k.chi = 0.0;
  k.band = Band::allowed;
  return k;
}

TransferMatrix PlayModel::matrix(double energy) const { return reconstruct(kard(energy), energy, 0.0); }

KardDerivatives PlayModel::derivatives(double energy) const {
  check_interior(energy);
  const double lambda = spec_.lambda;
  const double c = half_trace(energy);
  const double s = std::sqrt((1.0 - c) * (1.0 + c));
  KardDerivatives d;
  d.cos_phi_p = -lambda;
  d.phi_p = lambda / s;
  d.phi_pp = -lambda * lambda * c / (s * s * s);
  // μ = asinh(g), g = sqrt(a/E)/sin φ with (sin φ)' = λ cos φ / sin φ.
  const double a = spec_.t2_scale;
  const double root = std::sqrt(a / energy);
  const double g = root / s;
  const double g_p = -0.5 * root / (energy * s) - root * (lambda * c / s) / (s * s);
  d.mu_p = g_p / std::sqrt(1.0 + g * g);
  return d;
}

}  // namespace sltime
