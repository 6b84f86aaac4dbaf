#include "sltime/timing.hpp"

#include <cmath>
#include <limits>

#include "sltime/error.hpp"
#include "sltime/numeric.hpp"

namespace sltime {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_cells(int n) {
  if (n < 1) throw ValidationError("number of cells must be at least 1");
}
}  // namespace

double bloch_time(const CellModel& cell, double energy, double h) {
  return cell.constants().hbar * kard_derivatives(cell, energy, h).phi_p;
}

double phase_time(const KardLocal& local, int n_cells, double hbar) {
  check_cells(n_cells);
  const double n = n_cells;
  const double phi = local.params.phi;
  const double mu = local.params.mu;
  const double s_n = std::sin(n * phi);
  const double sinh_mu = std::sinh(mu);
  const double numer = 1.0 + std::sin(2.0 * n * phi) * std::tanh(mu) * local.deriv.mu_p / (2.0 * n * local.deriv.phi_p);
  const double denom = 1.0 + sinh_mu * sinh_mu * s_n * s_n;
  // N τ_Bl cosh μ formed in log space; cosh μ overflows near band edges.
  const double scale = std::exp(std::log(n * hbar * local.deriv.phi_p) + numeric::log_cosh(mu) - std::log(denom));
  return scale * numer;
}

double phase_time(const CellModel& cell, int n_cells, double energy, double h) {
  return phase_time(kard_local(cell, energy, h), n_cells, cell.constants().hbar);
}

Envelopes envelopes(const KardLocal& local, const TransferMatrix& cell_matrix, int n_cells, double hbar) {
  check_cells(n_cells);
  Envelopes out;
  const double log_bloch = std::log(n_cells * hbar * local.deriv.phi_p);
  const double lc = numeric::log_cosh(local.params.mu);
  out.env_max = std::exp(log_bloch + lc);
  out.env_min = std::exp(log_bloch - lc);
  out.bloch_total = std::exp(log_bloch);
  // d cos φ/dE = −sin φ φ′ and Im M11 = −sin φ cosh μ, so the ratio carries no extra sign
  out.env_min_matrix_form = n_cells * hbar * local.deriv.cos_phi_p / cell_matrix.m11().imag();
  return out;
}

Envelopes envelopes(const CellModel& cell, int n_cells, double energy, double h) {
  return envelopes(kard_local(cell, energy, h), cell.matrix(energy), n_cells, cell.constants().hbar);
}

double kard_transmission(const KardParams& k, int n_cells) {
  const double s = std::sin(n_cells * k.phi) * std::sinh(k.mu);
  return 1.0 / (1.0 + s * s);
}

double direct_phase_time(const CellModel& cell, int n_cells, double energy, double h) {
  check_cells(n_cells);
  auto t_of = [&](double e) { return 1.0 / power(cell.matrix(e), n_cells).m11(); };
  const cplx t = t_of(energy);
  const cplx t_p = numeric::richardson_derivative(t_of, energy, h);
  return cell.constants().hbar * std::imag(t_p * std::conj(t)) / std::norm(t);
}

bool stencil_inside(const CellModel& cell, double energy, double h) {
  for (int j = -2; j <= 2; ++j)
    if (!(std::abs(cell.half_trace(energy + j * h)) < 1.0 - kEdgeTol)) return false;
  return true;
}

TimingSample timing_sample(const CellModel& cell, int n_cells, double energy, double h) {
  check_cells(n_cells);
  TimingSample s;
  s.energy = energy;
  const double hbar = cell.constants().hbar;
  if (stencil_inside(cell, energy, h)) {
    const KardLocal local = kard_local(cell, energy, h);
    const Envelopes env = envelopes(local, cell.matrix(energy), n_cells, hbar);
    s.kard_valid = true;
    s.t2 = kard_transmission(local.params, n_cells);
    s.tau_ph = phase_time(local, n_cells, hbar);
    s.env_max = env.env_max;
    s.env_min = env.env_min;
    s.bloch_total = env.bloch_total;
  } else {
    s.t2 = std::norm(1.0 / power(cell.matrix(energy), n_cells).m11());
    s.tau_ph = direct_phase_time(cell, n_cells, energy, h);
    s.env_max = s.env_min = s.bloch_total = kNaN;
  }
  s.tau_ph_delay = s.tau_ph - n_cells * cell.free_transit_time(energy);
  return s;
}

TransmissionSample transmission_sample(const CellModel& cell, int n_cells, double energy) {
  check_cells(n_cells);
  TransmissionSample s;
  s.energy = energy;
  const TransferMatrix m = cell.matrix(energy);
  s.t2_direct = std::norm(1.0 / power(m, n_cells).m11());
  const KardParams k = decompose(m);
  s.band = k.band;
  if (k.band == Band::allowed) {
    s.t2 = kard_transmission(k, n_cells);
    const double c = std::cosh(k.mu);
    s.env_min = 1.0 / (c * c);
  } else {
    s.t2 = s.t2_direct;
    s.env_min = kNaN;
  }
  return s;
}

}  // namespace sltime
