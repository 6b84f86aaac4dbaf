#include "sltime/kard.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>

#include "sltime/error.hpp"

namespace sltime {

using std::numbers::pi;

const char* to_string(Band band) {
  switch (band) {
    case Band::allowed: return "allowed";
    case Band::forbidden: return "forbidden";
    case Band::edge: return "edge";
  }
  return "?";
}

int band_index(double phi) { return static_cast<int>(std::floor(phi / pi)); }

KardParams decompose(const TransferMatrix& m, const std::optional<KardParams>& prev) {
  const double c = m.half_trace();
  const double excess = std::abs(c) - 1.0;
  KardParams k;
  if (std::abs(excess) <= kEdgeTol || excess > 0.0) {
    k.band = excess > kEdgeTol ? Band::forbidden : Band::edge;
    k.theta = k.band == Band::forbidden ? std::acosh(std::abs(c)) : 0.0;
    const double raw = c > 0.0 ? 0.0 : pi;
    k.phi = prev ? nearest_branch(raw, prev->phi, 2.0 * pi) : raw;
    k.mu = k.band == Band::edge ? std::numeric_limits<double>::infinity()
                                : std::numeric_limits<double>::quiet_NaN();
    k.chi = std::numeric_limits<double>::quiet_NaN();
    return k;
  }

  const double im11 = m.m11().imag();
  // Im M11 = −sin φ cosh μ fixes the sign of sin φ.
  const double sign = im11 <= 0.0 ? 1.0 : -1.0;
  const double phi0 = sign > 0.0 ? std::acos(c) : 2.0 * pi - std::acos(c);
  k.phi = prev ? nearest_branch(phi0, prev->phi, 2.0 * pi) : phi0;

  const double abs_sin = std::sqrt((1.0 - c) * (1.0 + c));
  const double a21 = std::abs(m.m21());
  assert(std::abs(im11) > 1e-300);
  // e^μ = cosh μ + sinh μ = (|Im M11| + |M21|)/|sin φ|
  k.mu = std::max(0.0, std::log((std::abs(im11) + a21) / abs_sin));
  k.chi = a21 > 0.0 ? std::arg(cplx(0.0, sign) * m.m21()) : 0.0;
  k.band = Band::allowed;
  return k;
}

TransferMatrix reconstruct(const KardParams& k, double energy, double width) {
  if (k.band != Band::allowed) throw ValidationError("reconstruct: Kard parameters are not in an allowed band");
  const double s = std::sin(k.phi);
  const cplx m11(std::cos(k.phi), -s * std::cosh(k.mu));
  const cplx m21 = cplx(0.0, -1.0) * std::polar(1.0, k.chi) * (s * std::sinh(k.mu));
  TransferMatrix out;
  out.m << m11, std::conj(m21), m21, std::conj(m11);
  out.energy = energy;
  out.width = width;
  return out;
}

Eigen::Matrix2cd reconstruct_product(const KardParams& k) {
  if (k.band != Band::allowed) throw ValidationError("reconstruct: Kard parameters are not in an allowed band");
  auto rot_z = [](double angle) {  // e^{−i angle σ_z}
    Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
    r(0, 0) = std::polar(1.0, -angle);
    r(1, 1) = std::polar(1.0, angle);
    return r;
  };
  auto boost_x = [](double rapidity) {  // e^{rapidity σ_x}
    Eigen::Matrix2cd b;
    b << std::cosh(rapidity), std::sinh(rapidity), std::sinh(rapidity), std::cosh(rapidity);
    return b;
  };
  return rot_z(k.chi / 2) * boost_x(k.mu / 2) * rot_z(k.phi) * boost_x(-k.mu / 2) * rot_z(-k.chi / 2);
}

BlochEigen bloch_eigen(const KardParams& k) {
  if (k.band != Band::allowed) throw ValidationError("bloch_eigen: Kard parameters are not in an allowed band");
  const double ch = std::cosh(k.mu / 2);
  const double sh = std::sinh(k.mu / 2);
  const cplx em = std::polar(1.0, -k.chi / 2);
  const cplx ep = std::polar(1.0, k.chi / 2);
  BlochEigen out;
  out.u << em * ch, em * sh, ep * sh, ep * ch;
  out.eig_minus = std::polar(1.0, -k.phi);
  out.eig_plus = std::polar(1.0, k.phi);
  return out;
}

namespace {

double edge_excess(const CellModel& model, double e) { return std::abs(model.half_trace(e)) - 1.0; }

// Bisect for the energy where the excess changes sign; `lo` is forbidden-side when
// `lo_outside` is true.
double refine_edge(const CellModel& model, double lo, double hi) {
  const bool lo_inside = edge_excess(model, lo) < 0.0;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    const bool mid_inside = edge_excess(model, mid) < 0.0;
    if (mid_inside == lo_inside)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<BandInterval> band_structure(const CellModel& model, const EnergyGrid& grid) {
  std::vector<BandInterval> bands;
  const auto& e = grid.samples;
  if (e.size() < 2) return bands;
  bool inside = edge_excess(model, e.front()) < 0.0;
  BandInterval current{e.front(), e.front(), false, false};
  for (std::size_t i = 1; i < e.size(); ++i) {
    const bool now = edge_excess(model, e[i]) < 0.0;
    if (now == inside) continue;
    const double edge = refine_edge(model, e[i - 1], e[i]);
    if (now) {
      current = {edge, edge, true, true};
    } else {
      current.hi = edge;
      bands.push_back(current);
    }
    inside = now;
  }
  if (inside) {
    current.hi = e.back();
    current.hi_is_edge = false;
    bands.push_back(current);
  }
  return bands;
}

double default_step(double band_width) { return std::clamp(1e-3 * band_width, 1e-4, 1e-1); }

KardParams kard_at(const CellModel& model, double energy, const std::optional<KardParams>& prev) {
  return decompose(model.matrix(energy), prev);
}

KardDerivatives kard_derivatives(const CellModel& model, double energy, double h) {
  if (!(h > 0.0)) throw ValidationError("kard_derivatives: step must be positive");
  const KardParams center = kard_at(model, energy);
  double phi[5];
  double mu[5];
  double cphi[5];
  for (int j = 0; j < 5; ++j) {
    const double e = energy + (j - 2) * h;
    const TransferMatrix m = model.matrix(e);
    const KardParams k = decompose(m, center);
    if (k.band != Band::allowed)
      throw NumericError("kard_derivatives: stencil at E = " + std::to_string(energy) +
                         " meV reaches the band edge");
    phi[j] = k.phi;
    mu[j] = k.mu;
    cphi[j] = m.half_trace();
  }
  auto first = [h](const double* f) { return (8.0 * (f[3] - f[1]) - (f[4] - f[0])) / (12.0 * h); };
  KardDerivatives d;
  d.phi_p = first(phi);
  d.mu_p = first(mu);
  d.cos_phi_p = first(cphi);
  d.phi_pp = (-phi[4] + 16.0 * phi[3] - 30.0 * phi[2] + 16.0 * phi[1] - phi[0]) / (12.0 * h * h);
  return d;
}

KardLocal kard_local(const CellModel& model, double energy, double h) {
  return {energy, kard_at(model, energy), kard_derivatives(model, energy, h)};
}

}  // namespace sltime
