#pragma once

#include <optional>
#include <vector>

#include "sltime/cell_model.hpp"
#include "sltime/tmatrix.hpp"

namespace sltime {

enum class Band { allowed, forbidden, edge };

const char* to_string(Band band);

/// Kard parameters of a unimodular, flux-conserving transfer matrix.
///
/// In an allowed band M11 = cos φ − i sin φ cosh μ and M21 = −i e^{iχ} sin φ sinh μ.
/// The Bloch phase φ is unwrapped: band p occupies (pπ, (p+1)π). μ ≥ 0 and
/// χ ∈ (−π, π]. In a forbidden band φ = pπ + iθ; `phi` then holds pπ and `theta` holds θ.
struct KardParams {
  double phi = 0.0;
  double mu = 0.0;
  double chi = 0.0;
  Band band = Band::allowed;
  double theta = 0.0;
};

struct KardDerivatives {
  double phi_p = 0.0;      // dφ/dE, rad/meV
  double phi_pp = 0.0;     // d²φ/dE², rad/meV²
  double mu_p = 0.0;       // dμ/dE, 1/meV
  double cos_phi_p = 0.0;  // d(Tr M/2)/dE, 1/meV
};

/// Parameters and their energy derivatives at one energy.
struct KardLocal {
  double energy = 0.0;
  KardParams params;
  KardDerivatives deriv;
};

struct BandInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_is_edge = true;  // false when the band continues below the scanned grid
  bool hi_is_edge = true;

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
};

struct BlochEigen {
  cplx eig_minus;  // e^{−iφ}
  cplx eig_plus;   // e^{+iφ}
  Eigen::Matrix2cd u;
};

inline constexpr double kEdgeTol = 1e-9;

KardParams decompose(const TransferMatrix& m, const std::optional<KardParams>& prev = std::nullopt);

/// Entry form; throws for non-allowed parameters.
TransferMatrix reconstruct(const KardParams& k, double energy = 0.0, double width = 0.0);

/// The five-factor exponential product form of the same matrix.
Eigen::Matrix2cd reconstruct_product(const KardParams& k);

BlochEigen bloch_eigen(const KardParams& k);

/// Allowed bands intersecting the grid, edges refined by bisection to 1e-8 meV.
std::vector<BandInterval> band_structure(const CellModel& model, const EnergyGrid& grid);

/// Default finite-difference step for a band of the given width.
double default_step(double band_width);

/// Kard parameters at E with φ continued from `prev` (or chosen from `band` when given).
KardParams kard_at(const CellModel& model, double energy, const std::optional<KardParams>& prev = std::nullopt);

/// Five-point stencil derivatives of φ, μ and cos φ at E; throws NumericError when a
/// stencil point leaves the allowed band.
KardDerivatives kard_derivatives(const CellModel& model, double energy, double h);

KardLocal kard_local(const CellModel& model, double energy, double h);

/// Band index p of an allowed-band φ ∈ (pπ, (p+1)π).
int band_index(double phi);

}  // namespace sltime
