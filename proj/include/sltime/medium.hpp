#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace sltime {

using cplx = std::complex<double>;

/// Project units: energy meV, length nm, time fs, mass as a ratio to m_e.
struct PhysConstants {
  double hbar = 658.2119569;            // meV fs
  double hbar2_over_2m0 = 38.09982120;  // meV nm^2

  /// Electron velocity ħk/m* in nm/fs for wavenumber k (nm⁻¹).
  double velocity(double k, double mass_ratio) const {
    return 2.0 * hbar2_over_2m0 * k / (mass_ratio * hbar);
  }
};

inline constexpr PhysConstants kConstants{};

struct Layer {
  double width = 0.0;       // nm
  double potential = 0.0;   // meV
  double mass_ratio = 1.0;  // m*/m_e

  bool operator==(const Layer&) const = default;
};

struct CellSpec {
  std::vector<Layer> layers;
  bool symmetric = false;

  double width() const;
  CellSpec reversed() const;
  bool operator==(const CellSpec&) const = default;
};

struct StackSpec {
  CellSpec core;
  int replicas = 1;
  std::optional<CellSpec> left_arc;
  std::optional<CellSpec> right_arc;
  Layer outside{1.0, 0.0, 0.067};

  /// Layers from left to right, ARC cells included.
  std::vector<Layer> flattened() const;
  double width() const;
  bool operator==(const StackSpec&) const = default;
};

/// A validated stack with cached derived quantities.
struct ValidatedStack {
  StackSpec spec;
  double total_width = 0.0;  // nm
  double lead_mass = 0.0;

  /// Lead wavenumber and velocity at energy E > 0.
  double lead_k(double energy, const PhysConstants& c = kConstants) const;
  double lead_velocity(double energy, const PhysConstants& c = kConstants) const;
};

struct EnergyGrid {
  double e_min = 0.0;
  double e_max = 0.0;
  std::vector<double> samples;

  std::size_t count() const { return samples.size(); }

  /// Uniform grid including both end points.
  static EnergyGrid uniform(double e_min, double e_max, std::size_t count);
};

/// Signed squared wavenumber 2m*(E−V)/ħ² in nm⁻².
double signed_k2(double energy, const Layer& layer, const PhysConstants& c = kConstants);

/// Wavenumber with Re k > 0 above the band offset and Im k > 0 below it.
cplx local_wavenumber(double energy, const Layer& layer, const PhysConstants& c = kConstants);

/// Wavenumber in the (V = 0) leads; requires E > 0.
double lead_wavenumber(double energy, double lead_mass, const PhysConstants& c = kConstants);

/// Collects every violated invariant; empty when the cell is valid.
std::vector<std::string> cell_errors(const CellSpec& cell, const std::string& label = "cell");

/// Throws ValidationError listing every problem found.
void validate_cell(const CellSpec& cell);
ValidatedStack validate_stack(const StackSpec& stack);

/// Representative GaAs/AlGaAs cell (3 nm well | 2.5 nm Al0.35Ga0.65As barrier | 3 nm well).
/// Chosen to give a first miniband near 54-77 meV with strong cell reflection; it is an
/// illustrative stand-in, not a published device layer sequence.
CellSpec representative_cell();
Layer representative_outside();
/// `replicas` copies of representative_cell() between GaAs leads, no coating.
StackSpec representative_stack(int replicas = 5);

}  // namespace sltime
