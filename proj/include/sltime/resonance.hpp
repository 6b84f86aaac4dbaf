#pragma once

#include <vector>

#include "sltime/cell_model.hpp"
#include "sltime/kard.hpp"

namespace sltime {

/// Transmission maximum Nφ = mπ with its Breit-Wigner / Fano parameters.
struct PeakFit {
  int m = 0;
  double energy = 0.0;    // E_m, meV
  double gamma = 0.0;     // Γ_m, meV
  double b = 0.0;         // Fano asymmetry b_m
  double tau_peak = 0.0;  // N τ_Bl cosh μ at E_m, fs
  KardLocal local;
};

/// Transmission minimum Nφ = (p + ½)π with its valley-shape parameters.
struct ValleyFit {
  int p = 0;
  double energy = 0.0;      // E_p, meV
  double gamma = 0.0;       // Γ_p, meV
  double c = 0.0;           // C_p
  double d = 0.0;           // D_p
  double tau_valley = 0.0;  // N τ_Bl / cosh μ at E_p, fs
  double cosh2_mu = 0.0;    // cosh²μ_p, for the transmission dip
  bool edge_degraded = false;
  KardLocal local;
};

struct ValleyPoint {
  int p = 0;
  double energy = 0.0;
  bool edge_degraded = false;
};

struct Extrema {
  std::vector<double> peaks;          // m = 1 … N−1
  std::vector<ValleyPoint> valleys;   // p = 0 … N−1; p = 0 and p = N−1 flagged
};

/// Solves φ(E) = mπ/N and φ(E) = (p + ½)π/N inside `band` by bisection on cos φ.
Extrema locate_extrema(const CellModel& cell, int n_cells, const BandInterval& band);

PeakFit fit_peak(const CellModel& cell, int n_cells, int m, double energy, double h);
ValleyFit fit_valley(const CellModel& cell, int n_cells, const ValleyPoint& valley, double h);

std::vector<PeakFit> fit_peaks(const CellModel& cell, int n_cells, const BandInterval& band);
std::vector<ValleyFit> fit_valleys(const CellModel& cell, int n_cells, const BandInterval& band);

/// Breit-Wigner transmission [1 + x²]⁻¹, x = (E − E_m)/(Γ_m/2).
double breit_wigner(const PeakFit& fit, double energy);
/// Fano-shaped phase time near a peak.
double fano_phase_time(const PeakFit& fit, double energy);
/// Phase time near a transmission minimum.
double valley_phase_time(const ValleyFit& fit, double energy);
/// Transmission near a minimum, cosh⁻²μ_p [1 + D y]⁻² [1 − y²]⁻¹.
double valley_transmission(const ValleyFit& fit, double energy);

struct ApproxSample {
  double energy = 0.0;
  double t2 = 0.0;
  double tau = 0.0;
  /// +m inside a peak window, −(p+1) inside a valley window, 0 on a connector.
  int region = 0;
};

/// Piecewise approximation: Breit-Wigner / Fano within Γ_m of each peak, the valley
/// form within Γ_p/2 of each valley, constant connectors elsewhere.
std::vector<ApproxSample> approx_curves(const std::vector<PeakFit>& peaks, const std::vector<ValleyFit>& valleys,
                                        const EnergyGrid& grid);

/// `base` with extra samples spaced Γ_m/40 over E_m ± 2Γ_m for every peak.
EnergyGrid refined_grid(const EnergyGrid& base, const std::vector<PeakFit>& peaks, int per_width = 40);

}  // namespace sltime
