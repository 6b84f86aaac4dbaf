#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sltime/stack_model.hpp"

namespace sltime {

struct Grid1D {
  double x_min = 0.0;  // nm
  double x_max = 0.0;  // nm
  double dx = 0.1;     // nm
  double dt = 0.25;    // fs
  std::size_t n_points = 0;
  int n_steps = 0;

  double x(std::size_t j) const { return x_min + dx * static_cast<double>(j); }
};

/// Gaussian packet ψ ∝ exp(−(x − x0)²/(4σ²) + i k0 x); σ is the density's standard deviation.
struct WavePacket {
  double x0 = 0.0;       // nm
  double sigma_x = 60.0; // nm
  double e0 = 0.0;       // meV, sets k0 in the leads

  double k0(double lead_mass, const PhysConstants& c = kConstants) const;
  double sigma_k() const { return 0.5 / sigma_x; }
  /// ħ v0 σ_k, the standard deviation of the packet energy to first order.
  double energy_spread(double lead_mass, const PhysConstants& c = kConstants) const;
};

/// Potential and inverse mass sampled for the staggered scheme.
struct Profile {
  std::vector<double> potential;     // V at nodes
  std::vector<double> inverse_mass;  // 1/m* averaged over [x_j, x_{j+1}], size n − 1
};

Profile sample_profile(const StackModel& stack, const Grid1D& grid);
/// V ≡ 0 with the lead mass everywhere.
Profile free_profile(double lead_mass, const Grid1D& grid);

struct TimeSeries {
  std::vector<double> time;         // fs
  std::vector<double> transmitted;  // ∫_{x > x_split} |Ψ|² dx
  std::vector<double> centroid;     // centroid of the transmitted part, nm
};

struct EvolveResult {
  std::vector<cplx> final_state;
  TimeSeries series;
  double x_split = 0.0;
  double norm_initial = 0.0;
  double norm_final = 0.0;
  double energy_initial = 0.0;  // ⟨H⟩, meV
  double energy_final = 0.0;
  double max_step_norm_change = 0.0;
  double edge_density = 0.0;  // largest density within 5 dx of either boundary, relative to the norm

  double norm_drift() const { return std::abs(norm_final - norm_initial); }
  double energy_drift() const { return std::abs(energy_final - energy_initial) / std::abs(energy_initial); }
};

struct DelayResult {
  double arrival_detected = 0.0;  // fs
  double arrival_free = 0.0;      // fs
  double delay = 0.0;             // fs
  double transmitted_fraction = 0.0;
  double bloch_time_prediction = 0.0;  // spectrum-averaged N τ_Bl, fs (filled by callers)
};

/// Crank-Nicolson propagator for −(ħ²/2) d/dx (1/m*) d/dx + V with ψ = 0 at both ends.
class CrankNicolson {
 public:
  CrankNicolson(const Profile& profile, const Grid1D& grid, const PhysConstants& c = kConstants);

  void step(std::vector<cplx>& psi) const;
  /// H ψ on the grid.
  std::vector<cplx> apply_hamiltonian(std::span<const cplx> psi) const;
  double norm(std::span<const cplx> psi) const;
  double energy(std::span<const cplx> psi) const;

 private:
  Grid1D grid_;
  std::vector<double> diag_;  // H diagonal
  std::vector<double> off_;   // H off-diagonal (j, j+1)
  std::vector<cplx> c_prime_; // Thomas forward-sweep coefficients for A
  std::vector<cplx> inv_denom_;
  cplx alpha_;                // i dt / (2ħ)
};

std::vector<cplx> gaussian_packet(const WavePacket& packet, double lead_mass, const Grid1D& grid,
                                  const PhysConstants& c = kConstants);

/// Domain and step count sized so the packet starts 6σ left of the stack, the detector
/// sits 6σ right of it, and both scattered parts stay ≥ 10σ from the boundaries.
Grid1D make_grid(const StackModel& stack, const WavePacket& packet, double dx, double dt, double extra_time);

/// Launch position and detector used with make_grid.
double default_launch(const StackModel& stack, const WavePacket& packet);
double default_detector(const StackModel& stack, const WavePacket& packet);

/// Runs the packet across `profile`, recording every `record_every` steps. Throws
/// NumericError when the norm changes by more than 1e-6 in a single step.
EvolveResult evolve(const Profile& profile, const Grid1D& grid, const WavePacket& packet, double lead_mass,
                    double x_split, int record_every = 4, const PhysConstants& c = kConstants);

/// Time at which the transmitted centroid first crosses x_d, linearly interpolated.
std::optional<double> crossing_time(const TimeSeries& series, double x_d);

/// delay = arrival(structure) − arrival(free reference). Throws NumericError("no
/// transmission") below a transmitted fraction of 1e-4.
DelayResult packet_delay(const TimeSeries& series, double x_d, const TimeSeries& free_reference);

/// Normalized |φ(k)|² weight of the packet expressed per unit energy.
double spectral_weight(const WavePacket& packet, double lead_mass, double energy, const PhysConstants& c = kConstants);

struct SpectralAverage {
  double value = 0.0;
  double weight_outside = 0.0;  // spectral weight outside the sampled energies
};

/// ∫ w(E) f(E) dE / ∫ w(E) dE by trapezoid on the given samples (optionally |t|²-weighted
/// through `extra_weight`).
SpectralAverage spectral_average(std::span<const double> energies, std::span<const double> values,
                                 const WavePacket& packet, double lead_mass,
                                 std::span<const double> extra_weight = {}, const PhysConstants& c = kConstants);

/// Samples f on ±6σ_k around k0 and averages it.
SpectralAverage spectral_average(const std::function<double(double)>& f, const WavePacket& packet, double lead_mass,
                                 int samples = 801, const PhysConstants& c = kConstants);

struct TdseSettings {
  double dx = 0.1;            // nm
  double dt = 0.5;            // fs
  double extra_time = 1500.0; // fs beyond free arrival at the detector
  int record_every = 8;
  std::optional<double> detector;  // defaults to default_detector()
};

/// Result of one structure run and its free reference on the same grid.
struct PacketRun {
  WavePacket packet;
  Grid1D grid;
  double detector = 0.0;
  DelayResult delay;
  EvolveResult structure;
  EvolveResult free;
};

/// Launches `packet` (x0 from default_launch) across the stack and its V ≡ 0 reference.
PacketRun simulate_packet(const StackModel& stack, double e0, double sigma_x, const TdseSettings& settings = {});

/// Independent runs for several central energies, distributed over threads.
std::vector<PacketRun> simulate_packets(const StackModel& stack, std::span<const double> energies, double sigma_x,
                                        const TdseSettings& settings = {});

/// Fraction of the packet's |φ(k)|² weight outside [band.lo, band.hi].
double weight_outside(const WavePacket& packet, double lead_mass, double e_lo, double e_hi,
                      const PhysConstants& c = kConstants);

}  // namespace sltime
