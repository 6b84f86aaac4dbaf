#pragma once

#include <span>
#include <vector>

#include "sltime/stack_model.hpp"
#include "sltime/tmatrix.hpp"

namespace sltime {

/// Two-channel scattering matrix ((r, t), (t, r̄)).
struct SMatrix {
  cplx r;
  cplx t;
  cplx r_bar;

  Eigen::Matrix2cd matrix() const;
  /// ‖S†S − I‖_max
  double unitarity_residual() const;
};

/// Smith time-delay matrix τ = −iħ S† dS/dE (fs).
struct SmithMatrix {
  double tau11 = 0.0;
  double tau22 = 0.0;
  cplx tau12;
  /// Set for mirror-symmetric structures, where the compact closed forms hold.
  bool symmetric_regime = false;
};

/// Energy derivatives of the origin-referenced amplitudes at one energy.
struct AmplitudeDerivatives {
  Amplitudes amp;
  cplx t_p;  // dt/dE
  cplx r_p;  // dr/dE
};

struct DwellResult {
  double tau_dwell_delay = 0.0;   // ħ(|t|²η′ + |r|²δ′), fs
  double oscillatory_term = 0.0;  // −ħ|r|/(2E) sin(2k x_L − δ), fs
  double free_passage = 0.0;      // (x_R/v − x_L/v)|t|² − (2x_L/v)|r|², fs
  double numeric_integral = 0.0;  // ∫|ψ|² dx over [x_L, x_R], fs
  double x_left = 0.0;
  double x_right = 0.0;

  double closed_form_total() const { return tau_dwell_delay + oscillatory_term + free_passage; }
  /// Numeric counterpart of tau_dwell_delay + oscillatory_term.
  double numeric_delay() const { return numeric_integral - free_passage; }
};

/// Re-references cell-edge amplitudes to a fixed origin: t̃ = t e^{−ikw}, r̃ = r e^{2ika}.
Amplitudes shift_convention(const Amplitudes& amp, double k, double a, double w);
/// Inverse of shift_convention.
Amplitudes unshift_convention(const Amplitudes& amp, double k, double a, double w);

SMatrix s_matrix(const Amplitudes& amp);

/// Amplitudes with the origin at the centre of the stack.
Amplitudes origin_amplitudes(const StackModel& stack, double energy);

/// Richardson-differentiated origin-referenced amplitudes.
AmplitudeDerivatives amplitude_derivatives(const StackModel& stack, double energy, double h);

/// τ from a finite-difference dS/dE.
SmithMatrix smith_matrix(const StackModel& stack, double energy, double h);

/// The closed-form Smith elements written in terms of |t|, |r|, η, δ and their derivatives.
SmithMatrix smith_closed_form(const AmplitudeDerivatives& d, double hbar);

/// Left-incident flux-normalized scattering state sampled at the given positions.
std::vector<cplx> interior_wavefunction(const StackModel& stack, double energy, std::span<const double> x);

/// ψ and (1/m*)dψ/dx at one position.
struct WaveState {
  cplx psi;
  cplx dpsi_over_m;
};

/// Evaluates the scattering state and its mass-weighted derivative.
class ScatteringState {
 public:
  ScatteringState(const StackModel& stack, double energy);

  WaveState at(double x) const;
  double density(double x) const { return std::norm(at(x).psi); }
  /// Probability current in units of the incident flux.
  double current(double x) const;

  const Amplitudes& amplitudes() const { return amp_; }
  double k() const { return k_; }
  double velocity() const { return v_; }

 private:
  const StackModel* stack_;
  double energy_;
  double k_;
  double v_;
  Amplitudes amp_;
  std::vector<WaveState> left_states_;  // state at the left edge of each layer
};

/// Closed-form dwell time alongside its numeric density integral. Without explicit
/// positions, x_L and x_R sit one core-cell width outside each end of the stack.
DwellResult dwell_time(const StackModel& stack, double energy, double x_left, double x_right, double h);
DwellResult dwell_time(const StackModel& stack, double energy, double h);

}  // namespace sltime
