#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <span>
#include <vector>

#include "sltime/medium.hpp"

namespace sltime {

/// Flux-normalized transfer matrix (c_L, d_L) = M (c_R, d_R), with plane waves
/// referenced to the cell edges.
struct TransferMatrix {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  double energy = 0.0;  // meV
  double width = 0.0;   // nm

  cplx m11() const { return m(0, 0); }
  cplx m12() const { return m(0, 1); }
  cplx m21() const { return m(1, 0); }
  cplx m22() const { return m(1, 1); }

  cplx det() const { return m.determinant(); }
  double half_trace() const { return 0.5 * (m(0, 0) + m(1, 1)).real(); }

  /// max |(M σ_z M†) − σ_z|, zero for flux-conserving matrices.
  double flux_residual() const;
  /// max of |m22 − conj m11|, |m12 − conj m21|.
  double time_reversal_residual() const;

  static TransferMatrix identity(double energy) { return {Eigen::Matrix2cd::Identity(), energy, 0.0}; }
};

enum class Convention { cell_referenced, origin_referenced };

struct Amplitudes {
  cplx r;
  cplx t;
  double eta = 0.0;    // arg t
  double delta = 0.0;  // arg r (0 when r vanishes)
  Convention convention = Convention::cell_referenced;
};

/// Real propagator of (ψ, ψ'/m*) across one uniform layer, left edge to right edge.
Eigen::Matrix2d layer_propagator(const Layer& layer, double energy, const PhysConstants& c = kConstants);

/// Propagator across a sequence of layers (applied left to right).
Eigen::Matrix2d layers_propagator(std::span<const Layer> layers, double energy,
                                  const PhysConstants& c = kConstants);

/// Converts a (ψ, ψ'/m*) propagator into the flux-normalized plane-wave transfer matrix.
TransferMatrix plane_wave_matrix(const Eigen::Matrix2d& propagator, double lead_mass, double energy,
                                 double width, const PhysConstants& c = kConstants);

TransferMatrix layers_matrix(std::span<const Layer> layers, const Layer& outside, double energy,
                             const PhysConstants& c = kConstants);

TransferMatrix cell_matrix(const CellSpec& cell, const Layer& outside, double energy,
                           const PhysConstants& c = kConstants);

TransferMatrix compose(const TransferMatrix& left, const TransferMatrix& right);

/// M^n by repeated squaring.
TransferMatrix power(const TransferMatrix& m, int n);

Amplitudes amplitudes(const TransferMatrix& m);

/// Nearest-branch continuation of an angle along a sweep.
class PhaseUnwrapper {
 public:
  /// Maximum accepted jump between neighbouring samples.
  explicit PhaseUnwrapper(double max_step = 1.5707963267948966) : max_step_(max_step) {}

  /// Returns raw + 2πn closest to the previous output; throws NumericError when
  /// the continued step exceeds max_step.
  double operator()(double raw);
  void reset() { have_prev_ = false; }

 private:
  double max_step_;
  double prev_ = 0.0;
  bool have_prev_ = false;
};

/// Value of `raw` shifted by a multiple of `period` to lie nearest `reference`.
double nearest_branch(double raw, double reference, double period);

}  // namespace sltime
