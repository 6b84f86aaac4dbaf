#pragma once

#include "sltime/cell_model.hpp"
#include "sltime/kard.hpp"

namespace sltime {

/// Toy cell defined by cos φ = λ(E_B − E) on [E_B − 1/λ, E_B + 1/λ] and
/// |t|⁻² = 1 + t2_scale/E. It has no spatial profile.
struct PlayModelSpec {
  double lambda = 0.08;     // meV⁻¹
  double e_bragg = 62.5;    // meV
  double t2_scale = 160.0;  // meV

  double band_lo() const { return e_bragg - 1.0 / lambda; }
  double band_hi() const { return e_bragg + 1.0 / lambda; }
};

class PlayModel final : public CellModel {
 public:
  explicit PlayModel(PlayModelSpec spec = {}) : spec_(spec) {}

  TransferMatrix matrix(double energy) const override;
  double half_trace(double energy) const override;
  double width() const override { return 0.0; }
  bool has_profile() const override { return false; }
  double free_transit_time(double) const override;

  const PlayModelSpec& spec() const { return spec_; }

  /// Single-cell transmission probability E/(E + t2_scale).
  double transmission(double energy) const;
  /// Single-cell transmission phase, continuous with η(E_B) = π/2.
  double eta(double energy) const;

  KardParams kard(double energy) const;
  KardDerivatives derivatives(double energy) const;

 private:
  void check_interior(double energy) const;
  PlayModelSpec spec_;
};

}  // namespace sltime
