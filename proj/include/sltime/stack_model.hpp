#pragma once

#include <vector>

#include "sltime/cell_model.hpp"
#include "sltime/medium.hpp"
#include "sltime/tmatrix.hpp"

namespace sltime {

/// A finite layered structure between identical V = 0 leads, placed on
/// [−w/2, w/2] so that the coordinate origin is its centre.
class StackModel final : public CellModel {
 public:
  explicit StackModel(const StackSpec& spec, PhysConstants consts = kConstants);

  /// Wraps a single profiled cell; throws ValidationError for models without a
  /// spatial profile (the play model).
  static StackModel from_cell(const CellModel& cell);

  TransferMatrix matrix(double energy) const override;
  double width() const override { return stack_.total_width; }

  const ValidatedStack& stack() const { return stack_; }
  const std::vector<Layer>& layers() const { return layers_; }
  const PhysConstants& constants() const override { return consts_; }
  double free_transit_time(double energy) const override { return width() / lead_velocity(energy); }
  double lead_mass() const { return stack_.lead_mass; }
  double lead_k(double energy) const { return stack_.lead_k(energy, consts_); }
  double lead_velocity(double energy) const { return stack_.lead_velocity(energy, consts_); }

  double left_edge() const { return -0.5 * width(); }
  double right_edge() const { return 0.5 * width(); }
  /// Left edge of every layer followed by the right edge of the last one.
  const std::vector<double>& interfaces() const { return interfaces_; }

  /// Mirror symmetry of the whole layer sequence.
  bool mirror_symmetric() const { return symmetric_; }

 private:
  ValidatedStack stack_;
  PhysConstants consts_;
  std::vector<Layer> layers_;
  std::vector<double> interfaces_;
  bool symmetric_ = false;
};

}  // namespace sltime
