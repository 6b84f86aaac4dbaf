#include "sltime/stack_model.hpp"

#include "sltime/error.hpp"

namespace sltime {

StackModel::StackModel(const StackSpec& spec, PhysConstants consts)
    : stack_(validate_stack(spec)), consts_(consts), layers_(spec.flattened()) {
  double x = left_edge();
  interfaces_.reserve(layers_.size() + 1);
  for (const Layer& l : layers_) {
    interfaces_.push_back(x);
    x += l.width;
  }
  interfaces_.push_back(right_edge());
  CellSpec probe{layers_, true};
  symmetric_ = cell_errors(probe).empty();
}

StackModel StackModel::from_cell(const CellModel& cell) {
  if (const auto* stack = dynamic_cast<const StackModel*>(&cell)) return *stack;
  const auto* layered = dynamic_cast<const LayeredCell*>(&cell);
  if (layered == nullptr)
    throw ValidationError("operation needs a spatial potential profile; the play model has none");
  StackSpec s;
  s.core = layered->spec();
  s.outside = layered->outside();
  return StackModel(s, layered->constants());
}

TransferMatrix StackModel::matrix(double energy) const {
  return layers_matrix(layers_, stack_.spec.outside, energy, consts_);
}

}  // namespace sltime
