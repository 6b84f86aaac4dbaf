#include "sltime/cell_model.hpp"

namespace sltime {

LayeredCell::LayeredCell(CellSpec cell, Layer outside, PhysConstants consts)
    : cell_(std::move(cell)), outside_(outside), consts_(consts) {
  validate_cell(cell_);
  width_ = cell_.width();
}

TransferMatrix LayeredCell::matrix(double energy) const {
  return cell_matrix(cell_, outside_, energy, consts_);
}

double LayeredCell::free_transit_time(double energy) const {
  return width_ / consts_.velocity(lead_wavenumber(energy, outside_.mass_ratio, consts_), outside_.mass_ratio);
}

}  // namespace sltime
