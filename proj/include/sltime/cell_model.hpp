#pragma once

#include <memory>

#include "sltime/medium.hpp"
#include "sltime/tmatrix.hpp"

namespace sltime {

/// Anything that yields a unit-cell transfer matrix as a function of energy.
class CellModel {
 public:
  virtual ~CellModel() = default;

  virtual TransferMatrix matrix(double energy) const = 0;

  /// Tr M / 2; models may override when it is defined beyond `matrix`'s domain.
  virtual double half_trace(double energy) const { return matrix(energy).half_trace(); }

  /// Cell width in nm.
  virtual double width() const = 0;

  /// False for models specified directly by their scattering data.
  virtual bool has_profile() const { return true; }

  virtual const PhysConstants& constants() const { return kConstants; }

  /// Time for a free lead electron to cross the cell width; NaN without a profile.
  virtual double free_transit_time(double energy) const = 0;
};

/// A cell built from piecewise-constant layers between identical leads.
class LayeredCell final : public CellModel {
 public:
  LayeredCell(CellSpec cell, Layer outside, PhysConstants consts = kConstants);

  TransferMatrix matrix(double energy) const override;
  double width() const override { return width_; }
  const PhysConstants& constants() const override { return consts_; }
  double free_transit_time(double energy) const override;

  const CellSpec& spec() const { return cell_; }
  const Layer& outside() const { return outside_; }

 private:
  CellSpec cell_;
  Layer outside_;
  PhysConstants consts_;
  double width_;
};

}  // namespace sltime
