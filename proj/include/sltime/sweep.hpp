#pragma once

#include <vector>

#include "sltime/cell_model.hpp"
#include "sltime/kard.hpp"
#include "sltime/timing.hpp"

// Energy sweeps come in two flavours with identical results: `serial` is the
// reference loop, `parallel` distributes samples over OpenMP threads.

namespace sltime {

struct KardSample {
  double energy = 0.0;
  double cos_phi = 0.0;
  KardParams params;  // φ unwrapped along the sweep
};

namespace serial {

std::vector<KardSample> kard_sweep(const CellModel& cell, const EnergyGrid& grid);
std::vector<TransmissionSample> transmission_sweep(const CellModel& cell, int n_cells, const EnergyGrid& grid);
TimingCurve timing_curve(const CellModel& cell, int n_cells, const EnergyGrid& grid, double h);

}  // namespace serial

namespace parallel {

std::vector<KardSample> kard_sweep(const CellModel& cell, const EnergyGrid& grid);
std::vector<TransmissionSample> transmission_sweep(const CellModel& cell, int n_cells, const EnergyGrid& grid);
TimingCurve timing_curve(const CellModel& cell, int n_cells, const EnergyGrid& grid, double h);

/// Applies f to every index in [0, n) across OpenMP threads. The first exception
/// thrown by any iteration is rethrown after the loop.
template <class F>
void for_each_index(std::size_t n, F&& f);

}  // namespace parallel

}  // namespace sltime

#include "sltime/detail/parallel_for.hpp"
