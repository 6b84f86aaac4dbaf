#include "sltime/sweep.hpp"

#include <numbers>

namespace sltime {

namespace {

// φ continuation is inherently sequential; it runs after the per-sample work.
void unwrap_phases(std::vector<KardSample>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    rows[i].params.phi = nearest_branch(rows[i].params.phi, rows[i - 1].params.phi, 2.0 * std::numbers::pi);
}

KardSample raw_kard(const CellModel& cell, double e) {
  const TransferMatrix m = cell.matrix(e);
  return {e, m.half_trace(), decompose(m)};
}

}  // namespace

namespace serial {

std::vector<KardSample> kard_sweep(const CellModel& cell, const EnergyGrid& grid) {
  std::vector<KardSample> rows;
  rows.reserve(grid.count());
  for (double e : grid.samples) rows.push_back(raw_kard(cell, e));
  unwrap_phases(rows);
  return rows;
}

std::vector<TransmissionSample> transmission_sweep(const CellModel& cell, int n_cells, const EnergyGrid& grid) {
  std::vector<TransmissionSample> rows;
  rows.reserve(grid.count());
  for (double e : grid.samples) rows.push_back(transmission_sample(cell, n_cells, e));
  return rows;
}

TimingCurve timing_curve(const CellModel& cell, int n_cells, const EnergyGrid& grid, double h) {
  TimingCurve rows;
  rows.reserve(grid.count());
  for (double e : grid.samples) rows.push_back(timing_sample(cell, n_cells, e, h));
  return rows;
}

}  // namespace serial

namespace parallel {

std::vector<KardSample> kard_sweep(const CellModel& cell, const EnergyGrid& grid) {
  std::vector<KardSample> rows(grid.count());
  for_each_index(rows.size(), [&](std::size_t i) { rows[i] = raw_kard(cell, grid.samples[i]); });
  unwrap_phases(rows);
  return rows;
}

std::vector<TransmissionSample> transmission_sweep(const CellModel& cell, int n_cells, const EnergyGrid& grid) {
  std::vector<TransmissionSample> rows(grid.count());
  for_each_index(rows.size(), [&](std::size_t i) { rows[i] = transmission_sample(cell, n_cells, grid.samples[i]); });
  return rows;
}

TimingCurve timing_curve(const CellModel& cell, int n_cells, const EnergyGrid& grid, double h) {
  TimingCurve rows(grid.count());
  for_each_index(rows.size(), [&](std::size_t i) { rows[i] = timing_sample(cell, n_cells, grid.samples[i], h); });
  return rows;
}

}  // namespace parallel

}  // namespace sltime
