#pragma once

#include <vector>

#include "sltime/arc.hpp"
#include "sltime/cell_model.hpp"
#include "sltime/kard.hpp"
#include "sltime/table.hpp"
#include "sltime/tdse.hpp"

namespace sltime {

/// Lowest allowed band of a cell above the lead band bottom, scanned on (0, e_max].
BandInterval first_band(const CellModel& cell, double e_max = 300.0, std::size_t samples = 6000);

/// Uniform samples strictly inside the band, `margin` meV from each edge.
EnergyGrid band_interior_grid(const BandInterval& band, std::size_t samples, double margin);

/// Representative array, its core cell, first miniband and rule-of-thumb ARC.
struct RepresentativeSetup {
  StackSpec stack;
  StackSpec stack_arc;
  LayeredCell core;
  BandInterval band;
  ArcDesign arc;
};

RepresentativeSetup representative_setup(int replicas = 5);

/// Central energies for which at least 99% of the packet spectrum lies inside the band,
/// spread evenly over that admissible range.
std::vector<double> packet_centers(const BandInterval& band, double sigma_x, double lead_mass, int count,
                                   double max_outside = 0.01);

/// Spectrum-weighted N τ_Bl for a packet, normalized over the band interior.
double packet_bloch_time(const CellModel& core, int n_cells, const BandInterval& band, const WavePacket& packet,
                         double lead_mass);

struct FigureOptions {
  int samples = 1001;
  int packets = 7;         // TDSE runs for the ARC timing figure
  double sigma_x = 60.0;   // nm
  TdseSettings tdse;
};

/// Play-model figures 1-6 with N = 9.
Table playmodel_figure(int figure, const FigureOptions& opt = {});
/// Figures 1-9: 1-6 from the play model, 7-9 from the representative array.
Table reproduce_figure(int figure, const FigureOptions& opt = {});

}  // namespace sltime
