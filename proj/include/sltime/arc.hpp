#pragma once

#include "sltime/cell_model.hpp"
#include "sltime/kard.hpp"
#include "sltime/stack_model.hpp"

namespace sltime {

/// Single-cell anti-reflection coating matched to a periodic core.
struct ArcDesign {
  CellSpec arc_cell;
  double target_energy = 0.0;  // Bragg point of the core, meV
  double achieved_mu_a = 0.0;
  double achieved_phi_a = 0.0;
  double target_mu_a = 0.0;    // μ(E_B)/2
  double well_scale = 1.0;     // applied to the lowest-potential layers
  double barrier_scale = 1.0;  // applied to every other layer
  double residual = 0.0;       // (φ_A − π/2)² + (μ_A − μ/2)²
};

/// M_arcL · M_core^N · M_arcR.
TransferMatrix compose_with_arc(const StackSpec& stack, double energy, const PhysConstants& c = kConstants);

/// Mean |t|² of the whole stack over `samples` midpoints spanning the band.
double band_average_transmission(const StackSpec& stack, const BandInterval& band, int samples = 2000,
                                 const PhysConstants& c = kConstants);

/// Energy inside `band` where cos φ = 0.
double bragg_point(const CellModel& core, const BandInterval& band);

/// Layer-width variants of the core: lowest-potential layers scaled by `well_scale`,
/// all others by `barrier_scale`.
CellSpec scaled_cell(const CellSpec& core, double well_scale, double barrier_scale);

/// Quarter-wave, half-impedance search over scaled_cell variants: a coarse grid
/// followed by local pattern refinement. Throws NumericError("no viable design")
/// when the best residual exceeds 1e-2.
ArcDesign design_rule_of_thumb(const CellSpec& core, const Layer& outside, const BandInterval& band,
                               const PhysConstants& c = kConstants);

/// The stack with the design attached on the left and its mirror on the right.
StackSpec with_arc(StackSpec stack, const ArcDesign& design);

}  // namespace sltime
