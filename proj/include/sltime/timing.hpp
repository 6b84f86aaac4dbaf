#pragma once

#include <vector>

#include "sltime/cell_model.hpp"
#include "sltime/kard.hpp"

namespace sltime {

/// Phase-time quantities of an N-cell array at one energy (times in fs).
struct TimingSample {
  double energy = 0.0;
  double t2 = 0.0;            // |t_N|²
  double tau_ph = 0.0;        // ħ dη_N/dE
  double tau_ph_delay = 0.0;  // tau_ph minus the free transit time of the array
  double bloch_total = 0.0;   // N τ_Bl
  double env_max = 0.0;       // N τ_Bl cosh μ
  double env_min = 0.0;       // N τ_Bl / cosh μ
  /// True when the closed Kard forms were used; false where the stencil leaves the
  /// allowed band and tau_ph comes from the direct N-cell matrix (envelopes NaN).
  bool kard_valid = false;
};

using TimingCurve = std::vector<TimingSample>;

struct Envelopes {
  double env_max = 0.0;
  double env_min = 0.0;
  double env_min_matrix_form = 0.0;  // Nħ (d cos φ/dE) / Im M11
  double bloch_total = 0.0;
};

struct TransmissionSample {
  double energy = 0.0;
  double t2 = 0.0;         // Kard closed form, falls back to t2_direct outside allowed bands
  double t2_direct = 0.0;  // from the explicit N-fold product
  double env_min = 0.0;    // 1/cosh²μ, NaN outside allowed bands
  Band band = Band::allowed;
};

/// ħ dφ/dE.
double bloch_time(const CellModel& cell, double energy, double h);

/// Closed Kard-form phase time of N cells from single-cell data.
double phase_time(const KardLocal& local, int n_cells, double hbar);
double phase_time(const CellModel& cell, int n_cells, double energy, double h);

Envelopes envelopes(const KardLocal& local, const TransferMatrix& cell_matrix, int n_cells, double hbar);
Envelopes envelopes(const CellModel& cell, int n_cells, double energy, double h);

/// |t_N|² = [1 + sin²Nφ sinh²μ]⁻¹.
double kard_transmission(const KardParams& k, int n_cells);

/// ħ Im(t′ t*)/|t|² of the N-cell product, by finite differences of the complex amplitude.
double direct_phase_time(const CellModel& cell, int n_cells, double energy, double h);

/// True when E ± 2h all lie strictly inside an allowed band.
bool stencil_inside(const CellModel& cell, double energy, double h);

TimingSample timing_sample(const CellModel& cell, int n_cells, double energy, double h);
TransmissionSample transmission_sample(const CellModel& cell, int n_cells, double energy);

}  // namespace sltime
