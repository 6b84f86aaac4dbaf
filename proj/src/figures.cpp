#include "sltime/figures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sltime/error.hpp"
#include "sltime/numeric.hpp"
#include "sltime/playmodel.hpp"
#include "sltime/resonance.hpp"
#include "sltime/sweep.hpp"
#include "sltime/timing.hpp"

namespace sltime {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;
constexpr int kPlayCells = 9;

BandInterval play_band(const PlayModel& pm) { return {pm.spec().band_lo(), pm.spec().band_hi(), true, true}; }

EnergyGrid play_grid(const PlayModel& pm, int samples) {
  return band_interior_grid(play_band(pm), samples, 0.06);
}

EnergyGrid refine(const CellModel& cell, int n, const BandInterval& band, const EnergyGrid& grid) {
  return refined_grid(grid, fit_peaks(cell, n, band));
}

std::string region_label(int region) {
  if (region > 0) return "peak" + std::to_string(region);
  if (region < 0) return "valley" + std::to_string(-region - 1);
  return "connector";
}

// η_N on the branch tied to Nφ: the closed Kard form fixes the branch, the direct
// N-fold product supplies the value.
double eta_n(const CellModel& cell, int n, double energy, const KardParams& k) {
  const double nphi = n * k.phi;
  const double c = std::cos(nphi), s = std::sin(nphi), ch = std::cosh(k.mu);
  const double guide = nphi + std::atan2(s * c * (ch - 1.0), c * c + s * s * ch);
  const double raw = std::arg(1.0 / power(cell.matrix(energy), n).m11());
  return nearest_branch(raw, guide, 2.0 * kPi);
}

Table timing_table(const CellModel& cell, int n, const EnergyGrid& grid, double h, bool with_bloch) {
  auto curve = parallel::timing_curve(cell, n, grid, h);
  Table t;
  t.columns = {"E_meV", "tau_ph_fs", "env_max_fs", "env_min_fs"};
  if (with_bloch) t.columns.push_back("bloch_fs");
  t.columns.push_back(with_bloch ? "T" + std::to_string(n) + "_times4" : "T" + std::to_string(n));
  for (const auto& s : curve) {
    std::vector<Cell> row{s.energy, s.tau_ph, s.env_max, s.env_min};
    if (with_bloch) row.push_back(s.bloch_total);
    row.push_back(with_bloch ? 4.0 * s.t2 : s.t2);
    t.add(std::move(row));
  }
  return t;
}

Table approx_table(const CellModel& cell, int n, const BandInterval& band, const EnergyGrid& grid, double h,
                   bool valleys) {
  auto peaks = fit_peaks(cell, n, band);
  const EnergyGrid fine = refined_grid(grid, peaks);
  auto curve = parallel::timing_curve(cell, n, fine, h);
  std::vector<ValleyFit> vfits;
  if (valleys) vfits = fit_valleys(cell, n, band);
  auto approx = approx_curves(peaks, vfits, fine);
  Table t;
  t.columns = {"E_meV", "tau_ph_fs", valleys ? "tau_approx_fs" : "tau_fano_fs", "env_max_fs"};
  if (valleys) t.columns.push_back("env_min_fs");
  t.columns.push_back("region");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::vector<Cell> row{curve[i].energy, curve[i].tau_ph, approx[i].tau, curve[i].env_max};
    if (valleys) row.push_back(curve[i].env_min);
    row.push_back(region_label(approx[i].region));
    t.add(std::move(row));
  }
  return t;
}

Table arc_timing_figure(const FigureOptions& opt) {
  auto rep = representative_setup();
  const int n = rep.stack.replicas;
  const double h = default_step(rep.band.width());
  StackModel st(rep.stack_arc);
  LayeredCell arc_cell(rep.arc.arc_cell, rep.stack.outside);
  const double hbar = st.constants().hbar;

  struct Row {
    double e, t2, tau, delay, bloch, bloch_arc, tdse, bloch_avg;
  };
  auto curve_at = [&](double e) {
    Row r{e, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    r.t2 = std::norm(amplitudes(st.matrix(e)).t);
    r.tau = direct_phase_time(st, 1, e, h);
    r.delay = r.tau - st.free_transit_time(e);
    if (stencil_inside(rep.core, e, h)) r.bloch = n * bloch_time(rep.core, e, h);
    if (stencil_inside(arc_cell, e, h)) r.bloch_arc = r.bloch + 2.0 * hbar * kard_derivatives(arc_cell, e, h).phi_p;
    return r;
  };

  auto grid = band_interior_grid(rep.band, opt.samples, 2.5 * h);
  std::vector<Row> rows(grid.count());
  parallel::for_each_index(grid.count(), [&](std::size_t i) { rows[i] = curve_at(grid.samples[i]); });

  if (opt.packets > 0) {
    auto centers = packet_centers(rep.band, opt.sigma_x, st.lead_mass(), opt.packets);
    auto runs = simulate_packets(st, centers, opt.sigma_x, opt.tdse);
    for (const auto& run : runs) {
      Row r = curve_at(run.packet.e0);
      r.tdse = run.delay.delay;
      r.bloch_avg = packet_bloch_time(rep.core, n, rep.band, run.packet, st.lead_mass());
      rows.push_back(r);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.e < b.e; });
  }

  Table t;
  t.columns = {"E_meV", "T", "tau_ph_fs", "tau_delay_fs", "bloch_fs", "bloch_arc_fs", "tdse_delay_fs",
               "bloch_packet_fs"};
  for (const auto& r : rows) t.add({r.e, r.t2, r.tau, r.delay, r.bloch, r.bloch_arc, r.tdse, r.bloch_avg});
  return t;
}

}  // namespace

BandInterval first_band(const CellModel& cell, double e_max, std::size_t samples) {
  auto bands = band_structure(cell, EnergyGrid::uniform(e_max / samples, e_max, samples));
  if (bands.empty()) throw NumericError("no allowed band below " + format_number(e_max) + " meV");
  return bands.front();
}

EnergyGrid band_interior_grid(const BandInterval& band, std::size_t samples, double margin) {
  if (!(band.width() > 2.0 * margin)) throw ValidationError("band narrower than the requested margins");
  return EnergyGrid::uniform(band.lo + margin, band.hi - margin, samples);
}

RepresentativeSetup representative_setup(int replicas) {
  StackSpec stack = representative_stack(replicas);
  LayeredCell core(stack.core, stack.outside);
  BandInterval band = first_band(core);
  ArcDesign arc = design_rule_of_thumb(stack.core, stack.outside, band);
  StackSpec with = with_arc(stack, arc);
  return {stack, with, core, band, arc};
}

std::vector<double> packet_centers(const BandInterval& band, double sigma_x, double lead_mass, int count,
                                   double max_outside) {
  if (count < 1) throw ValidationError("need at least one packet");
  auto excess = [&](double e) { return weight_outside(WavePacket{0.0, sigma_x, e}, lead_mass, band.lo, band.hi) - max_outside; };
  const double mid = band.center();
  if (excess(mid) > 0.0) throw ValidationError("packet spectrum is wider than the band; increase sigma_x");
  const double lo = numeric::bisect(excess, band.lo, mid, 1e-9);
  const double hi = numeric::bisect(excess, mid, band.hi, 1e-9);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(count == 1 ? mid : lo + (hi - lo) * i / (count - 1));
  return out;
}

double packet_bloch_time(const CellModel& core, int n_cells, const BandInterval& band, const WavePacket& packet,
                         double lead_mass) {
  const double h = default_step(band.width());
  auto grid = band_interior_grid(band, 1601, 4.0 * h);
  std::vector<double> values(grid.count());
  parallel::for_each_index(grid.count(),
                           [&](std::size_t i) { values[i] = n_cells * bloch_time(core, grid.samples[i], h); });
  return spectral_average(grid.samples, values, packet, lead_mass, {}, core.constants()).value;
}

Table playmodel_figure(int figure, const FigureOptions& opt) {
  PlayModel pm;
  const int n = kPlayCells;
  const BandInterval band = play_band(pm);
  const double h = default_step(band.width());
  Table t;
  switch (figure) {
    case 1: {
      auto grid = play_grid(pm, opt.samples);
      t.columns = {"E_meV", "cos_phi", "phi_over_half_pi", "eta_over_half_pi"};
      for (double e : grid.samples) t.add({e, pm.half_trace(e), pm.kard(e).phi / (0.5 * kPi), pm.eta(e) / (0.5 * kPi)});
      return t;
    }
    case 2: {
      auto grid = play_grid(pm, opt.samples);
      auto sweep = parallel::transmission_sweep(pm, n, grid);
      t.columns = {"E_meV", "T1", "T9", "env_min"};
      for (const auto& s : sweep) t.add({s.energy, pm.transmission(s.energy), s.t2, s.env_min});
      return t;
    }
    case 3: {
      t = timing_table(pm, n, refine(pm, n, band, play_grid(pm, opt.samples)), h, false);
      return t;
    }
    case 4: {
      // lower half of the band only
      auto grid = EnergyGrid::uniform(band.lo + 0.06, pm.spec().e_bragg, opt.samples);
      t.columns = {"E_meV", "eta_N_over_pi", "N_phi_over_pi"};
      for (double e : grid.samples) {
        auto k = pm.kard(e);
        t.add({e, eta_n(pm, n, e, k) / kPi, n * k.phi / kPi});
      }
      return t;
    }
    case 5: {
      auto grid = refine(pm, n, band, play_grid(pm, opt.samples));
      auto sweep = parallel::transmission_sweep(pm, n, grid);
      auto approx = approx_curves(fit_peaks(pm, n, band), {}, grid);
      t.columns = {"E_meV", "T9", "T_bw", "region"};
      for (std::size_t i = 0; i < sweep.size(); ++i)
        t.add({sweep[i].energy, sweep[i].t2, approx[i].t2, region_label(approx[i].region)});
      return t;
    }
    case 6:
      return approx_table(pm, n, band, play_grid(pm, opt.samples), h, false);
    default:
      throw ValidationError("play-model figures are numbered 1 to 6");
  }
}

Table reproduce_figure(int figure, const FigureOptions& opt) {
  if (figure >= 1 && figure <= 6) return playmodel_figure(figure, opt);
  if (figure == 7 || figure == 8) {
    LayeredCell core(representative_cell(), representative_outside());
    const BandInterval band = first_band(core);
    const double h = default_step(band.width());
    auto grid = band_interior_grid(band, opt.samples, 2.5 * h);
    const int n = representative_stack().replicas;
    return figure == 7 ? timing_table(core, n, refine(core, n, band, grid), h, true)
                       : approx_table(core, n, band, grid, h, true);
  }
  if (figure == 9) return arc_timing_figure(opt);
  throw ValidationError("figures are numbered 1 to 9");
}

}  // namespace sltime
