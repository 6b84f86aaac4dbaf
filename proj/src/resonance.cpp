#include "sltime/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sltime/error.hpp"
#include "sltime/numeric.hpp"

namespace sltime {

using std::numbers::pi;

namespace {

// Energy where the Bloch phase has advanced by `theta` ∈ (0, π) from the band bottom.
double solve_phase(const CellModel& cell, const BandInterval& band, double theta) {
  const double bottom_sign = cell.half_trace(band.lo) > 0.0 ? 1.0 : -1.0;
  const double target = bottom_sign * std::cos(theta);
  return numeric::bisect([&](double e) { return cell.half_trace(e) - target; }, band.lo, band.hi, 1e-9);
}

}  // namespace

Extrema locate_extrema(const CellModel& cell, int n_cells, const BandInterval& band) {
  if (n_cells < 2) throw ValidationError("locate_extrema: need at least two cells");
  Extrema out;
  for (int m = 1; m < n_cells; ++m) out.peaks.push_back(solve_phase(cell, band, m * pi / n_cells));
  for (int p = 0; p < n_cells; ++p)
    out.valleys.push_back({p, solve_phase(cell, band, (p + 0.5) * pi / n_cells), p == 0 || p == n_cells - 1});
  return out;
}

PeakFit fit_peak(const CellModel& cell, int n_cells, int m, double energy, double h) {
  PeakFit f;
  f.m = m;
  f.energy = energy;
  f.local = kard_local(cell, energy, h);
  const double n = n_cells;
  const double mu = f.local.params.mu;
  const auto& d = f.local.deriv;
  f.gamma = 2.0 / (n * std::sinh(mu) * d.phi_p);
  f.b = 0.5 * (2.0 * d.mu_p + d.phi_pp / (std::tanh(mu) * d.phi_p)) / (n * d.phi_p * std::cosh(mu));
  f.tau_peak = n * cell.constants().hbar * d.phi_p * std::cosh(mu);
  return f;
}

ValleyFit fit_valley(const CellModel& cell, int n_cells, const ValleyPoint& valley, double h) {
  ValleyFit f;
  f.p = valley.p;
  f.energy = valley.energy;
  f.edge_degraded = valley.edge_degraded;
  f.local = kard_local(cell, valley.energy, h);
  const double n = n_cells;
  const double mu = f.local.params.mu;
  const auto& d = f.local.deriv;
  f.gamma = 2.0 / (n * d.phi_p * std::tanh(mu));
  f.c = d.phi_pp / d.phi_p * f.gamma / 2.0;
  f.d = d.mu_p / (n * d.phi_p);
  f.tau_valley = n * cell.constants().hbar * d.phi_p / std::cosh(mu);
  f.cosh2_mu = std::cosh(mu) * std::cosh(mu);
  return f;
}

std::vector<PeakFit> fit_peaks(const CellModel& cell, int n_cells, const BandInterval& band) {
  const Extrema ex = locate_extrema(cell, n_cells, band);
  const double h = default_step(band.width());
  std::vector<PeakFit> out;
  for (std::size_t i = 0; i < ex.peaks.size(); ++i)
    out.push_back(fit_peak(cell, n_cells, static_cast<int>(i) + 1, ex.peaks[i], h));
  return out;
}

std::vector<ValleyFit> fit_valleys(const CellModel& cell, int n_cells, const BandInterval& band) {
  const Extrema ex = locate_extrema(cell, n_cells, band);
  const double h = default_step(band.width());
  std::vector<ValleyFit> out;
  for (const ValleyPoint& v : ex.valleys) out.push_back(fit_valley(cell, n_cells, v, h));
  return out;
}

double breit_wigner(const PeakFit& fit, double energy) {
  const double x = (energy - fit.energy) / (0.5 * fit.gamma);
  return 1.0 / (1.0 + x * x);
}

double fano_phase_time(const PeakFit& fit, double energy) {
  const double x = (energy - fit.energy) / (0.5 * fit.gamma);
  return fit.tau_peak * (1.0 + 2.0 * fit.b * x) / (1.0 + x * x);
}

double valley_phase_time(const ValleyFit& fit, double energy) {
  const double y = (energy - fit.energy) / (0.5 * fit.gamma);
  return fit.tau_valley * (1.0 + fit.c * y) / (1.0 + 2.0 * fit.d * y + (fit.d * fit.d - 1.0) * y * y);
}

double valley_transmission(const ValleyFit& fit, double energy) {
  const double y = (energy - fit.energy) / (0.5 * fit.gamma);
  const double lin = 1.0 + fit.d * y;
  return 1.0 / (fit.cosh2_mu * lin * lin * (1.0 - y * y));
}

std::vector<ApproxSample> approx_curves(const std::vector<PeakFit>& peaks, const std::vector<ValleyFit>& valleys,
                                        const EnergyGrid& grid) {
  // Windows sorted by energy: peaks span ±Γ_m, valleys ±Γ_p/2.
  struct Window {
    double lo, hi;
    int region;
    const PeakFit* peak;
    const ValleyFit* valley;
  };
  std::vector<Window> windows;
  for (const auto& p : peaks) windows.push_back({p.energy - p.gamma, p.energy + p.gamma, p.m, &p, nullptr});
  for (const auto& v : valleys)
    windows.push_back({v.energy - 0.5 * v.gamma, v.energy + 0.5 * v.gamma, -(v.p + 1), nullptr, &v});
  std::sort(windows.begin(), windows.end(), [](const Window& a, const Window& b) { return a.lo < b.lo; });

  auto eval = [](const Window& w, double e, ApproxSample& s) {
    if (w.peak) {
      s.t2 = breit_wigner(*w.peak, e);
      s.tau = fano_phase_time(*w.peak, e);
    } else {
      s.t2 = std::clamp(valley_transmission(*w.valley, e), 0.0, 1.0);
      s.tau = valley_phase_time(*w.valley, e);
    }
  };

  std::vector<ApproxSample> out;
  out.reserve(grid.count());
  for (double e : grid.samples) {
    ApproxSample s;
    s.energy = e;
    // Peak windows take precedence over the wider valley windows.
    const Window* hit = nullptr;
    for (const auto& w : windows)
      if (e >= w.lo && e <= w.hi && (!hit || (w.peak && !hit->peak))) hit = &w;
    if (hit) {
      s.region = hit->region;
      eval(*hit, e, s);
    } else if (!windows.empty()) {
      // Constant connector: hold the value at the closest window boundary.
      const Window* best = &windows.front();
      double best_dist = 1e300;
      double edge = 0.0;
      for (const auto& w : windows) {
        for (double b : {w.lo, w.hi}) {
          if (std::abs(e - b) < best_dist) {
            best_dist = std::abs(e - b);
            best = &w;
            edge = b;
          }
        }
      }
      eval(*best, edge, s);
    }
    out.push_back(s);
  }
  return out;
}

EnergyGrid refined_grid(const EnergyGrid& base, const std::vector<PeakFit>& peaks, int per_width) {
  if (per_width < 1) throw ValidationError("refined_grid: need at least one sample per width");
  std::vector<double> e = base.samples;
  for (const auto& p : peaks) {
    const double step = p.gamma / per_width;
    for (int i = -2 * per_width; i <= 2 * per_width; ++i) {
      const double x = p.energy + i * step;
      if (x >= base.e_min && x <= base.e_max) e.push_back(x);
    }
  }
  std::sort(e.begin(), e.end());
  EnergyGrid g;
  g.e_min = base.e_min;
  g.e_max = base.e_max;
  for (double x : e)
    if (g.samples.empty() || x - g.samples.back() > 1e-9 * std::max(1.0, std::abs(x))) g.samples.push_back(x);
  return g;
}

}  // namespace sltime
