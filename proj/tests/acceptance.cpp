// Acceptance checks, one per criterion: `acceptance --criterion k` prints a single
// [PASS]/[FAIL] line with the measured values and exits non-zero on failure.
#include <CLI11.hpp>
#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "sltime/arc.hpp"
#include "sltime/figures.hpp"
#include "sltime/kard.hpp"
#include "sltime/playmodel.hpp"
#include "sltime/resonance.hpp"
#include "sltime/scattering.hpp"
#include "sltime/stack_model.hpp"
#include "sltime/sweep.hpp"
#include "sltime/tdse.hpp"
#include "sltime/timing.hpp"

using namespace sltime;

namespace {

constexpr double kPi = std::numbers::pi;
const BandInterval kPlayBand{50.0, 75.0, true, true};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_abs(const Eigen::Matrix2cd& m) { return m.cwiseAbs().maxCoeff(); }

double stdev(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x / v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m) / (v.size() - 1);
  return std::sqrt(s);
}

Outcome power_identity() {
  auto t0 = std::chrono::steady_clock::now();
  PlayModel play;
  LayeredCell rep(representative_cell(), representative_outside());
  const auto rep_band = first_band(rep);
  double worst = 0.0;
  auto sweep = [&](const CellModel& cell, const BandInterval& band) {
    for (int i = 0; i < 1000; ++i) {
      const double e = band.lo + band.width() * (i + 0.5) / 1000.0;
      const auto m = cell.matrix(e);
      const auto k = decompose(m);
      for (int n : {2, 5, 9, 32}) {
        KardParams kn = k;
        kn.phi = n * k.phi;
        worst = std::max(worst, max_abs(power(m, n).m - reconstruct(kn).m));
      }
    }
  };
  sweep(play, kPlayBand);
  sweep(rep, rep_band);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-10 && secs < 1.0, fmt("max |M^N - K(N phi)| = %.3g (< 1e-10), runtime %.3f s (< 1 s)", worst, secs)};
}

Outcome play_band() {
  PlayModel play;
  auto bands = band_structure(play, EnergyGrid::uniform(40.0, 85.0, 4501));
  if (bands.size() != 1) return {false, fmt("%zu bands found", bands.size())};
  const double err = std::max(std::abs(bands[0].lo - 50.0), std::abs(bands[0].hi - 75.0));
  auto ext = locate_extrema(play, 9, bands[0]);
  double worst = 1.0;
  for (double e : ext.peaks) worst = std::min(worst, kard_transmission(play.kard(e), 9));
  const bool ok = err < 1e-6 && ext.peaks.size() == 8 && worst > 1.0 - 1e-9;
  return {ok, fmt("band [%.9f, %.9f], edge error %.2g meV (< 1e-6); %zu peaks (8); min |t9|^2 = %.12f", bands[0].lo,
                  bands[0].hi, err, ext.peaks.size(), worst)};
}

Outcome envelope_tangency() {
  PlayModel play;
  LayeredCell rep(representative_cell(), representative_outside());
  const auto rep_band = first_band(rep);
  double peak_err = 0.0, valley_err = 0.0, gm_err = 0.0;
  auto check = [&](const CellModel& cell, const BandInterval& band, int n) {
    const double h = default_step(band.width());
    auto ext = locate_extrema(cell, n, band);
    for (double e : ext.peaks) {
      if (!stencil_inside(cell, e, h)) continue;
      auto env = envelopes(cell, n, e, h);
      double tau = phase_time(cell, n, e, h);
      peak_err = std::max(peak_err, std::abs(tau - env.env_max) / tau);
    }
    for (const auto& v : ext.valleys) {
      if (!stencil_inside(cell, v.energy, h)) continue;
      auto env = envelopes(cell, n, v.energy, h);
      double tau = phase_time(cell, n, v.energy, h);
      valley_err = std::max(valley_err, std::abs(tau - env.env_min) / tau);
    }
    auto curve = parallel::timing_curve(cell, n, band_interior_grid(band, 2001, 4 * h), h);
    for (const auto& s : curve)
      if (s.kard_valid)
        gm_err = std::max(gm_err, std::abs(s.env_max * s.env_min / (s.bloch_total * s.bloch_total) - 1.0));
  };
  for (int n : {5, 9, 18}) check(play, kPlayBand, n);
  check(rep, rep_band, 5);
  const bool ok = peak_err < 1e-8 && valley_err < 1e-8 && gm_err < 1e-10;
  return {ok, fmt("peaks %.2g, valleys %.2g (< 1e-8); geometric mean %.2g (< 1e-10)", peak_err, valley_err, gm_err)};
}

double bw_error(int n) {
  PlayModel play;
  double worst = 0.0;
  for (const auto& p : fit_peaks(play, n, kPlayBand))
    for (int i = -200; i <= 200; ++i) {
      const double e = p.energy + p.gamma * i / 200.0;
      if (e <= 50.0 || e >= 75.0) continue;
      const double exact = kard_transmission(play.kard(e), n);
      worst = std::max(worst, std::abs(breit_wigner(p, e) - exact) / exact);
    }
  return worst;
}

Outcome breit_wigner_fidelity() {
  const double e9 = bw_error(9), e18 = bw_error(18);
  return {e9 <= 0.05 && e18 <= 0.02,
          fmt("max relative error within Gamma_m: N=9 %.3f (<= 0.05), N=18 %.3f (<= 0.02)", e9, e18)};
}

Outcome fano_fidelity() {
  PlayModel play;
  const int n = 9;
  const double h = default_step(25.0);
  double peak_err = 0.0, valley_err = 0.0;
  for (const auto& p : fit_peaks(play, n, kPlayBand))
    for (int i = -200; i <= 200; ++i) {
      const double e = p.energy + p.gamma * i / 200.0;
      if (!stencil_inside(play, e, h)) continue;
      const double exact = phase_time(play, n, e, h);
      peak_err = std::max(peak_err, std::abs(fano_phase_time(p, e) - exact) / exact);
    }
  for (const auto& v : fit_valleys(play, n, kPlayBand)) {
    if (v.edge_degraded) continue;
    for (int i = -200; i <= 200; ++i) {
      const double e = v.energy + 0.5 * v.gamma * i / 200.0;
      if (!stencil_inside(play, e, h)) continue;
      const double exact = phase_time(play, n, e, h);
      double approx = valley_phase_time(v, e);
      valley_err = std::max(valley_err, std::isfinite(approx) ? std::abs(approx - exact) / exact : INFINITY);
    }
  }
  return {peak_err <= 0.05 && valley_err <= 0.15,
          fmt("peak form %.3f (<= 0.05) within Gamma_m; valley form %.3g (<= 0.15) within Gamma_p/2", peak_err,
              valley_err)};
}

Outcome dwell_consistency() {
  std::vector<StackModel> stacks;
  for (int n : {1, 3, 5}) stacks.emplace_back(representative_stack(n));
  stacks.emplace_back(representative_setup().stack_arc);
  std::mt19937_64 rng(20240);
  std::uniform_real_distribution<double> energy(5.0, 150.0), off(0.0, 40.0);
  const double h = 1e-3;
  double worst = 0.0, top = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto& st = stacks[i % stacks.size()];
    const double e = energy(rng);
    auto d = dwell_time(st, e, st.left_edge() - off(rng), st.right_edge() + off(rng), h);
    const double tol = std::max(1e-4 * std::abs(d.closed_form_total()), 1e-3);
    worst = std::max(worst, std::abs(d.closed_form_total() - d.numeric_integral) / tol);
    top = std::max(top, std::abs(d.tau_dwell_delay - smith_matrix(st, e, h).tau11));
  }
  return {worst <= 1.0 && top < 1e-6,
          fmt("worst closed-form mismatch %.3f of tolerance (<= 1); |top line - tau11| = %.2g fs (< 1e-6)", worst, top)};
}

Outcome oscillatory_term() {
  StackModel st(representative_stack(5));
  const double h = 1e-3;
  double worst = 0.0;
  std::string vals;
  for (double e : {57.0, 64.0, 72.0}) {
    const double k = st.lead_k(e);
    const double r = std::abs(origin_amplitudes(st, e).r);
    const double expect = kConstants.hbar * r / (2 * e);
    // least squares a + c cos 2k x_L + s sin 2k x_L over two periods
    Eigen::MatrixXd a(200, 3);
    Eigen::VectorXd b(200);
    for (int i = 0; i < 200; ++i) {
      const double xl = st.left_edge() - 3.0 - i * (2 * kPi / k) / 200.0;
      auto d = dwell_time(st, e, xl, st.right_edge() + 3.0, h);
      a(i, 0) = 1.0;
      a(i, 1) = std::cos(2 * k * xl);
      a(i, 2) = std::sin(2 * k * xl);
      b(i) = d.numeric_delay();
    }
    Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
    const double amp = std::hypot(coef(1), coef(2));
    worst = std::max(worst, std::abs(amp / expect - 1.0));
    vals += fmt(" E=%.0f: %.4f vs %.4f fs;", e, amp, expect);
  }
  return {worst < 0.01, fmt("fitted amplitude vs hbar|r|/2E:%s worst %.2g (< 0.01)", vals.c_str(), worst)};
}

Outcome resonance_count() {
  LayeredCell rep(representative_cell(), representative_outside());
  auto band = first_band(rep);
  auto ext = locate_extrema(rep, 5, band);
  std::string es;
  for (double e : ext.peaks) es += fmt(" %.3f", e);
  return {ext.peaks.size() == 4, fmt("%zu peaks in [%.3f, %.3f] meV:%s", ext.peaks.size(), band.lo, band.hi, es.c_str())};
}

Outcome arc_effect() {
  auto s = representative_setup();
  const double without = band_average_transmission(s.stack, s.band);
  const double with = band_average_transmission(s.stack_arc, s.band);
  return {without < 0.40 && with > 0.70,
          fmt("band-average T without ARC %.4f (< 0.40), with ARC %.4f (> 0.70)", without, with)};
}

constexpr double kSigma = 60.0;

Outcome tdse_bloch() {
  auto t0 = std::chrono::steady_clock::now();
  auto s = representative_setup();
  StackModel st(s.stack_arc);
  const double m = st.lead_mass();
  auto centers = packet_centers(s.band, kSigma, m, 5);
  std::vector<double> mid(centers.begin() + 1, centers.end() - 1);
  TdseSettings set;  // dx 0.1, dt 0.5
  auto runs = simulate_packets(st, mid, kSigma, set);
  double worst = 0.0, drift = 0.0;
  std::string vals;
  for (const auto& r : runs) {
    const double bloch = packet_bloch_time(s.core, 5, s.band, r.packet, m);
    worst = std::max(worst, std::abs(r.delay.delay / bloch - 1.0));
    drift = std::max({drift, r.structure.norm_drift(), r.free.norm_drift()});
    vals += fmt(" E0=%.2f: %.1f vs %.1f fs;", r.packet.e0, r.delay.delay, bloch);
  }
  StackSpec free;
  free.core = CellSpec{{Layer{s.stack.core.width(), 0.0, m}}, true};
  free.replicas = 5;
  auto control = simulate_packet(StackModel(free), s.band.center(), kSigma, set);
  drift = std::max(drift, control.structure.norm_drift());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = worst <= 0.15 && std::abs(control.delay.delay) < set.dt && drift < 1e-8 && secs < 600.0;
  return {ok, fmt("delay vs spectrum-averaged N tau_Bl:%s worst %.3f (<= 0.15); free control %.2g fs (< dt); "
                  "norm drift %.2g (< 1e-8); %.0f s (< 600)",
                  vals.c_str(), worst, control.delay.delay, drift, secs)};
}

Outcome arc_smoothing() {
  auto s = representative_setup();
  const double m = s.stack.outside.mass_ratio;
  const double h = default_step(s.band.width());
  auto centers = packet_centers(s.band, kSigma, m, 5);
  std::vector<double> tdse_dev[2], phase_dev[2];
  for (int arc = 0; arc < 2; ++arc) {
    StackModel st(arc ? s.stack_arc : s.stack);
    auto runs = simulate_packets(st, centers, kSigma);
    for (const auto& r : runs) {
      const double e = r.packet.e0;
      tdse_dev[arc].push_back(r.delay.delay - packet_bloch_time(s.core, 5, s.band, r.packet, m));
      const double tau = direct_phase_time(st, 1, e, h) - st.free_transit_time(e);
      phase_dev[arc].push_back(tau - 5 * bloch_time(s.core, e, h));
    }
  }
  const double t0 = stdev(tdse_dev[0]), t1 = stdev(tdse_dev[1]);
  const double p0 = stdev(phase_dev[0]), p1 = stdev(phase_dev[1]);
  return {t0 >= 3 * t1 && p0 >= 3 * p1,
          fmt("std(delay - N tau_Bl) TDSE %.2f -> %.2f fs (ratio %.2f), phase time %.2f -> %.2f fs (ratio %.2f); need >= 3",
              t0, t1, t0 / t1, p0, p1, p0 / p1)};
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>> kCriteria{
    {1, {"Kard power identity", power_identity}},
    {2, {"play-model band", play_band}},
    {3, {"envelope tangency", envelope_tangency}},
    {4, {"Breit-Wigner fidelity", breit_wigner_fidelity}},
    {5, {"Fano fidelity", fano_fidelity}},
    {6, {"dwell/phase consistency", dwell_consistency}},
    {7, {"oscillatory term", oscillatory_term}},
    {8, {"resonance count", resonance_count}},
    {9, {"ARC effect", arc_effect}},
    {10, {"TDSE vs Bloch time", tdse_bloch}},
    {11, {"ARC smoothing", arc_smoothing}},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> which;
  app.add_option("--criterion", which, "criterion number (repeatable); all when omitted")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);
  if (which.empty())
    for (const auto& [k, _] : kCriteria) which.push_back(k);
  int failed = 0;
  for (int k : which) {
    const auto& [name, fn] = kCriteria.at(k);
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("[%s] criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
