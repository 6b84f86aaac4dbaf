#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sltime/cell_model.hpp"
#include "sltime/error.hpp"
#include "sltime/kard.hpp"
#include "sltime/resonance.hpp"
#include "sltime/scattering.hpp"
#include "sltime/stack_model.hpp"

using namespace sltime;

namespace {
constexpr double kPi = std::numbers::pi;
const Layer kLead{1.0, 0.0, 0.067};

StackSpec single(const CellSpec& c, int n = 1) {
  StackSpec s;
  s.core = c;
  s.replicas = n;
  s.outside = kLead;
  return s;
}

StackSpec free_stack(double w) { return single(CellSpec{{Layer{w, 0.0, 0.067}}, true}); }

BandInterval rep_band() {
  LayeredCell lc(representative_cell(), representative_outside());
  return band_structure(lc, EnergyGrid::uniform(1.0, 300.0, 6000)).at(0);
}
}  // namespace

TEST_CASE("convention shift") {
  const double e = 25.0, w = 6.0;
  const double k = lead_wavenumber(e, 0.067);
  SUBCASE("free cell has zero origin-referenced phase") {
    auto a = amplitudes(cell_matrix(free_stack(w).core, kLead, e));
    auto s = shift_convention(a, k, -w / 2, w);
    CHECK(std::abs(s.eta) < 1e-12);
    CHECK(s.convention == Convention::origin_referenced);
    CHECK_THROWS_AS(shift_convention(s, k, 0.0, w), ValidationError);
  }
  SUBCASE("a = 0 leaves r and round trip restores") {
    std::mt19937_64 rng(2);
    auto cell = oracle::random_cell(rng, false);
    auto a = amplitudes(cell_matrix(cell, kLead, e));
    auto s = shift_convention(a, k, 0.0, cell.width());
    CHECK(std::abs(s.r - a.r) < 1e-15);
    CHECK(std::abs(std::abs(s.t) - std::abs(a.t)) < 1e-15);
    auto back = unshift_convention(shift_convention(a, k, -1.7, cell.width()), k, -1.7, cell.width());
    CHECK(std::abs(back.r - a.r) < 1e-14);
    CHECK(std::abs(back.t - a.t) < 1e-14);
    CHECK(back.convention == Convention::cell_referenced);
  }
}

TEST_CASE("S matrix") {
  SUBCASE("reflectionless") {
    StackModel st(free_stack(4.0));
    auto s = s_matrix(origin_amplitudes(st, 10.0));
    CHECK(std::abs(s.r) < 1e-14);
    CHECK(std::abs(s.r_bar) < 1e-14);
    CHECK(std::abs(s.t) == doctest::Approx(1.0));
  }
  SUBCASE("cell-referenced amplitudes are refused") {
    StackModel st(free_stack(4.0));
    CHECK_THROWS_AS(s_matrix(amplitudes(st.matrix(10.0))), ValidationError);
  }
  SUBCASE("symmetric stacks have r_bar = r") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> e(1.0, 300.0);
    for (int i = 0; i < 100; ++i) {
      StackModel st(single(oracle::random_cell(rng, true), 1 + i % 3));
      auto amp = origin_amplitudes(st, e(rng));
      auto s = s_matrix(amp);
      CHECK(std::abs(s.r_bar - s.r) < 1e-9);
      if (std::abs(amp.r) > 1e-8)
        CHECK(std::abs(std::remainder(amp.eta - amp.delta - kPi / 2, kPi)) < 1e-9);
    }
  }
  SUBCASE("unitarity on random stacks") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> e(1.0, 300.0);
    for (int i = 0; i < 200; ++i) {
      StackModel st(single(oracle::random_cell(rng, false), 1 + i % 3));
      auto s = s_matrix(origin_amplitudes(st, e(rng)));
      CHECK(s.unitarity_residual() < 1e-10);
      CHECK(std::abs(s.r * std::conj(s.t) + s.t * std::conj(s.r_bar)) < 1e-10);
    }
  }
}

TEST_CASE("Smith delay matrix") {
  const double h = 1e-3;
  SUBCASE("free stack has no delay") {
    StackModel st(free_stack(12.0));
    auto tau = smith_matrix(st, 30.0, h);
    CHECK(std::abs(tau.tau11) < 1e-8);
    CHECK(std::abs(tau.tau22) < 1e-8);
  }
  SUBCASE("symmetric stacks: tau11 = tau22 = hbar eta', real tau12") {
    StackModel st(representative_stack(5));
    auto band = rep_band();
    for (int i = 1; i < 12; ++i) {
      double e = band.lo + band.width() * i / 12.0;
      auto tau = smith_matrix(st, e, h);
      CHECK(tau.symmetric_regime);
      CHECK(tau.tau11 == doctest::Approx(tau.tau22).epsilon(1e-8));
      CHECK(std::abs(tau.tau12.imag()) < 1e-8 * std::max(1.0, std::abs(tau.tau11)));
      auto d = amplitude_derivatives(st, e, h);
      const double eta_p = std::imag(d.t_p * std::conj(d.amp.t)) / std::norm(d.amp.t);
      CHECK(tau.tau11 == doctest::Approx(kConstants.hbar * eta_p).epsilon(1e-8));
      // |r|' from the derivative of |r|
      const double r_abs_p = std::real(d.r_p * std::conj(d.amp.r)) / std::abs(d.amp.r);
      // eta - delta = +-pi/2 here, which fixes the sign of the compact form
      const double side = std::sin(d.amp.eta - d.amp.delta);
      CHECK(std::abs(tau.tau12.real() + side * kConstants.hbar * r_abs_p / std::abs(d.amp.t)) <
            1e-6 * std::max(1.0, std::abs(tau.tau11)));
      auto closed = smith_closed_form(d, kConstants.hbar);
      CHECK(closed.tau11 == doctest::Approx(tau.tau11).epsilon(1e-6));
      CHECK(std::abs(closed.tau12 - tau.tau12) < 1e-6 * std::max(1.0, std::abs(tau.tau11)));
    }
  }
  SUBCASE("channel coupling vanishes at a transmission minimum") {
    StackModel st(representative_stack(5));
    LayeredCell core(representative_cell(), representative_outside());
    auto band = rep_band();
    auto valleys = fit_valleys(core, 5, band);
    for (const auto& v : valleys) {
      if (v.edge_degraded) continue;
      auto t2 = [&](double e) { return std::norm(amplitudes(st.matrix(e)).t); };
      double lo = v.energy - 0.3 * v.gamma, hi = v.energy + 0.3 * v.gamma;
      for (int i = 0; i < 200; ++i) {  // golden-section search for the true minimum
        double a = hi - 0.618 * (hi - lo), b = lo + 0.618 * (hi - lo);
        if (t2(a) < t2(b)) hi = b; else lo = a;
      }
      double emin = 0.5 * (lo + hi);
      auto tau = smith_matrix(st, emin, h);
      CHECK(std::abs(tau.tau12) < 1e-6 * kConstants.hbar / v.gamma * 1e3);
      CHECK(std::abs(tau.tau12) < 1e-2 * std::abs(tau.tau11));
    }
  }
  SUBCASE("stencil reaching E <= 0 is an error") {
    StackModel st(free_stack(3.0));
    CHECK_THROWS_AS(smith_matrix(st, 1e-4, 1e-3), NumericError);
  }
}

TEST_CASE("scattering states") {
  SUBCASE("free stack density is 1/v") {
    StackModel st(free_stack(10.0));
    const double e = 40.0;
    std::vector<double> xs;
    for (int i = 0; i <= 40; ++i) xs.push_back(-20.0 + i);
    auto psi = interior_wavefunction(st, e, xs);
    for (auto p : psi) CHECK(std::norm(p) == doctest::Approx(1.0 / st.lead_velocity(e)).epsilon(1e-12));
  }
  SUBCASE("resonant build-up at the first peak") {
    StackModel st(representative_stack(5));
    LayeredCell core(representative_cell(), representative_outside());
    auto peaks = fit_peaks(core, 5, rep_band());
    const double e = peaks.at(0).energy;
    ScatteringState s(st, e);
    double lead = 1.0 / st.lead_velocity(e), peak = 0.0;
    for (double x = st.left_edge(); x <= st.right_edge(); x += 0.05) peak = std::max(peak, s.density(x));
    CHECK(peak > 2.0 * lead);
  }
  SUBCASE("evanescent decay in a gap") {
    StackModel st(representative_stack(5));
    ScatteringState s(st, 30.0);
    const double cell = representative_cell().width();
    double prev = s.density(st.left_edge() + cell);
    for (int j = 2; j <= 5; ++j) {
      double d = s.density(st.left_edge() + j * cell);
      CHECK(d < prev);
      prev = d;
    }
  }
  SUBCASE("continuity and constant current") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> e(1.0, 300.0);
    for (int i = 0; i < 30; ++i) {
      StackModel st(single(oracle::random_cell(rng, false), 1 + i % 3));
      double energy = e(rng);
      ScatteringState s(st, energy);
      const double j0 = s.current(st.right_edge() + 1.0);
      CHECK(j0 == doctest::Approx(std::norm(s.amplitudes().t)).epsilon(1e-9));
      for (double x : st.interfaces()) {
        auto l = s.at(x - 1e-10), r = s.at(x + 1e-10);
        double scale = std::max(1.0, std::abs(l.psi));
        CHECK(std::abs(l.psi - r.psi) < 1e-7 * scale);
        CHECK(std::abs(l.dpsi_over_m - r.dpsi_over_m) < 1e-7 * std::max(1.0, std::abs(l.dpsi_over_m)));
        CHECK(std::abs(s.current(x) - j0) < 1e-9 * std::max(1.0, j0) * std::max(1.0, std::norm(l.psi) * j0));
      }
    }
  }
}

TEST_CASE("dwell time") {
  const double h = 1e-3;
  SUBCASE("no potential, no delay") {
    StackModel st(free_stack(8.0));
    auto d = dwell_time(st, 20.0, -30.0, 25.0, h);
    CHECK(std::abs(d.tau_dwell_delay) < 1e-8);
    CHECK(std::abs(d.oscillatory_term) < 1e-8);
    CHECK(std::abs(d.numeric_delay()) < 1e-5);
  }
  SUBCASE("oscillatory amplitude is hbar |r| / 2E") {
    StackModel st(representative_stack(5));
    const double e = 60.0;
    auto amp = origin_amplitudes(st, e);
    const double k = st.lead_k(e);
    double best = 0.0;
    for (int i = 0; i < 400; ++i) {
      double xl = st.left_edge() - 5.0 - i * (kPi / k) / 400.0;
      best = std::max(best, std::abs(dwell_time(st, e, xl, st.right_edge() + 5.0, h).oscillatory_term));
    }
    CHECK(best == doctest::Approx(kConstants.hbar * std::abs(amp.r) / (2 * e)).epsilon(1e-4));
  }
  SUBCASE("top line equals tau11 for symmetric stacks") {
    StackModel st(representative_stack(5));
    auto band = rep_band();
    for (int i = 1; i < 8; ++i) {
      double e = band.lo + band.width() * i / 8.0;
      auto d = dwell_time(st, e, h);
      CHECK(std::abs(d.tau_dwell_delay - smith_matrix(st, e, h).tau11) < 1e-6);
    }
  }
  SUBCASE("closed form against the density integral on random stacks") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> e(2.0, 250.0), off(0.0, 20.0);
    for (int i = 0; i < 20; ++i) {
      StackModel st(single(oracle::random_cell(rng, i % 2 == 0), 1 + i % 3));
      double energy = e(rng);
      auto d = dwell_time(st, energy, st.left_edge() - off(rng), st.right_edge() + off(rng), h);
      double tol = std::max(1e-4 * std::abs(d.closed_form_total()), 1e-3);
      CHECK(std::abs(d.closed_form_total() - d.numeric_integral) < tol);
    }
  }
  SUBCASE("measurement points must enclose the stack") {
    StackModel st(representative_stack(2));
    CHECK_THROWS_AS(dwell_time(st, 60.0, 0.0, 30.0, h), ValidationError);
  }
}
