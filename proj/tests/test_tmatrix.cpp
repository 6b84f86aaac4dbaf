#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sltime/error.hpp"
#include "sltime/kard.hpp"
#include "sltime/playmodel.hpp"
#include "sltime/tmatrix.hpp"

using namespace sltime;

namespace {
const Layer kLead{1.0, 0.0, 0.067};

double max_abs(const Eigen::Matrix2cd& m) { return m.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("free cell is a pure phase") {
  const double w = 7.3, e = 40.0;
  auto m = cell_matrix(CellSpec{{Layer{w, 0.0, 0.067}}, true}, kLead, e);
  const double k = lead_wavenumber(e, 0.067);
  CHECK(std::abs(m.m11() - std::polar(1.0, -k * w)) < 1e-12);
  CHECK(std::abs(m.m22() - std::polar(1.0, k * w)) < 1e-12);
  CHECK(std::abs(m.m12()) < 1e-12);
  auto a = amplitudes(m);
  CHECK(std::abs(a.t - std::polar(1.0, k * w)) < 1e-12);
  CHECK(std::abs(a.r) < 1e-12);
  CHECK(std::abs(a.t) == doctest::Approx(1.0));
}

TEST_CASE("square barrier against the textbook formula") {
  const double v0 = 300.0, w = 3.0, mass = 0.067;
  CellSpec barrier{{Layer{w, v0, mass}}, true};
  for (double e : {5.0, 50.0, 150.0, 250.0, 299.0}) {
    auto a = amplitudes(cell_matrix(barrier, Layer{1.0, 0.0, mass}, e));
    CHECK(std::norm(a.t) == doctest::Approx(oracle::square_barrier_t2(e, v0, w, mass)).epsilon(1e-10));
  }
}

TEST_CASE("layered cells against plane-wave matching") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(1.0, 500.0);
  for (int i = 0; i < 200; ++i) {
    auto cell = oracle::random_cell(rng, i % 2 == 0);
    double energy = e(rng);
    auto a = amplitudes(cell_matrix(cell, kLead, energy));
    auto ref = oracle::plane_wave_rt(cell.layers, kLead, energy);
    CHECK(std::abs(a.t - ref.t) < 1e-9 * std::max(1.0, std::abs(ref.t)));
    CHECK(std::abs(a.r - ref.r) < 1e-9);
  }
}

TEST_CASE("matrix invariants on random stacks") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> e(0.5, 500.0);
  for (int i = 0; i < 500; ++i) {
    auto cell = oracle::random_cell(rng, false);
    auto m = cell_matrix(cell, kLead, e(rng));
    // roundoff in these residuals grows like eps·|m11|²; the absolute bound applies
    // while |t|² ≥ 1e-4, deeper tunnelling is checked at the scaled level
    const double scale = std::max(1.0, std::norm(m.m11()) / 1e4);
    CHECK(std::abs(m.det() - 1.0) < 1e-10 * scale);
    CHECK(m.flux_residual() < 1e-10 * scale);
    CHECK(m.time_reversal_residual() < 1e-10 * scale);
    auto a = amplitudes(m);
    CHECK(std::abs(std::norm(a.r) + std::norm(a.t) - 1.0) < 1e-10);
    CHECK(std::abs(a.t - 1.0 / m.m11()) < 1e-14);
    CHECK(std::abs(a.r - m.m21() / m.m11()) < 1e-14);
  }
}

TEST_CASE("energies at a band offset use the series limit") {
  CellSpec cell{{Layer{2.0, 100.0, 0.08}, Layer{3.0, 0.0, 0.067}}, false};
  auto at = cell_matrix(cell, kLead, 100.0);
  auto near = cell_matrix(cell, kLead, 100.0 + 1e-9);
  CHECK(std::isfinite(std::abs(at.m11())));
  CHECK(max_abs(at.m - near.m) < 1e-6);
  CHECK(std::abs(at.det() - 1.0) < 1e-10);
}

TEST_CASE("E at or below the lead band bottom is an error") {
  CellSpec cell{{Layer{2.0, 100.0, 0.08}}, true};
  CHECK_THROWS_AS(cell_matrix(cell, kLead, 0.0), ValidationError);
  CHECK_THROWS_AS(cell_matrix(cell, kLead, -3.0), ValidationError);
}

TEST_CASE("composition") {
  const double e = 33.0;
  CellSpec a{{Layer{2.0, 0.0, 0.067}}, true}, b{{Layer{3.5, 0.0, 0.067}}, true}, ab{{Layer{5.5, 0.0, 0.067}}, true};
  auto ma = cell_matrix(a, kLead, e), mb = cell_matrix(b, kLead, e);
  SUBCASE("identity") { CHECK(max_abs(compose(ma, TransferMatrix::identity(e)).m - ma.m) < 1e-15); }
  SUBCASE("free cells add their widths") {
    auto c = compose(ma, mb);
    CHECK(max_abs(c.m - cell_matrix(ab, kLead, e).m) < 1e-12);
    CHECK(c.width == doctest::Approx(5.5));
  }
  SUBCASE("determinant is multiplicative and associative") {
    std::mt19937_64 rng(5);
    auto x = cell_matrix(oracle::random_cell(rng, false), kLead, e);
    auto y = cell_matrix(oracle::random_cell(rng, false), kLead, e);
    auto z = cell_matrix(oracle::random_cell(rng, false), kLead, e);
    CHECK(std::abs(compose(x, y).det() - 1.0) < 1e-10);
    auto l = compose(compose(x, y), z), r = compose(x, compose(y, z));
    CHECK(max_abs(l.m - r.m) <= 1e-12 * std::max(1.0, max_abs(l.m)));
  }
  SUBCASE("mismatched energies") {
    CHECK_THROWS_AS(compose(ma, cell_matrix(b, kLead, e + 1.0)), ValidationError);
  }
  SUBCASE("power by squaring") {
    auto m3 = compose(compose(ma, ma), ma);
    CHECK(max_abs(power(ma, 3).m - m3.m) < 1e-12);
    CHECK(max_abs(power(ma, 0).m - Eigen::Matrix2cd::Identity()) == 0.0);
  }
}

TEST_CASE("reversed cells transmit identically") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> e(1.0, 400.0);
  for (int i = 0; i < 100; ++i) {
    auto cell = oracle::random_cell(rng, false);
    double energy = e(rng);
    auto f = amplitudes(cell_matrix(cell, kLead, energy));
    auto b = amplitudes(cell_matrix(cell.reversed(), kLead, energy));
    CHECK(std::abs(f.t - b.t) < 1e-10 * std::max(1.0, std::abs(f.t)));
  }
}

TEST_CASE("symmetric cells have eta = delta + pi/2 mod pi") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> e(1.0, 400.0);
  for (int i = 0; i < 100; ++i) {
    auto a = amplitudes(cell_matrix(oracle::random_cell(rng, true), kLead, e(rng)));
    if (std::abs(a.r) < 1e-8) continue;
    double d = std::remainder(a.eta - a.delta - 0.5 * std::numbers::pi, std::numbers::pi);
    CHECK(std::abs(d) < 1e-9);
  }
}

TEST_CASE("amplitude examples") {
  SUBCASE("play model at the Bragg point") {
    PlayModel pm;
    CHECK(std::norm(amplitudes(pm.matrix(62.5)).t) == doctest::Approx(1.0 / (1.0 + 160.0 / 62.5)).epsilon(1e-12));
    CHECK(std::norm(amplitudes(pm.matrix(62.5)).t) == doctest::Approx(0.2809).epsilon(1e-4));
  }
  SUBCASE("hand-evaluated Kard matrix") {
    KardParams k{std::numbers::pi / 2, std::log(2.0), 0.0, Band::allowed, 0.0};
    auto m = reconstruct(k);
    CHECK(std::abs(m.m11() - cplx(0.0, -1.25)) < 1e-14);
    CHECK(std::abs(amplitudes(m).t) == doctest::Approx(0.8).epsilon(1e-14));
  }
}

TEST_CASE("phase unwrapping") {
  PhaseUnwrapper u;
  CHECK(u(3.0) == doctest::Approx(3.0));
  CHECK(u(-3.0) == doctest::Approx(-3.0 + 2 * std::numbers::pi));
  CHECK_THROWS_AS(u(0.5), NumericError);
  CHECK(nearest_branch(0.1, 10.0, 2 * std::numbers::pi) == doctest::Approx(0.1 + 4 * std::numbers::pi));
  // η of a free cell unwraps to kw along a sweep
  PhaseUnwrapper w;
  CellSpec free{{Layer{20.0, 0.0, 0.067}}, true};
  double eta = 0.0;
  for (double e = 1.0; e <= 100.0; e += 0.05) eta = w(amplitudes(cell_matrix(free, kLead, e)).eta);
  double first = lead_wavenumber(1.0, 0.067) * 20.0;
  double last = lead_wavenumber(100.0, 0.067) * 20.0;
  CHECK(eta - nearest_branch(first, 0.0, 2 * std::numbers::pi) ==
        doctest::Approx(last - first).epsilon(1e-9));
}
