#include "sltime/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#if defined(__SSE__) || defined(_M_X64)
#include <xmmintrin.h>
#define SLTIME_HAVE_MXCSR 1
#endif

#include "sltime/detail/parallel_for.hpp"
#include "sltime/error.hpp"

namespace sltime {

double WavePacket::k0(double lead_mass, const PhysConstants& c) const {
  return lead_wavenumber(e0, lead_mass, c);
}

double WavePacket::energy_spread(double lead_mass, const PhysConstants& c) const {
  return c.hbar * c.velocity(k0(lead_mass, c), lead_mass) * sigma_k();
}

namespace {

// The implicit solve spreads a packet's exponentially small tails over the whole grid,
// and subnormal arithmetic there slows a step by more than an order of magnitude.
// Flush them to zero for the duration of a step.
class FlushDenormals {
 public:
#ifdef SLTIME_HAVE_MXCSR
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }  // FTZ | DAZ
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

// Average of a piecewise-constant layer property over [a, b].
template <class Get>
double layer_average(const StackModel& stack, double a, double b, Get get) {
  const auto& layers = stack.layers();
  const auto& edges = stack.interfaces();
  const Layer& out = stack.stack().spec.outside;
  double acc = 0.0;
  double covered = 0.0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    double lo = std::max(a, edges[i]);
    double hi = std::min(b, edges[i + 1]);
    if (hi > lo) {
      acc += (hi - lo) * get(layers[i]);
      covered += hi - lo;
    }
  }
  acc += (b - a - covered) * get(out);
  return acc / (b - a);
}

}  // namespace

Profile sample_profile(const StackModel& stack, const Grid1D& grid) {
  Profile p;
  p.potential.resize(grid.n_points);
  p.inverse_mass.resize(grid.n_points - 1);
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    double x = grid.x(j);
    p.potential[j] = layer_average(stack, x - 0.5 * grid.dx, x + 0.5 * grid.dx,
                                   [](const Layer& l) { return l.potential; });
    if (j + 1 < grid.n_points)
      p.inverse_mass[j] = layer_average(stack, x, x + grid.dx, [](const Layer& l) { return 1.0 / l.mass_ratio; });
  }
  return p;
}

Profile free_profile(double lead_mass, const Grid1D& grid) {
  Profile p;
  p.potential.assign(grid.n_points, 0.0);
  p.inverse_mass.assign(grid.n_points - 1, 1.0 / lead_mass);
  return p;
}

CrankNicolson::CrankNicolson(const Profile& profile, const Grid1D& grid, const PhysConstants& c)
    : grid_(grid), alpha_(0.0, grid.dt / (2.0 * c.hbar)) {
  const std::size_t n = grid.n_points;
  if (n < 3 || profile.potential.size() != n || profile.inverse_mass.size() != n - 1)
    throw ValidationError("profile does not match the grid");
  const double k = c.hbar2_over_2m0 / (grid.dx * grid.dx);
  diag_.resize(n);
  off_.resize(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    // ψ vanishes beyond both ends; the missing half-point takes the neighbouring value
    double wl = j > 0 ? profile.inverse_mass[j - 1] : profile.inverse_mass[0];
    double wr = j + 1 < n ? profile.inverse_mass[j] : profile.inverse_mass[n - 2];
    diag_[j] = profile.potential[j] + k * (wl + wr);
    if (j + 1 < n) off_[j] = -k * profile.inverse_mass[j];
  }
  c_prime_.resize(n);
  inv_denom_.resize(n);
  cplx denom = 1.0 + alpha_ * diag_[0];
  inv_denom_[0] = 1.0 / denom;
  c_prime_[0] = alpha_ * off_[0] * inv_denom_[0];
  for (std::size_t j = 1; j < n; ++j) {
    cplx b_prev = alpha_ * off_[j - 1];
    denom = 1.0 + alpha_ * diag_[j] - b_prev * c_prime_[j - 1];
    inv_denom_[j] = 1.0 / denom;
    c_prime_[j] = j + 1 < n ? alpha_ * off_[j] * inv_denom_[j] : cplx(0.0);
  }
}

std::vector<cplx> CrankNicolson::apply_hamiltonian(std::span<const cplx> psi) const {
  const std::size_t n = psi.size();
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx v = diag_[j] * psi[j];
    if (j > 0) v += off_[j - 1] * psi[j - 1];
    if (j + 1 < n) v += off_[j] * psi[j + 1];
    out[j] = v;
  }
  return out;
}

void CrankNicolson::step(std::vector<cplx>& psi) const {
  FlushDenormals guard;
  const std::size_t n = psi.size();
  // right-hand side (1 − αH)ψ, then forward sweep in place
  cplx prev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cplx h = diag_[j] * psi[j];
    if (j > 0) h += off_[j - 1] * prev;
    if (j + 1 < n) h += off_[j] * psi[j + 1];
    prev = psi[j];
    cplx r = psi[j] - alpha_ * h;
    if (j > 0) r -= alpha_ * off_[j - 1] * psi[j - 1];
    psi[j] = r * inv_denom_[j];
  }
  for (std::size_t j = n - 1; j-- > 0;) psi[j] -= c_prime_[j] * psi[j + 1];
}

double CrankNicolson::norm(std::span<const cplx> psi) const {
  double s = 0.0;
  for (const auto& v : psi) s += std::norm(v);
  return s * grid_.dx;
}

double CrankNicolson::energy(std::span<const cplx> psi) const {
  auto h = apply_hamiltonian(psi);
  cplx s = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) s += std::conj(psi[j]) * h[j];
  return s.real() * grid_.dx / norm(psi);
}

std::vector<cplx> gaussian_packet(const WavePacket& packet, double lead_mass, const Grid1D& grid,
                                  const PhysConstants& c) {
  const double k0 = packet.k0(lead_mass, c);
  const double s = packet.sigma_x;
  std::vector<cplx> psi(grid.n_points);
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    double u = grid.x(j) - packet.x0;
    psi[j] = std::exp(-u * u / (4.0 * s * s)) * std::polar(1.0, k0 * u);
    sum += std::norm(psi[j]);
  }
  const double scale = 1.0 / std::sqrt(sum * grid.dx);
  for (auto& v : psi) v *= scale;
  return psi;
}

double default_launch(const StackModel& stack, const WavePacket& packet) {
  return stack.left_edge() - 6.0 * packet.sigma_x;
}

double default_detector(const StackModel& stack, const WavePacket& packet) {
  return stack.right_edge() + 6.0 * packet.sigma_x;
}

Grid1D make_grid(const StackModel& stack, const WavePacket& packet, double dx, double dt, double extra_time) {
  if (!(dx > 0.0) || !(dt > 0.0) || !(packet.sigma_x > 0.0))
    throw ValidationError("grid steps and packet width must be positive");
  const auto& c = stack.constants();
  const double m = stack.lead_mass();
  const double v0 = c.velocity(packet.k0(m, c), m);
  const double sig = packet.sigma_x;
  const double x0 = default_launch(stack, packet);
  const double xd = default_detector(stack, packet);
  const double t_run = (xd - x0) / v0 + std::max(extra_time, 0.0);
  const double travel = v0 * t_run;
  const double spread = std::hypot(1.0, c.hbar2_over_2m0 * t_run / (m * c.hbar * sig * sig));
  const double margin = 10.0 * sig * spread;

  Grid1D g;
  g.dx = dx;
  g.dt = dt;
  g.x_min = stack.left_edge() - std::max(travel - 6.0 * sig, 0.0) - margin;
  g.x_min = std::min(g.x_min, x0 - margin);
  double x_max = std::max(x0 + travel, xd) + margin;
  g.n_points = static_cast<std::size_t>(std::ceil((x_max - g.x_min) / dx)) + 1;
  g.x_max = g.x(g.n_points - 1);
  g.n_steps = static_cast<int>(std::ceil(t_run / dt));
  return g;
}

EvolveResult evolve(const Profile& profile, const Grid1D& grid, const WavePacket& packet, double lead_mass,
                    double x_split, int record_every, const PhysConstants& c) {
  if (record_every < 1) throw ValidationError("record interval must be at least one step");
  CrankNicolson cn(profile, grid, c);
  auto psi = gaussian_packet(packet, lead_mass, grid, c);

  EvolveResult res;
  res.x_split = x_split;
  res.norm_initial = cn.norm(psi);
  res.energy_initial = cn.energy(psi);
  const std::size_t n = grid.n_points;
  const std::size_t j_split =
      x_split <= grid.x_min ? 0 : std::min(n, static_cast<std::size_t>(std::ceil((x_split - grid.x_min) / grid.dx)));

  auto record = [&](double t) {
    double w = 0.0, wx = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double d = std::norm(psi[j]);
      total += d;
      if (j >= j_split) {
        w += d;
        wx += d * grid.x(j);
      }
    }
    double edge = 0.0;
    for (std::size_t j = 0; j < std::min<std::size_t>(5, n); ++j) edge += std::norm(psi[j]) + std::norm(psi[n - 1 - j]);
    res.edge_density = std::max(res.edge_density, edge / total);
    res.series.time.push_back(t);
    res.series.transmitted.push_back(w * grid.dx);
    res.series.centroid.push_back(w > 1e-12 * total ? wx / w : std::nan(""));
    return total * grid.dx;
  };

  double last_norm = record(0.0);
  for (int s = 1; s <= grid.n_steps; ++s) {
    cn.step(psi);
    if (s % record_every == 0 || s == grid.n_steps) {
      double nrm = record(s * grid.dt);
      int since = s % record_every == 0 ? record_every : s % record_every;
      double per_step = std::abs(nrm - last_norm) / since;
      res.max_step_norm_change = std::max(res.max_step_norm_change, per_step);
      if (!std::isfinite(nrm) || per_step > 1e-6)
        throw NumericError("propagation unstable: norm changed by " + std::to_string(per_step) + " in one step");
      last_norm = nrm;
    }
  }
  res.norm_final = cn.norm(psi);
  res.energy_final = cn.energy(psi);
  res.final_state = std::move(psi);
  return res;
}

std::optional<double> crossing_time(const TimeSeries& series, double x_d) {
  for (std::size_t i = 1; i < series.time.size(); ++i) {
    double a = series.centroid[i - 1], b = series.centroid[i];
    if (std::isnan(a) || std::isnan(b)) continue;
    if (a < x_d && b >= x_d) {
      double f = (x_d - a) / (b - a);
      return series.time[i - 1] + f * (series.time[i] - series.time[i - 1]);
    }
  }
  return std::nullopt;
}

DelayResult packet_delay(const TimeSeries& series, double x_d, const TimeSeries& free_reference) {
  DelayResult d;
  d.transmitted_fraction = series.transmitted.empty() ? 0.0 : series.transmitted.back();
  if (d.transmitted_fraction < 1e-4) throw NumericError("no transmission");
  auto hit = crossing_time(series, x_d);
  auto ref = crossing_time(free_reference, x_d);
  if (!hit) throw NumericError("transmitted packet never reached the detector; extend the run");
  if (!ref) throw NumericError("free packet never reached the detector; extend the run");
  d.arrival_detected = *hit;
  d.arrival_free = *ref;
  d.delay = *hit - *ref;
  return d;
}

double spectral_weight(const WavePacket& packet, double lead_mass, double energy, const PhysConstants& c) {
  if (!(energy > 0.0)) return 0.0;
  const double k = lead_wavenumber(energy, lead_mass, c);
  const double sk = packet.sigma_k();
  const double u = (k - packet.k0(lead_mass, c)) / sk;
  const double wk = std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * sk);
  const double de_dk = 2.0 * c.hbar2_over_2m0 * k / lead_mass;
  return wk / de_dk;
}

SpectralAverage spectral_average(std::span<const double> energies, std::span<const double> values,
                                 const WavePacket& packet, double lead_mass, std::span<const double> extra_weight,
                                 const PhysConstants& c) {
  if (energies.size() != values.size() || energies.size() < 2)
    throw ValidationError("spectral average needs matching energy and value samples");
  if (!extra_weight.empty() && extra_weight.size() != energies.size())
    throw ValidationError("weight samples do not match the energies");
  double num = 0.0, den = 0.0, mass = 0.0;
  double prev_w = 0.0, prev_wx = 0.0, prev_f = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    double w = spectral_weight(packet, lead_mass, energies[i], c);
    double wx = w * (extra_weight.empty() ? 1.0 : extra_weight[i]);
    double f = values[i];
    if (i > 0) {
      double h = energies[i] - energies[i - 1];
      mass += 0.5 * h * (w + prev_w);
      den += 0.5 * h * (wx + prev_wx);
      num += 0.5 * h * (wx * f + prev_wx * prev_f);
    }
    prev_w = w;
    prev_wx = wx;
    prev_f = f;
  }
  if (!(den > 0.0)) throw NumericError("packet spectrum does not overlap the sampled energies");
  return {num / den, std::max(0.0, 1.0 - mass)};
}

SpectralAverage spectral_average(const std::function<double(double)>& f, const WavePacket& packet, double lead_mass,
                                 int samples, const PhysConstants& c) {
  if (samples < 3) throw ValidationError("spectral average needs at least three samples");
  const double k0 = packet.k0(lead_mass, c);
  const double sk = packet.sigma_k();
  const double lo = std::max(k0 - 6.0 * sk, 1e-6 * k0);
  const double hi = k0 + 6.0 * sk;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < samples; ++i) {
    double k = lo + (hi - lo) * i / (samples - 1);
    double u = (k - k0) / sk;
    double w = std::exp(-0.5 * u * u) * ((i == 0 || i == samples - 1) ? 0.5 : 1.0);
    double e = c.hbar2_over_2m0 * k * k / lead_mass;
    num += w * f(e);
    den += w;
  }
  return {num / den, 0.0};
}

PacketRun simulate_packet(const StackModel& stack, double e0, double sigma_x, const TdseSettings& settings) {
  PacketRun run;
  run.packet = WavePacket{0.0, sigma_x, e0};
  run.packet.x0 = default_launch(stack, run.packet);
  run.detector = settings.detector.value_or(default_detector(stack, run.packet));
  if (run.detector <= stack.right_edge()) throw ValidationError("detector must lie to the right of the stack");
  run.grid = make_grid(stack, run.packet, settings.dx, settings.dt, settings.extra_time);
  if (run.detector >= run.grid.x_max - 10.0 * sigma_x) throw ValidationError("detector too close to the domain end");
  const double m = stack.lead_mass();
  const auto& c = stack.constants();
  run.structure = evolve(sample_profile(stack, run.grid), run.grid, run.packet, m, stack.right_edge(),
                         settings.record_every, c);
  run.free = evolve(free_profile(m, run.grid), run.grid, run.packet, m, stack.right_edge(), settings.record_every, c);
  run.delay = packet_delay(run.structure.series, run.detector, run.free.series);
  return run;
}

std::vector<PacketRun> simulate_packets(const StackModel& stack, std::span<const double> energies, double sigma_x,
                                        const TdseSettings& settings) {
  std::vector<PacketRun> runs(energies.size());
  parallel::for_each_index(energies.size(),
                           [&](std::size_t i) { runs[i] = simulate_packet(stack, energies[i], sigma_x, settings); });
  return runs;
}

double weight_outside(const WavePacket& packet, double lead_mass, double e_lo, double e_hi, const PhysConstants& c) {
  const double k0 = packet.k0(lead_mass, c);
  const double sk = packet.sigma_k();
  auto cdf = [&](double e) {
    if (!(e > 0.0)) return 0.5 * std::erfc(k0 / (std::sqrt(2.0) * sk));
    double k = lead_wavenumber(e, lead_mass, c);
    return 0.5 * std::erfc(-(k - k0) / (std::sqrt(2.0) * sk));
  };
  // weight on k < 0 never reaches the structure and is ignored
  const double total = 1.0 - cdf(0.0);
  return std::clamp(1.0 - (cdf(e_hi) - cdf(e_lo)) / total, 0.0, 1.0);
}

}  // namespace sltime
