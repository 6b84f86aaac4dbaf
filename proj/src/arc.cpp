#include "sltime/arc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sltime/error.hpp"
#include "sltime/numeric.hpp"
#include "sltime/sweep.hpp"

namespace sltime {

using std::numbers::pi;

TransferMatrix compose_with_arc(const StackSpec& stack, double energy, const PhysConstants& c) {
  validate_stack(stack);
  TransferMatrix total = power(cell_matrix(stack.core, stack.outside, energy, c), stack.replicas);
  if (stack.left_arc) total = compose(cell_matrix(*stack.left_arc, stack.outside, energy, c), total);
  if (stack.right_arc) total = compose(total, cell_matrix(*stack.right_arc, stack.outside, energy, c));
  return total;
}

double band_average_transmission(const StackSpec& stack, const BandInterval& band, int samples,
                                 const PhysConstants& c) {
  if (samples < 1) throw ValidationError("band_average_transmission: need at least one sample");
  std::vector<double> t2(static_cast<std::size_t>(samples));
  parallel::for_each_index(t2.size(), [&](std::size_t i) {
    const double e = band.lo + (static_cast<double>(i) + 0.5) * band.width() / samples;
    t2[i] = std::norm(1.0 / compose_with_arc(stack, e, c).m11());
  });
  double sum = 0.0;
  for (double v : t2) sum += v;
  return sum / samples;
}

double bragg_point(const CellModel& core, const BandInterval& band) {
  return numeric::bisect([&](double e) { return core.half_trace(e); }, band.lo, band.hi, 1e-12);
}

CellSpec scaled_cell(const CellSpec& core, double well_scale, double barrier_scale) {
  double vmin = std::numeric_limits<double>::infinity();
  for (const Layer& l : core.layers) vmin = std::min(vmin, l.potential);
  CellSpec out = core;
  for (Layer& l : out.layers) l.width *= (l.potential == vmin ? well_scale : barrier_scale);
  return out;
}

namespace {

struct Trial {
  double residual = std::numeric_limits<double>::infinity();
  double phi = 0.0;
  double mu = 0.0;
};

Trial evaluate(const CellSpec& core, const Layer& outside, double e, double target_mu, double ws, double bs,
               const PhysConstants& c) {
  Trial t;
  if (!(ws > 0.0 && bs > 0.0)) return t;
  const KardParams k = decompose(cell_matrix(scaled_cell(core, ws, bs), outside, e, c));
  if (k.band != Band::allowed) return t;
  t.phi = k.phi;
  t.mu = k.mu;
  t.residual = std::pow(k.phi - pi / 2, 2) + std::pow(k.mu - target_mu, 2);
  return t;
}

}  // namespace

ArcDesign design_rule_of_thumb(const CellSpec& core, const Layer& outside, const BandInterval& band,
                               const PhysConstants& c) {
  const LayeredCell core_model(core, outside, c);
  ArcDesign out;
  out.target_energy = bragg_point(core_model, band);
  const KardParams kc = kard_at(core_model, out.target_energy);
  out.target_mu_a = 0.5 * kc.mu;

  // Coarse grid, evaluated in parallel and reduced in index order.
  constexpr int kWell = 120;
  constexpr int kBarrier = 80;
  auto well_at = [](int i) { return 0.025 * (i + 1); };
  auto barrier_at = [](int j) { return 0.025 * (j + 1); };
  std::vector<Trial> grid(static_cast<std::size_t>(kWell * kBarrier));
  parallel::for_each_index(grid.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / kBarrier;
    const int j = static_cast<int>(idx) % kBarrier;
    grid[idx] = evaluate(core, outside, out.target_energy, out.target_mu_a, well_at(i), barrier_at(j), c);
  });
  const auto best_it =
      std::min_element(grid.begin(), grid.end(), [](const Trial& a, const Trial& b) { return a.residual < b.residual; });
  const auto best_idx = static_cast<int>(best_it - grid.begin());
  double ws = well_at(best_idx / kBarrier);
  double bs = barrier_at(best_idx % kBarrier);
  Trial best = *best_it;

  // Compass search refinement.
  double step = 0.0125;
  while (step > 1e-12) {
    bool moved = false;
    for (auto [dw, db] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
      const Trial t = evaluate(core, outside, out.target_energy, out.target_mu_a, ws + dw * step, bs + db * step, c);
      if (t.residual < best.residual) {
        best = t;
        ws += dw * step;
        bs += db * step;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }

  if (!(best.residual <= 1e-2)) throw NumericError("no viable design (residual " + std::to_string(best.residual) + ")");
  out.arc_cell = scaled_cell(core, ws, bs);
  out.well_scale = ws;
  out.barrier_scale = bs;
  out.achieved_phi_a = best.phi;
  out.achieved_mu_a = best.mu;
  out.residual = best.residual;
  return out;
}

StackSpec with_arc(StackSpec stack, const ArcDesign& design) {
  stack.left_arc = design.arc_cell;
  stack.right_arc = design.arc_cell.reversed();
  return stack;
}

}  // namespace sltime
