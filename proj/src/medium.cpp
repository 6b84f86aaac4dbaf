#include "sltime/medium.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "sltime/error.hpp"

namespace sltime {

namespace {

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

void layer_errors(const Layer& l, const std::string& where, std::vector<std::string>& out) {
  if (!(l.width > 0.0) || !std::isfinite(l.width)) out.push_back(where + ": nonpositive width");
  if (!(l.mass_ratio > 0.0) || !std::isfinite(l.mass_ratio))
    out.push_back(where + ": nonpositive mass ratio");
  if (!std::isfinite(l.potential)) out.push_back(where + ": potential not finite");
}

}  // namespace

double CellSpec::width() const {
  return std::accumulate(layers.begin(), layers.end(), 0.0,
                         [](double acc, const Layer& l) { return acc + l.width; });
}

CellSpec CellSpec::reversed() const {
  CellSpec out = *this;
  std::reverse(out.layers.begin(), out.layers.end());
  return out;
}

std::vector<Layer> StackSpec::flattened() const {
  std::vector<Layer> out;
  if (left_arc) out.insert(out.end(), left_arc->layers.begin(), left_arc->layers.end());
  for (int i = 0; i < replicas; ++i) out.insert(out.end(), core.layers.begin(), core.layers.end());
  if (right_arc) out.insert(out.end(), right_arc->layers.begin(), right_arc->layers.end());
  return out;
}

double StackSpec::width() const {
  double w = replicas * core.width();
  if (left_arc) w += left_arc->width();
  if (right_arc) w += right_arc->width();
  return w;
}

double ValidatedStack::lead_k(double energy, const PhysConstants& c) const {
  return lead_wavenumber(energy, lead_mass, c);
}

double ValidatedStack::lead_velocity(double energy, const PhysConstants& c) const {
  return c.velocity(lead_k(energy, c), lead_mass);
}

EnergyGrid EnergyGrid::uniform(double e_min, double e_max, std::size_t count) {
  if (!(e_min < e_max)) throw ValidationError("energy grid: e_min must be below e_max");
  if (count < 2) throw ValidationError("energy grid: need at least 2 samples");
  if (!(e_min > 0.0)) throw ValidationError("energy grid: samples must lie above the lead band bottom");
  EnergyGrid g{e_min, e_max, {}};
  g.samples.resize(count);
  const double step = (e_max - e_min) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g.samples[i] = e_min + step * static_cast<double>(i);
  g.samples.back() = e_max;
  return g;
}

double signed_k2(double energy, const Layer& layer, const PhysConstants& c) {
  return layer.mass_ratio * (energy - layer.potential) / c.hbar2_over_2m0;
}

cplx local_wavenumber(double energy, const Layer& layer, const PhysConstants& c) {
  const double k2 = signed_k2(energy, layer, c);
  if (k2 >= 0.0) return {std::sqrt(k2), 0.0};
  return {0.0, std::sqrt(-k2)};
}

double lead_wavenumber(double energy, double lead_mass, const PhysConstants& c) {
  if (!(energy > 0.0)) throw ValidationError("energy must lie above the lead band bottom (E > 0)");
  return std::sqrt(lead_mass * energy / c.hbar2_over_2m0);
}

std::vector<std::string> cell_errors(const CellSpec& cell, const std::string& label) {
  std::vector<std::string> out;
  if (cell.layers.empty()) {
    out.push_back(label + ": needs at least one layer");
    return out;
  }
  for (std::size_t i = 0; i < cell.layers.size(); ++i)
    layer_errors(cell.layers[i], label + " layer " + std::to_string(i), out);
  if (cell.symmetric) {
    const auto n = cell.layers.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
      const Layer& a = cell.layers[i];
      const Layer& b = cell.layers[n - 1 - i];
      if (!close_rel(a.width, b.width, 1e-12) || !close_rel(a.potential, b.potential, 1e-12) ||
          !close_rel(a.mass_ratio, b.mass_ratio, 1e-12)) {
        out.push_back(label + ": symmetry flag contradicts layers");
        break;
      }
    }
  }
  return out;
}

namespace {

[[noreturn]] void throw_all(const std::vector<std::string>& errs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < errs.size(); ++i) os << (i ? "; " : "") << errs[i];
  throw ValidationError(os.str());
}

}  // namespace

void validate_cell(const CellSpec& cell) {
  if (auto errs = cell_errors(cell); !errs.empty()) throw_all(errs);
}

ValidatedStack validate_stack(const StackSpec& stack) {
  std::vector<std::string> errs = cell_errors(stack.core, "core");
  if (stack.replicas < 1) errs.push_back("replicas must be at least 1");
  if (stack.left_arc) {
    auto e = cell_errors(*stack.left_arc, "left_arc");
    errs.insert(errs.end(), e.begin(), e.end());
  }
  if (stack.right_arc) {
    auto e = cell_errors(*stack.right_arc, "right_arc");
    errs.insert(errs.end(), e.begin(), e.end());
  }
  if (!(stack.outside.mass_ratio > 0.0)) errs.push_back("outside: nonpositive mass ratio");
  if (stack.outside.potential != 0.0) errs.push_back("outside: lead potential must be 0 (energy reference)");
  if (!errs.empty()) throw_all(errs);
  return ValidatedStack{stack, stack.width(), stack.outside.mass_ratio};
}

}  // namespace sltime

namespace sltime {

Layer representative_outside() { return Layer{1.0, 0.0, 0.067}; }

CellSpec representative_cell() {
  const Layer well{3.0, 0.0, 0.067};
  const Layer barrier{2.5, 290.0, 0.092};
  return CellSpec{{well, barrier, well}, true};
}

StackSpec representative_stack(int replicas) {
  StackSpec s;
  s.core = representative_cell();
  s.replicas = replicas;
  s.outside = representative_outside();
  return s;
}

}  // namespace sltime
