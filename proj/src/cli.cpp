#include "sltime/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "sltime/arc.hpp"
#include "sltime/error.hpp"
#include "sltime/figures.hpp"
#include "sltime/playmodel.hpp"
#include "sltime/resonance.hpp"
#include "sltime/scattering.hpp"
#include "sltime/stack_io.hpp"
#include "sltime/sweep.hpp"
#include "sltime/tdse.hpp"
#include "sltime/timing.hpp"

namespace sltime {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Common {
  std::string stack_path;
  std::string output;
  std::string format = "csv";
  std::optional<double> e_min, e_max, h;
  std::size_t count = 1001;
  std::optional<int> cells;
};

struct Loaded {
  StackSpec spec;
  LayeredCell core;
  int n = 1;
};

Loaded load(const Common& c) {
  StackSpec s = load_stack(c.stack_path);
  if (c.cells) {
    if (*c.cells < 1) throw ValidationError("--N must be at least 1");
    s.replicas = *c.cells;
  }
  LayeredCell core(s.core, s.outside);
  return {s, core, s.replicas};
}

// Energy samples: explicit range if given, otherwise the first miniband of the core
// widened by `pad` of its width on both sides.
EnergyGrid energy_grid(const Common& c, const CellModel& core, double pad, double fallback_max) {
  if (c.e_min || c.e_max) {
    if (!(c.e_min && c.e_max)) throw Error(ErrorKind::usage, "--emin and --emax go together");
    return EnergyGrid::uniform(*c.e_min, *c.e_max, c.count);
  }
  BandInterval band;
  try {
    band = first_band(core, fallback_max);
  } catch (const NumericError&) {
    return EnergyGrid::uniform(0.5, fallback_max, c.count);
  }
  const double margin = pad > 0 ? pad * band.width() : -1e-3 * band.width();
  return EnergyGrid::uniform(std::max(band.lo - margin, 1e-3), band.hi + margin, c.count);
}

double step_for(const Common& c, const CellModel& core) {
  if (c.h) {
    if (!(*c.h > 0.0)) throw ValidationError("--step must be positive");
    return *c.h;
  }
  try {
    return default_step(first_band(core).width());
  } catch (const NumericError&) {
    return 1e-3;
  }
}

ConfigEcho echo(const std::string& sub, const Common& c) {
  ConfigEcho e{{"program", std::string("sltime ") + kVersion}, {"subcommand", sub}};
  if (!c.stack_path.empty()) e.push_back({"stack", c.stack_path});
  if (c.cells) e.push_back({"N", std::to_string(*c.cells)});
  if (c.e_min) e.push_back({"emin_meV", format_number(*c.e_min)});
  if (c.e_max) e.push_back({"emax_meV", format_number(*c.e_max)});
  if (sub == "kard" || sub == "transmission" || sub == "phasetime" || sub == "dwell")
    e.push_back({"count", std::to_string(c.count)});
  if (c.h) e.push_back({"h_meV", format_number(*c.h)});
  return e;
}

json config_json(const ConfigEcho& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg) j[k] = v;
  return j;
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (const auto& cell : r) {
      if (const double* d = std::get_if<double>(&cell))
        row.push_back(std::isfinite(*d) ? json(*d) : json(nullptr));
      else
        row.push_back(std::get<std::string>(cell));
    }
    rows.push_back(std::move(row));
  }
  return json{{"columns", t.columns}, {"rows", rows}};
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ValidationError("cannot write output file '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

void emit(const Common& c, std::ostream& out, const Table& t, ConfigEcho cfg, const json& summary = json::object()) {
  Sink sink(c.output, out);
  if (c.format == "json") {
    json j{{"config", config_json(cfg)}, {"summary", summary}};
    j.update(table_json(t));
    sink.stream() << j.dump(2) << '\n';
  } else {
    for (auto it = summary.begin(); it != summary.end(); ++it)
      cfg.push_back({it.key(), it.value().is_string() ? it.value().get<std::string>() : it.value().dump()});
    write_csv(sink.stream(), t, cfg);
  }
}

void emit_json(const Common& c, std::ostream& out, const ConfigEcho& cfg, const json& summary) {
  Sink sink(c.output, out);
  sink.stream() << json{{"config", config_json(cfg)}, {"summary", summary}}.dump(2) << '\n';
}

json peak_json(const PeakFit& p) {
  return json{{"m", p.m}, {"E_meV", p.energy}, {"gamma_meV", p.gamma}, {"b", p.b}, {"tau_peak_fs", p.tau_peak}};
}

json valley_json(const ValleyFit& v) {
  return json{{"p", v.p},         {"E_meV", v.energy},          {"gamma_meV", v.gamma},
              {"C", v.c},         {"D", v.d},                   {"tau_valley_fs", v.tau_valley},
              {"cosh2_mu", v.cosh2_mu}, {"edge_degraded", v.edge_degraded}};
}

// --- subcommands ---------------------------------------------------------

void cmd_kard(const Common& c, std::ostream& out) {
  auto ld = load(c);
  auto grid = energy_grid(c, ld.core, 0.0, 150.0);
  if (!c.e_min) grid = EnergyGrid::uniform(0.5, 150.0, c.count);
  auto sweep = parallel::kard_sweep(ld.core, grid);
  Table t;
  t.columns = {"E_meV", "cos_phi", "phi", "mu", "chi", "band"};
  for (const auto& s : sweep)
    t.add({s.energy, s.cos_phi, s.params.phi, s.params.mu, s.params.chi, std::string(to_string(s.params.band))});
  emit(c, out, t, echo("kard", c));
}

void cmd_transmission(const Common& c, std::ostream& out) {
  auto ld = load(c);
  auto grid = energy_grid(c, ld.core, 0.1, 300.0);
  StackModel st(ld.spec);
  Table t;
  t.columns = {"E_meV", "T_N", "env_min", "band"};
  std::vector<std::vector<Cell>> rows(grid.count());
  parallel::for_each_index(grid.count(), [&](std::size_t i) {
    const double e = grid.samples[i];
    const auto k = decompose(ld.core.matrix(e));
    const double env = k.band == Band::allowed ? 1.0 / std::pow(std::cosh(k.mu), 2) : kNaN;
    rows[i] = {e, std::norm(amplitudes(st.matrix(e)).t), env, std::string(to_string(k.band))};
  });
  for (auto& r : rows) t.add(std::move(r));
  json summary = json::object();
  try {
    auto band = first_band(ld.core);
    auto peaks = locate_extrema(ld.core, ld.n, band).peaks;
    summary["band_lo_meV"] = band.lo;
    summary["band_hi_meV"] = band.hi;
    summary["peaks"] = peaks.size();
    summary["peak_energies_meV"] = peaks;
  } catch (const NumericError&) {
  }
  emit(c, out, t, echo("transmission", c), summary);
}

void cmd_phasetime(const Common& c, std::ostream& out) {
  auto ld = load(c);
  auto grid = energy_grid(c, ld.core, 0.0, 300.0);
  const double h = step_for(c, ld.core);
  if (!c.e_min) grid = refined_grid(grid, fit_peaks(ld.core, ld.n, first_band(ld.core)));
  Table t;
  t.columns = {"E_meV", "T_N", "tau_ph_fs", "env_max_fs", "env_min_fs", "bloch_fs"};
  const bool coated = ld.spec.left_arc || ld.spec.right_arc;
  auto curve = parallel::timing_curve(ld.core, ld.n, grid, h);
  if (coated) {
    StackModel st(ld.spec);
    parallel::for_each_index(grid.count(), [&](std::size_t i) {
      const double e = grid.samples[i];
      curve[i].t2 = std::norm(amplitudes(st.matrix(e)).t);
      curve[i].tau_ph = direct_phase_time(st, 1, e, h);
    });
  }
  for (const auto& s : curve) t.add({s.energy, s.t2, s.tau_ph, s.env_max, s.env_min, s.bloch_total});
  emit(c, out, t, echo("phasetime", c));
}

void cmd_dwell(const Common& c, std::optional<double> xl, std::optional<double> xr, std::ostream& out) {
  auto ld = load(c);
  auto grid = energy_grid(c, ld.core, 0.1, 300.0);
  const double h = step_for(c, ld.core);
  if (xl.has_value() != xr.has_value()) throw Error(ErrorKind::usage, "--xl and --xr go together");
  StackModel st(ld.spec);
  Table t;
  t.columns = {"E_meV", "tau_dwell_fs", "tau_osc_fs", "tau_numeric_fs", "tau11_fs"};
  std::vector<std::vector<Cell>> rows(grid.count());
  parallel::for_each_index(grid.count(), [&](std::size_t i) {
    const double e = grid.samples[i];
    auto d = xl ? dwell_time(st, e, *xl, *xr, h) : dwell_time(st, e, h);
    rows[i] = {e, d.tau_dwell_delay, d.oscillatory_term, d.numeric_delay(), smith_matrix(st, e, h).tau11};
  });
  for (auto& r : rows) t.add(std::move(r));
  auto cfg = echo("dwell", c);
  if (xl) {
    cfg.push_back({"xl_nm", format_number(*xl)});
    cfg.push_back({"xr_nm", format_number(*xr)});
  }
  emit(c, out, t, cfg);
}

void cmd_resonances(const Common& c, std::ostream& out) {
  auto ld = load(c);
  auto band = first_band(ld.core);
  auto peaks = fit_peaks(ld.core, ld.n, band);
  auto valleys = fit_valleys(ld.core, ld.n, band);
  Table t;
  t.columns = {"kind", "index", "E_meV", "gamma_meV", "b", "C", "D", "tau_fs", "edge_degraded"};
  for (const auto& p : peaks)
    t.add({std::string("peak"), double(p.m), p.energy, p.gamma, p.b, kNaN, kNaN, p.tau_peak, std::string("false")});
  for (const auto& v : valleys)
    t.add({std::string("valley"), double(v.p), v.energy, v.gamma, kNaN, v.c, v.d, v.tau_valley,
           std::string(v.edge_degraded ? "true" : "false")});
  json summary{{"band_lo_meV", band.lo}, {"band_hi_meV", band.hi}, {"peaks", json::array()}, {"valleys", json::array()}};
  for (const auto& p : peaks) summary["peaks"].push_back(peak_json(p));
  for (const auto& v : valleys) summary["valleys"].push_back(valley_json(v));
  auto cfg = echo("resonances", c);
  if (c.format == "json")
    emit_json(c, out, cfg, summary);
  else
    emit(c, out, t, cfg);
}

void cmd_figure(const Common& c, const std::string& sub, int figure, const FigureOptions& opt, std::ostream& out) {
  Table t = sub == "playmodel" ? playmodel_figure(figure, opt) : reproduce_figure(figure, opt);
  auto cfg = echo(sub, c);
  cfg.push_back({"figure", std::to_string(figure)});
  cfg.push_back({"samples", std::to_string(opt.samples)});
  if (sub == "reproduce" && figure == 9) {
    cfg.push_back({"packets", std::to_string(opt.packets)});
    cfg.push_back({"sigma_x_nm", format_number(opt.sigma_x)});
    cfg.push_back({"dx_nm", format_number(opt.tdse.dx)});
    cfg.push_back({"dt_fs", format_number(opt.tdse.dt)});
  }
  if (sub == "reproduce" && figure >= 7) cfg.push_back({"structure", "representative GaAs/AlGaAs array (illustrative)"});
  emit(c, out, t, cfg);
}

StackSpec strip_arc(StackSpec s) {
  s.left_arc.reset();
  s.right_arc.reset();
  return s;
}

void cmd_arc_design(const Common& c, const std::string& save, std::ostream& out) {
  auto ld = load(c);
  auto band = first_band(ld.core);
  auto d = design_rule_of_thumb(ld.spec.core, ld.spec.outside, band);
  StackSpec coated = with_arc(strip_arc(ld.spec), d);
  if (!save.empty()) save_stack(coated, save);
  json summary{{"target_energy_meV", d.target_energy},
               {"achieved_phi_a", d.achieved_phi_a},
               {"achieved_mu_a", d.achieved_mu_a},
               {"target_mu_a", d.target_mu_a},
               {"well_scale", d.well_scale},
               {"barrier_scale", d.barrier_scale},
               {"residual", d.residual},
               {"band_lo_meV", band.lo},
               {"band_hi_meV", band.hi},
               {"band_average_T_without", band_average_transmission(strip_arc(ld.spec), band)},
               {"band_average_T_with", band_average_transmission(coated, band)},
               {"stack", json::parse(stack_to_json(coated))}};
  auto cfg = echo("arc design", c);
  if (!save.empty()) cfg.push_back({"save", save});
  emit_json(c, out, cfg, summary);
}

void cmd_arc_evaluate(const Common& c, std::ostream& out) {
  auto ld = load(c);
  auto band = first_band(ld.core);
  json summary{{"band_lo_meV", band.lo},
               {"band_hi_meV", band.hi},
               {"has_arc", ld.spec.left_arc.has_value() || ld.spec.right_arc.has_value()},
               {"band_average_T", band_average_transmission(ld.spec, band)},
               {"band_average_T_core_only", band_average_transmission(strip_arc(ld.spec), band)}};
  emit_json(c, out, echo("arc evaluate", c), summary);
}

struct TdseArgs {
  std::optional<double> e0;
  double sigma_x = 60.0;
  TdseSettings settings;
  std::string summary_path;
};

void cmd_tdse(const Common& c, const TdseArgs& a, std::ostream& out, std::ostream& err) {
  auto ld = load(c);
  StackModel st(ld.spec);
  BandInterval band = first_band(ld.core);
  const double e0 = a.e0.value_or(band.center());
  const double m = st.lead_mass();
  WavePacket probe{0.0, a.sigma_x, e0};
  const double outside = weight_outside(probe, m, band.lo, band.hi);
  if (outside > 0.01)
    err << "warning: " << format_number(100.0 * outside) << "% of the packet spectrum lies outside the miniband\n";
  auto run = simulate_packet(st, e0, a.sigma_x, a.settings);
  double bloch = kNaN;
  try {
    bloch = packet_bloch_time(ld.core, ld.n, band, run.packet, m);
  } catch (const Error&) {
  }
  json summary{{"E0_meV", e0},
               {"sigma_x_nm", a.sigma_x},
               {"energy_spread_meV", run.packet.energy_spread(m)},
               {"spectral_weight_outside_band", outside},
               {"x0_nm", run.packet.x0},
               {"detector_nm", run.detector},
               {"x_min_nm", run.grid.x_min},
               {"x_max_nm", run.grid.x_max},
               {"dx_nm", run.grid.dx},
               {"dt_fs", run.grid.dt},
               {"n_points", run.grid.n_points},
               {"n_steps", run.grid.n_steps},
               {"arrival_detected_fs", run.delay.arrival_detected},
               {"arrival_free_fs", run.delay.arrival_free},
               {"delay_fs", run.delay.delay},
               {"transmitted_fraction", run.delay.transmitted_fraction},
               {"bloch_time_prediction_fs", bloch},
               {"free_transit_fs", st.free_transit_time(e0)},
               {"norm_drift", run.structure.norm_drift()},
               {"energy_drift", run.structure.energy_drift()},
               {"edge_density", run.structure.edge_density}};
  for (auto& v : summary)
    if (v.is_number_float() && !std::isfinite(v.get<double>())) v = nullptr;
  auto cfg = echo("tdse", c);
  cfg.push_back({"E0_meV", format_number(e0)});
  cfg.push_back({"sigma_x_nm", format_number(a.sigma_x)});
  cfg.push_back({"dx_nm", format_number(a.settings.dx)});
  cfg.push_back({"dt_fs", format_number(a.settings.dt)});
  cfg.push_back({"detector_nm", format_number(run.detector)});
  if (!a.summary_path.empty()) {
    std::ofstream f(a.summary_path);
    if (!f) throw ValidationError("cannot write summary file '" + a.summary_path + "'");
    f << json{{"config", config_json(cfg)}, {"summary", summary}}.dump(2) << '\n';
  }
  if (c.format == "json") {
    emit_json(c, out, cfg, summary);
    return;
  }
  Table t;
  t.columns = {"t_fs", "transmitted", "centroid_nm", "free_transmitted", "free_centroid_nm"};
  const auto& s = run.structure.series;
  const auto& f = run.free.series;
  for (std::size_t i = 0; i < s.time.size(); ++i)
    t.add({s.time[i], s.transmitted[i], s.centroid[i], f.transmitted[i], f.centroid[i]});
  emit(c, out, t, cfg, json{{"delay_fs", run.delay.delay}, {"transmitted_fraction", run.delay.transmitted_fraction}});
}

void add_common(CLI::App* app, Common& c, bool needs_stack, bool sweep) {
  if (needs_stack) app->add_option("--stack", c.stack_path, "stack description (JSON)")->required();
  app->add_option("-o,--output", c.output, "output file (default stdout)");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  if (needs_stack) app->add_option("-N,--N,--cells", c.cells, "number of core cells (overrides the file)");
  if (sweep) {
    app->add_option("--emin", c.e_min, "lowest energy, meV");
    app->add_option("--emax", c.e_max, "highest energy, meV");
    app->add_option("--count", c.count, "number of energies")->check(CLI::Range(2, 10000000));
    app->add_option("--step", c.h, "finite-difference step h, meV");
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Superlattice transmission, phase time and dwell time", "sltime"};
  app.set_version_flag("--version", std::string("sltime ") + kVersion);
  app.require_subcommand(1);

  Common c;
  std::optional<double> xl, xr;
  int figure = 0;
  FigureOptions fig;
  std::string save;
  TdseArgs tdse;

  auto* kard = app.add_subcommand("kard", "Kard parameters of the core cell");
  add_common(kard, c, true, true);
  auto* trans = app.add_subcommand("transmission", "transmission of the N-cell stack");
  add_common(trans, c, true, true);
  auto* phase = app.add_subcommand("phasetime", "phase time and its envelopes");
  add_common(phase, c, true, true);
  auto* dwell = app.add_subcommand("dwell", "dwell time against Smith's delay");
  add_common(dwell, c, true, true);
  dwell->add_option("--xl", xl, "left end of the dwell region, nm");
  dwell->add_option("--xr", xr, "right end of the dwell region, nm");
  auto* res = app.add_subcommand("resonances", "resonance and valley parameters");
  add_common(res, c, true, false);
  auto* play = app.add_subcommand("playmodel", "play-model figure data");
  add_common(play, c, false, false);
  play->add_option("--figure", figure, "figure 1..6")->required()->check(CLI::Range(1, 6));
  play->add_option("--samples", fig.samples, "energies per curve")->check(CLI::Range(3, 1000000));
  auto* arc = app.add_subcommand("arc", "anti-reflection coating");
  arc->require_subcommand(1);
  auto* design = arc->add_subcommand("design", "rule-of-thumb single-cell coating");
  add_common(design, c, true, false);
  design->add_option("--save", save, "write the coated stack here");
  auto* evaluate = arc->add_subcommand("evaluate", "band-average transmission");
  add_common(evaluate, c, true, false);
  auto* td = app.add_subcommand("tdse", "wave-packet delay");
  add_common(td, c, true, false);
  td->add_option("--E0", tdse.e0, "packet central energy, meV (default band centre)");
  td->add_option("--sigma", tdse.sigma_x, "packet width, nm")->check(CLI::PositiveNumber);
  td->add_option("--dx", tdse.settings.dx, "grid step, nm")->check(CLI::PositiveNumber);
  td->add_option("--dt", tdse.settings.dt, "time step, fs")->check(CLI::PositiveNumber);
  td->add_option("--detector", tdse.settings.detector, "detector position, nm");
  td->add_option("--extra-time", tdse.settings.extra_time, "run time beyond free arrival, fs");
  td->add_option("--summary", tdse.summary_path, "write the JSON summary here");
  auto* rep = app.add_subcommand("reproduce", "figure data");
  add_common(rep, c, false, false);
  rep->add_option("--figure", figure, "figure 1..9")->required()->check(CLI::Range(1, 9));
  rep->add_option("--samples", fig.samples, "energies per curve")->check(CLI::Range(3, 1000000));
  rep->add_option("--packets", fig.packets, "wave packets for figure 9")->check(CLI::Range(0, 100));
  rep->add_option("--sigma", fig.sigma_x, "packet width for figure 9, nm")->check(CLI::PositiveNumber);
  rep->add_option("--dx", fig.tdse.dx, "grid step for figure 9, nm")->check(CLI::PositiveNumber);
  rep->add_option("--dt", fig.tdse.dt, "time step for figure 9, fs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (e.get_exit_code() == 0) return 0;
    err << "run 'sltime --help' for usage\n";
    return 2;
  }

  try {
    if (*kard) cmd_kard(c, out);
    else if (*trans) cmd_transmission(c, out);
    else if (*phase) cmd_phasetime(c, out);
    else if (*dwell) cmd_dwell(c, xl, xr, out);
    else if (*res) cmd_resonances(c, out);
    else if (*play) cmd_figure(c, "playmodel", figure, fig, out);
    else if (*design) cmd_arc_design(c, save, out);
    else if (*evaluate) cmd_arc_evaluate(c, out);
    else if (*td) cmd_tdse(c, tdse, out, err);
    else if (*rep) cmd_figure(c, "reproduce", figure, fig, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::usage: return 2;
      case ErrorKind::validation: return 3;
      case ErrorKind::numeric: return 4;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

}  // namespace sltime
