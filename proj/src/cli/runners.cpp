#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "superatom/cli.hpp"
#include "superatom/photon_channel.hpp"
#include "superatom/stochastic.hpp"
#include "superatom/superatom.hpp"

namespace superatom::cli {

namespace {

using model::SuperatomParams;
using phase_space::StatePrepSpec;

struct Context {
  const RunOptions& options;
  const ConfigDocument& doc;
  Fields top;
  std::uint64_t seed = 0;
  double tol = 0.0;
  RunResult result;

  Header header(std::vector<std::pair<std::string, std::string>> extra = {}) const {
    Header h;
    h.command = to_string(options.command);
    h.config_hash = doc.hash();
    h.seed = seed;
    h.version = SUPERATOM_VERSION;
    h.extra.emplace_back("tol", format_double(tol));
    for (auto& e : extra) h.extra.push_back(std::move(e));
    return h;
  }

  void emit(std::string name, std::string contents) { result.files.push_back({std::move(name), std::move(contents)}); }
  void note(std::string line) { result.log.push_back(std::move(line)); }
};

std::string table_csv(const Header& h, const std::vector<std::string>& names,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out = header_block(h);
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += '\n';
  }
  return out;
}

// Shared "state" block: kind plus the fields that kind uses.
StatePrepSpec read_state(Fields f) {
  StatePrepSpec s;
  const std::string kind = f.text("kind");
  s.n_max = f.integer("n_max", 20);
  if (kind == "vacuum") {
    s.kind = StatePrepSpec::Kind::vacuum;
  } else if (kind == "fock") {
    s.kind = StatePrepSpec::Kind::fock;
    s.n = f.integer("n");
  } else if (kind == "coherent") {
    s.kind = StatePrepSpec::Kind::coherent;
    s.alpha = f.complex("alpha", 0.0);
  } else if (kind == "squeezed_coherent") {
    s.kind = StatePrepSpec::Kind::squeezed_coherent;
    s.alpha = f.complex("alpha", 0.0);
    s.w = f.number("w");
  } else {
    f.fail("kind", "expected vacuum, fock, coherent or squeezed_coherent, got \"" + kind + "\"");
  }
  f.finish();
  try {
    s.validate();
  } catch (const ValidationError& e) {
    f.fail("", e.what());
  }
  return s;
}

phase_space::GridSpec read_grid(std::optional<Fields> f) {
  phase_space::GridSpec g;
  if (!f) return g;
  g.extent = f->number("extent", g.extent);
  g.points = f->integer("points", g.points);
  f->finish();
  if (!(g.extent > 0.0)) f->fail("extent", "must be positive");
  if (g.points < 2 || g.points > 4001) f->fail("points", "must be in [2, 4001]");
  return g;
}

template <class F>
void checked(Fields& f, const std::string& key, F&& body) {
  try {
    body();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    f.fail(key, e.what());
  }
}

// ---- superatom ----

void run_superatom(Context& c) {
  Fields& f = c.top;
  const long n = f.integer("n_atoms");
  const std::vector<double> ratios = f.numbers("gamma_over_omega_n");
  const long samples = f.integer("samples", 2001);
  const bool fixed_horizon = f.has("t_max");
  const double t_max = f.number("t_max", 0.0);
  auto stoch = f.child("stochastic");
  long ensemble = 0;
  double dt = 0.0;
  if (stoch) {
    ensemble = stoch->integer("ensemble_size");
    dt = stoch->number("dt");
    stoch->finish();
  }
  f.finish();

  if (n < 1 || n > 200) f.fail("n_atoms", "must be in [1, 200]");
  if (ratios.empty()) f.fail("gamma_over_omega_n", "must list at least one gamma/omega_n ratio");
  for (std::size_t i = 0; i < ratios.size(); ++i)
    if (!(ratios[i] > 0.0)) f.fail("gamma_over_omega_n[" + std::to_string(i) + "]", "must be positive");
  if (samples < 2) f.fail("samples", "must be >= 2");
  if (fixed_horizon && !(t_max > 0.0)) f.fail("t_max", "must be positive");

  std::vector<SuperatomParams> params;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    params.push_back(SuperatomParams::dimensionless(n, ratios[i]));
    if (stoch) {
      const auto m = model::build_model(params.back());
      NoiseSpec noise{ratios[i], n, c.seed, dt, ensemble};
      checked(*stoch, "", [&] { calibrate_noise(m.hamiltonian, m.jump_operators, noise); });
    }
  }

  std::vector<std::vector<std::string>> summary;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const auto& p = params[i];
    const double horizon = fixed_horizon ? t_max : model::default_horizon(p);
    const auto trace = model::simulate_absorption(p, horizon, static_cast<std::size_t>(samples), c.tol);
    // a short fixed horizon still gives a valid trace, just no fit
    std::optional<model::GammaEffFit> fit;
    std::string fit_problem;
    try {
      fit = model::fit_gamma_eff(trace.ground, n);
    } catch (const ValidationError& e) {
      fit_problem = e.what();
    }
    std::vector<Column> cols{{"t", trace.ground.times},
                             {"rho_gg", trace.ground.values},
                             {"rho_bright", trace.bright.values},
                             {"rho_dark", trace.dark.values}};
    if (stoch) {
      const auto m = model::build_model(p);
      NoiseSpec noise{p.gamma, n, c.seed, dt, ensemble};
      const auto s = stochastic_evolve(DensityMatrix::basis(m.dim(), 0), m.hamiltonian, m.jump_operators, noise,
                                       trace.ground.times);
      cols.push_back({"rho_gg_stochastic", s.ground_population.values});
      cols.push_back({"rho_gg_stochastic_stderr", s.ground_stderr});
    }
    const std::string name = "superatom_ratio" + std::to_string(i) + ".csv";
    c.emit(name, series_csv(c.header({{"n_atoms", std::to_string(n)},
                                      {"gamma_over_omega_n", format_double(ratios[i])},
                                      {"time_unit", "1/omega_n"}}),
                            cols));
    if (fit) {
      summary.push_back({format_double(ratios[i]), format_double(fit->gamma_eff), format_double(fit->gamma_eff / p.gamma),
                         to_string(fit->regime), std::to_string(fit->zero_crossings),
                         format_double(trace.ground.values.back()), format_double(fit->fit_residual), name});
      c.note("gamma/omega_n = " + format_double(ratios[i]) + ": gamma_eff = " + format_double(fit->gamma_eff) + " (" +
             to_string(fit->regime) + ")");
    } else {
      summary.push_back({format_double(ratios[i]), "nan", "nan", "unfitted", "0", format_double(trace.ground.values.back()),
                         "nan", name});
      c.note("gamma/omega_n = " + format_double(ratios[i]) + ": no gamma_eff fit (" + fit_problem + ")");
    }
  }
  c.emit("superatom_summary.csv",
         table_csv(c.header({{"n_atoms", std::to_string(n)}, {"steady_rho_gg", format_double(1.0 / (n + 1.0))}}),
                   {"gamma_over_omega_n", "gamma_eff", "gamma_eff_over_gamma", "regime", "zero_crossings",
                    "final_rho_gg", "fit_residual", "file"},
                   summary));
}

// ---- sweep ----

void run_sweep(Context& c) {
  Fields& f = c.top;
  const long n = f.integer("n_atoms", 9);
  std::vector<double> ratios;
  if (f.has("omega_n_over_gamma")) {
    ratios = f.numbers("omega_n_over_gamma");
    if (ratios.empty()) f.fail("omega_n_over_gamma", "must not be empty");
    for (std::size_t i = 0; i < ratios.size(); ++i)
      if (!(ratios[i] > 0.0)) f.fail("omega_n_over_gamma[" + std::to_string(i) + "]", "must be positive");
  }
  auto grid = f.child("grid");
  double lo = 0.05, hi = 50.0;
  long points = 30;
  if (grid) {
    lo = grid->number("lo", lo);
    hi = grid->number("hi", hi);
    points = grid->integer("points", points);
    grid->finish();
    if (f.has("omega_n_over_gamma")) f.fail("grid", "give either omega_n_over_gamma or grid, not both");
    if (!(lo > 0.0)) grid->fail("lo", "must be positive");
    if (!(hi >= lo)) grid->fail("hi", "must be >= lo");
    if (points < 1 || points > 1000) grid->fail("points", "must be in [1, 1000]");
  }
  const bool refine = f.boolean("refine_transition", true);
  model::SweepOptions opt;
  opt.tol = c.tol;
  opt.min_samples = static_cast<std::size_t>(f.integer("min_samples", static_cast<long>(opt.min_samples)));
  opt.samples_per_period = f.number("samples_per_period", opt.samples_per_period);
  f.finish();
  if (n < 1 || n > 200) f.fail("n_atoms", "must be in [1, 200]");
  if (opt.min_samples < 100) f.fail("min_samples", "must be >= 100");
  if (!(opt.samples_per_period >= 4.0)) f.fail("samples_per_period", "must be >= 4");
  if (ratios.empty()) ratios = points == 1 ? std::vector<double>{lo} : model::log_spaced(lo, hi, points);

  const SuperatomParams p = SuperatomParams::dimensionless(n, 1.0);
  const auto table = model::sweep_gamma_eff(p, ratios, opt);
  std::vector<std::pair<std::string, std::string>> extra{{"n_atoms", std::to_string(n)}};
  extra.emplace_back("transition_grid", table.transition_ratio ? format_double(*table.transition_ratio) : "none");
  if (refine && table.transition_ratio) {
    // bracket the flip by its neighbouring grid points
    double a = ratios.front(), b = ratios.back();
    std::vector<std::size_t> order(table.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return ratios[x] < ratios[y]; });
    for (std::size_t idx : order) {
      const auto& row = table.rows[idx];
      if (row.regime == model::Regime::overdamped) a = row.omega_n_over_gamma;
      if (row.regime == model::Regime::underdamped) {
        b = row.omega_n_over_gamma;
        break;
      }
    }
    const double refined = model::locate_regime_transition(p, a, b, 12, opt);
    extra.emplace_back("transition_refined", format_double(refined));
    c.note("regime transition near omega_n/gamma = " + format_double(refined));
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : table.rows)
    rows.push_back({format_double(r.omega_n_over_gamma), format_double(r.gamma_eff), format_double(r.gamma_eff_over_gamma),
                    format_double(r.gamma_eff_gamma_over_omega_n2), format_double(r.fit_residual), to_string(r.regime),
                    std::to_string(r.zero_crossings)});
  c.emit("sweep.csv", table_csv(c.header(extra),
                                {"omega_n_over_gamma", "gamma_eff", "gamma_eff_over_gamma",
                                 "gamma_eff_gamma_over_omega_n2", "fit_residual", "regime", "zero_crossings"},
                                rows));
}

// ---- subtract ----

void run_subtract(Context& c) {
  Fields& f = c.top;
  auto state_fields = f.child("state");
  if (!state_fields) f.fail("state", "required field is missing");
  const StatePrepSpec spec = read_state(*state_fields);
  const std::vector<long> ks = f.integers("k");
  const auto grid = read_grid(f.child("grid"));
  f.finish();
  if (ks.empty()) f.fail("k", "must list at least one subtraction count");
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] < 1 || ks[i] > 50) f.fail("k[" + std::to_string(i) + "]", "must be in [1, 50]");

  std::optional<photon::FockField> input;
  checked(f, "state", [&] { input = phase_space::prepare(spec); });
  const auto axis = grid.axis();
  phase_space::WignerGrid wig;
  checked(f, "grid", [&] { wig = phase_space::wigner(*input, axis, axis); });
  c.emit("subtract_input_rho.txt", density_matrix_text(c.header({{"state", "input"}}), input->rho().matrix()));
  c.emit("subtract_input_wigner.txt", wigner_grid_text(c.header({{"state", "input"}}), wig));

  std::vector<std::vector<std::string>> summary, pvac;
  for (long k : ks) {
    std::optional<photon::MultiSubtraction> out;
    checked(f, "k", [&] { out = photon::multi_subtract(*input, k); });
    phase_space::WignerGrid w;
    checked(f, "grid", [&] { w = phase_space::wigner(out->output, axis, axis); });
    const std::string tag = "k" + std::to_string(k);
    const Header h = c.header({{"state", "output after " + std::to_string(k) + " subtraction(s)"}});
    c.emit("subtract_" + tag + "_rho.txt", density_matrix_text(h, out->output.rho().matrix()));
    c.emit("subtract_" + tag + "_wigner.txt", wigner_grid_text(h, w));
    summary.push_back({std::to_string(k), format_double(out->probability), format_double(out->output.mean_photon_number()),
                       format_double(phase_space::negativity_volume(w)),
                       format_double(phase_space::wigner_at(out->output, 0.0, 0.0)), format_double(w.integral)});
    for (std::size_t j = 0; j < out->p_vac_steps.size(); ++j)
      pvac.push_back({std::to_string(k), std::to_string(j + 1), format_double(out->p_vac_steps[j])});
  }
  c.emit("subtract_summary.csv", table_csv(c.header(), {"k", "probability", "mean_photon_number", "negativity_volume",
                                                        "w_origin", "grid_integral"},
                                           summary));
  c.emit("subtract_pvac.csv", table_csv(c.header(), {"k", "cell", "p_vac"}, pvac));
}

// ---- cascade ----

void run_cascade(Context& c) {
  Fields& f = c.top;
  auto state_fields = f.child("state");
  if (!state_fields) f.fail("state", "required field is missing");
  const StatePrepSpec spec = read_state(*state_fields);
  const long k = f.integer("k");
  auto finite = f.child("finite_time");
  double gamma_eff = 0.0, t_cell = 0.0;
  if (finite) {
    gamma_eff = finite->number("gamma_eff");
    t_cell = finite->number("t_cell");
    finite->finish();
    if (!(gamma_eff > 0.0)) finite->fail("gamma_eff", "must be positive");
    if (!(t_cell > 0.0)) finite->fail("t_cell", "must be positive");
  }
  f.finish();
  if (k < 1 || k > 50) f.fail("k", "must be in [1, 50]");

  std::optional<photon::FockField> input;
  checked(f, "state", [&] { input = phase_space::prepare(spec); });
  const auto result = finite ? photon::cascade_finite_time(*input, k, gamma_eff, t_cell, std::min(c.tol, 1e-10))
                             : photon::cascade(*input, k);
  std::vector<double> fired(result.fired_distribution.size());
  for (std::size_t j = 0; j < fired.size(); ++j) fired[j] = static_cast<double>(j);
  const std::string mode = finite ? "finite_time" : "asymptotic";
  c.emit("cascade_distribution.csv",
         series_csv(c.header({{"k", std::to_string(k)}, {"mode", mode}}),
                    {{"fired", fired}, {"probability", result.fired_distribution}}));
  for (const auto& [j, field] : result.conditional_outputs)
    c.emit("cascade_fired" + std::to_string(j) + "_rho.txt",
           density_matrix_text(c.header({{"fired", std::to_string(j)}, {"mode", mode}}), field.rho().matrix()));
}

// ---- params ----

void run_params(Context& c) {
  Fields& f = c.top;
  SuperatomParams p;
  p.n_atoms = f.integer("n_atoms");
  p.omega_p = f.number("omega_p");
  p.omega_c = f.number("omega_c");
  p.delta_c = f.number("delta_c");
  p.gamma = f.number("gamma", 0.0);
  if (f.has("c6")) p.c6 = f.number("c6");
  if (f.has("dipole")) p.dipole = f.number("dipole");
  if (f.has("mode_area")) p.mode_area = f.number("mode_area");
  if (f.has("omega_probe")) p.omega_probe = f.number("omega_probe");
  const std::string units = f.text("units", "gaussian");
  f.finish();
  if (units != "gaussian" && units != "natural") f.fail("units", "expected gaussian or natural");
  checked(f, "", [&] { p.validate(); });

  const Header h = c.header({{"units", units}});
  std::string out = header_block(h);
  out += "quantity,value,status\n";
  auto row = [&](const std::string& name, const std::function<double()>& compute, const std::function<std::string(double)>& flag) {
    try {
      const double v = compute();
      out += name + "," + format_double(v) + "," + flag(v) + "\n";
    } catch (const ValidationError& e) {
      out += name + ",,unavailable (" + std::string(e.what()) + ")\n";
    }
  };
  auto ok = [](double) { return std::string("ok"); };
  row("omega", [&] { return model::two_photon_rabi(p); }, ok);
  row("omega_n", [&] { return model::collective_rabi(p); }, ok);
  row("r_blockade", [&] { return model::blockade_radius(p); }, ok);
  row("kappa", [&] { return model::optical_thickness(p, units == "natural" ? model::Units::natural : model::Units::gaussian); },
      [](double v) { return std::string(v > 1.0 ? "ok (kappa > 1)" : "violated (kappa <= 1)"); });
  row("delta_c_over_omega_c", [&] { return std::abs(p.delta_c / p.omega_c); },
      [](double v) { return std::string(v >= 10.0 ? "ok (delta_c >> omega_c)" : "violated (delta_c >> omega_c needed)"); });
  c.result.report = out;
}

}  // namespace

RunResult run(const RunOptions& options, const ConfigDocument& config) {
  Context c{options, config, Fields(config, config.root(), ""), 0, 0.0, {}};
  if (c.top.has("command")) {
    const std::string cmd = c.top.text("command");
    if (cmd != to_string(options.command))
      c.top.fail("command", "config is for '" + cmd + "' but '" + to_string(options.command) + "' was requested");
  }
  // flags win over the config, but config values are still type-checked
  const std::uint64_t config_seed = c.top.unsigned_integer("seed", 0);
  c.seed = options.seed ? *options.seed : config_seed;
  const double default_tol = options.command == Command::subtract || options.command == Command::cascade ? 1e-10 : 1e-8;
  const double config_tol = c.top.number("tol", default_tol);
  c.tol = options.tol ? *options.tol : config_tol;
  if (!(c.tol > 0.0) || c.tol > 1e-2) c.top.fail("tol", "must be in (0, 1e-2]");

  switch (options.command) {
    case Command::superatom: run_superatom(c); break;
    case Command::sweep: run_sweep(c); break;
    case Command::subtract: run_subtract(c); break;
    case Command::cascade: run_cascade(c); break;
    case Command::params: run_params(c); break;
  }
  return std::move(c.result);
}

int main(int argc, char** argv) {
  CLI::App app{"superatom: Rydberg superatom absorber and photon-subtraction simulations"};
  app.set_version_flag("--version", std::string(SUPERATOM_VERSION));
  RunOptions opt;
  std::string config_path;
  std::uint64_t seed = 0;
  double tol = 0.0;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", opt.out_dir, "output directory (created if missing)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed, overrides the config");
  auto* tol_opt = app.add_option("--tol", tol, "integrator tolerance, overrides the config");
  app.add_flag("--quiet", opt.quiet, "suppress progress notes");
  app.require_subcommand(1, 1);
  for (const char* name : {"superatom", "sweep", "subtract", "cascade", "params"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  opt.command = *parse_command(app.get_subcommands().front()->get_name());
  opt.config_path = config_path;
  if (seed_opt->count()) opt.seed = seed;
  if (tol_opt->count()) opt.tol = tol;

  try {
    const ConfigDocument doc = ConfigDocument::load(opt.config_path);
    RunResult r = run(opt, doc);
    if (!r.files.empty()) write_outputs(opt.out_dir, r.files);
    if (!r.report.empty()) std::cout << r.report;
    if (!opt.quiet) {
      for (const auto& line : r.log) std::cerr << line << "\n";
      for (const auto& f : r.files) std::cerr << "wrote " << (opt.out_dir / f.name).string() << "\n";
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace superatom::cli
