#include "damplab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "damplab/evolution.hpp"
#include "damplab/multiplier_lab.hpp"
#include "damplab/parallel.hpp"
#include "damplab/rng.hpp"
#include "damplab/stationary.hpp"
#include "damplab/svg_plot.hpp"
#include "json.hpp"

#ifndef DAMPLAB_VERSION
#define DAMPLAB_VERSION "0.0.0"
#endif

namespace damplab {

using nlohmann::ordered_json;

std::string tool_version() { return DAMPLAB_VERSION; }

namespace {

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

ordered_json fit_json(const FitResult& f) {
  return {{"exponent", f.exponent},
          {"prefactor", f.prefactor},
          {"window", {f.window_min, f.window_max}},
          {"max_residual", f.max_residual},
          {"points", f.points}};
}

std::string band_text(const std::pair<double, double>& b) {
  std::ostringstream o;
  o << "[" << b.first << ", " << b.second << "]";
  return o.str();
}

// ---------------------------------------------------------------- resolvent

struct NormRow {
  std::string group;
  double q_nominal = 0.0;
  double q = 0.0;
  std::optional<long> k;
  double E = 0.0;
  std::size_t n = 0;
  double norm = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::string status = "ok";
};

struct NormTask {
  std::string group;
  double q;
  std::optional<double> E;  // empty: all-modes
};

std::string E_group(const EPolicy& p, double v) {
  std::ostringstream o;
  o << (p.mode == EPolicy::Mode::Fixed ? "E=" : "E=q^2*") << v;
  return o.str();
}

void run_norm_sweep(const ExperimentConfig& c, const RunOptions& opt, const std::filesystem::path& dir,
                    RunManifest& m) {
  const DampingProfile profile = c.profile();
  std::vector<NormTask> tasks;
  std::vector<std::string> groups;
  if (c.E.mode == EPolicy::Mode::AllModes) {
    groups.push_back("all-modes");
    for (double q : c.q) tasks.push_back({groups[0], q, std::nullopt});
  } else {
    for (double v : c.E.values) {
      groups.push_back(E_group(c.E, v));
      for (double q : c.q) {
        tasks.push_back({groups.back(), q, c.E.mode == EPolicy::Mode::Fixed ? v : v * q * q});
      }
    }
  }

  ResolventOptions ro;
  ro.tol = c.tol;
  ro.max_iter = c.max_iter;
  ro.seed = c.seed;
  ro.jobs = 1;

  std::vector<NormRow> rows(tasks.size());
  parallel_for(tasks.size(), opt.jobs, [&](std::size_t i) {
    const NormTask& t = tasks[i];
    NormRow& r = rows[i];
    r.group = t.group;
    r.q_nominal = r.q = t.q;
    r.n = c.nodes_for(t.q);
    try {
      const CircleGrid grid(r.n, c.scheme);
      ResolventPoint p;
      if (!t.E) {
        if (c.q_sampling == "resonant") {
          const ResonantPeak peak = resonant_peak_2d(t.q, profile, grid, c.E_cut, ro);
          p = peak.at_peak.best;
          r.q = peak.q_peak;
        } else {
          p = resolvent_norm_2d(t.q, profile, grid, c.E_cut, ro).best;
        }
      } else {
        p = resolvent_norm_1d(t.q, *t.E, profile, grid, ro);
      }
      r.k = p.k;
      r.E = p.E;
      r.norm = p.norm;
      r.iterations = p.iterations;
      r.residual = p.residual;
    } catch (const std::exception& e) {
      r.E = t.E.value_or(0.0);
      r.status = "error: " + sanitize(e.what());
    }
  });

  std::ostringstream csv;
  csv << "group,q_nominal,q,k,E,n,scheme,norm,iterations,residual,status\n";
  for (const auto& r : rows) {
    csv << r.group << ',' << csv_double(r.q_nominal) << ',' << csv_double(r.q) << ','
        << (r.k ? std::to_string(*r.k) : "") << ',' << csv_double(r.E) << ',' << r.n << ','
        << to_string(c.scheme) << ',' << csv_double(r.norm) << ',' << r.iterations << ','
        << csv_double(r.residual) << ',' << r.status << '\n';
  }
  write_text(dir, "points.csv", csv.str());

  const std::size_t failed = static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const NormRow& r) { return r.status != "ok"; }));
  m.checks.push_back({"all points solved", failed == 0, std::to_string(failed) + " failed of " + std::to_string(rows.size())});

  const double ref = 1.0 / (c.beta + 2.0);
  const double uniform_bound = c.expect.trend_max.value_or(0.05);
  ordered_json fits = ordered_json::array();
  PlotSpec plot;
  plot.title = c.kind == ExperimentKind::EsmallProbe ? "resolvent norm at low E" : "resolvent norm against q";
  plot.x_label = "q";
  plot.y_label = "resolvent norm";
  if (c.kind == ExperimentKind::ResolventSweep) {
    plot.reference_slope = ref;
    plot.reference_label = resolvent_slope_label(c.beta);
  }
  for (const auto& g : groups) {
    std::vector<double> qs, ns, ratio;
    bool ratio_ok = true;
    for (const auto& r : rows) {
      if (r.group != g || r.status != "ok") continue;
      qs.push_back(r.q);
      ns.push_back(r.norm);
      if (r.E > 0.0) ratio.push_back(r.norm * r.norm * r.E / std::pow(r.q, 2.0 * ref));
      else ratio_ok = false;
    }
    ordered_json entry{{"group", g}};
    PlotSeries series{g, qs, ns, std::nullopt};
    if (qs.size() >= 2) {
      try {
        const FitResult f = fit_power_law(qs, ns);
        entry["fit"] = fit_json(f);
        series.fit = f;
        if (c.kind == ExperimentKind::EsmallProbe) entry["uniform"] = std::abs(f.exponent) <= uniform_bound;
        if (ratio_ok && ratio.size() == qs.size()) {
          entry["estimate_ratio_slope"] = fit_power_law(qs, ratio).exponent;
        }
        if (c.expect.slope) {
          const bool ok = f.exponent >= c.expect.slope->first && f.exponent <= c.expect.slope->second;
          std::ostringstream d;
          d << "slope " << f.exponent << " vs " << band_text(*c.expect.slope);
          m.checks.push_back({"slope in band (" + g + ")", ok, d.str()});
        }
      } catch (const std::exception& e) {
        entry["error"] = e.what();
        if (c.expect.slope) m.checks.push_back({"slope in band (" + g + ")", false, e.what()});
      }
    } else if (c.expect.slope) {
      m.checks.push_back({"slope in band (" + g + ")", false, "fewer than two points"});
    }
    fits.push_back(entry);
    plot.series.push_back(std::move(series));
  }
  ordered_json fj{{"kind", to_string(c.kind)},
                  {"beta", c.beta},
                  {"q_sampling", c.q_sampling},
                  {"reference_slope", ref},
                  {"reference_label", resolvent_slope_label(c.beta)},
                  {"fits", fits}};
  write_text(dir, "fit.json", fj.dump(2) + "\n");
  try {
    write_text(dir, "norm_vs_q.svg", emit_plot(plot));
  } catch (const std::invalid_argument& e) {
    m.checks.push_back({"plot", false, e.what()});
  }
}

// ---------------------------------------------------------------- decay

struct Member {
  long k = 0;
  InitialData data;
  DecaySeries series;
  std::optional<DecayFit> fit;
  std::optional<DecayFit> sup;
  double norm = 0.0;
  double literal_norm = 0.0;
  std::string status = "ok";
};

void run_decay_experiment(const ExperimentConfig& c, const RunOptions& opt, const std::filesystem::path& dir,
                          RunManifest& m) {
  const DampingProfile profile = c.profile();
  const std::size_t n = c.nodes_for(1.0);
  const CircleGrid grid(n, DiffScheme::Fourier);
  const rvec W = sample_on_grid(profile, grid);
  const double alpha_ref = decay_rate(c.beta);

  std::vector<Member> members(c.data.k.size());
  parallel_for(members.size(), opt.jobs, [&](std::size_t i) {
    Member& mb = members[i];
    mb.k = c.data.k[i];
    try {
      mb.data = c.data.family == "plane-wave" ? plane_wave(grid, c.data.m, mb.k)
                                               : gaussian_strip(grid, mb.k, c.data.width);
      mb.norm = data_norm(mb.data);
      mb.literal_norm = literal_data_norm(mb.data, W);
      mb.series = run_decay(W, mb.data, c.T, c.dt, c.sample_stride, 1);
      mb.fit = fit_decay(mb.series, c.window.first, c.window.second, alpha_ref, mb.norm);
      mb.sup = fit_decay(mb.series, c.sup_window.first, c.sup_window.second, alpha_ref, mb.norm);
    } catch (const std::exception& e) {
      mb.status = "error: " + sanitize(e.what());
    }
  });

  std::ostringstream csv;
  csv << "k,t,energy,energy_sqrt_times_t_alpha\n";
  for (const auto& mb : members) {
    for (std::size_t i = 0; i < mb.series.t.size(); ++i) {
      const double t = mb.series.t[i], e = mb.series.energy[i];
      csv << mb.k << ',' << csv_double(t) << ',' << csv_double(e) << ','
          << csv_double(std::pow(t, alpha_ref) * std::sqrt(e)) << '\n';
    }
  }
  write_text(dir, "energy.csv", csv.str());

  ordered_json meta{{"profile", {{"sigma", c.sigma}, {"beta", c.beta}, {"c0", c.c0},
                                 {"variant", profile.label()}}},
                    {"data", {{"family", c.data.family}, {"k", c.data.k}, {"width", c.data.width}, {"m", c.data.m}}},
                    {"dt", c.dt},
                    {"T", c.T},
                    {"steps", static_cast<long long>(std::llround(c.T / c.dt))},
                    {"sample_stride", c.sample_stride},
                    {"seed", c.seed},
                    {"grid", {{"n", n}, {"scheme", "fourier"}}}};
  write_text(dir, "metadata.json", meta.dump(2) + "\n");

  ordered_json mj = ordered_json::array();
  PlotSpec plot;
  plot.title = "energy decay";
  plot.x_label = "t";
  plot.y_label = "E(t)^(1/2)";
  plot.reference_slope = -alpha_ref;
  plot.reference_label = decay_rate_label(c.beta);
  std::vector<double> sup_k, sup_v;
  const Member* slowest = nullptr;
  bool monotone = true;
  std::size_t failed = 0;
  for (const auto& mb : members) {
    ordered_json e{{"k", mb.k}, {"status", mb.status}};
    if (mb.status != "ok") {
      ++failed;
      mj.push_back(e);
      continue;
    }
    monotone = monotone && mb.series.monotone;
    e["alpha"] = mb.fit->fit.exponent;
    e["fit"] = fit_json(mb.fit->fit);
    e["sup_functional"] = mb.sup->sup_functional;
    e["sup_window"] = {c.sup_window.first, c.sup_window.second};
    e["t_at_sup"] = mb.sup->t_at_sup;
    e["data_norm"] = mb.norm;
    e["literal_data_norm"] = mb.literal_norm;
    e["monotone"] = mb.series.monotone;
    e["energy_initial"] = mb.series.energy.front();
    e["energy_final"] = mb.series.energy.back();
    mj.push_back(e);
    if (!slowest || mb.fit->fit.exponent < slowest->fit->fit.exponent) slowest = &mb;
    if (mb.k > 0) {
      sup_k.push_back(static_cast<double>(mb.k));
      sup_v.push_back(mb.sup->sup_functional);
    }
    PlotSeries s{"k=" + std::to_string(mb.k), {}, {}, mb.fit->fit};
    for (std::size_t i = 0; i < mb.series.t.size(); ++i) {
      s.x.push_back(mb.series.t[i]);
      s.y.push_back(std::sqrt(mb.series.energy[i]));
    }
    // The power fit is of E^{1/2} ~ t^{-alpha}; store the signed exponent for drawing.
    s.fit->exponent = -s.fit->exponent;
    plot.series.push_back(std::move(s));
  }
  ordered_json fj{{"alpha_ref", alpha_ref}, {"reference_label", decay_rate_label(c.beta)},
                  {"window", {c.window.first, c.window.second}}, {"members", mj}};
  std::optional<double> trend;
  if (sup_k.size() >= 2) {
    try {
      trend = fit_power_law(sup_k, sup_v).exponent;
      fj["sup_trend_slope"] = *trend;
    } catch (const std::exception&) {
    }
  }
  if (slowest) {
    fj["slowest_k"] = slowest->k;
    fj["slowest_alpha"] = slowest->fit->fit.exponent;
  }
  write_text(dir, "fit.json", fj.dump(2) + "\n");
  try {
    write_text(dir, "energy_vs_t.svg", emit_plot(plot));
  } catch (const std::invalid_argument& e) {
    m.checks.push_back({"plot", false, e.what()});
  }

  m.checks.push_back({"all members ran", failed == 0, std::to_string(failed) + " failed"});
  m.checks.push_back({"energy nonincreasing", monotone, "E(t_{i+1}) <= E(t_i)(1 + 1e-12)"});
  if (c.expect.alpha) {
    const bool ok = slowest && slowest->fit->fit.exponent >= c.expect.alpha->first &&
                    slowest->fit->fit.exponent <= c.expect.alpha->second;
    std::ostringstream d;
    if (slowest) d << "slowest k=" << slowest->k << " alpha " << slowest->fit->fit.exponent;
    d << " vs " << band_text(*c.expect.alpha);
    m.checks.push_back({"alpha of slowest member in band", ok, d.str()});
  }
  if (c.expect.sup_max) {
    double worst = 0.0;
    for (double v : sup_v) worst = std::max(worst, v);
    std::ostringstream d;
    d << "max sup " << worst << " vs " << *c.expect.sup_max;
    m.checks.push_back({"sup functional bounded", !sup_v.empty() && worst <= *c.expect.sup_max, d.str()});
  }
  if (c.expect.trend_max) {
    std::ostringstream d;
    if (trend) d << "slope " << *trend << " vs " << *c.expect.trend_max;
    m.checks.push_back({"no upward trend in k", trend && *trend <= *c.expect.trend_max, d.str()});
  }
}

// ---------------------------------------------------------------- lemmas

struct LemmaTask {
  std::size_t q_index;
  double q;
  double E;
  int support;
  int trial;
};

struct LemmaResult {
  std::vector<CheckReport> reports;
  std::string status = "ok";
};

void run_lemma_experiment(const ExperimentConfig& c, const RunOptions& opt, const std::filesystem::path& dir,
                          RunManifest& m) {
  const DampingProfile profile = c.profile();
  std::vector<LemmaTask> tasks;
  for (std::size_t qi = 0; qi < c.q.size(); ++qi) {
    for (double v : c.E.values) {
      const double E = c.E.mode == EPolicy::Mode::Fixed ? v : v * c.q[qi] * c.q[qi];
      for (int sc : c.cases) {
        for (int t = 0; t < c.trials; ++t) tasks.push_back({qi, c.q[qi], E, sc, t});
      }
    }
  }

  std::vector<LemmaResult> results(tasks.size());
  parallel_for(tasks.size(), opt.jobs, [&](std::size_t i) {
    const LemmaTask& t = tasks[i];
    LemmaResult& res = results[i];
    try {
      const CircleGrid grid(c.nodes_for(t.q), c.scheme);
      const MultiplierWeights w = build_weights(grid, t.q, profile, c.tau, c.min_layers);
      const rvec mask = support_mask(static_cast<SupportCase>(t.support), grid, t.q, profile, w.eta);
      if (std::all_of(mask.begin(), mask.end(), [](double v) { return v == 0.0; })) {
        res.status = "empty-support";
        return;
      }
      SplitMix64 rng = SplitMix64::stream(c.seed, i);
      cvec f = complex_gaussian_vector(grid.n(), rng);
      for (std::size_t j = 0; j < f.size(); ++j) f[j] *= mask[j];
      const rvec W = sample_on_grid(profile, grid);
      const StationaryOperator op = build_operator(t.q, t.E, W, grid);
      const StationarySolve s = solve(op, f);
      res.reports.push_back(check_wu(s));
      res.reports.push_back(check_psi(s, w.psi, profile));
      res.reports.push_back(check_lemma_mu(s, w));
      if (t.E >= 1.0) res.reports.push_back(check_lemma_fuwfu(s, w));
    } catch (const std::exception& e) {
      res.status = "error: " + sanitize(e.what());
    }
  });

  std::ostringstream csv;
  csv << "lemma,q,E,beta,case,lhs,rhs,ratio,pass\n";
  std::size_t failed = 0, wu_fail = 0;
  // (lemma, case) -> per q index, largest ratio
  std::map<std::pair<std::string, int>, std::map<std::size_t, double>> worst;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const LemmaTask& t = tasks[i];
    if (results[i].status != "ok" && results[i].status != "empty-support") ++failed;
    for (const auto& r : results[i].reports) {
      csv << r.lemma << ',' << csv_double(t.q) << ',' << csv_double(t.E) << ',' << csv_double(c.beta) << ','
          << t.support << ',' << csv_double(r.lhs) << ',' << csv_double(r.rhs) << ',' << csv_double(r.ratio)
          << ',' << (r.pass ? "true" : "false") << '\n';
      if (r.lemma == "wu" && !r.pass) ++wu_fail;
      double& slot = worst[{r.lemma, t.support}][t.q_index];
      slot = std::max(slot, r.ratio);
    }
  }
  write_text(dir, "lemmas.csv", csv.str());

  m.checks.push_back({"all solves accepted", failed == 0, std::to_string(failed) + " failed"});
  m.checks.push_back({"wu slack >= -1e-12 rhs", wu_fail == 0, std::to_string(wu_fail) + " violations"});

  const double trend_max = c.expect.trend_max.value_or(0.05);
  ordered_json trends = ordered_json::array();
  PlotSpec plot;
  plot.title = "multiplier lemma ratios";
  plot.x_label = "q";
  plot.y_label = "lhs / rhs";
  for (const auto& [key, per_q] : worst) {
    std::vector<double> qs, rs;
    for (const auto& [qi, r] : per_q) {
      qs.push_back(c.q[qi]);
      rs.push_back(r);
    }
    ordered_json e{{"lemma", key.first}, {"case", key.second}, {"case_name", to_string(static_cast<SupportCase>(key.second))},
                   {"max_ratio", *std::max_element(rs.begin(), rs.end())}};
    if (key.first == "wu") {
      trends.push_back(e);
      continue;
    }
    std::optional<FitResult> fit;
    if (qs.size() >= 2) {
      try {
        fit = fit_power_law(qs, rs);
        e["slope"] = fit->exponent;
      } catch (const std::exception& ex) {
        e["error"] = ex.what();
      }
    }
    const bool ok = fit && fit->exponent <= trend_max;
    e["bounded"] = ok;
    trends.push_back(e);
    std::ostringstream d;
    if (fit) d << "log-ratio slope " << fit->exponent << " vs " << trend_max;
    else d << "no fit";
    m.checks.push_back({key.first + " case " + std::to_string(key.second) + " bounded", ok, d.str()});
    if (key.first != "psi") {
      plot.series.push_back({key.first + " case " + std::to_string(key.second), qs, rs, fit});
    }
  }
  ordered_json tj{{"beta", c.beta},
                  {"delta", layer_exponent(c.beta)},
                  {"tau", c.tau.value_or(0.5 * (c.sigma + kPi))},
                  {"layers", eta_schedule(c.beta, c.min_layers).N},
                  {"psi_constant", psi_damping_constant(profile)},
                  {"derivative", "fourier"},
                  {"trend_max", trend_max},
                  {"trends", trends}};
  write_text(dir, "trend.json", tj.dump(2) + "\n");
  try {
    write_text(dir, "ratio_vs_q.svg", emit_plot(plot));
  } catch (const std::invalid_argument& e) {
    m.checks.push_back({"plot", false, e.what()});
  }
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate_config(config);
  const std::filesystem::path dir = options.out_dir.empty() ? std::filesystem::path(config.out) : options.out_dir;
  std::filesystem::create_directories(dir);

  RunManifest m;
  m.kind = std::string(to_string(config.kind));
  m.config_hash = config_hash(config);
  m.tool_version = tool_version();
  m.started = utc_timestamp();
  write_text(dir, "config.json", serialize_config(config));
  try {
    switch (config.kind) {
      case ExperimentKind::ResolventSweep:
      case ExperimentKind::EsmallProbe: run_norm_sweep(config, options, dir, m); break;
      case ExperimentKind::DecayRun: run_decay_experiment(config, options, dir, m); break;
      case ExperimentKind::LemmaCertify: run_lemma_experiment(config, options, dir, m); break;
    }
  } catch (const std::exception& e) {
    m.checks.push_back({"run completed", false, e.what()});
  }
  m.finished = utc_timestamp();
  write_manifest(dir, m);
  return m;
}

}  // namespace damplab
