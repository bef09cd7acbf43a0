// damplab: experiment runner for the damped wave / stationary resolvent lab.
//
//   damplab resolvent --config sweep.json --beta 1 --q-max 512 --jobs 4
//   damplab decay     --out runs/decay
//   damplab lemmas    --beta 2
//   damplab esmall    --q-min 16 --q-max 256
//
// Exit status: 0 if every manifest check passed, 1 if some check failed,
// 2 on configuration or I/O errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "damplab/config.hpp"
#include "damplab/runner.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<double> beta, sigma, q_min, q_max;
  std::string out;
  std::optional<unsigned> jobs;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  sub->add_option("--beta", o.beta, "envelope exponent beta >= 0");
  sub->add_option("--sigma", o.sigma, "half width of the undamped strip, in (0, pi)");
  sub->add_option("--q-min", o.q_min, "smallest frequency; with --q-max the sweep becomes dyadic");
  sub->add_option("--q-max", o.q_max, "largest frequency of the sweep");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--jobs", o.jobs, "worker threads (default: $DAMPLAB_JOBS, else all cores)");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

unsigned resolve_jobs(const std::optional<unsigned>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DAMPLAB_JOBS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<unsigned>(v);
    std::cerr << "warning: ignoring malformed DAMPLAB_JOBS=" << env << "\n";
  }
  return 0;
}

int run(damplab::ExperimentKind kind, const Overrides& o) {
  using namespace damplab;
  ExperimentConfig c = o.config_path.empty() ? default_config(kind) : parse_config(read_file(o.config_path));
  if (c.kind != kind) {
    throw ConfigError("kind", "kind: config is " + std::string(to_string(c.kind)) + ", subcommand expects " +
                                  std::string(to_string(kind)));
  }
  if (o.beta) c.beta = *o.beta;
  if (o.sigma) c.sigma = *o.sigma;
  if (o.q_min || o.q_max) {
    const double lo = o.q_min.value_or(c.q.front());
    const double hi = o.q_max.value_or(c.q.back());
    c.q = geometric_range(lo, hi, 2.0);
  }
  if (!o.out.empty()) c.out = o.out;
  validate_config(c);

  RunOptions ro;
  ro.jobs = resolve_jobs(o.jobs);
  const RunManifest m = run_experiment(c, ro);
  std::cout << m.kind << " -> " << c.out << " (config " << m.config_hash << ")\n";
  for (const auto& chk : m.checks) {
    std::cout << (chk.pass ? "  PASS  " : "  FAIL  ") << chk.name;
    if (!chk.detail.empty()) std::cout << ": " << chk.detail;
    std::cout << "\n";
  }
  return m.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"damplab: resolvent sweeps, decay runs and multiplier checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", damplab::tool_version());

  struct Sub {
    const char* name;
    const char* help;
    damplab::ExperimentKind kind;
  };
  const Sub subs[] = {
      {"resolvent", "torus resolvent norm against q", damplab::ExperimentKind::ResolventSweep},
      {"decay", "energy decay of the damped wave equation", damplab::ExperimentKind::DecayRun},
      {"lemmas", "multiplier inequality certification sweep", damplab::ExperimentKind::LemmaCertify},
      {"esmall", "1D resolvent norm at small E", damplab::ExperimentKind::EsmallProbe},
  };
  Overrides overrides[std::size(subs)];
  std::vector<CLI::App*> apps;
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    apps.push_back(app.add_subcommand(subs[i].name, subs[i].help));
    add_common(apps.back(), overrides[i]);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < std::size(subs); ++i) {
      if (apps[i]->parsed()) return run(subs[i].kind, overrides[i]);
    }
  } catch (const damplab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
