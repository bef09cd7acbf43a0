#include "damplab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>

#include "json.hpp"

namespace damplab {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::ResolventSweep: return "resolvent-sweep";
    case ExperimentKind::DecayRun: return "decay-run";
    case ExperimentKind::LemmaCertify: return "lemma-certify";
    case ExperimentKind::EsmallProbe: return "esmall-probe";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) noexcept {
  for (auto k : {ExperimentKind::ResolventSweep, ExperimentKind::DecayRun, ExperimentKind::LemmaCertify,
                 ExperimentKind::EsmallProbe}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<double> geometric_range(double min, double max, double factor) {
  if (!(min > 0.0) || !(max >= min) || !(factor > 1.0)) {
    throw ConfigError("q", "q: range needs 0 < min <= max and factor > 1");
  }
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = min * std::pow(factor, i);
    if (v > max * (1.0 + 1e-9)) break;
    out.push_back(v);
  }
  return out;
}

std::size_t ExperimentConfig::nodes_for(double qv) const {
  if (n) return *n;
  auto m = static_cast<std::size_t>(std::ceil(n_factor * qv));
  m = std::max<std::size_t>({m, n_min, 8});
  return m + (m % 2);
}

DampingProfile ExperimentConfig::profile() const {
  switch (variant) {
    case EnvelopeVariant::ExactV: return DampingProfile::exact(sigma, beta, c0);
    case EnvelopeVariant::Scaled: return DampingProfile::scaled(sigma, beta, c0, variant_param);
    case EnvelopeVariant::PlateauPerturbed: return DampingProfile::plateau(sigma, beta, c0, variant_param);
  }
  throw std::logic_error("unknown envelope variant");
}

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path, path + ": " + what);
}

// Object view that rejects keys outside `allowed`.
class Fields {
 public:
  Fields(const json& j, std::string path, std::initializer_list<std::string_view> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    for (const auto& [key, value] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(join(path_, key), "unknown key");
      }
    }
  }
  const json* get(std::string_view key) const {
    auto it = j_.find(std::string(key));
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }
  std::string at(std::string_view key) const { return join(path_, key); }

  bool number(std::string_view key, double& out) const {
    const json* v = get(key);
    if (!v) return false;
    if (!v->is_number()) fail(at(key), "expected a number");
    out = v->get<double>();
    if (!std::isfinite(out)) fail(at(key), "must be finite");
    return true;
  }
  template <class Int>
  bool integer(std::string_view key, Int& out) const {
    const json* v = get(key);
    if (!v) return false;
    if (!v->is_number_integer()) fail(at(key), "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v->is_number_unsigned()) {
        out = v->get<Int>();
        return true;
      }
      if (v->get<long long>() < 0) fail(at(key), "must be nonnegative");
    }
    out = v->get<Int>();
    return true;
  }
  bool string(std::string_view key, std::string& out) const {
    const json* v = get(key);
    if (!v) return false;
    if (!v->is_string()) fail(at(key), "expected a string");
    out = v->get<std::string>();
    return true;
  }
  bool pair(std::string_view key, std::pair<double, double>& out) const {
    const json* v = get(key);
    if (!v) return false;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
      fail(at(key), "expected [low, high]");
    }
    out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    return true;
  }

 private:
  const json& j_;
  std::string path_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> parse_q(const json& v) {
  if (v.is_array()) {
    auto list = number_list(v, "q");
    // [min, max] is a dyadic range; longer arrays are explicit lists.
    if (list.size() == 2) return geometric_range(list[0], list[1], 2.0);
    return list;
  }
  const Fields f(v, "q", {"min", "max", "factor", "values"});
  if (const json* vals = f.get("values")) {
    if (f.get("min") || f.get("max") || f.get("factor")) fail("q", "values excludes min/max/factor");
    return number_list(*vals, "q.values");
  }
  double lo = 0.0, hi = 0.0, factor = 2.0;
  if (!f.number("min", lo) || !f.number("max", hi)) fail("q", "range needs min and max");
  f.number("factor", factor);
  return geometric_range(lo, hi, factor);
}

EPolicy parse_E(const json& v) {
  EPolicy p;
  if (v.is_string()) {
    if (v.get<std::string>() != "all-modes") fail("E", "expected \"all-modes\" or an object");
    return p;
  }
  const Fields f(v, "E", {"fixed", "q2_fraction"});
  const json* fixed = f.get("fixed");
  const json* frac = f.get("q2_fraction");
  if ((fixed == nullptr) == (frac == nullptr)) fail("E", "exactly one of fixed, q2_fraction");
  p.mode = fixed ? EPolicy::Mode::Fixed : EPolicy::Mode::Q2Fraction;
  p.values = number_list(fixed ? *fixed : *frac, fixed ? "E.fixed" : "E.q2_fraction");
  return p;
}

json E_to_json(const EPolicy& p) {
  switch (p.mode) {
    case EPolicy::Mode::AllModes: return "all-modes";
    case EPolicy::Mode::Fixed: return json{{"fixed", p.values}};
    case EPolicy::Mode::Q2Fraction: return json{{"q2_fraction", p.values}};
  }
  return nullptr;
}

void apply_kind_defaults(ExperimentConfig& c) {
  c.out = "runs/" + std::string(to_string(c.kind));
  c.q = geometric_range(16.0, 1024.0, 2.0);
  switch (c.kind) {
    case ExperimentKind::ResolventSweep: break;
    case ExperimentKind::DecayRun:
      c.scheme = DiffScheme::Fourier;
      c.n = 256;
      c.q = {1.0};
      break;
    case ExperimentKind::LemmaCertify: c.E = {EPolicy::Mode::Q2Fraction, {1.0}}; break;
    case ExperimentKind::EsmallProbe: c.E = {EPolicy::Mode::Fixed, {0.0, 0.1, 0.25}}; break;
  }
}

// Rejects duplicate keys at any depth.
json parse_strict(std::string_view text) {
  std::vector<std::set<std::string>> seen;
  std::vector<std::string> names;
  std::string last_key;
  std::optional<std::string> duplicate;
  auto cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        seen.emplace_back();
        names.push_back(last_key);
        last_key.clear();
        break;
      case json::parse_event_t::object_end:
        seen.pop_back();
        names.pop_back();
        break;
      case json::parse_event_t::key: {
        last_key = parsed.get<std::string>();
        if (!seen.back().insert(last_key).second && !duplicate) {
          std::string path;
          for (std::size_t i = 1; i < names.size(); ++i) path = join(path, names[i]);
          duplicate = join(path, last_key);
        }
        break;
      }
      default: break;
    }
    return true;
  };
  json j;
  try {
    j = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  if (duplicate) fail(*duplicate, "duplicate key");
  return j;
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  if (!(c.sigma > 0.0 && c.sigma < kPi)) throw ConfigError("sigma", "sigma out of (0, π)");
  if (!(c.beta >= 0.0)) fail("beta", "must be >= 0");
  if (!(c.c0 >= 1.0)) fail("c0", "must be >= 1");
  try {
    (void)c.profile();
  } catch (const std::invalid_argument& e) {
    fail("variant_param", e.what());
  }
  if (c.n && (*c.n < 8 || *c.n % 2 != 0)) fail("n", "must be even and >= 8");
  if (!(c.n_factor > 0.0)) fail("n_factor", "must be positive");
  if (c.q.empty()) fail("q", "empty frequency list");
  for (std::size_t i = 0; i < c.q.size(); ++i) {
    if (!(c.q[i] > 0.0) || !std::isfinite(c.q[i])) fail("q", "frequencies must be positive");
    if (i > 0 && !(c.q[i] > c.q[i - 1])) fail("q", "frequencies must be strictly increasing");
  }
  if (c.q_sampling != "resonant" && c.q_sampling != "nominal") fail("q_sampling", "expected resonant or nominal");
  if (c.E.mode != EPolicy::Mode::AllModes) {
    if (c.E.values.empty()) fail("E", "empty list");
    for (double e : c.E.values) {
      if (!std::isfinite(e)) fail("E", "values must be finite");
    }
  } else if (c.kind == ExperimentKind::LemmaCertify || c.kind == ExperimentKind::EsmallProbe) {
    fail("E", "all-modes applies to resolvent-sweep only");
  }
  if (!(c.E_cut > 0.0)) fail("E_cut", "must be positive");
  if (!(c.tol > 0.0 && c.tol < 1.0)) fail("tol", "must lie in (0, 1)");
  if (c.max_iter < 1) fail("max_iter", "must be >= 1");
  if (c.data.family != "gaussian-strip" && c.data.family != "plane-wave") {
    fail("data.family", "expected gaussian-strip or plane-wave");
  }
  if (c.data.k.empty()) fail("data.k", "empty list");
  if (!(c.data.width > 0.0)) fail("data.width", "must be positive");
  if (!(c.T > 0.0)) fail("T", "must be positive");
  if (!(c.dt > 0.0 && c.dt <= c.T)) fail("dt", "must lie in (0, T]");
  if (c.sample_stride < 1) fail("sample_stride", "must be >= 1");
  for (const auto& [name, w] : {std::pair{"window", c.window}, std::pair{"sup_window", c.sup_window}}) {
    if (!(w.first > 0.0 && w.first < w.second && w.second <= c.T * (1.0 + 1e-12))) {
      fail(name, "needs 0 < low < high <= T");
    }
  }
  if (c.tau && !(*c.tau > c.sigma && *c.tau < kPi)) fail("tau", "must lie in (sigma, π)");
  if (c.min_layers < 0 || c.min_layers > 8) fail("min_layers", "must lie in [0, 8]");
  if (c.cases.empty()) fail("cases", "empty list");
  for (int k : c.cases) {
    if (k < 1 || k > 4) fail("cases", "support cases are 1..4");
  }
  if (c.trials < 1) fail("trials", "must be >= 1");
  for (const auto& [name, band] : {std::pair{"expect.slope", c.expect.slope}, std::pair{"expect.alpha", c.expect.alpha}}) {
    if (band && !(band->first <= band->second)) fail(name, "low must not exceed high");
  }
}

ExperimentConfig default_config(ExperimentKind kind) {
  return parse_config(json{{"kind", to_string(kind)}}.dump());
}

ExperimentConfig parse_config(std::string_view text) {
  const json j = parse_strict(text);
  const Fields f(j, "",
                 {"kind", "sigma", "beta", "c0", "variant", "variant_param", "scheme", "n", "n_factor",
                  "n_min", "q", "q_sampling", "E", "E_cut", "tol", "max_iter", "data", "T", "dt",
                  "sample_stride", "window", "sup_window", "tau", "min_layers", "cases", "trials", "seed",
                  "out", "expect"});
  ExperimentConfig c;
  std::string s;
  if (!f.string("kind", s)) fail("kind", "required");
  const auto kind = parse_kind(s);
  if (!kind) fail("kind", "expected resolvent-sweep, decay-run, lemma-certify or esmall-probe");
  c.kind = *kind;
  apply_kind_defaults(c);

  f.number("sigma", c.sigma);
  f.number("beta", c.beta);
  f.number("c0", c.c0);
  if (f.string("variant", s)) {
    if (s == "exact-V") c.variant = EnvelopeVariant::ExactV;
    else if (s == "scaled") c.variant = EnvelopeVariant::Scaled;
    else if (s == "plateau-perturbed") c.variant = EnvelopeVariant::PlateauPerturbed;
    else fail("variant", "expected exact-V, scaled or plateau-perturbed");
  }
  if (!f.number("variant_param", c.variant_param)) {
    c.variant_param = c.variant == EnvelopeVariant::PlateauPerturbed ? 0.0 : 1.0;
  }
  if (f.string("scheme", s)) {
    const auto sch = parse_scheme(s);
    if (!sch) fail("scheme", "expected fourier, fd2 or fd4");
    c.scheme = *sch;
  }
  if (f.get("n")) {
    std::size_t n = 0;
    f.integer("n", n);
    c.n = n;
  } else if (f.get("n_factor") || f.get("n_min")) {
    c.n.reset();
  }
  f.number("n_factor", c.n_factor);
  f.integer("n_min", c.n_min);
  if (const json* q = f.get("q")) c.q = parse_q(*q);
  f.string("q_sampling", c.q_sampling);
  if (const json* e = f.get("E")) c.E = parse_E(*e);
  f.number("E_cut", c.E_cut);
  f.number("tol", c.tol);
  f.integer("max_iter", c.max_iter);

  if (const json* d = f.get("data")) {
    const Fields df(*d, "data", {"family", "k", "width", "m"});
    df.string("family", c.data.family);
    if (const json* ks = df.get("k")) {
      if (ks->is_number_integer()) {
        c.data.k = {ks->get<long>()};
      } else {
        if (!ks->is_array() || ks->empty()) fail("data.k", "expected an integer or a nonempty array");
        c.data.k.clear();
        for (std::size_t i = 0; i < ks->size(); ++i) {
          if (!(*ks)[i].is_number_integer()) fail("data.k[" + std::to_string(i) + "]", "expected an integer");
          c.data.k.push_back((*ks)[i].get<long>());
        }
      }
    }
    df.number("width", c.data.width);
    df.integer("m", c.data.m);
  }
  if (c.data.width == 0.0) c.data.width = c.sigma / 4.0;

  f.number("T", c.T);
  f.number("dt", c.dt);
  f.integer("sample_stride", c.sample_stride);
  if (!f.pair("window", c.window)) c.window = {c.T / 50.0, c.T / 2.0};
  if (!f.pair("sup_window", c.sup_window)) c.sup_window = {c.T / 100.0, c.T};

  double tau = 0.0;
  if (f.number("tau", tau)) c.tau = tau;
  f.integer("min_layers", c.min_layers);
  if (const json* cs = f.get("cases")) {
    if (!cs->is_array()) fail("cases", "expected an array of integers");
    c.cases.clear();
    for (std::size_t i = 0; i < cs->size(); ++i) {
      if (!(*cs)[i].is_number_integer()) fail("cases[" + std::to_string(i) + "]", "expected an integer");
      c.cases.push_back((*cs)[i].get<int>());
    }
  }
  f.integer("trials", c.trials);
  f.integer("seed", c.seed);
  f.string("out", c.out);

  if (const json* e = f.get("expect")) {
    const Fields ef(*e, "expect", {"slope", "alpha", "sup_max", "trend_max"});
    std::pair<double, double> band;
    if (ef.pair("slope", band)) c.expect.slope = band;
    if (ef.pair("alpha", band)) c.expect.alpha = band;
    double v = 0.0;
    if (ef.number("sup_max", v)) c.expect.sup_max = v;
    if (ef.number("trend_max", v)) c.expect.trend_max = v;
  }

  validate_config(c);
  return c;
}

namespace {

json to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = to_string(c.kind);
  j["sigma"] = c.sigma;
  j["beta"] = c.beta;
  j["c0"] = c.c0;
  j["variant"] = to_string(c.variant);
  j["variant_param"] = c.variant_param;
  j["scheme"] = to_string(c.scheme);
  if (c.n) j["n"] = *c.n;
  j["n_factor"] = c.n_factor;
  j["n_min"] = c.n_min;
  j["q"] = json{{"values", c.q}};
  j["q_sampling"] = c.q_sampling;
  j["E"] = E_to_json(c.E);
  j["E_cut"] = c.E_cut;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["data"] = json{{"family", c.data.family}, {"k", c.data.k}, {"width", c.data.width}, {"m", c.data.m}};
  j["T"] = c.T;
  j["dt"] = c.dt;
  j["sample_stride"] = c.sample_stride;
  j["window"] = {c.window.first, c.window.second};
  j["sup_window"] = {c.sup_window.first, c.sup_window.second};
  if (c.tau) j["tau"] = *c.tau;
  j["min_layers"] = c.min_layers;
  j["cases"] = c.cases;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["out"] = c.out;
  json e = json::object();
  if (c.expect.slope) e["slope"] = {c.expect.slope->first, c.expect.slope->second};
  if (c.expect.alpha) e["alpha"] = {c.expect.alpha->first, c.expect.alpha->second};
  if (c.expect.sup_max) e["sup_max"] = *c.expect.sup_max;
  if (c.expect.trend_max) e["trend_max"] = *c.expect.trend_max;
  j["expect"] = e;
  return j;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& config) {
  // The output directory does not change the experiment.
  json j = to_json(config);
  j.erase("out");
  const std::string canonical = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace damplab
