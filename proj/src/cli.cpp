#include "henlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <numbers>
#include <set>

#include "henlab/measure.hpp"
#include "henlab/render.hpp"

namespace henlab {
namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Complex parse_complex_str(const std::string& s) {
  double re = 0.0, im = 0.0;
  int n = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf%n", &re, &im, &n) == 2 &&
      n == static_cast<int>(s.size()))
    return {re, im};
  if (std::sscanf(s.c_str(), "%lf%n", &re, &n) == 1 && n == static_cast<int>(s.size()))
    return {re, 0.0};
  throw ConfigError("expected a complex value 're' or 're,im', got '" + s + "'");
}

Complex json_complex(const json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("config key '" + key + "': expected a number or [re, im]");
}

Point2 json_point(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("config key '" + key + "': expected [x, y] with complex entries");
  return {json_complex(j[0], key), json_complex(j[1], key)};
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json point_json(const Point2& p) { return json::array({complex_json(p.x), complex_json(p.y)}); }

// Flag-over-config resolution. Every recognized key must be noted so that
// finish() can reject unknown ones.
class Merger {
 public:
  Merger(CLI::App* cmd, json cfg) : cmd_(cmd), cfg_(std::move(cfg)) {
    if (!cfg_.is_object()) throw ConfigError("config must be a JSON object");
  }

  bool flag_given(const std::string& flag) const { return cmd_->count(flag) > 0; }
  bool has(const std::string& key) const { return cfg_.contains(key); }
  const json& at(const std::string& key) const { return cfg_.at(key); }

  template <typename T>
  void scalar(const std::string& flag, const std::string& key, T& var) {
    note(key);
    if (flag_given(flag) || !cfg_.contains(key)) return;
    try {
      var = cfg_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }

  void complex_value(const std::string& flag, const std::string& key, const std::string& raw,
                     Complex& var) {
    note(key);
    if (flag_given(flag))
      var = parse_complex_str(raw);
    else if (cfg_.contains(key))
      var = json_complex(cfg_.at(key), key);
  }

  void note(const std::string& key) { consumed_.insert(key); }

  void finish() const {
    for (auto it = cfg_.begin(); it != cfg_.end(); ++it)
      if (!consumed_.contains(it.key())) throw ConfigError("unknown config key: " + it.key());
  }

 private:
  CLI::App* cmd_;
  json cfg_;
  std::set<std::string> consumed_;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json cfg;
  try {
    cfg = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return cfg;
}

// Map spec per the external interface: {"coeffs": [[re,im],...], "delta":
// [re,im]}; the quadratic fixture P(y) = y^2, delta = 1 is the default.
struct MapSpec {
  std::vector<Complex> coeffs{Complex(0.0), Complex(0.0), Complex(1.0)};
  Complex delta{1.0};
};

std::vector<Complex> json_coeffs(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() < 3)
    throw ConfigError("config key '" + key + "': expected at least 3 coefficients");
  std::vector<Complex> c;
  c.reserve(j.size());
  for (const auto& e : j) c.push_back(json_complex(e, key));
  return c;
}

MapSpec load_map(Merger& m) {
  MapSpec s;
  m.note("coeffs");
  m.note("delta");
  if (m.has("coeffs")) s.coeffs = json_coeffs(m.at("coeffs"), "coeffs");
  if (m.has("delta")) s.delta = json_complex(m.at("delta"), "delta");
  return s;
}

json coeffs_json(const std::vector<Complex>& c) {
  json arr = json::array();
  for (Complex v : c) arr.push_back(complex_json(v));
  return arr;
}

std::uint64_t load_seed(Merger& m, std::uint64_t& seed, bool required,
                        const std::string& cmd_name) {
  m.scalar("--seed", "seed", seed);
  if (required && !m.flag_given("--seed") && !m.has("seed"))
    throw ConfigError("--seed is required for " + cmd_name);
  return seed;
}

std::array<double, 4> parse_weights_str(const std::string& s) {
  std::array<double, 4> w{};
  int n = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf%n", &w[0], &w[1], &w[2], &w[3], &n) != 4 ||
      n != static_cast<int>(s.size()))
    throw ConfigError("expected --weights 'w1,w2,w3,w4', got '" + s + "'");
  return w;
}

WalkMeasure load_nu(Merger& m, const std::string& weights_raw, json& eff) {
  m.note("weights");
  std::array<double, 4> w{0.25, 0.25, 0.25, 0.25};
  if (m.flag_given("--weights")) {
    w = parse_weights_str(weights_raw);
  } else if (m.has("weights")) {
    const json& arr = m.at("weights");
    if (!arr.is_array() || arr.size() != 4)
      throw ConfigError("config key 'weights': expected 4 numbers");
    for (int i = 0; i < 4; ++i) w[static_cast<std::size_t>(i)] = arr[i].get<double>();
  }
  eff["weights"] = w;
  return WalkMeasure(w);
}

std::string config_comment(const json& eff) { return "config " + eff.dump(); }

void push_point(std::vector<std::string>& row, const Point2& p) {
  row.push_back(format_double(p.x.real()));
  row.push_back(format_double(p.x.imag()));
  row.push_back(format_double(p.y.real()));
  row.push_back(format_double(p.y.imag()));
}

// ---------------------------------------------------------------- orbit

int cmd_orbit(CLI::App* cmd, const std::string& config_path, std::string word_str, int steps,
              std::string sx_raw, std::string sy_raw, double theta, double escape_radius,
              std::string out) {
  Merger m(cmd, load_config(config_path));
  MapSpec spec = load_map(m);
  m.scalar("--word", "word", word_str);
  m.scalar("--steps", "steps", steps);
  m.scalar("--theta", "theta", theta);
  m.scalar("--escape-radius", "escape_radius", escape_radius);
  m.scalar("--out", "out", out);
  Complex sx{0.0}, sy{0.0};
  m.complex_value("--start-x", "start_x", sx_raw, sx);
  m.complex_value("--start-y", "start_y", sy_raw, sy);
  m.finish();
  if (steps < 0) throw ConfigError("--steps must be >= 0");

  const Word w = word_from_string(word_str);
  std::vector<Generator> seq;
  seq.reserve(w.letters.size() * static_cast<std::size_t>(steps));
  for (int r = 0; r < steps; ++r)
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) seq.push_back(*it);

  const GeneratorSystem sys = GeneratorSystem::rotation(GroupPreset(HenonMap(spec.coeffs, spec.delta), theta));
  const Trajectory t = orbit(sys, seq, {sx, sy}, escape_radius);

  json eff{{"command", "orbit"},       {"coeffs", coeffs_json(spec.coeffs)},
           {"delta", complex_json(spec.delta)}, {"theta", theta},
           {"word", word_str},         {"steps", steps},
           {"start_x", complex_json(sx)}, {"start_y", complex_json(sy)},
           {"escape_radius", escape_radius}};

  CsvTable tab;
  tab.comments.push_back(config_comment(eff));
  tab.comments.push_back("escaped_at=" + std::to_string(t.escaped_at) +
                         " certified=" + (t.escape_certified ? "1" : "0") +
                         " overflowed=" + (t.overflowed ? "1" : "0"));
  tab.header = {"step", "letter", "re_x", "im_x", "re_y", "im_y"};
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    std::vector<std::string> row{std::to_string(i),
                                 i == 0 ? std::string("-") : std::string(1, token(t.letters[i - 1]))};
    push_point(row, t.points[i]);
    tab.rows.push_back(std::move(row));
  }
  write_csv(out, tab);
  return 0;
}

// ------------------------------------------------------------ walk-drift

int cmd_walk_drift(CLI::App* cmd, const std::string& config_path, int n, int trials,
                   std::string weights_raw, std::uint64_t seed, std::string out) {
  Merger m(cmd, load_config(config_path));
  m.scalar("--length", "length", n);
  m.scalar("--trials", "trials", trials);
  m.scalar("--out", "out", out);
  m.note("uniform");
  json eff{{"command", "walk-drift"}, {"length", n}, {"trials", trials}};
  const WalkMeasure nu = load_nu(m, weights_raw, eff);
  load_seed(m, seed, true, "walk-drift");
  m.finish();
  eff["seed"] = seed;

  const DriftEstimate est = drift_estimate(nu, n, trials, seed);

  CsvTable tab;
  tab.comments.push_back(config_comment(eff));
  tab.comments.push_back("reduced-length drift per step with three-sigma band " +
                         format_double(est.mean - 3 * est.std_error) + ".." +
                         format_double(est.mean + 3 * est.std_error));
  tab.header = {"n", "trials", "mean", "std_error"};
  tab.rows.push_back({std::to_string(est.n), std::to_string(est.trials),
                      format_double(est.mean), format_double(est.std_error)});
  write_csv(out, tab);
  return 0;
}

// ----------------------------------------------------------- cones-verify

int cmd_cones_verify(CLI::App* cmd, const std::string& config_path, double theta, int samples,
                     std::uint64_t seed, std::string out) {
  Merger m(cmd, load_config(config_path));
  MapSpec spec = load_map(m);
  m.scalar("--theta", "theta", theta);
  m.scalar("--samples", "samples", samples);
  m.scalar("--out", "out", out);
  load_seed(m, seed, true, "cones-verify");
  m.finish();

  const HenonMap map(spec.coeffs, spec.delta);
  const GroupPreset preset(map, theta);
  const GeneratorSystem sys = GeneratorSystem::rotation(preset);
  const Filtration f = certified_filtration(map, 2.0);

  ConeSearch search;
  search.samples = samples;
  search.seed = seed;
  const ConeSearchResult res = build_cone_system(preset, f, search);

  json eff{{"command", "cones-verify"}, {"coeffs", coeffs_json(spec.coeffs)},
           {"delta", complex_json(spec.delta)}, {"theta", theta},
           {"samples", samples}, {"seed", seed}};

  CsvTable tab;
  tab.comments.push_back(config_comment(eff));
  tab.header = {"aperture", "inner_radius", "samples", "doubling_min_ratio", "doubling_pass",
                "transitions_pass"};

  if (!res.system) {
    tab.comments.push_back("cone search found no candidate; rejection log follows");
    std::size_t pos = 0;
    while (pos < res.log.size()) {
      std::size_t nl = res.log.find('\n', pos);
      if (nl == std::string::npos) nl = res.log.size();
      if (nl > pos) tab.comments.push_back(res.log.substr(pos, nl - pos));
      pos = nl + 1;
    }
    write_csv(out, tab);
    std::cerr << "cones-verify: no cone system found for these parameters\n";
    return 1;
  }

  const ConeCheck dbl = verify_cone_doubling(sys, *res.system, samples, seed);
  const ConeCheck tra = verify_cone_transitions(sys, *res.system, samples, seed);
  const bool pass = dbl.pass && tra.pass && !dbl.no_evidence && !tra.no_evidence;

  tab.rows.push_back({format_double(res.system->cones[0].aperture),
                      format_double(res.system->cones[0].inner_radius), std::to_string(samples),
                      format_double(dbl.min_ratio), dbl.pass ? "1" : "0",
                      tra.pass ? "1" : "0"});
  write_csv(out, tab);
  if (!pass) {
    std::cerr << "cones-verify: verification failed (doubling=" << dbl.pass
              << " transitions=" << tra.pass << ")\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------- collar-verify

int cmd_collar_verify(CLI::App* cmd, const std::string& config_path, double theta, double r_u,
                      double beta, int k, int samples, std::uint64_t seed, std::string out) {
  Merger m(cmd, load_config(config_path));
  MapSpec spec = load_map(m);
  m.scalar("--theta", "theta", theta);
  m.scalar("--r-u", "r_u", r_u);
  m.scalar("--beta", "beta", beta);
  m.scalar("--word-length", "word_length", k);
  m.scalar("--samples", "samples", samples);
  m.scalar("--out", "out", out);
  load_seed(m, seed, true, "collar-verify");
  m.finish();

  const HenonMap map(spec.coeffs, spec.delta);
  const GeneratorSystem sys = GeneratorSystem::rotation(GroupPreset(map, theta));
  const IndeterminacySet dirs = indeterminacy_set(theta);
  const CollarCheck c = verify_collar_escape(sys, dirs, {r_u, beta}, k, samples, seed);

  json eff{{"command", "collar-verify"}, {"coeffs", coeffs_json(spec.coeffs)},
           {"delta", complex_json(spec.delta)}, {"theta", theta}, {"r_u", r_u},
           {"beta", beta}, {"word_length", k}, {"samples", samples}, {"seed", seed},
           };

  CsvTable tab;
  tab.comments.push_back(config_comment(eff));
  if (!c.pass && c.witness) {
    std::vector<std::string> w;
    push_point(w, *c.witness);
    tab.comments.push_back("witness word=" + c.witness_word + " point=" + w[0] + "," + w[1] +
                           "," + w[2] + "," + w[3]);
  }
  tab.header = {"word_length", "samples", "required_ratio", "min_ratio", "pass"};
  tab.rows.push_back({std::to_string(c.word_length), std::to_string(c.samples),
                      format_double(c.required_ratio), format_double(c.min_ratio),
                      c.pass ? "1" : "0"});
  write_csv(out, tab);
  if (!c.pass) {
    std::cerr << "collar-verify: growth bound violated (min ratio " << c.min_ratio << " <= "
              << c.required_ratio << ")\n";
    return 1;
  }
  return 0;
}

// ------------------------------------------------------------------ chain

int cmd_chain(CLI::App* cmd, const std::string& config_path, std::string sx_raw,
              std::string sy_raw, int steps, double theta, double guard, int bins,
              double box_half_width, int defect_samples, std::string weights_raw,
              std::uint64_t seed, std::string out, std::string ergodic_f, double ergodic_param,
              std::string ergodic_out) {
  Merger m(cmd, load_config(config_path));
  MapSpec spec = load_map(m);
  m.scalar("--steps", "steps", steps);
  m.scalar("--theta", "theta", theta);
  m.scalar("--guard", "guard", guard);
  m.scalar("--bins", "bins", bins);
  m.scalar("--box-half-width", "box_half_width", box_half_width);
  m.scalar("--defect-samples", "defect_samples", defect_samples);
  m.scalar("--out", "out", out);
  m.scalar("--ergodic-f", "ergodic_f", ergodic_f);
  m.scalar("--ergodic-param", "ergodic_param", ergodic_param);
  m.scalar("--ergodic-out", "ergodic_out", ergodic_out);
  m.note("uniform");
  Complex sx{0.0}, sy{0.0};
  m.complex_value("--start-x", "start_x", sx_raw, sx);
  m.complex_value("--start-y", "start_y", sy_raw, sy);
  json eff{{"command", "chain"}, {"coeffs", coeffs_json(spec.coeffs)},
           {"delta", complex_json(spec.delta)}, {"theta", theta}, {"steps", steps},
           {"guard", guard}, {"bins", bins}, {"defect_samples", defect_samples},
           {"start_x", complex_json(sx)}, {"start_y", complex_json(sy)}};
  const WalkMeasure nu = load_nu(m, weights_raw, eff);
  load_seed(m, seed, true, "chain");
  m.finish();

  const GeneratorSystem sys = GeneratorSystem::rotation(GroupPreset(HenonMap(spec.coeffs, spec.delta), theta));
  const Point2 start{sx, sy};
  const Trajectory t = simulate_chain(sys, nu, start, steps, seed, guard);

  const double hw = box_half_width > 0.0 ? box_half_width : 2.0 * sys.filtration1().radius;
  const std::vector<Trajectory> trajs{t};
  const GridHistogram hist =
      empirical_measure(std::span<const Trajectory>(trajs), {{0.0, 0.0}, hw}, bins);
  const double defect = stationarity_defect(sys, nu, hist, defect_samples, seed);

  eff["box_half_width"] = hw;
  eff["seed"] = seed;

  if (!ergodic_f.empty()) {
    eff["ergodic_f"] = ergodic_f;
    eff["ergodic_param"] = ergodic_param;
    eff["ergodic_out"] = ergodic_out;
  }

  CsvTable tab;
  tab.comments.push_back(config_comment(eff));
  tab.comments.push_back("escaped_at=" + std::to_string(t.escaped_at) +
                         " certified=" + (t.escape_certified ? "1" : "0") +
                         " overflowed=" + (t.overflowed ? "1" : "0"));
  tab.comments.push_back("defect=" + format_double(defect) +
                         " hist_total=" + std::to_string(hist.total()) +
                         " hist_escaped=" + std::to_string(hist.escaped()));
  tab.header = {"step", "letter", "re_x", "im_x", "re_y", "im_y"};
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    std::vector<std::string> row{std::to_string(i),
                                 i == 0 ? std::string("-") : std::string(1, token(t.letters[i - 1]))};
    push_point(row, t.points[i]);
    tab.rows.push_back(std::move(row));
  }
  write_csv(out, tab);

  if (!ergodic_f.empty()) {
    const std::vector<double> avg =
        ergodic_average(sys, nu, ergodic_f, ergodic_param, start, steps, seed);
    CsvTable e;
    e.comments.push_back(config_comment(eff));
    e.header = {"N", "value"};
    for (std::size_t i = 0; i < avg.size(); ++i)
      e.rows.push_back({std::to_string(i + 1), format_double(avg[i])});
    write_csv(ergodic_out, e);
  }
  return 0;
}

// ------------------------------------------------------------ mass-escape

int cmd_mass_escape(CLI::App* cmd, const std::string& config_path, std::string start_mode,
                    double theta, double r_u, double beta, double box_half_width, int steps,
                    double ball, int trials, std::string weights_raw, std::uint64_t seed,
                    std::string out) {
  Merger m(cmd, load_config(config_path));
  MapSpec spec = load_map(m);
  m.scalar("--start-mode", "start_mode", start_mode);
  m.scalar("--theta", "theta", theta);
  m.scalar("--r-u", "r_u", r_u);
  m.scalar("--beta", "beta", beta);
  m.scalar("--box-half-width", "box_half_width", box_half_width);
  m.scalar("--steps", "steps", steps);
  m.scalar("--ball", "ball", ball);
  m.scalar("--trials", "trials", trials);
  m.scalar("--out", "out", out);
  m.note("uniform");
  m.note("points");
  json eff{{"command", "mass-escape"}, {"coeffs", coeffs_json(spec.coeffs)},
           {"delta", complex_json(spec.delta)}, {"theta", theta},
           {"start_mode", start_mode}, {"steps", steps}, {"ball", ball}, {"trials", trials}};
  const WalkMeasure nu = load_nu(m, weights_raw, eff);
  load_seed(m, seed, true, "mass-escape");
  m.finish();

  const GeneratorSystem sys = GeneratorSystem::rotation(GroupPreset(HenonMap(spec.coeffs, spec.delta), theta));

  StartSampler starts;
  if (start_mode == "collar") {
    starts = collar_starts(indeterminacy_set(theta), {r_u, beta});
    eff["r_u"] = r_u;
    eff["beta"] = beta;
  } else if (start_mode == "box") {
    starts = box_starts({{0.0, 0.0}, box_half_width});
    eff["box_half_width"] = box_half_width;
  } else if (start_mode == "points") {
    if (!m.has("points")) throw ConfigError("start_mode 'points' needs config key 'points'");
    std::vector<Point2> pts;
    for (const auto& e : m.at("points")) pts.push_back(json_point(e, "points"));
    eff["points"] = m.at("points");
    starts = fixed_starts(std::move(pts));
  } else {
    throw ConfigError("--start-mode must be collar, box, or points");
  }
  eff["seed"] = seed;

  const std::vector<double> series = mass_escape(sys, nu, starts, steps, ball, trials, seed);

  CsvTable tab;
  tab.comments.push_back(config_comment(eff));
  tab.header = {"step", "fraction"};
  for (std::size_t i = 0; i < series.size(); ++i)
    tab.rows.push_back({std::to_string(i), format_double(series[i])});
  write_csv(out, tab);
  return 0;
}

// ----------------------------------------------------------- filled-julia

int cmd_filled_julia(CLI::App* cmd, const std::string& config_path, std::string x_raw,
                     std::string y_raw, int grid_n, double extent, int budget,
                     std::string out) {
  Merger m(cmd, load_config(config_path));
  MapSpec spec = load_map(m);
  m.scalar("--grid-n", "grid_n", grid_n);
  m.scalar("--extent", "extent", extent);
  m.scalar("--budget", "budget", budget);
  m.scalar("--out", "out", out);
  Complex x{0.0}, y{0.0};
  m.complex_value("--x", "x", x_raw, x);
  m.complex_value("--y", "y", y_raw, y);
  m.finish();

  const HenonMap map(spec.coeffs, spec.delta);
  const Filtration f = certified_filtration(map, 2.0);
  const double e = extent > 0.0 ? extent : f.radius;

  std::vector<Point2> pts;
  if (grid_n > 0) {
    for (int iy = 0; iy < grid_n; ++iy)
      for (int ix = 0; ix < grid_n; ++ix)
        pts.push_back({e * (2.0 * (ix + 0.5) / grid_n - 1.0),
                       e * (2.0 * (iy + 0.5) / grid_n - 1.0)});
  } else {
    pts.push_back({x, y});
  }

  json eff{{"command", "filled-julia"}, {"coeffs", coeffs_json(spec.coeffs)},
           {"delta", complex_json(spec.delta)}, {"grid_n", grid_n}, {"extent", e},
           {"budget", budget}, {"x", complex_json(x)}, {"y", complex_json(y)}};

  CsvTable tab;
  tab.comments.push_back(config_comment(eff));
  tab.comments.push_back("filtration_radius=" + format_double(f.radius));
  tab.header = {"re_x", "im_x", "re_y", "im_y", "verdict", "step"};
  for (const Point2& p : pts) {
    const JuliaVerdict v = classify_filled_julia(map, p, budget, f);
    std::vector<std::string> row;
    push_point(row, p);
    row.emplace_back(to_string(v.kind));
    row.push_back(std::to_string(v.step));
    tab.rows.push_back(std::move(row));
  }
  write_csv(out, tab);
  return 0;
}

// ----------------------------------------------------------- disjointness

int cmd_disjointness(CLI::App* cmd, const std::string& config_path, std::string translate_raw,
                     int samples, int budget, double box_half_width, std::uint64_t seed,
                     std::string out) {
  Merger m(cmd, load_config(config_path));
  MapSpec spec = load_map(m);
  m.scalar("--samples", "samples", samples);
  m.scalar("--budget", "budget", budget);
  m.scalar("--box-half-width", "box_half_width", box_half_width);
  m.scalar("--out", "out", out);
  Complex translate{100.0};
  m.complex_value("--translate", "translate", translate_raw, translate);
  m.note("coeffs2");
  m.note("delta2");
  load_seed(m, seed, true, "disjointness");
  m.finish();

  const HenonMap m1(spec.coeffs, spec.delta);
  json eff{{"command", "disjointness"}, {"coeffs", coeffs_json(spec.coeffs)},
           {"delta", complex_json(spec.delta)}, {"samples", samples}, {"budget", budget},
           {"box_half_width", box_half_width}, {"seed", seed}};

  HenonMap m2 = m1;
  if (m.has("coeffs2")) {
    std::vector<Complex> c2 = json_coeffs(m.at("coeffs2"), "coeffs2");
    Complex d2 = m.has("delta2") ? json_complex(m.at("delta2"), "delta2") : spec.delta;
    m2 = HenonMap(c2, d2);
    eff["coeffs2"] = coeffs_json(c2);
    eff["delta2"] = complex_json(d2);
  } else {
    m2 = translate_diagonal(m1, translate);
    eff["translate"] = complex_json(translate);
  }

  const DisjointnessReport rep =
      disjointness_report(m1, m2, {{0.0, 0.0}, box_half_width}, samples, budget, seed);

  CsvTable tab;
  tab.comments.push_back(config_comment(eff));
  tab.comments.push_back(std::string("overlap=") + std::to_string(rep.overlap_count) +
                         " total=" + std::to_string(rep.total) + " verdict=" +
                         (rep.disjoint_heuristic ? "disjoint (heuristic)" : "overlap found") +
                         "; sampling evidence only");
  tab.header = {"re_x", "im_x", "re_y", "im_y", "verdict1", "step1", "verdict2", "step2"};
  for (const auto& row : rep.rows) {
    std::vector<std::string> r;
    push_point(r, row.z);
    r.emplace_back(to_string(row.first.kind));
    r.push_back(std::to_string(row.first.step));
    r.emplace_back(to_string(row.second.kind));
    r.push_back(std::to_string(row.second.step));
    tab.rows.push_back(std::move(r));
  }
  write_csv(out, tab);
  return 0;
}

// ----------------------------------------------------------------- render

int cmd_render(CLI::App* cmd, const std::string& config_path, std::string mode_str,
               std::string slice_str, double extent, std::string anchor_raw, int width,
               int height, int budget, int word_length, int words, double escape_radius,
               double theta, std::uint64_t seed, std::string out) {
  Merger m(cmd, load_config(config_path));
  MapSpec spec = load_map(m);
  m.scalar("--mode", "mode", mode_str);
  m.scalar("--slice", "slice", slice_str);
  m.scalar("--extent", "extent", extent);
  m.scalar("--width", "width", width);
  m.scalar("--height", "height", height);
  m.scalar("--budget", "budget", budget);
  m.scalar("--word-length", "word_length", word_length);
  m.scalar("--words", "words", words);
  m.scalar("--escape-radius", "escape_radius", escape_radius);
  m.scalar("--theta", "theta", theta);
  m.scalar("--out", "out", out);
  Complex anchor_x{0.0};
  m.complex_value("--anchor-x", "anchor_x", anchor_raw, anchor_x);
  m.note("anchor");
  m.note("u");
  m.note("v");

  RenderSpec rs;
  if (mode_str == "forward")
    rs.mode = RenderMode::Forward;
  else if (mode_str == "biorbit")
    rs.mode = RenderMode::Biorbit;
  else if (mode_str == "group")
    rs.mode = RenderMode::Group;
  else
    throw ConfigError("--mode must be forward, biorbit, or group");

  load_seed(m, seed, rs.mode == RenderMode::Group, "render --mode group");
  m.finish();

  json eff{{"command", "render"}, {"coeffs", coeffs_json(spec.coeffs)},
           {"delta", complex_json(spec.delta)}, {"theta", theta}, {"mode", mode_str},
           {"width", width}, {"height", height}, {"escape_radius", escape_radius},
           };

  if (m.has("u") || m.has("v") || m.has("anchor")) {
    if (!(m.has("u") && m.has("v") && m.has("anchor")))
      throw ConfigError("custom slices need all of 'anchor', 'u', 'v'");
    rs.slice = {json_point(m.at("anchor"), "anchor"), json_point(m.at("u"), "u"),
                json_point(m.at("v"), "v")};
    eff["anchor"] = point_json(rs.slice.anchor);
    eff["u"] = point_json(rs.slice.u);
    eff["v"] = point_json(rs.slice.v);
  } else if (slice_str == "real") {
    rs.slice = real_plane_slice(extent);
    eff["slice"] = "real";
    eff["extent"] = extent;
  } else if (slice_str == "yline") {
    rs.slice = y_plane_slice(anchor_x, extent);
    eff["slice"] = "yline";
    eff["extent"] = extent;
    eff["anchor_x"] = complex_json(anchor_x);
  } else {
    throw ConfigError("--slice must be real or yline");
  }

  rs.width = width;
  rs.height = height;
  rs.budget = budget;
  rs.word_length = word_length;
  rs.words = words;
  rs.escape_radius = escape_radius;
  rs.seed = seed;
  if (rs.mode == RenderMode::Group) {
    eff["word_length"] = word_length;
    eff["words"] = words;
    eff["seed"] = seed;
  } else {
    eff["budget"] = budget;
  }

  const GeneratorSystem sys = GeneratorSystem::rotation(GroupPreset(HenonMap(spec.coeffs, spec.delta), theta));
  const Raster raster = render_escape_slice(sys, rs);
  write_pgm(out, raster.to_pgm(), "cfg " + hex64(fnv1a64(eff.dump())));
  return 0;
}

// -------------------------------------------------------------- eq5-check

int cmd_eq5(CLI::App* cmd, const std::string& config_path, int n, int collar_samples,
            int box_samples, double box_half_width, double r_u, double beta, double theta,
            std::string weights_raw, std::uint64_t seed, std::string out) {
  Merger m(cmd, load_config(config_path));
  MapSpec spec = load_map(m);
  m.scalar("--n", "n", n);
  m.scalar("--collar-samples", "collar_samples", collar_samples);
  m.scalar("--box-samples", "box_samples", box_samples);
  m.scalar("--box-half-width", "box_half_width", box_half_width);
  m.scalar("--r-u", "r_u", r_u);
  m.scalar("--beta", "beta", beta);
  m.scalar("--theta", "theta", theta);
  m.scalar("--out", "out", out);
  m.note("uniform");
  json eff{{"command", "eq5-check"}, {"coeffs", coeffs_json(spec.coeffs)},
           {"delta", complex_json(spec.delta)}, {"theta", theta}, {"n", n},
           {"collar_samples", collar_samples}, {"box_samples", box_samples},
           {"box_half_width", box_half_width}, {"r_u", r_u}, {"beta", beta}};
  const WalkMeasure nu = load_nu(m, weights_raw, eff);
  load_seed(m, seed, true, "eq5-check");
  m.finish();
  eff["seed"] = seed;

  if (n < 0) throw ConfigError("--n must be >= 0");
  if (collar_samples < 0 || box_samples < 0 || collar_samples + box_samples == 0)
    throw ConfigError("need a nonempty sample");

  const GeneratorSystem sys = GeneratorSystem::rotation(GroupPreset(HenonMap(spec.coeffs, spec.delta), theta));
  const IndeterminacySet dirs = indeterminacy_set(theta);
  const CollarParams cp{r_u, beta};

  SplitMix64 rng(seed);
  std::vector<WeightedPoint> sample;
  sample.reserve(static_cast<std::size_t>(collar_samples + box_samples));
  for (int i = 0; i < collar_samples; ++i)
    sample.push_back({sample_in_collar(dirs, cp, rng), 1.0});
  for (int i = 0; i < box_samples; ++i) {
    auto coord = [&] { return box_half_width * (2.0 * rng.next_double() - 1.0); };
    sample.push_back({{{coord(), coord()}, {coord(), coord()}}, 1.0});
  }

  CsvTable tab;
  tab.comments.push_back(config_comment(eff));
  tab.header = {"n", "omega_count", "lhs", "rhs", "gap"};
  for (int len = 0; len <= n; ++len) {
    const MassIdentity id =
        word_average_mass(sys, nu, std::span<const WeightedPoint>(sample), cp, len);
    tab.rows.push_back({std::to_string(len), std::to_string(id.omega_count),
                        format_double(id.lhs), format_double(id.rhs), format_double(id.gap)});
  }
  write_csv(out, tab);
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"numerical laboratory for Henon map group dynamics"};
  app.require_subcommand(1);

  const double default_theta = std::numbers::pi / 4;

  // orbit
  auto* orbit_cmd = app.add_subcommand("orbit", "iterate a word of the two generators");
  std::string o_config, o_word = "a", o_sx = "0", o_sy = "0", o_out = "orbit.csv";
  int o_steps = 1;
  double o_theta = default_theta, o_radius = 1e6;
  orbit_cmd->add_option("--config", o_config, "JSON config file");
  orbit_cmd->add_option("--word", o_word, "word to apply, tokens a b A B (e = identity)");
  orbit_cmd->add_option("--steps", o_steps, "number of word repetitions");
  orbit_cmd->add_option("--start-x", o_sx, "start x as re or re,im");
  orbit_cmd->add_option("--start-y", o_sy, "start y as re or re,im");
  orbit_cmd->add_option("--theta", o_theta, "rotation angle of the second generator");
  orbit_cmd->add_option("--escape-radius", o_radius, "stop when the norm exceeds this");
  orbit_cmd->add_option("--out", o_out, "output CSV path");

  // walk-drift
  auto* drift_cmd = app.add_subcommand("walk-drift", "Monte Carlo reduced-length drift");
  std::string d_config, d_weights, d_out = "walk_drift.csv";
  int d_n = 10000, d_trials = 400;
  bool d_uniform = false;
  std::uint64_t d_seed = 0;
  drift_cmd->add_option("--config", d_config, "JSON config file");
  drift_cmd->add_option("-n,--length", d_n, "walk length");
  drift_cmd->add_option("--trials", d_trials, "number of walks");
  drift_cmd->add_flag("--uniform", d_uniform, "uniform step weights (the default)");
  drift_cmd->add_option("--weights", d_weights, "step weights w1,w2,w3,w4");
  drift_cmd->add_option("--seed", d_seed, "PRNG seed");
  drift_cmd->add_option("--out", d_out, "output CSV path");

  // cones-verify
  auto* cones_cmd = app.add_subcommand("cones-verify", "build and verify the cone system");
  std::string c_config, c_out = "cones.csv";
  int c_samples = 10000;
  double c_theta = default_theta;
  std::uint64_t c_seed = 0;
  cones_cmd->add_option("--config", c_config, "JSON config file");
  cones_cmd->add_option("--theta", c_theta, "rotation angle");
  cones_cmd->add_option("--samples", c_samples, "samples per cone/letter pair");
  cones_cmd->add_option("--seed", c_seed, "PRNG seed");
  cones_cmd->add_option("--out", c_out, "output CSV path");

  // collar-verify
  auto* collar_cmd = app.add_subcommand("collar-verify", "verify collar escape growth");
  std::string l_config, l_out = "collar.csv";
  double l_theta = default_theta, l_ru = 100.0, l_beta = 0.2;
  int l_k = 5, l_samples = 1000;
  std::uint64_t l_seed = 0;
  collar_cmd->add_option("--config", l_config, "JSON config file");
  collar_cmd->add_option("--theta", l_theta, "rotation angle");
  collar_cmd->add_option("--r-u", l_ru, "collar inner radius");
  collar_cmd->add_option("--beta", l_beta, "chordal margin to the axis directions");
  collar_cmd->add_option("--word-length", l_k, "reduced word length k");
  collar_cmd->add_option("--samples", l_samples, "number of (point, word) samples");
  collar_cmd->add_option("--seed", l_seed, "PRNG seed");
  collar_cmd->add_option("--out", l_out, "output CSV path");

  // chain
  auto* chain_cmd = app.add_subcommand("chain", "random chain with stationarity defect");
  std::string h_config, h_sx = "0", h_sy = "0", h_weights, h_out = "chain.csv";
  std::string h_ef, h_eout = "ergodic.csv";
  int h_steps = 200, h_bins = 32, h_defect = 200;
  double h_theta = default_theta, h_guard = 1e12, h_bhw = 0.0, h_eparam = 0.0;
  bool h_uniform = false;
  std::uint64_t h_seed = 0;
  chain_cmd->add_option("--config", h_config, "JSON config file");
  chain_cmd->add_option("--start-x", h_sx, "start x as re or re,im");
  chain_cmd->add_option("--start-y", h_sy, "start y as re or re,im");
  chain_cmd->add_option("--steps", h_steps, "chain length");
  chain_cmd->add_option("--theta", h_theta, "rotation angle");
  chain_cmd->add_option("--guard", h_guard, "overflow guard norm");
  chain_cmd->add_option("--bins", h_bins, "histogram bins per axis");
  chain_cmd->add_option("--box-half-width", h_bhw, "histogram box half width (0 = 2R)");
  chain_cmd->add_option("--defect-samples", h_defect, "pushforward sample budget");
  chain_cmd->add_flag("--uniform", h_uniform, "uniform step weights (the default)");
  chain_cmd->add_option("--weights", h_weights, "step weights w1,w2,w3,w4");
  chain_cmd->add_option("--seed", h_seed, "PRNG seed");
  chain_cmd->add_option("--out", h_out, "output CSV path");
  chain_cmd->add_option("--ergodic-f", h_ef, "also average a test function: one|ball|normclamp");
  chain_cmd->add_option("--ergodic-param", h_eparam, "test function parameter");
  chain_cmd->add_option("--ergodic-out", h_eout, "ergodic averages CSV path");

  // mass-escape
  auto* mass_cmd = app.add_subcommand("mass-escape", "fraction of chains left in a ball");
  std::string e_config, e_mode = "collar", e_weights, e_out = "mass_escape.csv";
  double e_theta = default_theta, e_ru = 100.0, e_beta = 0.2, e_bhw = 1.0, e_ball = 10.0;
  int e_steps = 200, e_trials = 10000;
  bool e_uniform = false;
  std::uint64_t e_seed = 0;
  mass_cmd->add_option("--config", e_config, "JSON config file");
  mass_cmd->add_option("--start-mode", e_mode, "collar | box | points");
  mass_cmd->add_option("--theta", e_theta, "rotation angle");
  mass_cmd->add_option("--r-u", e_ru, "collar inner radius");
  mass_cmd->add_option("--beta", e_beta, "collar chordal margin");
  mass_cmd->add_option("--box-half-width", e_bhw, "start box half width");
  mass_cmd->add_option("--steps", e_steps, "chain length");
  mass_cmd->add_option("--ball", e_ball, "ball radius");
  mass_cmd->add_option("--trials", e_trials, "number of chains");
  mass_cmd->add_flag("--uniform", e_uniform, "uniform step weights (the default)");
  mass_cmd->add_option("--weights", e_weights, "step weights w1,w2,w3,w4");
  mass_cmd->add_option("--seed", e_seed, "PRNG seed");
  mass_cmd->add_option("--out", e_out, "output CSV path");

  // filled-julia
  auto* julia_cmd = app.add_subcommand("filled-julia", "classify points against K(h)");
  std::string j_config, j_x = "0", j_y = "0", j_out = "filled_julia.csv";
  int j_grid = 0, j_budget = 200;
  double j_extent = 0.0;
  julia_cmd->add_option("--config", j_config, "JSON config file");
  julia_cmd->add_option("--x", j_x, "point x as re or re,im");
  julia_cmd->add_option("--y", j_y, "point y as re or re,im");
  julia_cmd->add_option("--grid-n", j_grid, "classify an n x n real grid instead");
  julia_cmd->add_option("--extent", j_extent, "grid half width (0 = filtration radius)");
  julia_cmd->add_option("--budget", j_budget, "iteration budget per direction");
  julia_cmd->add_option("--out", j_out, "output CSV path");

  // disjointness
  auto* dis_cmd = app.add_subcommand("disjointness", "filled-Julia overlap experiment");
  std::string s_config, s_translate = "100", s_out = "disjointness.csv";
  int s_samples = 200, s_budget = 200;
  double s_bhw = 0.1;
  std::uint64_t s_seed = 0;
  dis_cmd->add_option("--config", s_config, "JSON config file");
  dis_cmd->add_option("--translate", s_translate,
                      "second map = first conjugated by a diagonal translation");
  dis_cmd->add_option("--samples", s_samples, "points to classify");
  dis_cmd->add_option("--budget", s_budget, "iteration budget per direction");
  dis_cmd->add_option("--box-half-width", s_bhw, "sample box half width");
  dis_cmd->add_option("--seed", s_seed, "PRNG seed");
  dis_cmd->add_option("--out", s_out, "output CSV path");

  // render
  auto* render_cmd = app.add_subcommand("render", "escape-time raster of a slice");
  std::string r_config, r_mode = "forward", r_slice = "real", r_anchor = "0";
  std::string r_out = "render.pgm";
  int r_width = 256, r_height = 256, r_budget = 60, r_wlen = 8, r_words = 12;
  double r_extent = 4.0, r_radius = 0.0, r_theta = default_theta;
  std::uint64_t r_seed = 0;
  render_cmd->add_option("--config", r_config, "JSON config file");
  render_cmd->add_option("--mode", r_mode, "forward | biorbit | group");
  render_cmd->add_option("--slice", r_slice, "real | yline (or anchor/u/v in config)");
  render_cmd->add_option("--extent", r_extent, "slice half extent");
  render_cmd->add_option("--anchor-x", r_anchor, "fixed x for the yline slice");
  render_cmd->add_option("--width", r_width, "raster width");
  render_cmd->add_option("--height", r_height, "raster height");
  render_cmd->add_option("--budget", r_budget, "step cap for forward/biorbit");
  render_cmd->add_option("--word-length", r_wlen, "group mode word length");
  render_cmd->add_option("--words", r_words, "group mode words per pixel");
  render_cmd->add_option("--escape-radius", r_radius, "escape norm (0 = certified radius)");
  render_cmd->add_option("--theta", r_theta, "rotation angle");
  render_cmd->add_option("--seed", r_seed, "PRNG seed (group mode)");
  render_cmd->add_option("--out", r_out, "output PGM path");

  // eq5-check
  auto* eq5_cmd = app.add_subcommand("eq5-check", "word-average mass identity report");
  std::string q_config, q_weights, q_out = "eq5.csv";
  int q_n = 2, q_collar = 200, q_box = 50;
  double q_bhw = 2.0, q_ru = 100.0, q_beta = 0.2, q_theta = default_theta;
  bool q_uniform = false;
  std::uint64_t q_seed = 0;
  eq5_cmd->add_option("--config", q_config, "JSON config file");
  eq5_cmd->add_option("--n", q_n, "largest word length to report");
  eq5_cmd->add_option("--collar-samples", q_collar, "collar sample points");
  eq5_cmd->add_option("--box-samples", q_box, "interior box sample points");
  eq5_cmd->add_option("--box-half-width", q_bhw, "interior box half width");
  eq5_cmd->add_option("--r-u", q_ru, "collar inner radius");
  eq5_cmd->add_option("--beta", q_beta, "collar chordal margin");
  eq5_cmd->add_option("--theta", q_theta, "rotation angle");
  eq5_cmd->add_flag("--uniform", q_uniform, "uniform step weights (the default)");
  eq5_cmd->add_option("--weights", q_weights, "step weights w1,w2,w3,w4");
  eq5_cmd->add_option("--seed", q_seed, "PRNG seed");
  eq5_cmd->add_option("--out", q_out, "output CSV path");

  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.emplace_back("henlab");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (orbit_cmd->parsed())
      return cmd_orbit(orbit_cmd, o_config, o_word, o_steps, o_sx, o_sy, o_theta, o_radius,
                       o_out);
    if (drift_cmd->parsed())
      return cmd_walk_drift(drift_cmd, d_config, d_n, d_trials, d_weights, d_seed, d_out);
    if (cones_cmd->parsed())
      return cmd_cones_verify(cones_cmd, c_config, c_theta, c_samples, c_seed, c_out);
    if (collar_cmd->parsed())
      return cmd_collar_verify(collar_cmd, l_config, l_theta, l_ru, l_beta, l_k, l_samples,
                               l_seed, l_out);
    if (chain_cmd->parsed())
      return cmd_chain(chain_cmd, h_config, h_sx, h_sy, h_steps, h_theta, h_guard, h_bins,
                       h_bhw, h_defect, h_weights, h_seed, h_out, h_ef, h_eparam, h_eout);
    if (mass_cmd->parsed())
      return cmd_mass_escape(mass_cmd, e_config, e_mode, e_theta, e_ru, e_beta, e_bhw, e_steps,
                             e_ball, e_trials, e_weights, e_seed, e_out);
    if (julia_cmd->parsed())
      return cmd_filled_julia(julia_cmd, j_config, j_x, j_y, j_grid, j_extent, j_budget, j_out);
    if (dis_cmd->parsed())
      return cmd_disjointness(dis_cmd, s_config, s_translate, s_samples, s_budget, s_bhw,
                              s_seed, s_out);
    if (render_cmd->parsed())
      return cmd_render(render_cmd, r_config, r_mode, r_slice, r_extent, r_anchor, r_width,
                        r_height, r_budget, r_wlen, r_words, r_radius, r_theta, r_seed, r_out);
    if (eq5_cmd->parsed())
      return cmd_eq5(eq5_cmd, q_config, q_n, q_collar, q_box, q_bhw, q_ru, q_beta, q_theta,
                     q_weights, q_seed, q_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cerr << "error: no command dispatched\n";
  return 2;
}

}  // namespace henlab
