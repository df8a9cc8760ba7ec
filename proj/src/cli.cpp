#include "grfl/cli.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

#include "grfl/analysis.hpp"
#include "grfl/error.hpp"
#include "grfl/functional.hpp"
#include "grfl/geometry.hpp"
#include "grfl/matter.hpp"

namespace grfl {

using nlohmann::json;

// ---- config ---------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ValidationError(key, "not a number: '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x)) throw ValidationError(key, "not a finite number: '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ValidationError(key, "not an integer: '" + v + "'");
  }
  if (used != v.size()) throw ValidationError(key, "not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError(key, "expected true or false, got '" + v + "'");
}

template <int N, class T, class Conv>
std::array<T, N> triple(const std::string& key, const std::string& v, Conv conv) {
  const auto parts = split(v, ',');
  std::array<T, N> out{};
  if (parts.size() == 1) {
    out.fill(static_cast<T>(conv(key, parts[0])));
  } else if (parts.size() == static_cast<std::size_t>(N)) {
    for (int i = 0; i < N; ++i) out[i] = static_cast<T>(conv(key, parts[i]));
  } else {
    throw ValidationError(key, "expected 1 or 3 comma-separated values");
  }
  return out;
}

template <class E>
E choose(const std::string& key, const std::string& v, std::initializer_list<std::pair<const char*, E>> table) {
  std::string names;
  for (const auto& [name, value] : table) {
    if (v == name) return value;
    names += (names.empty() ? "" : ", ") + std::string(name);
  }
  throw ValidationError(key, "unknown value '" + v + "' (expected one of " + names + ")");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool lambda_cadence_set = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key=value");
    const std::string key = trim(body.substr(0, eq)), v = trim(body.substr(eq + 1));
    if (key.empty()) throw ParseError(line, "empty key");
    if (v.empty()) throw ParseError(line, "empty value for " + key);
    if (seen.count(key)) throw ParseError(line, "repeated key " + key);
    seen[key] = v;

    if (key == "grid.n") {
      c.n = triple<3, int>(key, v, to_integer);
      for (int a : c.n)
        if (a < 4) throw ValidationError(key, "every axis needs at least 4 points");
      c.grid_set = true;
    } else if (key == "grid.L") {
      c.L = triple<3, double>(key, v, to_real);
      for (double a : c.L)
        if (!(a > 0.0)) throw ValidationError(key, "periods must be positive");
      c.grid_set = true;
    } else if (key == "grid.backend") {
      c.backend = choose<Backend>(key, v, {{"spectral", Backend::spectral}, {"central4", Backend::central4}});
    } else if (key == "mode") {
      c.mode = choose<FlowMode>(key, v,
                                {{"plain", FlowMode::plain}, {"coupled", FlowMode::coupled}, {"deturck", FlowMode::deturck}});
    } else if (key == "chi") {
      c.chi = to_real(key, v);
    } else if (key == "f_variant") {
      c.f_variant = choose<FVariant>(key, v, {{"thm31", FVariant::thm31}, {"intro", FVariant::intro}});
    } else if (key == "cfl") {
      c.cfl = to_real(key, v);
      // values above 1 are accepted on purpose: they are how a stability-limit
      // violation is provoked from a config
      if (!(c.cfl > 0.0)) throw ValidationError(key, "must be positive");
    } else if (key == "integrator") {
      c.integrator = choose<Integrator>(key, v, {{"euler", Integrator::euler}, {"rk4", Integrator::rk4}});
    } else if (key == "t_end") {
      c.t_end = to_real(key, v);
      if (!(c.t_end > 0.0)) throw ValidationError(key, "must be positive");
    } else if (key == "dt") {
      c.dt = to_real(key, v);
      if (c.dt < 0.0) throw ValidationError(key, "must be >= 0 (0 = adaptive)");
    } else if (key == "cadence") {
      const auto k = to_integer(key, v);
      if (k < 1 || k > 1000000000) throw ValidationError(key, "must be >= 1");
      c.cadence = static_cast<int>(k);
    } else if (key == "cadence_lambda") {
      const auto k = to_integer(key, v);
      if (k < 1 || k > 1000000000) throw ValidationError(key, "must be >= 1");
      c.cadence_lambda = static_cast<int>(k);
      lambda_cadence_set = true;
    } else if (key == "lambda") {
      c.lambda = to_bool(key, v);
    } else if (key == "lambda_tol") {
      c.lambda_tol = to_real(key, v);
      if (!(c.lambda_tol > 0.0)) throw ValidationError(key, "must be positive");
    } else if (key == "init") {
      c.init.kind = choose<InitKind>(
          key, v, {{"flat", InitKind::flat}, {"perturbed", InitKind::perturbed}, {"checkpoint", InitKind::checkpoint}});
    } else if (key == "init.amplitude") {
      c.init.amplitude = to_real(key, v);
      if (c.init.amplitude < 0.0) throw ValidationError(key, "must be >= 0");
    } else if (key == "init.seed") {
      const auto k = to_integer(key, v);
      if (k < 0) throw ValidationError(key, "must be >= 0");
      c.init.seed = static_cast<std::uint64_t>(k);
    } else if (key == "init.fields") {
      c.init.fields.clear();
      for (const auto& f : split(v, ',')) {
        if (f != "g" && f != "A" && f != "B" && f != "f") throw ValidationError(key, "unknown field '" + f + "'");
        c.init.fields.insert(f);
      }
    } else if (key == "init.checkpoint") {
      c.init.checkpoint = v;
    } else if (key == "gauge") {
      c.gauge = choose<GaugePolicy>(
          key, v, {{"none", GaugePolicy::none}, {"initial", GaugePolicy::initial}, {"every_step", GaugePolicy::every_step}});
    } else if (key == "output.csv") {
      c.csv = v;
    } else if (key == "output.checkpoint") {
      c.checkpoint = v;
    } else if (key == "output.summary") {
      c.summary = v;
    } else if (key == "verify.dt_probe") {
      c.verify_dt_probe = to_real(key, v);
      if (!(c.verify_dt_probe > 0.0)) throw ValidationError(key, "must be positive");
    } else if (key == "verify.xi_samples") {
      const auto k = to_integer(key, v);
      if (k < 1) throw ValidationError(key, "must be >= 1");
      c.verify_xi_samples = static_cast<long>(k);
    } else if (key == "verify.seed") {
      const auto k = to_integer(key, v);
      if (k < 0) throw ValidationError(key, "must be >= 0");
      c.verify_seed = static_cast<std::uint64_t>(k);
    } else {
      throw ValidationError(key, "unknown key");
    }
  }
  if (!lambda_cadence_set) c.cadence_lambda = 10 * c.cadence;
  if (c.init.kind == InitKind::checkpoint && c.init.checkpoint.empty())
    throw ValidationError("init.checkpoint", "required when init=checkpoint");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

FlowParams flow_params(const RunConfig& c) {
  FlowParams p;
  p.mode = c.mode;
  p.chi = c.chi;
  p.f_variant = c.f_variant;
  p.cfl = c.cfl;
  p.integrator = c.integrator;
  p.reproject_gauge = c.gauge == GaugePolicy::every_step;
  return p;
}

// ---- initial data -------------------------------------------------------------------

namespace {

// Uniform on [-1, 1) from the raw engine output, so the stream does not depend
// on the standard library's distribution implementation.
double unit_symmetric(std::mt19937_64& rng) { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; }

Scalar random_trig(const Grid& grid, std::mt19937_64& rng) {
  constexpr int kmax = 2;
  const auto& n = grid.n();
  const auto& L = grid.length();
  // 1-D phase tables e^{2 pi i m x / L}
  std::array<std::vector<std::complex<double>>, 3> tab;
  for (int a = 0; a < 3; ++a) {
    tab[a].resize(static_cast<std::size_t>(2 * kmax + 1) * n[a]);
    for (int m = -kmax; m <= kmax; ++m)
      for (int i = 0; i < n[a]; ++i)
        tab[a][(m + kmax) * n[a] + i] = std::polar(1.0, 2.0 * std::numbers::pi * m * grid.x(a, i) / L[a]);
  }
  Scalar out(grid.points(), 0.0);
  for (int c = 0; c <= kmax; ++c)
    for (int b = -kmax; b <= kmax; ++b)
      for (int a = -kmax; a <= kmax; ++a) {
        // one representative of each +-m pair, no constant mode
        if (c == 0 && (b < 0 || (b == 0 && a <= 0))) continue;
        const double cc = unit_symmetric(rng), ss = unit_symmetric(rng);
        std::size_t p = 0;
        for (int i = 0; i < n[0]; ++i)
          for (int j = 0; j < n[1]; ++j) {
            const auto ab = tab[0][(a + kmax) * n[0] + i] * tab[1][(b + kmax) * n[1] + j];
            for (int k = 0; k < n[2]; ++k, ++p) {
              const auto e = ab * tab[2][(c + kmax) * n[2] + k];
              out[p] += cc * e.real() + ss * e.imag();
            }
          }
      }
  double m = 0.0;
  for (double v : out) m = std::max(m, std::abs(v));
  for (double& v : out) v /= m;
  return out;
}

}  // namespace

FlowState sample_perturbation(const Grid& grid, const InitSpec& spec) {
  FlowState s = flat_state(grid);
  std::mt19937_64 rng(spec.seed);
  const double a = spec.amplitude;
  // Every field is drawn in a fixed order so that switching one off leaves the
  // others unchanged.
  for (int c = 0; c < 6; ++c) {
    const Scalar p = random_trig(grid, rng);
    if (spec.fields.count("g"))
      for (std::size_t x = 0; x < p.size(); ++x) s.g.comp(c)[x] += a * p[x];
  }
  auto fill = [&](Field& f, const char* name) {
    for (int c = 0; c < f.components(); ++c) {
      const Scalar p = random_trig(grid, rng);
      if (spec.fields.count(name))
        for (std::size_t x = 0; x < p.size(); ++x) f.comp(c)[x] = a * p[x];
    }
  };
  fill(s.A, "A");
  fill(s.B, "B");
  const Scalar pf = random_trig(grid, rng);
  if (spec.fields.count("f"))
    for (std::size_t x = 0; x < pf.size(); ++x) s.f[x] = a * pf[x];
  return s;
}

Grid config_grid(const RunConfig& c) { return make_grid(c.n, c.L, c.backend); }

FlowState build_initial(const RunConfig& c) {
  std::optional<FlowState> s;
  switch (c.init.kind) {
    case InitKind::flat: s.emplace(flat_state(config_grid(c))); break;
    case InitKind::perturbed: s.emplace(sample_perturbation(config_grid(c), c.init)); break;
    case InitKind::checkpoint: {
      s.emplace(checkpoint_read(c.init.checkpoint, c.backend));
      if (c.grid_set && (s->grid.n() != c.n || s->grid.length() != c.L))
        throw ValidationError("grid.n", "does not match the checkpoint grid");
      break;
    }
  }
  if (c.gauge != GaugePolicy::none) project_gauge(*s);
  require_spd(s->g);
  return std::move(*s);
}

// ---- checkpoints ----------------------------------------------------------------------

namespace {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) throw TruncatedFile("checkpoint " + path + " is truncated");
  return to_little(v);
}

}  // namespace

void checkpoint_write(const FlowState& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write checkpoint " + path);
  out.write("GRFL", 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  for (int a = 0; a < 3; ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.n()[a]));
  for (int a = 0; a < 3; ++a) put<double>(out, s.grid.length()[a]);
  put<double>(out, s.t);
  for (const Field* f : {&s.g, &s.A, &s.B})
    for (double v : f->raw()) put<double>(out, v);
  for (double v : s.f) put<double>(out, v);
  out.flush();
  if (!out) throw FormatError("write failed for checkpoint " + path);
}

FlowState checkpoint_read(const std::string& path, Backend backend) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4) throw TruncatedFile("checkpoint " + path + " is truncated");
  if (std::memcmp(magic, "GRFL", 4) != 0) throw FormatError("checkpoint " + path + ": bad magic");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint " + path + ": unsupported version " + std::to_string(version));
  std::array<int, 3> n{};
  std::array<double, 3> L{};
  for (int a = 0; a < 3; ++a) {
    const auto v = get<std::uint32_t>(in, path);
    if (v < 4 || v > 4096) throw FormatError("checkpoint " + path + ": implausible grid size");
    n[a] = static_cast<int>(v);
  }
  for (int a = 0; a < 3; ++a) L[a] = get<double>(in, path);
  FlowState s(make_grid(n, L, backend));
  s.t = get<double>(in, path);
  for (Field* f : {&s.g, &s.A, &s.B})
    for (double& v : f->raw()) v = get<double>(in, path);
  for (double& v : s.f) v = get<double>(in, path);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("checkpoint " + path + ": trailing bytes");
  return s;
}

// ---- CSV -------------------------------------------------------------------------------

void write_csv(std::ostream& out, const std::vector<TimeSeriesRow>& rows) {
  out << "step,t,S,dSdt_formula,dSdt_finite_difference,lambda,integral_F2,integral_H2,integral_R,integral_R2,"
         "min_det_g,max_abs_f\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out << r.step << ',' << num(r.t) << ',' << num(r.S) << ',' << num(r.dSdt_formula) << ','
        << num(r.dSdt_finite_difference) << ',' << (r.lambda ? num(*r.lambda) : std::string()) << ','
        << num(r.integral_F2) << ',' << num(r.integral_H2) << ',' << num(r.integral_R) << ',' << num(r.integral_R2)
        << ',' << num(r.min_det_g) << ',' << num(r.max_abs_f) << '\n';
  }
}

// ---- commands ----------------------------------------------------------------------------

namespace {

constexpr double kMonotoneTol = 1e-8;

json residual_json(const ResidualReport& r) {
  return {{"name", r.identity_name}, {"linf", r.linf},         {"l2", r.l2},
          {"relative_l2", r.relative_l2()}, {"dt_used", r.dt_used}, {"resolution", r.resolution}};
}

}  // namespace

int cmd_run(const RunConfig& c, std::ostream& report) {
  if (!(c.t_end > 0.0)) throw ValidationError("t_end", "required and must be positive");
  const FlowState initial = build_initial(c);
  RunOptions o;
  o.t_end = initial.t + c.t_end;
  o.cadence = c.cadence;
  o.cadence_lambda = c.cadence_lambda;
  o.compute_lambda = c.lambda;
  o.lambda_tol = c.lambda_tol;
  o.fixed_dt = c.dt;
  const RunResult r = run(initial, flow_params(c), o);

  {
    std::ofstream csv(c.csv, std::ios::trunc);
    if (!csv) throw FormatError("cannot write " + c.csv);
    write_csv(csv, r.rows);
    csv.flush();
    if (!csv) throw FormatError("write failed for " + c.csv);
  }
  checkpoint_write(r.final_state, c.checkpoint);

  double min_dS = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < r.rows.size(); ++k) min_dS = std::min(min_dS, r.rows[k].S - r.rows[k - 1].S);
  double min_dlambda = std::numeric_limits<double>::infinity();
  std::optional<double> prev;
  for (const auto& row : r.rows)
    if (row.lambda) {
      if (prev) min_dlambda = std::min(min_dlambda, *row.lambda - *prev);
      prev = row.lambda;
    }

  json s;
  s["mode"] = mode_name(c.mode);
  s["f_variant"] = f_variant_name(c.f_variant);
  s["integrator"] = integrator_name(c.integrator);
  s["grid"] = {{"n", c.n}, {"L", c.L}, {"backend", backend_name(c.backend)}};
  s["steps"] = r.steps;
  s["t_final"] = r.final_state.t;
  s["rows"] = r.rows.size();
  s["rejected"] = r.rejection.has_value();
  s["rejection"] = r.rejection ? json(*r.rejection) : json(nullptr);
  s["monotone"] = !(min_dS < -kMonotoneTol);
  s["min_delta_S"] = std::isfinite(min_dS) ? json(min_dS) : json(nullptr);
  s["lambda_monotone"] = !(min_dlambda < -kMonotoneTol);
  s["min_delta_lambda"] = std::isfinite(min_dlambda) ? json(min_dlambda) : json(nullptr);
  if (!r.rows.empty()) {
    s["S_initial"] = r.rows.front().S;
    s["S_final"] = r.rows.back().S;
  }
  json res = json::array();
  try {
    for (const auto& q : critical_residuals(r.final_state, c.chi)) res.push_back(residual_json(q));
  } catch (const Error& e) {
    res = e.what();
  }
  s["final_residuals"] = res;
  s["outputs"] = {{"csv", c.csv}, {"checkpoint", c.checkpoint}, {"summary", c.summary}};

  std::ofstream sum(c.summary, std::ios::trunc);
  if (!sum) throw FormatError("cannot write " + c.summary);
  sum << s.dump(2) << '\n';
  sum.flush();
  if (!sum) throw FormatError("write failed for " + c.summary);
  report << s.dump(2) << '\n';
  return r.rejection ? exit_rejected : exit_ok;
}

Suite parse_suite(const std::string& name) {
  return choose<Suite>("suite", name,
                       {{"symbol", Suite::symbol},
                        {"critical", Suite::critical},
                        {"evolution", Suite::evolution},
                        {"structural", Suite::structural},
                        {"ibp", Suite::ibp},
                        {"all", Suite::all}});
}

int cmd_verify(const RunConfig& c, Suite suite, std::ostream& report) {
  const FlowState s = build_initial(c);
  json out;
  out["seed"] = c.verify_seed;
  std::string first_failure;
  auto fail = [&](const std::string& what) {
    if (first_failure.empty()) first_failure = what;
  };
  const bool all = suite == Suite::all;

  if (all || suite == Suite::symbol) {
    std::vector<Mat3> gs(s.grid.points());
    for (std::size_t p = 0; p < gs.size(); ++p) gs[p] = sym2_at(s.g, p);
    const EllipticityReport e = symbol_positivity(gs, c.verify_xi_samples, c.verify_seed);
    double oracle = std::numeric_limits<double>::infinity();
    for (const auto& g : gs) oracle = std::min(oracle, 1.0 / sym3_eigenvalues(g)[2]);
    const bool ok = e.min_quadratic_form > 0.0;
    out["symbol"] = {{"min_quadratic_form", e.min_quadratic_form},
                     {"min_eigenvalue_inverse_metric", oracle},
                     {"samples", e.samples},
                     {"metric_condition_max", e.metric_condition_max},
                     {"seed", e.seed},
                     {"pass", ok}};
    if (!ok) fail("symbol.min_quadratic_form");
  }

  if (all || suite == Suite::critical) {
    // A state is critical when every residual is below this.
    constexpr double tol = 1e-4;
    json arr = json::array();
    for (const auto& r : critical_residuals(s, c.chi)) {
      json j = residual_json(r);
      j["pass"] = r.linf <= tol;
      if (r.linf > tol) fail(r.identity_name);
      arr.push_back(j);
    }
    out["critical"] = {{"tolerance_linf", tol}, {"residuals", arr}};
  }

  if (all || suite == Suite::evolution) {
    json arr = json::array();
    for (CurvatureKind k : {CurvatureKind::riemann, CurvatureKind::ricci, CurvatureKind::scalar}) {
      const EvolutionStudy st = curvature_evolution_study(s, c.verify_dt_probe, k);
      // both sides vanish identically on a static state
      const bool trivial = st.coarse.residual.linf <= 1e-11 && st.coarse.residual.reference_l2 <= 1e-11;
      const bool ok = trivial || (st.coarse.residual.relative_l2() <= 1e-3 && st.convergence_factor >= 3.5);
      json j = residual_json(st.coarse.residual);
      j["fine_relative_l2"] = st.fine.residual.relative_l2();
      j["convergence_factor"] = std::isfinite(st.convergence_factor) ? json(st.convergence_factor) : json(nullptr);
      json fits = json::array();
      for (const auto& f : st.coarse.fits) fits.push_back({{"term", f.term}, {"printed", f.printed}, {"fitted", f.fitted}});
      j["coefficient_fits"] = fits;
      j["pass"] = ok;
      if (!ok) fail(st.coarse.residual.identity_name);
      arr.push_back(j);
    }
    out["evolution"] = {{"probe_mode", "plain"}, {"residuals", arr}};
  }

  if (all || suite == Suite::structural) {
    constexpr double tol = 1e-9;
    json arr = json::array();
    for (const auto& r : structural_identities(s)) {
      json j = residual_json(r);
      j["pass"] = r.linf <= tol;
      if (r.linf > tol) fail(r.identity_name);
      arr.push_back(j);
    }
    out["structural"] = {{"tolerance_linf", tol}, {"residuals", arr}};
  }

  if (all || suite == Suite::ibp) {
    const IbpReport r = integration_by_parts_check(s);
    const bool ok = r.rel_diff <= 1e-6 || r.abs_diff <= 1e-12;
    out["ibp"] = {{"lhs", r.lhs}, {"rhs", r.rhs}, {"abs_diff", r.abs_diff}, {"rel_diff", r.rel_diff}, {"pass", ok}};
    if (!ok) fail("integration_by_parts");
  }

  out["pass"] = first_failure.empty();
  out["first_failure"] = first_failure.empty() ? json(nullptr) : json(first_failure);
  report << out.dump(2) << '\n';
  return first_failure.empty() ? exit_ok : exit_verify;
}

}  // namespace grfl
