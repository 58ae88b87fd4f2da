// Batch front-end: evolve / optimize / scaling / wigner subcommands, flat
// key=value configuration with per-command sections, CSV output plus a
// sorted key=value manifest.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinchain/optimizer.hpp"
#include "spinchain/phase_space.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using KV = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Flat key=value file with optional [section] headers; keys outside any
// section or inside the active command's section apply.
KV load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not readable: " + path);
  KV out;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + t + "'");
    if (!section.empty() && section != command) continue;
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

void apply_sets(KV& kv, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + s + "'");
    kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
  }
}

// Typed reader that records which keys were consumed so leftovers can be
// rejected by name.
class Params {
 public:
  explicit Params(KV kv) : kv_(std::move(kv)) {}

  std::string str(const std::string& key, const std::string& dflt) {
    used_.insert(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }

  int integer(const std::string& key, int dflt) {
    std::string v = str(key, "");
    if (v.empty()) return dflt;
    try {
      size_t pos = 0;
      int out = std::stoi(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': invalid integer '" + v + "'");
    }
  }

  double real(const std::string& key, double dflt) {
    std::string v = str(key, "");
    if (v.empty()) return dflt;
    try {
      size_t pos = 0;
      double out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': invalid number '" + v + "'");
    }
  }

  bool flag(const std::string& key, bool dflt) {
    std::string v = str(key, "");
    if (v.empty()) return dflt;
    if (v == "0" || v == "false") return false;
    if (v == "1" || v == "true") return true;
    throw ConfigError("config key '" + key + "': expected boolean, got '" + v + "'");
  }

  void reject_unknown() const {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k))
        throw ConfigError("unknown config key '" + k + "'");
  }

  const KV& raw() const { return kv_; }

 private:
  KV kv_;
  std::set<std::string> used_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

struct Sink {
  std::filesystem::path dir;
  KV manifest;

  std::ofstream open(const std::string& name) const {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write to output dir: " + dir.string());
    return out;
  }

  void write_manifest() const {
    auto out = open("manifest.txt");
    for (const auto& [k, v] : manifest) out << k << "=" << v << "\n";
  }
};

void check_grid_cap(long nodes) {
  if (nodes > 1'000'000)
    throw spinchain::ResourceError("sphere grid exceeds 1e6 nodes");
}

spinchain::MeasureKind parse_measure(const std::string& v) {
  if (v == "i_concurrence") return spinchain::MeasureKind::i_concurrence;
  if (v == "negativity") return spinchain::MeasureKind::negativity;
  if (v == "purity") return spinchain::MeasureKind::purity;
  throw ConfigError("config key 'measure': unknown value '" + v + "'");
}

// ---------------------------------------------------------------------------

int cmd_evolve(Params& p, Sink& sink, int workers) {
  using namespace spinchain;
  int two_s = p.integer("two_s", 10);
  int n_sites = p.integer("n_sites", 6);
  double mu = p.real("mu", 0.5);
  double theta = p.real("theta", 0.2645);
  double t_start = p.real("t_start", 0.0);
  double t_end = p.real("t_end", 2.0 * std::numbers::pi);
  int n_points = p.integer("n_points", 128);
  std::string engine = p.str("engine", "exact");
  std::string measure = p.str("measure", "i_concurrence");
  MeasureKind kind = parse_measure(measure);
  int dflt_site = std::max(2, (n_sites + 1) / 2);
  int site = p.integer("site", kind == MeasureKind::negativity
                                   ? std::max(1, n_sites / 2)
                                   : dflt_site);
  int site2 = p.integer("site2",
                        kind == MeasureKind::negativity ? site + 1 : 0);
  int grid_factor = p.integer("grid_factor", 4);
  bool exact_drift = p.flag("exact_drift", false);
  p.reject_unknown();

  if (two_s < 1) throw ConfigError("config key 'two_s': must be >= 1");
  if (n_sites < 2) throw ConfigError("config key 'n_sites': must be >= 2");
  if (n_points < 1) throw ConfigError("config key 'n_points': must be >= 1");
  if (grid_factor < 1) throw ConfigError("config key 'grid_factor': must be >= 1");
  if (site < 1 || site > n_sites) throw ConfigError("config key 'site': out of range");
  if (kind != MeasureKind::negativity && site2 != 0)
    throw ConfigError("config key 'site2': only valid for negativity");
  if (engine != "exact" && engine != "semiclassical" && engine != "both")
    throw ConfigError("config key 'engine': unknown value '" + engine + "'");
  if (t_end == t_start) n_points = 1;

  SpinSize s(two_s);
  ChainSpec chain = uniform_chain(n_sites, s, {mu, theta});
  TimeGrid grid{t_start, t_end, n_points};
  MeasureTarget target{site, site2};
  std::string target_str = target.is_pair()
                               ? "pair:" + std::to_string(site) + "-" + std::to_string(site2)
                               : "site:" + std::to_string(site);

  auto out = sink.open("series.csv");
  out << "t,measure,engine,target,value\n";

  if (engine == "exact" || engine == "both") {
    MeasureSeries series = measure_series(chain, grid, kind, target);
    for (size_t i = 0; i < series.times.size(); ++i)
      out << fmt(series.times[i]) << "," << measure << ",exact," << target_str
          << "," << fmt(series.values[i]) << "\n";
  }
  if (engine == "semiclassical" || engine == "both") {
    if (kind == MeasureKind::negativity && site2 != site + 1)
      throw ConfigError("semiclassical negativity supports adjacent pairs only");
    SphereGrid g = SphereGrid::default_for(two_s, grid_factor);
    check_grid_cap(static_cast<long>(g.size()));
    ChainSymbols sym(chain, g, exact_drift);
    std::vector<double> vals(n_points);
    spinchain::detail::parallel_for(n_points, workers, [&](int i) {
      double t = grid.at(i);
      if (kind == MeasureKind::negativity)
        vals[i] = (two_s + 1.0) / two_s *
                  semiclassical_negativity_full(sym.evolved_pair(site, t));
      else {
        double pur = semiclassical_purity(sym.evolved_single(site, t));
        vals[i] = (kind == MeasureKind::purity)
                      ? pur
                      : (two_s + 1.0) / two_s * (1.0 - pur);
      }
    });
    for (int i = 0; i < n_points; ++i)
      out << fmt(grid.at(i)) << "," << measure << ",semiclassical,"
          << target_str << "," << fmt(vals[i]) << "\n";
  }
  return 0;
}

int cmd_optimize(Params& p, Sink& sink, int workers) {
  using namespace spinchain;
  int two_s = p.integer("two_s", 10);
  int n_sites = p.integer("n_sites", 6);
  std::string objective = p.str("objective", "i_concurrence");
  MeasureKind kind = parse_measure(objective);
  if (kind == MeasureKind::purity)
    throw ConfigError("config key 'objective': must be i_concurrence or negativity");
  int site = p.integer("site", kind == MeasureKind::negativity
                                   ? std::max(1, n_sites / 2)
                                   : std::max(2, (n_sites + 1) / 2));
  int site2 = p.integer("site2", kind == MeasureKind::negativity ? site + 1 : 0);
  double mu_max = p.real("mu_max", 0.5 * std::numbers::pi);
  double theta_max = p.real("theta_max", 0.5 * std::numbers::pi);
  int scan_resolution = p.integer("scan_resolution", 24);
  double t_start = p.real("t_start", 0.0);
  double t_end = p.real("t_end", 2.0 * std::numbers::pi);
  int n_points = p.integer("n_points", 128);
  p.reject_unknown();

  if (two_s < 1) throw ConfigError("config key 'two_s': must be >= 1");
  if (n_sites < 2) throw ConfigError("config key 'n_sites': must be >= 2");
  if (scan_resolution < 2)
    throw ConfigError("config key 'scan_resolution': must be >= 2");
  if (mu_max < 0) throw ConfigError("config key 'mu_max': must be >= 0");

  OptimizationProblem prob{SpinSize(two_s), n_sites, kind,
                           MeasureTarget{site, site2},
                           TimeGrid{t_start, t_end, n_points}};
  prob.mu_max = mu_max;
  prob.theta_max = theta_max;
  prob.scan_resolution = scan_resolution;
  prob.workers = workers;
  auto r = optimize_mu_theta(prob);

  auto out = sink.open("optimum.csv");
  out << "mu_star,theta_star,value,t_star,mu_flat\n";
  out << fmt(r.mu_star) << "," << fmt(r.theta_star) << "," << fmt(r.value)
      << "," << fmt(r.t_star) << "," << (r.mu_flat ? 1 : 0) << "\n";

  auto land = sink.open("landscape.csv");
  land << "mu,theta,value\n";
  for (int i = 0; i < scan_resolution; ++i)
    for (int j = 0; j < scan_resolution; ++j)
      land << fmt(r.scan_mu[i]) << "," << fmt(r.scan_theta[j]) << ","
           << fmt(r.landscape[i * scan_resolution + j]) << "\n";
  return 0;
}

int cmd_scaling(Params& p, Sink& sink, int workers) {
  using namespace spinchain;
  std::string objective = p.str("objective", "negativity");
  MeasureKind kind = parse_measure(objective);
  if (kind == MeasureKind::purity)
    throw ConfigError("config key 'objective': must be i_concurrence or negativity");
  int ts_min = p.integer("two_s_min", 2);
  int ts_max = p.integer("two_s_max", 6);
  int n_min = p.integer("n_min", 3);
  int n_max = p.integer("n_max", 5);
  int scan_resolution = p.integer("scan_resolution", 16);
  double t_start = p.real("t_start", 0.0);
  double t_end = p.real("t_end", 2.0 * std::numbers::pi);
  int n_points = p.integer("n_points", 128);
  p.reject_unknown();

  if (ts_min < 1 || ts_max < ts_min)
    throw ConfigError("config key 'two_s_min'/'two_s_max': invalid range");
  if (n_min < 2 || n_max < n_min)
    throw ConfigError("config key 'n_min'/'n_max': invalid range");
  long cells = long(ts_max - ts_min + 1) * long(n_max - n_min + 1);
  if (cells > 500)
    throw ResourceError("scaling grid exceeds 500 cells");

  std::vector<int> ts_range, n_range;
  for (int ts = ts_min; ts <= ts_max; ++ts) ts_range.push_back(ts);
  for (int n = n_min; n <= n_max; ++n) n_range.push_back(n);
  auto st = scaling_study(kind, ts_range, n_range,
                          TimeGrid{t_start, t_end, n_points}, scan_resolution,
                          workers);

  auto out = sink.open("scaling.csv");
  out << "two_s,n_sites,mu_star,theta_star,value,t_star\n";
  for (const auto& c : st.cells)
    out << c.two_s << "," << c.n_sites << "," << fmt(c.mu_star) << ","
        << fmt(c.theta_star) << "," << fmt(c.value) << "," << fmt(c.t_star)
        << "\n";
  auto emit_fit = [&](const char* name, const PowerLawFit& f) {
    out << "fit," << name << "," << fmt(f.amplitude) << "," << fmt(f.exponent)
        << "," << fmt(f.residual) << "\n";
  };
  emit_fit("mu_of_s", st.mu_of_s);
  emit_fit("theta_of_s", st.theta_of_s);
  emit_fit("max_of_s", st.max_of_s);
  emit_fit("max_of_n", st.max_of_n);
  return 0;
}

int cmd_wigner(Params& p, Sink& sink, int /*workers*/) {
  using namespace spinchain;
  int two_s = p.integer("two_s", 10);
  double mu = p.real("mu", 0.5);
  double theta_rot = p.real("theta", 0.2645);
  int grid_factor = p.integer("grid_factor", 2);
  SpinSize s(two_s);
  SphereGrid dflt = SphereGrid::default_for(two_s, grid_factor);
  int n_theta = p.integer("n_theta", dflt.n_theta);
  int n_phi = p.integer("n_phi", dflt.n_phi);
  p.reject_unknown();

  if (two_s < 1) throw ConfigError("config key 'two_s': must be >= 1");
  if (n_theta < 1 || n_phi < 1)
    throw ConfigError("config key 'n_theta'/'n_phi': must be >= 1");
  check_grid_cap(long(n_theta) * long(n_phi));

  SphereGrid g(n_theta, n_phi);
  if (!g.exact_for(two_s))
    throw ResolutionError("wigner: grid " + std::to_string(n_theta) + "x" +
                          std::to_string(n_phi) +
                          " cannot resolve two_s=" + std::to_string(two_s));
  auto exact =
      wigner_of_operator(density_of(prepare_initial(s, {mu, theta_rot})), s, g);
  auto approx = InitialWignerApprox(s, {mu, theta_rot}).field(g);

  double max_dev = 0;
  auto out = sink.open("wigner.csv");
  out << "theta,phi,exact,approx,abs_dev\n";
  for (int i = 0; i < g.size(); ++i) {
    double dev = std::abs(exact.values[i] - approx.values[i]);
    max_dev = std::max(max_dev, dev);
    out << fmt(g.theta_at(i)) << "," << fmt(g.phi_at(i)) << ","
        << fmt(exact.values[i]) << "," << fmt(approx.values[i]) << ","
        << fmt(dev) << "\n";
  }
  sink.manifest["max_abs_deviation"] = fmt(max_dev);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin chain correlation-transfer simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::vector<std::string> sets;
  int workers = 1;
  bool deterministic = false;

  for (const char* name : {"evolve", "optimize", "scaling", "wigner"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--set", sets, "override: key=value (repeatable)");
    sub->add_option("--workers", workers, "worker threads");
    sub->add_flag("--deterministic", deterministic,
                  "single-worker, fixed reduction order");
    sub->add_option("--out", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string command = app.get_subcommands().front()->get_name();
  auto t0 = std::chrono::steady_clock::now();

  try {
    KV kv;
    if (!config_path.empty()) kv = load_config(config_path, command);
    apply_sets(kv, sets);

    Params params(std::move(kv));
    workers = params.integer("workers", workers);
    if (deterministic || workers < 1) workers = 1;

    Sink sink;
    sink.dir = out_dir;
    std::filesystem::create_directories(sink.dir);

    int rc = 0;
    if (command == "evolve") rc = cmd_evolve(params, sink, workers);
    else if (command == "optimize") rc = cmd_optimize(params, sink, workers);
    else if (command == "scaling") rc = cmd_scaling(params, sink, workers);
    else rc = cmd_wigner(params, sink, workers);

    for (const auto& [k, v] : params.raw()) sink.manifest["config." + k] = v;
    sink.manifest["command"] = command;
    sink.manifest["code_version"] = kVersion;
    sink.manifest["deterministic"] = deterministic ? "1" : "0";
    sink.manifest["workers"] = std::to_string(workers);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    sink.manifest["wall_time_ms"] = std::to_string(ms);
    sink.write_manifest();
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const spinchain::ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const spinchain::ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
