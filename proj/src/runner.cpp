#include "grushin/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "grushin/config.hpp"
#include "grushin/errors.hpp"
#include "grushin/experiments.hpp"
#include "grushin/parallel.hpp"

namespace grushin {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Output {
  std::string csv;
  json report;
  std::vector<std::string> certificates;
  std::function<void(const fs::path&)> extra;  // optional extra files
};

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) {
    bool first = true;
    for (const auto& h : header) {
      text_ += (first ? "" : ",") + h;
      first = false;
    }
    text_ += "\n";
  }
  Csv& operator<<(double v) { return cell(format_double(v)); }
  Csv& operator<<(const std::string& s) { return cell(s); }
  void end() {
    text_ += "\n";
    fresh_ = true;
  }
  const std::string& str() const { return text_; }

 private:
  Csv& cell(const std::string& s) {
    text_ += (fresh_ ? "" : ",") + s;
    fresh_ = false;
    return *this;
  }
  std::string text_;
  bool fresh_ = true;
};

struct Common {
  Dims dims;
  std::uint64_t seed = 1;
};

GrushinGrid read_grid(Config& c, const Dims& d) {
  GrushinGrid g;
  g.prime.d1 = d.d1;
  g.d2 = d.d2;
  g.prime.X = c.num("grid.X");
  g.prime.n = int(c.integer("grid.n_prime"));
  g.S = c.num("grid.S");
  g.n_second = int(c.integer("grid.n_second"));
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw ConfigError("grid", e.what());
  }
  return g;
}

SpectralTruncation read_trunc(Config& c, const GrushinGrid& g) {
  SpectralTruncation t;
  t.lambda_max = c.num("trunc.lambda_max");
  long auto_k = long(std::ceil(t.lambda_max * g.S / (2 * std::numbers::pi))) + 10;
  t.K_max = int(c.integer("trunc.K_max", auto_k));
  try {
    t.xi_zero_mode = parse_xi_zero_mode(c.str("trunc.xi_zero_mode", "fourier_multiplier"));
    t.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("trunc", e.what());
  }
  return t;
}

std::vector<std::size_t> read_columns(Config& c, const GrushinGrid& g) {
  if (!c.has("experiment.y_abs")) return {};
  std::vector<std::size_t> ys;
  for (double a : c.list("experiment.y_abs")) {
    MetricPoint y{std::vector<double>(g.prime.d1, 0.0), std::vector<double>(g.d2, 0.0)};
    y.x_prime[0] = a;
    try {
      ys.push_back(g.locate(y).first);
    } catch (const std::exception&) {
      throw ConfigError("experiment.y_abs", "value " + format_double(a) + " is not a grid point");
    }
  }
  return ys;
}

MetricPoint axis_point(const Dims& d, double a, double second = 0.0) {
  MetricPoint y{std::vector<double>(d.d1, 0.0), std::vector<double>(d.d2, second)};
  y.x_prime[0] = a;
  return y;
}

OpNormOptions opnorm_options(Config& c, std::uint64_t seed) {
  OpNormOptions o;
  o.restarts = int(c.integer("opnorm.restarts", o.restarts));
  o.max_iter = int(c.integer("opnorm.max_iter", o.max_iter));
  o.seed = seed;
  return o;
}

std::vector<double> coords(const std::string& key, const std::string& text) {
  std::vector<double> v;
  std::istringstream in(text);
  std::string item;
  while (in >> item) {
    Config tmp = Config::parse("v = " + item);
    v.push_back(tmp.num("v"));
  }
  if (v.empty()) throw ConfigError(key, "empty point");
  return v;
}

json scaling_json(const ScalingReport& r) { return json::parse(r.to_json()); }

using Job = std::function<Output()>;
using Runner = std::function<Job(Config&, const Common&)>;

Job run_weighted(Config& c, const Common& cm) {
  auto g = read_grid(c, cm.dims);
  auto tr = read_trunc(c, g);
  double p = c.num("experiment.p", 1.0);
  auto gammas = c.list("experiment.gammas", {0.0});
  auto R = c.list("experiment.R");
  auto opt = opnorm_options(c, cm.seed);
  for (double gam : gammas)
    if (!restriction_admissible(cm.dims, p, gam))
      throw ConfigError("experiment.gammas", "(p, gamma) outside the admissible range");
  return [=]() -> Output {
  auto res = weighted_restriction_experiment(g, tr, p, gammas, R, smooth_bump(0.25, 1.0), opt);
  Csv csv{"R", "gamma", "norm", "certificate", "argmax"};
  Output o;
  for (const auto& r : res.rows) {
    csv << r.R << r.gamma << r.norm << to_string(r.certificate) << double(r.argmax);
    csv.end();
    o.certificates.push_back(to_string(r.certificate));
  }
  o.csv = csv.str();
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    auto j = scaling_json(res.reports[k]);
    j["gamma"] = gammas[k];
    o.report["reports"].push_back(j);
  }
  return o;
  };
}

Job run_localized(Config& c, const Common& cm) {
  auto g = read_grid(c, cm.dims);
  auto tr = read_trunc(c, g);
  double p = c.num("experiment.p", 1.0);
  double gamma = c.num("experiment.gamma", 0.25);
  auto R = c.list("experiment.R");
  auto yabs = c.list("experiment.y_abs");
  double r = c.num("experiment.r");
  std::vector<MetricPoint> ys;
  for (double a : yabs) {
    if (!(a > 4 * r)) throw ConfigError("experiment.y_abs", "every |y'| must exceed 4 r");
    ys.push_back(axis_point(cm.dims, a));
  }
  return [=]() -> Output {
  auto res = localized_restriction_experiment(g, tr, p, gamma, R, ys, r, smooth_bump(0.25, 1.0));
  Csv csv{"R", "y_abs", "gamma", "norm", "certificate"};
  Output o;
  for (const auto& row : res.rows) {
    csv << row.R << row.y_abs << row.gamma << row.norm << to_string(row.certificate);
    csv.end();
    o.certificates.push_back(to_string(row.certificate));
  }
  o.csv = csv.str();
  for (std::size_t i = 0; i < res.in_R.size(); ++i) {
    auto j = scaling_json(res.in_R[i]);
    j["y_abs"] = yabs[i];
    o.report["slope_in_R"].push_back(j);
  }
  for (std::size_t i = 0; i < res.in_y.size(); ++i) {
    auto j = scaling_json(res.in_y[i]);
    j["R"] = R[i];
    o.report["slope_in_y"].push_back(j);
  }
  return o;
  };
}

Job run_bochner_riesz(Config& c, const Common& cm) {
  auto g = read_grid(c, cm.dims);
  auto tr = read_trunc(c, g);
  double p = c.num("experiment.p", 1.0);
  auto deltas = c.list("experiment.deltas");
  auto R = c.list("experiment.R");
  auto ys = read_columns(c, g);
  auto opt = opnorm_options(c, cm.seed);
  return [=]() -> Output {
  auto res = bochner_riesz_sweep(g, tr, p, deltas, R, ys, opt);
  Csv csv{"delta", "R", "norm", "certificate"};
  Output o;
  for (const auto& row : res.rows) {
    csv << row.delta << row.R << row.norm << to_string(row.certificate);
    csv.end();
    o.certificates.push_back(to_string(row.certificate));
  }
  o.csv = csv.str();
  o.report["deltas"] = res.deltas;
  o.report["max_min_ratio"] = res.max_min_ratio;
  return o;
  };
}

Job run_multiplier(Config& c, const Common& cm) {
  auto g = read_grid(c, cm.dims);
  auto tr = read_trunc(c, g);
  double p = c.num("experiment.p", 1.0);
  auto s = c.list("experiment.s", {1.0, 2.0, 3.0});
  auto t = c.list("experiment.t");
  auto ys = read_columns(c, g);
  auto opt = opnorm_options(c, cm.seed);
  return [=]() -> Output {
  auto res = multiplier_norm_experiment(g, tr, p, smooth_bump(0.25, 1.0), s, t, ys, opt);
  Csv csv{"t", "s", "norm", "sobolev", "ratio", "certificate"};
  Output o;
  for (std::size_t it = 0; it < t.size(); ++it) {
    o.certificates.push_back(to_string(res.rows[it].certificate));
    for (std::size_t is = 0; is < s.size(); ++is) {
      csv << t[it] << s[is] << res.rows[it].norm << res.sobolev[is] << res.ratio[is][it]
          << to_string(res.rows[it].certificate);
      csv.end();
    }
  }
  o.csv = csv.str();
  o.report["sobolev"] = res.sobolev;
  o.report["s"] = s;
  o.report["t"] = t;
  return o;
  };
}

Job run_heat(Config& c, const Common& cm) {
  auto g = read_grid(c, cm.dims);
  auto tr = read_trunc(c, g);
  auto t = c.list("experiment.t");
  auto yabs = c.list("experiment.y_abs", {0.0});
  HeatGaussianOptions opt;
  opt.bins = int(c.integer("experiment.bins", opt.bins));
  opt.rel_floor = c.num("experiment.rel_floor", opt.rel_floor);
  std::vector<MetricPoint> ys;
  for (double a : yabs) ys.push_back(axis_point(cm.dims, a));
  return [=]() -> Output {
  auto rep = heat_gaussian_check(g, tr, t, ys, opt);
  Csv csv{"t", "y_abs", "diag_value"};
  for (std::size_t i = 0; i < rep.diag_t.size(); ++i) {
    csv << rep.diag_t[i] << yabs[i % yabs.size()] << rep.diag_value[i];
    csv.end();
  }
  Output o;
  o.csv = csv.str();
  o.report["heat"] = json::parse(rep.to_json());
  return o;
  };
}

Job run_kernel_support(Config& c, const Common& cm) {
  auto g = read_grid(c, cm.dims);
  auto tr = read_trunc(c, g);
  auto levels = c.list("experiment.levels", {0.0, 1.0, 2.0});
  double radius = c.num("experiment.radius", 1.0);
  double yabs = c.num("experiment.y_abs", 0.0);
  KernelSupportOptions opt;
  opt.kappas = c.list("experiment.kappas", opt.kappas);
  CutoffSpec cut;
  cut.sharpness = c.num("cutoff.sharpness", cut.sharpness);
  int recon = int(c.integer("experiment.reconstruction_levels", 12));
  for (double l : levels)
    if (l < 0 || l != std::floor(l) || l > recon)
      throw ConfigError("experiment.levels", "levels must be integers in [0, reconstruction_levels]");
  return [=]() -> Output {
  auto F = smooth_bump(0.25, 1.0);
  auto pieces = dyadic_pieces(F, cut, recon);
  double resid = 0;
  for (double lam = 0; lam <= 4.0; lam += 1.0 / 256) {
    double s = 0;
    for (const auto& q : pieces) s += q(lam).real();
    resid = std::max(resid, std::fabs(s - F(lam).real()));
  }
  Csv csv{"level", "t", "kappa", "inside_mass", "outside_fraction"};
  Output o;
  o.report["reconstruction_residual"] = resid;
  for (double l : levels) {
    int lv = int(l);
    double t = std::ldexp(radius, -lv);
    auto rep = kernel_support_check(pieces[lv], lv, t, g, tr, axis_point(cm.dims, yabs), opt);
    for (std::size_t k = 0; k < rep.kappas.size(); ++k) {
      csv << double(lv) << t << rep.kappas[k] << rep.inside_mass[k] << rep.outside_fraction[k];
      csv.end();
    }
    o.report["levels"].push_back(json::parse(rep.to_json()));
  }
  o.csv = csv.str();
  return o;
  };
}

Job run_geometry(Config& c, const Common& cm) {
  GeometrySuiteOptions opt;
  opt.triples = std::uint64_t(c.integer("experiment.triples", long(opt.triples)));
  opt.interface_points = std::uint64_t(c.integer("experiment.interface_points", long(opt.interface_points)));
  opt.volume_samples = std::uint64_t(c.integer("experiment.volume_samples", long(opt.volume_samples)));
  opt.x_norms = c.list("experiment.x_norms", opt.x_norms);
  opt.radii = c.list("experiment.radii", opt.radii);
  opt.lambdas = c.list("experiment.lambdas", opt.lambdas);
  return [=]() -> Output {
  auto rep = geometry_suite(cm.dims, cm.seed, opt);
  Csv csv{"x_norm", "r", "volume_ratio"};
  std::size_t i = 0;
  for (double x : opt.x_norms)
    for (double r : opt.radii) {
      csv << x << r << rep.volume_ratio[i++];
      csv.end();
    }
  Output o;
  o.csv = csv.str();
  o.report["geometry"] = json::parse(rep.to_json());
  return o;
  };
}

Job run_distance_table(Config& c, const Common& cm) {
  // pairs: "x' x'' | y' y''; ..." with d1 + d2 coordinates per point
  std::string text = c.str("experiment.pairs");
  const int n = cm.dims.d1 + cm.dims.d2;
  Csv csv{"pair", "x", "y", "rho"};
  std::istringstream in(text);
  std::string item;
  int k = 0;
  while (std::getline(in, item, ';')) {
    auto bar = item.find('|');
    if (bar == std::string::npos) throw ConfigError("experiment.pairs", "pair without '|'");
    auto a = coords("experiment.pairs", item.substr(0, bar));
    auto b = coords("experiment.pairs", item.substr(bar + 1));
    if (int(a.size()) != n || int(b.size()) != n)
      throw ConfigError("experiment.pairs", "each point needs d1 + d2 coordinates");
    auto split = [&](const std::vector<double>& v) {
      return MetricPoint{std::vector<double>(v.begin(), v.begin() + cm.dims.d1),
                         std::vector<double>(v.begin() + cm.dims.d1, v.end())};
    };
    auto join = [](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
      return s;
    };
    csv << double(k++) << join(a) << join(b) << grushin_distance(split(a), split(b));
    csv.end();
  }
  if (k == 0) throw ConfigError("experiment.pairs", "no pairs");
  Output o;
  o.csv = csv.str();
  o.report["pairs"] = k;
  return [o]() { return o; };
}

MultiplierProfile read_profile(Config& c) {
  std::string kind = c.str("profile.kind");
  if (kind == "heat") return MultiplierProfile::heat(c.num("profile.t"));
  if (kind == "bochner_riesz")
    return MultiplierProfile::bochner_riesz(c.num("profile.t"), c.num("profile.delta"));
  if (kind == "bump") return smooth_bump(c.num("profile.lo", 0.25), c.num("profile.hi", 1.0));
  throw ConfigError("profile.kind", "unknown profile '" + kind + "'");
}

Job run_kernel_column(Config& c, const Common& cm) {
  auto g = read_grid(c, cm.dims);
  auto tr = read_trunc(c, g);
  auto F = read_profile(c);
  auto yv = c.list("experiment.y");
  if (int(yv.size()) != cm.dims.d1 + cm.dims.d2)
    throw ConfigError("experiment.y", "needs d1 + d2 coordinates");
  MetricPoint y{std::vector<double>(yv.begin(), yv.begin() + cm.dims.d1),
                std::vector<double>(yv.begin() + cm.dims.d1, yv.end())};
  std::pair<std::size_t, std::size_t> at;
  try {
    at = g.locate(y);
  } catch (const std::exception&) {
    throw ConfigError("experiment.y", "not a grid point");
  }
  bool snapshot = c.flag("experiment.snapshot", false);
  return [=]() -> Output {
  auto col = schwartz_kernel_column(F, g, at.first, at.second, tr);
  Csv csv{"quantity", "value"};
  csv << std::string("l1") << col.norm(1.0);
  csv.end();
  csv << std::string("l2") << col.norm(2.0);
  csv.end();
  csv << std::string("sup") << col.sup_norm();
  csv.end();
  Output o;
  o.csv = csv.str();
  o.report["profile"] = F.label;
  if (snapshot) o.extra = [col](const fs::path& dir) { save_field(col, (dir / "column.field").string()); };
  return o;
  };
}

struct Kind {
  const char* name;
  const char* verifies;
  const char* params;
  Runner run;
  bool needs_grid;
};

const std::vector<Kind>& catalog() {
  static const std::vector<Kind> kinds{
      {"weighted_restriction", "weighted restriction estimate, growth in R",
       "experiment.R (required), experiment.p = 1, experiment.gammas = 0", run_weighted, true},
      {"localized_restriction", "localized restriction estimate, growth in R and decay in |y'|",
       "experiment.R, experiment.y_abs, experiment.r (required), experiment.p = 1, experiment.gamma = 0.25",
       run_localized, true},
      {"bochner_riesz", "Bochner-Riesz means, uniformity in R above the critical order",
       "experiment.deltas, experiment.R (required), experiment.p = 1, experiment.y_abs = all representatives",
       run_bochner_riesz, true},
      {"multiplier_norm", "spectral multiplier bound by a Sobolev norm of the profile",
       "experiment.t (required), experiment.s = 1, 2, 3, experiment.p = 1, experiment.y_abs = all representatives",
       run_multiplier, true},
      {"heat_gaussian", "Gaussian upper bound and on-diagonal size of the heat kernel",
       "experiment.t (required), experiment.y_abs = 0, experiment.bins = 40, experiment.rel_floor = 1e-09",
       run_heat, true},
      {"kernel_support", "finite propagation of the dyadic pieces of a multiplier",
       "experiment.levels = 0, 1, 2, experiment.radius = 1, experiment.kappas = 1.1, 1.5, 2, "
       "experiment.y_abs = 0, experiment.reconstruction_levels = 12, cutoff.sharpness = 4",
       run_kernel_support, true},
      {"geometry_suite", "distance formula, ball volumes, doubling and quasi-triangle constants",
       "experiment.triples = 100000, experiment.interface_points = 10000, experiment.volume_samples = 200000, "
       "experiment.x_norms, experiment.radii, experiment.lambdas",
       run_geometry, false},
      {"distance_table", "distance formula",
       "experiment.pairs (required): points as d1 + d2 coordinates, 'x | y' pairs separated by ';'",
       run_distance_table, false},
      {"kernel_column", "kernel of F(L) at one grid point",
       "profile.kind (heat, bochner_riesz, bump), profile.t, profile.delta, experiment.y (required), "
       "experiment.snapshot = false",
       run_kernel_column, true},
  };
  return kinds;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ContractError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const DegenerateInputError*>(&e))
    return 2;
  if (dynamic_cast<const TruncationError*>(&e) || dynamic_cast<const AliasingError*>(&e) ||
      dynamic_cast<const WindowingError*>(&e) || dynamic_cast<const DiscretizationError*>(&e))
    return 3;
  return 1;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const ContractError*>(&e)) return "ContractError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const DegenerateInputError*>(&e)) return "DegenerateInputError";
  if (dynamic_cast<const TruncationError*>(&e)) return "TruncationError";
  if (dynamic_cast<const AliasingError*>(&e)) return "AliasingError";
  if (dynamic_cast<const WindowingError*>(&e)) return "WindowingError";
  if (dynamic_cast<const DiscretizationError*>(&e)) return "DiscretizationError";
  return "Error";
}

fs::path fresh_dir(const fs::path& root, const std::string& kind) {
  fs::create_directories(root);
  for (int i = 1;; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "-%04d", i);
    fs::path p = root / (kind + name);
    if (fs::create_directory(p)) return p;
  }
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

int run_experiment(const std::string& config_path, const RunOverrides& ov, std::ostream& out,
                   std::ostream& err) {
  fs::path dir;
  try {
    Config c = Config::load(config_path);
    if (ov.seed) c.set("seed", std::to_string(*ov.seed));
    if (ov.out) c.set("out", *ov.out);
    if (ov.threads) {
      if (*ov.threads < 1) throw ConfigError("--threads", "must be positive");
      set_thread_count(*ov.threads);
    }
    std::string kind = c.str("kind");
    const Kind* k = nullptr;
    for (const auto& e : catalog())
      if (kind == e.name) k = &e;
    if (!k) throw ConfigError("kind", "unknown experiment kind '" + kind + "'");
    Common cm;
    cm.dims.d1 = int(c.integer("dims.d1", 2));
    cm.dims.d2 = int(c.integer("dims.d2", 1));
    try {
      cm.dims.validate();
    } catch (const std::exception& e) {
      throw ConfigError("dims", e.what());
    }
    long seed = c.integer("seed", 1);
    if (seed < 0) throw ConfigError("seed", "must be non-negative");
    cm.seed = std::uint64_t(seed);
    fs::path root = c.str("out", "runs");
    Job job = k->run(c, cm);
    auto unused = c.unused();
    if (!unused.empty()) throw ConfigError(unused.front(), "unknown key");
    Output o = job();
    dir = fresh_dir(root, kind);
    json report = o.report;
    report["kind"] = kind;
    report["version"] = kVersion;
    report["config"] = c.values();
    report["certificates"] = o.certificates;
    write_file(dir / "config.resolved", "# " + std::string(kVersion) + "\n" + c.resolved());
    write_file(dir / "results.csv", o.csv);
    write_file(dir / "report.json", report.dump(2) + "\n");
    if (o.extra) o.extra(dir);
    out << dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    json rec;
    rec["status"] = "error";
    rec["type"] = error_type(e);
    rec["message"] = e.what();
    rec["exit"] = exit_code(e);
    if (auto* ce = dynamic_cast<const ConfigError*>(&e)) rec["field"] = ce->key;
    if (auto* te = dynamic_cast<const TruncationError*>(&e)) {
      rec["level"] = te->level;
      rec["xi"] = te->xi;
    }
    err << rec.dump() << "\n";
    return exit_code(e);
  }
}

void list_experiments(std::ostream& out) {
  for (const auto& k : catalog()) {
    out << k.name << "\n";
    out << "  verifies: " << k.verifies << "\n";
    out << "  parameters: " << k.params << "\n";
    if (k.needs_grid)
      out << "  grid: grid.X, grid.n_prime, grid.S, grid.n_second, trunc.lambda_max (required), "
             "trunc.K_max = auto, trunc.xi_zero_mode = fourier_multiplier\n";
    out << "  common: dims.d1 = 2, dims.d2 = 1, seed = 1, out = runs\n";
  }
}

}  // namespace grushin
