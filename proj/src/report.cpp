#include "copdiv/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "copdiv/criterion.hpp"
#include "copdiv/estimator.hpp"
#include "copdiv/inference.hpp"
#include "copdiv/montecarlo.hpp"
#include "copdiv/pseudo.hpp"

namespace copdiv {

namespace {

bool parse_double(const std::string& s, double* out) {
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  if (b == e) return false;
  auto [ptr, ec] = std::from_chars(b, e, *out);
  return ec == std::errc() && ptr == e;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

struct Resolved {
  const CopulaModel* model;
  const PhiSpec* phi;
};

Resolved resolve(const RunConfig& cfg) {
  const CopulaModel* m = find_model(cfg.family);
  if (!m) throw std::invalid_argument("unknown family '" + cfg.family + "'");
  const PhiSpec* p = find_builtin(cfg.divergence);
  if (!p) throw std::invalid_argument("unknown divergence '" + cfg.divergence + "'");
  return {m, p};
}

PseudoMode pseudo_mode(const RunConfig& cfg) {
  if (cfg.pseudo_mode == "divide-by-n-plus-1") return PseudoMode::divide_n_plus_1;
  if (cfg.pseudo_mode == "divide-by-n") return PseudoMode::divide_n;
  throw std::invalid_argument("unknown pseudo mode '" + cfg.pseudo_mode + "'");
}

double theta_arg(const RunConfig& cfg) {
  if (cfg.theta.empty()) throw std::invalid_argument("--theta is required here");
  if (cfg.theta.size() != 1) {
    throw std::invalid_argument("built-in families take a scalar --theta");
  }
  return cfg.theta[0];
}

std::uint64_t ensure_seed(RunConfig& cfg) {
  if (!cfg.seed) {
    std::random_device rd;
    cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  return *cfg.seed;
}

Report echo_config(const RunConfig& cfg) {
  Report e;
  e["subcommand"] = cfg.subcommand;
  if (!cfg.data_path.empty()) e["data"] = cfg.data_path;
  e["family"] = cfg.family;
  e["divergence"] = cfg.divergence;
  e["alpha"] = cfg.alpha;
  if (cfg.subcommand == "samplesize") e["beta"] = cfg.beta;
  if (!cfg.theta.empty()) e["theta"] = cfg.theta;
  if (cfg.n > 0) e["n"] = cfg.n;
  if (cfg.reps > 0) e["reps"] = cfg.reps;
  e["quad_order"] = cfg.quad_order;
  e["pseudo_mode"] = cfg.pseudo_mode;
  e["clamp_eps"] = cfg.clamp_eps;
  e["tol"] = cfg.tol;
  e["multistart"] = cfg.multistart;
  if (cfg.subcommand == "simulate") e["mode"] = cfg.mode;
  return e;
}

void run_fit_common(const RunConfig& cfg, Report& rep, bool with_test) {
  if (cfg.data_path.empty()) throw std::invalid_argument("--data is required");
  const auto rv = resolve(cfg);
  const auto data = ingest_csv(cfg.data_path);
  const PseudoSample ps = pseudo_observations(data, pseudo_mode(cfg));
  const QuadratureRule rule = QuadratureRule::gauss_legendre01(cfg.quad_order);
  CriterionContext ctx(*rv.phi, *rv.model, rule, cfg.clamp_eps);
  OptimizerSettings opt;
  opt.theta_tol = cfg.tol;
  opt.multistart = cfg.multistart;
  EstimateResult res = fit(ctx, ps, opt);
  const VarianceComponents vc = variance_components(ctx, ps, res.theta_hat);

  rep["n"] = static_cast<long long>(ps.n);
  rep["theta_hat"] = std::vector<double>{res.theta_hat};
  rep["D_hat"] = res.D_hat;
  rep["converged"] = res.converged;
  rep["gradient_norm"] = res.gradient_norm;
  rep["se"] = std::vector<double>{
      std::sqrt(vc.Xi / static_cast<double>(ps.n))};
  rep["sigma2_hat"] = vc.sigma2;
  rep["S_hat"] = vc.S;
  rep["M_hat"] = vc.M;
  rep["Xi_hat"] = vc.Xi;

  std::vector<std::string> warnings = res.warnings;
  if (with_test) {
    const TestReport tr = independence_test(res, vc, cfg.alpha);
    rep["T_n"] = tr.T_n;
    rep["df"] = tr.df;
    rep["p_value"] = tr.p_value;
    rep["q_crit"] = tr.q_crit;
    rep["reject"] = tr.reject;
    rep["alpha"] = tr.alpha;
  }
  rep["warnings"] = warnings;
}

void run_power_common(const RunConfig& cfg, Report& rep, bool sizing) {
  const auto rv = resolve(cfg);
  const double alt = theta_arg(cfg);
  if (alt == rv.model->theta0()) {
    throw std::invalid_argument(
        "power requires an alternative theta different from the independence value");
  }
  const QuadratureRule rule = QuadratureRule::gauss_legendre01(cfg.quad_order);
  CriterionContext ctx(*rv.phi, *rv.model, rule, cfg.clamp_eps);
  const PopulationDivergence pd = population_divergence(ctx, alt);
  PowerQuery q;
  q.D = pd.D;
  q.sigma = std::sqrt(pd.sigma2);
  q.alpha = cfg.alpha;
  rep["D"] = pd.D;
  rep["sigma2"] = pd.sigma2;
  if (sizing) {
    q.beta = cfg.beta;
    const SampleSizeResult sz = sample_size(q);
    rep["n_star"] = sz.n_star;
    rep["n0"] = sz.n0;
    rep["n0_closed_form"] = sz.n0_closed_form;
    rep["beta"] = cfg.beta;
  } else {
    if (cfg.n <= 0) throw std::invalid_argument("--n is required for power");
    q.n = static_cast<double>(cfg.n);
    rep["n"] = cfg.n;
    rep["power"] = power_approx(q);
  }
  rep["alpha"] = cfg.alpha;
  rep["warnings"] = std::vector<std::string>{};
}

}  // namespace

std::vector<std::array<double, 2>> ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
  std::vector<std::array<double, 2>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 2) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 2 columns, got " +
                               std::to_string(cells.size()));
    }
    double x, y;
    const bool ok = parse_double(cells[0], &x) && parse_double(cells[1], &y);
    if (!ok) {
      if (first_content) {  // single header row
        first_content = false;
        continue;
      }
      throw std::runtime_error("line " + std::to_string(lineno) + ": non-numeric cell");
    }
    first_content = false;
    rows.push_back({x, y});
  }
  if (rows.size() < 2) {
    throw std::runtime_error("data file '" + path + "' holds fewer than 2 rows");
  }
  return rows;
}

Report dispatch(const RunConfig& config) {
  RunConfig cfg = config;  // seed may be generated
  Report rep;
  rep["schema_version"] = "1";
  rep["family"] = cfg.family;
  rep["divergence"] = cfg.divergence;

  if (cfg.subcommand == "fit") {
    run_fit_common(cfg, rep, false);
  } else if (cfg.subcommand == "test") {
    run_fit_common(cfg, rep, true);
  } else if (cfg.subcommand == "power") {
    run_power_common(cfg, rep, false);
  } else if (cfg.subcommand == "samplesize") {
    run_power_common(cfg, rep, true);
  } else if (cfg.subcommand == "sample") {
    const auto rv = resolve(cfg);
    if (cfg.n < 1) throw std::invalid_argument("--n is required for sample");
    const double theta = theta_arg(cfg);
    const std::uint64_t seed = ensure_seed(cfg);
    const auto pts =
        rv.model->sample(theta, static_cast<std::size_t>(cfg.n), seed);
    if (cfg.out_path.empty()) {
      throw std::invalid_argument("sample requires --out <csv path>");
    }
    std::ofstream out(cfg.out_path);
    if (!out) throw std::runtime_error("cannot write '" + cfg.out_path + "'");
    out << "u1,u2\n";
    out.precision(17);
    for (const auto& p : pts) out << p[0] << "," << p[1] << "\n";
    rep["n"] = cfg.n;
    rep["theta"] = std::vector<double>{theta};
    rep["seed"] = seed;
    rep["csv_path"] = cfg.out_path;
    rep["warnings"] = std::vector<std::string>{};
  } else if (cfg.subcommand == "simulate") {
    const auto rv = resolve(cfg);
    StudyConfig sc;
    sc.mode = (cfg.mode == "alternative") ? StudyMode::alternative : StudyMode::null_law;
    if (cfg.mode != "null" && cfg.mode != "alternative") {
      throw std::invalid_argument("mode must be 'null' or 'alternative'");
    }
    sc.family = rv.model->family();
    sc.divergence = rv.phi->id;
    sc.theta_true = cfg.theta.empty() ? rv.model->theta0() : theta_arg(cfg);
    if (cfg.n <= 0 || cfg.reps <= 0) {
      throw std::invalid_argument("simulate requires --n and --reps");
    }
    sc.n = static_cast<std::size_t>(cfg.n);
    sc.reps = static_cast<std::size_t>(cfg.reps);
    sc.seed = ensure_seed(cfg);
    sc.alpha = cfg.alpha;
    sc.quad_order = cfg.quad_order;
    sc.clamp_eps = cfg.clamp_eps;
    sc.optimizer.theta_tol = cfg.tol;
    sc.optimizer.multistart = cfg.multistart;
    sc.threads = cfg.threads;
    const StudySummary sum = run_study(sc);
    Report js;
    js["statistics"] = sum.statistics;
    js["rejection_rate"] = sum.rejection_rate;
    js["ks_to_reference"] = sum.ks_to_reference;
    js["mean"] = sum.mean;
    js["variance"] = sum.variance;
    js["failures"] = static_cast<long long>(sum.failures);
    if (sc.mode == StudyMode::alternative && sc.compute_variance) {
      js["coverage"] = sum.coverage;
      js["mean_xi"] = sum.mean_xi;
      js["var_scaled_estimates"] = sum.var_scaled_estimates;
    }
    // runtime is deliberately not serialized: identical configs must yield
    // byte-identical reports
    rep["study"] = js;
    rep["n"] = cfg.n;
    rep["reps"] = cfg.reps;
    rep["alpha"] = cfg.alpha;
    rep["seed"] = sc.seed;
    rep["theta"] = std::vector<double>{sc.theta_true};
    rep["mode"] = cfg.mode;
    rep["warnings"] = sum.warnings;
  } else {
    throw std::invalid_argument("unknown subcommand '" + cfg.subcommand + "'");
  }

  if (cfg.seed && !rep.contains("seed")) rep["seed"] = *cfg.seed;
  rep["config"] = echo_config(cfg);
  return rep;
}

std::string render_text(const Report& report) {
  std::ostringstream os;
  os.precision(15);
  const std::string sub = report["config"]["subcommand"].get<std::string>();
  os << "copdiv " << sub << " (" << report["family"].get<std::string>() << ", "
     << report["divergence"].get<std::string>() << ")\n";
  if (report.contains("theta_hat")) {
    os << "  theta_hat = " << report["theta_hat"][0].get<double>()
       << "  (se " << report["se"][0].get<double>() << ")\n";
    os << "  D_hat     = " << report["D_hat"].get<double>() << "\n";
  }
  if (report.contains("T_n")) {
    os << "  T_n = " << report["T_n"].get<double>() << "  df = "
       << report["df"].get<int>() << "  p = " << report["p_value"].get<double>()
       << "\n";
    const double alpha = report["alpha"].get<double>();
    os << "  decision: "
       << (report["reject"].get<bool>() ? "reject independence at level "
                                        : "fail to reject independence at level ")
       << alpha << "\n";
  }
  if (report.contains("power")) {
    os << "  D = " << report["D"].get<double>() << "  sigma2 = "
       << report["sigma2"].get<double>() << "\n";
    os << "  power(n=" << report["n"].get<long long>() << ") = "
       << report["power"].get<double>() << "\n";
  }
  if (report.contains("n_star")) {
    os << "  D = " << report["D"].get<double>() << "  sigma2 = "
       << report["sigma2"].get<double>() << "\n";
    os << "  n* = " << report["n_star"].get<long long>() << "  (n0 = "
       << report["n0"].get<double>()
       << ", printed closed form = " << report["n0_closed_form"].get<double>()
       << ")\n";
  }
  if (report.contains("csv_path")) {
    os << "  wrote " << report["n"].get<long long>() << " pairs to "
       << report["csv_path"].get<std::string>() << "\n";
  }
  if (report.contains("study")) {
    const auto& st = report["study"];
    os << "  reps = " << report["reps"].get<long long>() << "  n = "
       << report["n"].get<long long>() << "  failures = "
       << st["failures"].get<long long>() << "\n";
    os << "  rejection_rate = " << st["rejection_rate"].get<double>()
       << "  ks = " << st["ks_to_reference"].get<double>() << "\n";
    os << "  mean = " << st["mean"].get<double>() << "  variance = "
       << st["variance"].get<double>() << "\n";
    if (st.contains("coverage")) {
      os << "  coverage = " << st["coverage"].get<double>() << "  mean_xi = "
         << st["mean_xi"].get<double>() << "\n";
    }
  }
  if (report.contains("seed")) {
    os << "  seed = " << report["seed"].get<std::uint64_t>() << "\n";
  }
  if (report.contains("warnings")) {
    for (const auto& w : report["warnings"]) {
      os << "  warning: " << w.get<std::string>() << "\n";
    }
  }
  return os.str();
}

}  // namespace copdiv
