#include "specbound/cli.hpp"

#include "specbound/commutators.hpp"
#include "specbound/core.hpp"
#include "specbound/functions.hpp"
#include "specbound/inequalities.hpp"
#include "specbound/io.hpp"
#include "specbound/models.hpp"
#include "specbound/weyl.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace specbound::cli {
namespace {

const std::set<std::string> kLaws = {
    "moment-order", "geometric-mean", "yang-cap",          "riesz-monotone", "zp-monotone",
    "ratio-bound",  "pln-1",          "pln-2",             "dirichlet-refined",
    "c2",           "t1",             "trk",               "c1",
    "abel",         "weyl"};

const std::set<std::string> kSweepLaws = {
    "moment-order", "geometric-mean", "yang-cap", "ratio-bound",
    "pln-1",        "pln-2",          "dirichlet-refined", "c2"};

struct Usage : PreconditionError {
  using PreconditionError::PreconditionError;
};

// ── small parsers ────────────────────────────────────────────────────────

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double to_real(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Usage("cannot parse " + what + " from '" + s + "'");
  }
}

long to_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Usage("cannot parse " + what + " from '" + s + "'");
  }
}

// "7" -> {7};  "1..100" -> 1,2,...,100;  "2..20:3" -> 2,5,8,...
std::vector<long> parse_int_axis(const std::string& text, const std::string& name) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {to_int(text, name)};
  const auto colon = text.find(':', dots + 2);
  const long lo = to_int(text.substr(0, dots), name);
  const long hi = to_int(colon == std::string::npos ? text.substr(dots + 2)
                                                    : text.substr(dots + 2, colon - dots - 2),
                         name);
  const long step = colon == std::string::npos ? 1 : to_int(text.substr(colon + 1), name);
  if (step <= 0 || hi < lo) throw Usage("bad range for " + name + ": '" + text + "'");
  std::vector<long> out;
  for (long v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

// "0.5" -> {0.5};  "0.2..1.0:0.2" -> 0.2,0.4,...,1.0 (step required when lo < hi)
std::vector<double> parse_real_axis(const std::string& text, const std::string& name) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {to_real(text, name)};
  const auto colon = text.find(':', dots + 2);
  const double lo = to_real(text.substr(0, dots), name);
  const double hi = to_real(colon == std::string::npos ? text.substr(dots + 2)
                                                       : text.substr(dots + 2, colon - dots - 2),
                            name);
  if (colon == std::string::npos) {
    if (hi != lo) throw Usage("range for " + name + " needs a step: '" + text + "' (lo..hi:step)");
    return {lo};
  }
  const double step = to_real(text.substr(colon + 1), name);
  if (!(step > 0.0) || hi < lo) throw Usage("bad range for " + name + ": '" + text + "'");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = lo + step * i;
    if (v > hi + 0.5 * step) break;
    out.push_back(std::min(v, hi));
  }
  return out;
}

std::vector<double> parse_sides(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) out.push_back(to_real(tok, "side length"));
  return out;
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  for (const auto& tok : split(text, ',')) {
    out.push_back(static_cast<int>(to_int(tok, "grid size")));
  }
  return out;
}

// family=exp:t=1.0 | power:z=..,p=.. | moment:z=..,p=..,q=.. | log:z=..,p=.. |
// quad:a=..,b=..,c=..
FunctionSpec parse_family(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  FamilyParams params;
  if (colon != std::string::npos) {
    for (const auto& kv : split(text.substr(colon + 1), ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Usage("family parameter '" + kv + "' is not key=value");
      const std::string key = kv.substr(0, eq);
      const double val = to_real(kv.substr(eq + 1), "family parameter " + key);
      if (key == "t") params.t = val;
      else if (key == "z") params.z = val;
      else if (key == "p") params.p = val;
      else if (key == "q") params.q = val;
      else if (key == "a") params.a = val;
      else if (key == "b") params.b = val;
      else if (key == "c") params.c = val;
      else throw Usage("unknown family parameter '" + key + "' in '" + text + "'");
    }
  }
  FamilyKind kind;
  if (head == "exp") kind = FamilyKind::Exp;
  else if (head == "power") kind = FamilyKind::Power;
  else if (head == "moment") kind = FamilyKind::Moment;
  else if (head == "log") kind = FamilyKind::Log;
  else if (head == "quad") kind = FamilyKind::Quadratic;
  else throw Usage("unknown family '" + head + "' (exp, power, moment, log, quad)");
  return make_family(kind, params);
}

double resolve_tol(const std::optional<double>& flag) {
  if (flag) {
    if (!(*flag > 0.0)) throw Usage("--tol must be positive");
    return *flag;
  }
  if (const char* env = std::getenv("SPECBOUND_TOL")) {
    const double v = to_real(env, "SPECBOUND_TOL");
    if (!(v > 0.0)) throw Usage("SPECBOUND_TOL must be positive");
    return v;
  }
  return 1e-9;
}

// ── shared configuration ─────────────────────────────────────────────────

struct ModelFlags {
  std::string model;
  std::string sides = "1";
  std::string grid;
  long count = 100;
  int dim = 1;
  double length = 1.0;
  std::string potential = "zero";
};

struct ConstantFlags {
  std::optional<double> alpha, beta, gamma;

  bool any() const { return alpha.has_value() || beta.has_value() || gamma.has_value(); }
  CommutatorConstants get() const {
    if (!(alpha && beta && gamma)) {
      throw Usage("--alpha, --beta and --gamma must be given together");
    }
    CommutatorConstants c{*alpha, *beta, *gamma};
    c.validate();
    return c;
  }
};

Vector build_potential(const std::string& descriptor, int n, double length) {
  const auto colon = descriptor.find(':');
  const std::string head = descriptor.substr(0, colon);
  std::map<std::string, double> kv;
  if (colon != std::string::npos) {
    for (const auto& item : split(descriptor.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw Usage("potential parameter '" + item + "' is not key=value");
      }
      kv[item.substr(0, eq)] = to_real(item.substr(eq + 1), "potential parameter");
    }
  }
  Vector v = Vector::Zero(n);
  const double h = length / (n + 1);
  if (head == "zero") {
    // all zeros
  } else if (head == "const") {
    if (!kv.count("v0")) throw Usage("potential const needs v0=..");
    v.setConstant(kv.at("v0"));
  } else if (head == "harmonic") {
    const double k = kv.count("k") ? kv.at("k") : 1.0;
    const double mid = 0.5 * length;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 1) * h;
      v(i) = k * (x - mid) * (x - mid);
    }
  } else {
    throw Usage("unknown potential '" + head + "' (zero, const:v0=.., harmonic[:k=..])");
  }
  return v;
}

bool is_fd_model(const std::string& model) {
  return model == "fd-dirichlet" || model == "fd-schrodinger";
}

MatrixModel build_matrix_model(const ModelFlags& m, const ConstantFlags& consts) {
  if (m.model == "fd-dirichlet") {
    const auto sides = parse_sides(m.sides);
    const std::vector<int> grid =
        m.grid.empty() ? std::vector<int>(sides.size(), 64) : parse_grid(m.grid);
    return discretize_dirichlet(sides, grid);
  }
  if (m.model == "fd-schrodinger") {
    const int n = m.grid.empty() ? 64 : parse_grid(m.grid).at(0);
    MatrixModel base =
        discretize_schrodinger_1d(build_potential(m.potential, n, m.length), 0.0, m.length);
    if (!consts.any()) {
      throw Usage("fd-schrodinger carries no built-in constants; pass --alpha --beta --gamma");
    }
    return MatrixModel(base.H(), base.G(), consts.get(), base.label(), base.mesh(),
                       base.dimension(), base.volume());
  }
  throw Usage("law requires a matrix model; use --model fd-dirichlet or fd-schrodinger");
}

Spectrum build_model_spectrum(const ModelFlags& m, const ConstantFlags& consts) {
  if (m.model == "box") return box_spectrum(parse_sides(m.sides), m.count);
  if (m.model == "oscillator") return oscillator_spectrum(m.dim, m.count);
  if (is_fd_model(m.model)) return spectrum_of(build_matrix_model(m, consts));
  throw Usage("unknown model '" + m.model + "' (box, oscillator, fd-dirichlet, fd-schrodinger)");
}

struct InputFlags {
  std::string spectrum_file;
  ModelFlags model;
  ConstantFlags consts;

  bool has_model() const { return !model.model.empty(); }

  Spectrum load() const {
    if (spectrum_file.empty() == !has_model()) {
      throw Usage("exactly one input source required: --spectrum FILE or --model NAME");
    }
    Spectrum s = spectrum_file.empty() ? build_model_spectrum(model, consts)
                                       : load_spectrum(spectrum_file);
    if (consts.any()) s.constants = consts.get();
    return s;
  }

  CommutatorConstants constants_of(const Spectrum& s) const {
    if (s.constants) return *s.constants;
    throw Usage("constants required: the input carries no (alpha, beta, gamma); pass --alpha "
                "--beta --gamma or use a model that provides them");
  }
};

// ── report printing ──────────────────────────────────────────────────────

std::string context_string(const ReportContext& c) {
  std::ostringstream os;
  if (c.n) os << " n=" << *c.n;
  if (c.k) os << " k=" << *c.k;
  if (c.p) os << " p=" << format_double(*c.p);
  if (c.q) os << " q=" << format_double(*c.q);
  if (c.z) os << " z=" << format_double(*c.z);
  if (c.t) os << " t=" << format_double(*c.t);
  if (c.rho) os << " rho=" << format_double(*c.rho);
  return os.str();
}

void print_report(const InequalityReport& r) {
  std::cout << (r.verdict ? "pass" : "FAIL") << "  " << r.law << context_string(r.context)
            << "  lhs=" << format_double(r.lhs) << "  rhs=" << format_double(r.rhs)
            << "  slack=" << format_double(r.slack) << "  tol=" << format_double(r.tolerance);
  if (!r.note.empty()) std::cout << "  [" << r.note << "]";
  std::cout << "\n";
}

void print_report(const MonotonicityReport& r) {
  std::cout << (r.verdict ? "pass" : "FAIL") << "  " << r.law << context_string(r.context)
            << "  grid=" << r.grid.size()
            << "pts  max_violation=" << format_double(r.max_violation)
            << "  tol=" << format_double(r.tolerance);
  if (!r.note.empty()) std::cout << "  [" << r.note << "]";
  std::cout << "\n";
}

struct ReportSet {
  std::vector<InequalityReport> checks;
  std::vector<MonotonicityReport> monotone;

  void add(InequalityReport r) {
    print_report(r);
    checks.push_back(std::move(r));
  }
  void add(MonotonicityReport r) {
    print_report(r);
    monotone.push_back(std::move(r));
  }
  bool all_pass() const {
    for (const auto& r : checks) {
      if (!r.verdict) return false;
    }
    for (const auto& r : monotone) {
      if (!r.verdict) return false;
    }
    return true;
  }
  size_t size() const { return checks.size() + monotone.size(); }
};

void write_artifacts(const ReportSet& set, const std::string& json_path,
                     const std::string& csv_path, const std::string& tsv_path) {
  if (!json_path.empty()) write_text_file(json_path, reports_to_json(set.checks, set.monotone));
  if (!csv_path.empty()) write_text_file(csv_path, reports_to_csv(set.checks, set.monotone));
  if (!tsv_path.empty()) {
    if (set.monotone.empty()) throw Usage("--tsv needs a grid-based law (riesz/zp monotonicity)");
    write_text_file(tsv_path, monotonicity_to_tsv(set.monotone.front()));
  }
}

// ── law parameters and dispatch ──────────────────────────────────────────

struct LawParams {
  std::optional<long> n, k;
  std::optional<double> p, q, z, t, rho, L;
  std::string family;
  int points = 200;
  std::optional<double> grid_lo, grid_hi;
  bool full_trace = false;
  bool allow_low_rho = false;
  double tol = 1e-9;
  double trust = 1e-10;
};

long require_n(const LawParams& lp, const char* law) {
  if (!lp.n) throw Usage(std::string(law) + " requires --n");
  return *lp.n;
}

double require_real(const std::optional<double>& v, const char* flag, const char* law) {
  if (!v) throw Usage(std::string(law) + " requires " + flag);
  return *v;
}

FunctionSpec require_family(const LawParams& lp, const char* law) {
  if (lp.family.empty()) {
    throw Usage(std::string(law) +
                " requires --family (exp:t=.., power:z=..,p=.., moment:z=..,p=..,q=.., "
                "log:z=..,p=.., quad:a=..,b=..,c=..)");
  }
  return parse_family(lp.family);
}

Vector linear_grid(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw Usage("grid needs at least 2 points and hi > lo");
  Vector g(points);
  for (int i = 0; i < points; ++i) {
    g(i) = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  }
  return g;
}

Vector log_grid(double lo, double hi, int points) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) {
    throw Usage("log grid needs at least 2 points and 0 < lo < hi");
  }
  Vector g(points);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < points; ++i) {
    g(i) = std::exp(llo + (lhi - llo) * static_cast<double>(i) / (points - 1));
  }
  return g;
}

// Smallest t at which the weighted partition function is certified for this
// spectrum, padded 2%; complete spectra have no threshold.
double certified_t_floor(const Spectrum& s, const CommutatorConstants& c, double p, double trust) {
  if (spectrum_is_complete(s)) return 0.0;
  try {
    weighted_partition_Z(s, c, p, 1e-8, trust);
    return 1e-8;
  } catch (const TrustRegionError& e) {
    return e.threshold * 1.02;
  }
}

// Default subset J = the first n eigenpairs.
std::vector<Eigen::Index> leading_indices(long n, Eigen::Index order, const char* law) {
  if (n < 1 || n > order) {
    throw Usage(std::string(law) + ": --n must lie in [1, " + std::to_string(order) + "]");
  }
  std::vector<Eigen::Index> J(static_cast<size_t>(n));
  std::iota(J.begin(), J.end(), Eigen::Index{0});
  return J;
}

InequalityReport residual_report(std::string law, double residual, double scale, double tol_rel,
                                 ReportContext ctx = {}) {
  InequalityReport r;
  r.law = std::move(law);
  r.lhs = std::abs(residual);
  r.rhs = tol_rel * scale;
  r.slack = r.rhs - r.lhs;
  r.tolerance = 0.0;
  r.verdict = r.slack >= 0.0;
  r.context = ctx;
  r.note = "identity residual against budget";
  return r;
}

InequalityReport weyl_report(const Spectrum& s) {
  const CountingRatioReport res = check_counting_ratio(s);
  InequalityReport r;
  r.law = "weyl";
  r.lhs = std::abs(res.ratio - 1.0);
  r.rhs = res.band;
  r.slack = r.rhs - r.lhs;
  r.tolerance = 0.0;
  r.verdict = res.verdict;
  r.context.n = static_cast<int>(res.n_exact);
  r.context.z = res.lambda_eval;
  std::ostringstream note;
  note << "counting ratio " << format_double(res.ratio) << " vs asymptote at lambda="
       << format_double(res.lambda_eval);
  r.note = note.str();
  return r;
}

InequalityReport abel_report(const Spectrum& s, const FunctionSpec& f, double L, double tol) {
  const AbelResult res = abel_identity(s, f, L);
  ReportContext ctx;
  ctx.z = L;
  if (f.params.count("t")) ctx.t = f.params.at("t");
  return residual_report("abel", res.residual, res.scale, tol, ctx);
}

void run_matrix_law(const std::string& law, const MatrixModel& model, const LawParams& lp,
                    ReportSet& out) {
  const Vector& lam = model.decomposition().eigenvalues;
  const double lo = lam(0);
  const double hi = lam(lam.size() - 1);

  if (law == "trk") {
    const IdentityResiduals res = trk_residual(model);
    out.add(residual_report("trk", res.max_abs, res.scale, lp.tol));
    return;
  }
  if (law == "c1") {
    const long n = lp.n ? *lp.n : std::max<long>(model.order() / 2, 1);
    const auto J = leading_indices(n, model.order(), "c1");
    const double z = lp.z ? *lp.z : 0.5 * (lo + hi);
    const QuadraticIdentityResult res = quadratic_identity_residual(model, J, z);
    ReportContext ctx;
    ctx.n = static_cast<int>(J.size());
    ctx.z = z;
    out.add(residual_report("c1", res.residual, res.scale, lp.tol, ctx));
    return;
  }
  // t1
  const long n = lp.n ? *lp.n : std::max<long>(model.order() / 2, 1);
  const auto J = leading_indices(n, model.order(), "t1");
  const FunctionSpec f = lp.family.empty() ? make_exp_family(1.0 / std::max(1.0, hi - lo))
                                           : parse_family(lp.family);
  out.add(check_T1(model, J, f, lp.tol));
}

void run_law(const std::string& law, const InputFlags& in, const LawParams& lp, ReportSet& out) {
  if (law == "trk" || law == "c1" || law == "t1") {
    if (!in.spectrum_file.empty()) {
      throw Usage(law + " needs operator data, not a spectrum file; pass --model fd-dirichlet "
                        "or fd-schrodinger");
    }
    run_matrix_law(law, build_matrix_model(in.model, in.consts), lp, out);
    return;
  }

  const Spectrum s = in.load();

  if (law == "abel") {
    const FunctionSpec f = lp.family.empty() ? make_exp_family(1e-3) : parse_family(lp.family);
    const double L = lp.L ? *lp.L : s.values(s.size() - 1);
    out.add(abel_report(s, f, L, lp.tol));
    return;
  }
  if (law == "weyl") {
    out.add(weyl_report(s));
    return;
  }

  const CommutatorConstants c = in.constants_of(s);

  if (law == "moment-order") {
    out.add(check_moment_order(s, c, require_n(lp, "moment-order"),
                               require_real(lp.p, "--p", "moment-order"),
                               require_real(lp.q, "--q", "moment-order"), lp.tol));
  } else if (law == "geometric-mean") {
    out.add(check_geometric_bound(s, c, require_n(lp, "geometric-mean"),
                                  require_real(lp.p, "--p", "geometric-mean"), lp.tol));
  } else if (law == "yang-cap") {
    out.add(check_yang_cap(s, c, require_n(lp, "yang-cap"), lp.tol));
  } else if (law == "ratio-bound") {
    if (!lp.k) throw Usage("ratio-bound requires --k");
    out.add(check_ratio_bound(s, c, require_n(lp, "ratio-bound"), *lp.k, lp.tol));
  } else if (law == "pln-1" || law == "pln-2") {
    const GapBoundReports reports = check_pln_bounds(
        s, c, require_n(lp, law.c_str()), require_real(lp.p, "--p", law.c_str()), lp.tol);
    out.add(law == "pln-1" ? reports.difference : reports.quotient);
  } else if (law == "dirichlet-refined") {
    out.add(check_dirichlet_refined(s, c, require_n(lp, "dirichlet-refined"),
                                    require_real(lp.p, "--p", "dirichlet-refined"),
                                    require_real(lp.q, "--q", "dirichlet-refined"), lp.tol));
  } else if (law == "c2") {
    const FunctionSpec f = require_family(lp, "c2");
    if (lp.full_trace) {
      out.add(check_C2_general(s, c, s.size(), f, C2Mode::FullTrace, lp.tol));
    } else {
      out.add(check_C2_general(s, c, require_n(lp, "c2 (partial mode)"), f, C2Mode::Partial,
                               lp.tol));
    }
  } else if (law == "riesz-monotone") {
    const double rho = require_real(lp.rho, "--rho", "riesz-monotone");
    const double top = s.values(s.size() - 1);
    const double lo = lp.grid_lo ? *lp.grid_lo : 0.5 * s.lambda(1);
    const double hi = lp.grid_hi ? *lp.grid_hi : top;
    out.add(check_riesz_monotone(s, c, rho, linear_grid(lo, hi, lp.points), lp.tol,
                                 lp.allow_low_rho));
  } else if (law == "zp-monotone") {
    const double p = require_real(lp.p, "--p", "zp-monotone");
    double lo, hi;
    if (lp.grid_lo || lp.grid_hi) {
      lo = require_real(lp.grid_lo, "--tmin", "zp-monotone with explicit grid");
      hi = require_real(lp.grid_hi, "--tmax", "zp-monotone with explicit grid");
    } else {
      const double floor_t = certified_t_floor(s, c, p, lp.trust);
      lo = floor_t > 0.0 ? floor_t : 0.01 / std::max(1.0, s.lambda(1));
      hi = 100.0 * lo;
    }
    out.add(check_Z_monotone(s, c, p, log_grid(lo, hi, lp.points), lp.tol, lp.trust));
  } else {
    throw Usage("law '" + law + "' is not dispatchable here");
  }
}

// ── subcommand configs ───────────────────────────────────────────────────

struct GenConfig {
  ModelFlags model;
  ConstantFlags consts;
  std::string out;
};

struct VerifyConfig {
  InputFlags in;
  std::string law;
  LawParams lp;
  std::optional<double> tol_flag;
  std::string json_out, csv_out, tsv_out;
};

struct SweepConfig {
  InputFlags in;
  std::string law;
  std::string n_axis, p_axis, q_axis, k_axis;
  std::string family;
  std::optional<double> tol_flag;
  std::string csv_out, json_out;
};

struct IdentitiesConfig {
  long trials = 200;
  long order = 24;
  unsigned long seed = 0x5eedb0d5ull;
  std::optional<double> tol_flag;
};

struct ReportConfig {
  InputFlags in;
  std::optional<double> tol_flag;
  std::string json_out, csv_out;
};

void require_known_law(const std::string& law) {
  if (kLaws.count(law)) return;
  std::ostringstream os;
  os << "unknown law '" << law << "'; known laws:";
  for (const auto& l : kLaws) os << " " << l;
  throw Usage(os.str());
}

// ── gen ──────────────────────────────────────────────────────────────────

int do_gen(const GenConfig& cfg) {
  if (cfg.model.model.empty()) throw Usage("gen requires --model");
  if (cfg.out.empty()) throw Usage("gen requires --out");
  Spectrum s = build_model_spectrum(cfg.model, cfg.consts);
  if (cfg.consts.any()) s.constants = cfg.consts.get();
  save_spectrum(s, cfg.out);
  std::cout << "wrote " << s.size() << " eigenvalues (" << s.label << ") to " << cfg.out << "\n";
  return 0;
}

// ── verify ───────────────────────────────────────────────────────────────

int finish(const ReportSet& set) {
  const bool ok = set.all_pass();
  std::cout << (ok ? "all pass" : "FAILURES present") << " (" << set.size() << " check"
            << (set.size() == 1 ? "" : "s") << ")\n";
  return ok ? 0 : 2;
}

int do_verify(VerifyConfig cfg) {
  require_known_law(cfg.law);
  cfg.lp.tol = resolve_tol(cfg.tol_flag);
  ReportSet set;
  run_law(cfg.law, cfg.in, cfg.lp, set);
  write_artifacts(set, cfg.json_out, cfg.csv_out, cfg.tsv_out);
  return finish(set);
}

// ── sweep ────────────────────────────────────────────────────────────────

int do_sweep(SweepConfig cfg) {
  require_known_law(cfg.law);
  if (!kSweepLaws.count(cfg.law)) {
    throw Usage("law '" + cfg.law + "' is not sweepable (grid and operator laws run via "
                "verify); sweepable: moment-order geometric-mean yang-cap ratio-bound pln-1 "
                "pln-2 dirichlet-refined c2");
  }
  const double tol = resolve_tol(cfg.tol_flag);
  const Spectrum s = cfg.in.load();
  const CommutatorConstants c = cfg.in.constants_of(s);

  const std::vector<long> ns =
      cfg.n_axis.empty() ? std::vector<long>{} : parse_int_axis(cfg.n_axis, "--n");
  const std::vector<double> ps =
      cfg.p_axis.empty() ? std::vector<double>{} : parse_real_axis(cfg.p_axis, "--p");
  const bool q_auto = cfg.q_axis == "auto";
  const std::vector<double> qs = (cfg.q_axis.empty() || q_auto)
                                     ? std::vector<double>{}
                                     : parse_real_axis(cfg.q_axis, "--q");
  const std::vector<long> ks =
      cfg.k_axis.empty() ? std::vector<long>{} : parse_int_axis(cfg.k_axis, "--k");

  const bool needs_p = cfg.law != "yang-cap" && cfg.law != "ratio-bound" && cfg.law != "c2";
  const bool needs_q = cfg.law == "moment-order" || cfg.law == "dirichlet-refined";
  if (ns.empty()) throw Usage("sweep requires --n (value or lo..hi[:step])");
  if (needs_p && ps.empty()) throw Usage("sweep of " + cfg.law + " requires --p");
  if (needs_q && qs.empty() && !q_auto) {
    throw Usage("sweep of " + cfg.law + " requires --q (grid or 'auto')");
  }
  if (cfg.law == "ratio-bound" && ks.empty()) throw Usage("sweep of ratio-bound requires --k");
  std::optional<FunctionSpec> c2_family;
  if (cfg.law == "c2") c2_family = parse_family(cfg.family.empty() ? "exp:t=1.0" : cfg.family);

  ReportSet set;
  size_t skipped = 0;
  const std::vector<double> p_loop = needs_p ? ps : std::vector<double>{0.0};
  const std::vector<long> k_loop = cfg.law == "ratio-bound" ? ks : std::vector<long>{0};

  for (long n : ns) {
    for (double p : p_loop) {
      std::vector<double> q_loop{0.0};
      if (needs_q) {
        if (q_auto) {
          const double q = std::min({p / 2.0, 1.0, 3.0 - p});
          if (!(q > 0.0)) {
            ++skipped;
            continue;
          }
          q_loop = {q};
        } else {
          q_loop = qs;
        }
      }
      for (double q : q_loop) {
        for (long k : k_loop) {
          try {
            if (cfg.law == "moment-order") {
              set.add(check_moment_order(s, c, n, p, q, tol));
            } else if (cfg.law == "geometric-mean") {
              set.add(check_geometric_bound(s, c, n, p, tol));
            } else if (cfg.law == "yang-cap") {
              set.add(check_yang_cap(s, c, n, tol));
            } else if (cfg.law == "ratio-bound") {
              set.add(check_ratio_bound(s, c, n, k, tol));
            } else if (cfg.law == "pln-1") {
              set.add(check_pln_bounds(s, c, n, p, tol).difference);
            } else if (cfg.law == "pln-2") {
              set.add(check_pln_bounds(s, c, n, p, tol).quotient);
            } else {  // c2
              set.add(check_C2_general(s, c, n, *c2_family, C2Mode::Partial, tol));
            }
          } catch (const Usage&) {
            throw;
          } catch (const PreconditionError&) {
            // inadmissible grid point (exponent region, index bounds, hypotheses)
            ++skipped;
          }
        }
      }
    }
  }

  if (set.size() == 0) {
    throw Usage("sweep produced no admissible grid points (" + std::to_string(skipped) +
                " skipped); check the ranges");
  }
  if (skipped > 0) {
    std::cout << "skipped " << skipped << " inadmissible grid point" << (skipped == 1 ? "" : "s")
              << "\n";
  }
  if (!cfg.csv_out.empty()) write_text_file(cfg.csv_out, reports_to_csv(set.checks, set.monotone));
  if (!cfg.json_out.empty()) {
    write_text_file(cfg.json_out, reports_to_json(set.checks, set.monotone));
  }
  return finish(set);
}

// ── identities ───────────────────────────────────────────────────────────

Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> dist;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = dist(rng);
  }
  return 0.5 * (a + a.transpose());
}

int do_identities(const IdentitiesConfig& cfg) {
  if (cfg.trials < 1) throw Usage("--trials must be >= 1");
  if (cfg.order < 2) throw Usage("--order must be >= 2");
  const double tol = resolve_tol(cfg.tol_flag);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<long> order_dist(2, cfg.order);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double trk_worst = 0.0;
  double c1_worst = 0.0;
  double t1_min_slack = std::numeric_limits<double>::infinity();
  double quad_worst = 0.0;
  long failures = 0;

  for (long trial = 0; trial < cfg.trials; ++trial) {
    const Eigen::Index n = order_dist(rng);
    const MatrixModel model(random_symmetric(rng, n), random_symmetric(rng, n));
    const Vector& lam = model.decomposition().eigenvalues;
    const double lo = lam(0);
    const double hi = lam(n - 1);
    const double spread = std::max(hi - lo, 1e-6);

    const IdentityResiduals trk = trk_residual(model);
    trk_worst = std::max(trk_worst, trk.max_abs / trk.scale);
    if (trk.max_abs > tol * trk.scale) {
      ++failures;
      std::cout << "FAIL  trk trial=" << trial << "  max|residual|=" << format_double(trk.max_abs)
                << "  budget=" << format_double(tol * trk.scale) << "\n";
    }

    std::vector<Eigen::Index> J(n);
    std::iota(J.begin(), J.end(), Eigen::Index{0});
    if (trial % 4 != 0) {  // every fourth trial keeps the full index set
      std::shuffle(J.begin(), J.end(), rng);
      J.resize(1 + static_cast<Eigen::Index>(unit(rng) * static_cast<double>(n - 1)));
      std::sort(J.begin(), J.end());
    }
    const double z = lo - spread + 3.0 * spread * unit(rng);
    const QuadraticIdentityResult c1 = quadratic_identity_residual(model, J, z);
    c1_worst = std::max(c1_worst, std::abs(c1.residual) / c1.scale);
    if (std::abs(c1.residual) > 10.0 * tol * c1.scale) {
      ++failures;
      std::cout << "FAIL  c1 trial=" << trial << "  |residual|=" << format_double(c1.residual)
                << "  budget=" << format_double(10.0 * tol * c1.scale) << "\n";
    }

    const FunctionSpec f = [&]() {
      switch (trial % 3) {
        case 0:
          return make_exp_family(0.1 + 2.0 * unit(rng) / spread);
        case 1:
          return make_power_family(hi + (0.1 + unit(rng)) * spread, 2.0 + 2.0 * unit(rng));
        default:
          return make_quadratic(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0,
                                2.0 * unit(rng) - 1.0);
      }
    }();
    const InequalityReport t1 = check_T1(model, J, f, tol);
    const double scale = std::max(t1.tolerance / tol, 1.0);
    t1_min_slack = std::min(t1_min_slack, t1.slack / scale);
    if (!t1.verdict) {
      ++failures;
      print_report(t1);
    }
    if (f.kind == FamilyKind::Quadratic) {
      const double quad_rel = std::abs(t1.slack) / scale;
      quad_worst = std::max(quad_worst, quad_rel);
      if (quad_rel > 10.0 * tol) {
        ++failures;
        std::cout << "FAIL  t1 quadratic equality trial=" << trial
                  << "  |slack|/scale=" << format_double(quad_rel) << "\n";
      }
    }
  }

  std::cout << "trk: trials=" << cfg.trials
            << "  worst |residual|/scale=" << format_double(trk_worst) << "\n";
  std::cout << "c1:  trials=" << cfg.trials
            << "  worst |residual|/scale=" << format_double(c1_worst) << "\n";
  std::cout << "t1:  trials=" << cfg.trials
            << "  min slack/scale=" << format_double(t1_min_slack)
            << "  quadratic worst=" << format_double(quad_worst) << "\n";
  if (failures > 0) {
    std::cout << "identities: " << failures << " failure" << (failures == 1 ? "" : "s") << "\n";
    return 2;
  }
  std::cout << "identities: pass\n";
  return 0;
}

// ── report ───────────────────────────────────────────────────────────────

// Largest n with n + 1 <= size and a strictly positive gap, starting from the
// midpoint of the list; 0 when every gap below the midpoint vanishes.
long pick_report_n(const Spectrum& s) {
  const Eigen::Index size = s.size();
  if (size < 2) return 0;
  const Eigen::Index start = std::min<Eigen::Index>(size - 1, std::max<Eigen::Index>(1, size / 2));
  for (Eigen::Index n = start; n >= 1; --n) {
    if (s.values(n) > s.values(n - 1)) return n;
  }
  return 0;
}

int do_report(ReportConfig cfg) {
  const double tol = resolve_tol(cfg.tol_flag);
  const bool matrix_input = cfg.in.has_model() && is_fd_model(cfg.in.model.model);

  ReportSet set;
  Spectrum s;
  if (matrix_input) {
    const MatrixModel model = build_matrix_model(cfg.in.model, cfg.in.consts);
    s = spectrum_of(model);  // shares the decomposition cache with `model`
    if (cfg.in.consts.any()) s.constants = cfg.in.consts.get();
    LawParams lp;
    lp.tol = tol;
    run_matrix_law("trk", model, lp, set);
    run_matrix_law("c1", model, lp, set);
    run_matrix_law("t1", model, lp, set);
  } else {
    s = cfg.in.load();
  }

  if (s.constants) {
    CommutatorConstants c = *s.constants;
    if (s.values(0) <= 0.0) {
      const NormalizedSpectrum shifted = normalize_to_positive(s, c);
      std::cout << "bottom eigenvalue " << format_double(s.values(0))
                << " <= 0; checks run on the shifted spectrum (eta=" << format_double(shifted.eta)
                << ", alpha adjusted)\n";
      s = shifted.spectrum;
      c = shifted.constants;
      s.constants = c;
    }

    const long n = pick_report_n(s);
    if (n >= 1) {
      set.add(check_moment_order(s, c, n, 1.0, 0.5, tol));
      set.add(check_geometric_bound(s, c, n, 1.0, tol));
      set.add(check_yang_cap(s, c, n, tol));

      const long k_max =
          static_cast<long>(std::floor(n / (1.0 + 2.0 * c.gamma / c.beta) + 1e-12));
      if (k_max >= 1) set.add(check_ratio_bound(s, c, n, std::min<long>(k_max, n), tol));

      const double gap = s.lambda(n + 1) - s.lambda(n);
      set.add(check_C2_general(s, c, n, make_exp_family(1.25 / gap), C2Mode::Partial, tol));

      const bool dirichlet_like =
          c.alpha == 0.0 &&
          (!s.dimension ||
           (std::abs(c.beta - 4.0 / *s.dimension) <= 1e-12 * (4.0 / *s.dimension) &&
            std::abs(c.gamma - 1.0) <= 1e-12));
      if (dirichlet_like) {
        const GapBoundReports pln = check_pln_bounds(s, c, n, 1.0, tol);
        set.add(pln.difference);
        set.add(pln.quotient);
        set.add(check_dirichlet_refined(s, c, n, 1.0, 0.5, tol));
      }

      const double top = s.values(s.size() - 1);
      set.add(check_riesz_monotone(s, c, 2.0, linear_grid(0.5 * s.lambda(1), top, 200), tol));

      const double t_floor = certified_t_floor(s, c, 0.0, 1e-10);
      const double t_lo = t_floor > 0.0 ? t_floor : 0.01 / std::max(1.0, s.lambda(1));
      set.add(check_Z_monotone(s, c, 0.0, log_grid(t_lo, 100.0 * t_lo, 200), tol));
    } else {
      std::cout << "note: no strictly positive spectral gap; subset laws skipped\n";
    }
  } else {
    std::cout << "note: no commutator constants; constant-driven laws skipped\n";
  }

  set.add(abel_report(s, make_exp_family(1e-3), s.values(s.size() - 1), tol));
  // The counting comparison presumes the continuum asymptote; a discretized
  // band edge would fail it for reasons unrelated to the data, so the battery
  // runs it for enumerated box spectra only.
  if (spectrum_kind(s) == SpectrumKind::Box && s.dimension && s.volume) {
    set.add(weyl_report(s));
  }

  if (set.size() == 0) {
    throw Usage("no applicable laws for this input (need constants and/or dimension+volume)");
  }
  write_artifacts(set, cfg.json_out, cfg.csv_out, "");
  return finish(set);
}

// ── wiring ───────────────────────────────────────────────────────────────

void add_model_flags(CLI::App* cmd, ModelFlags& m, ConstantFlags& c) {
  cmd->add_option("--model", m.model, "box | oscillator | fd-dirichlet | fd-schrodinger");
  cmd->add_option("--sides", m.sides, "side lengths, comma separated (box, fd-dirichlet)");
  cmd->add_option("--grid", m.grid, "interior nodes per axis, comma separated (fd models)");
  cmd->add_option("--count", m.count, "number of eigenvalues (box, oscillator)");
  cmd->add_option("--dim", m.dim, "dimension (oscillator)");
  cmd->add_option("--length", m.length, "interval length (fd-schrodinger)");
  cmd->add_option("--potential", m.potential, "zero | const:v0=.. | harmonic[:k=..]");
  cmd->add_option("--alpha", c.alpha, "commutator constant alpha override");
  cmd->add_option("--beta", c.beta, "commutator constant beta override");
  cmd->add_option("--gamma", c.gamma, "commutator constant gamma override");
}

void add_input_flags(CLI::App* cmd, InputFlags& in) {
  cmd->add_option("--spectrum", in.spectrum_file, "spectrum JSON file");
  add_model_flags(cmd, in.model, in.consts);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"spectral inequality checker"};
  app.require_subcommand(1);

  GenConfig gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a model spectrum as JSON");
  add_model_flags(gen_cmd, gen.model, gen.consts);
  gen_cmd->add_option("--out", gen.out, "output path for the spectrum JSON");

  VerifyConfig verify;
  auto* verify_cmd = app.add_subcommand("verify", "run one law against one input");
  add_input_flags(verify_cmd, verify.in);
  verify_cmd->add_option("--law", verify.law, "law identifier")->required();
  verify_cmd->add_option("--n", verify.lp.n, "subset size / eigenvalue index");
  verify_cmd->add_option("--k", verify.lp.k, "denominator index (ratio-bound)");
  verify_cmd->add_option("--p", verify.lp.p, "exponent p");
  verify_cmd->add_option("--q", verify.lp.q, "exponent q");
  verify_cmd->add_option("--z", verify.lp.z, "shift point z (c1)");
  verify_cmd->add_option("--rho", verify.lp.rho, "Riesz order rho");
  verify_cmd->add_option("--L", verify.lp.L, "summation cut (abel)");
  verify_cmd->add_option("--family", verify.lp.family,
                         "trial function, e.g. exp:t=1.0 or moment:z=..,p=..,q=..");
  verify_cmd->add_option("--points", verify.lp.points, "grid points for monotone laws");
  verify_cmd->add_option("--zmin", verify.lp.grid_lo, "grid start (riesz z / zp t)");
  verify_cmd->add_option("--zmax", verify.lp.grid_hi, "grid end (riesz z / zp t)");
  verify_cmd->add_option("--tmin", verify.lp.grid_lo, "alias of --zmin for zp-monotone");
  verify_cmd->add_option("--tmax", verify.lp.grid_hi, "alias of --zmax for zp-monotone");
  verify_cmd->add_flag("--full-trace", verify.lp.full_trace, "c2: whole-spectrum sum <= 0");
  verify_cmd->add_flag("--allow-low-rho", verify.lp.allow_low_rho,
                       "riesz-monotone: admit 1 < rho < 2 with a note");
  verify_cmd->add_option("--tol", verify.tol_flag, "relative tolerance (default 1e-9)");
  verify_cmd->add_option("--trust", verify.lp.trust, "truncation trust level (default 1e-10)");
  verify_cmd->add_option("--json", verify.json_out, "write report JSON");
  verify_cmd->add_option("--csv", verify.csv_out, "write report CSV");
  verify_cmd->add_option("--tsv", verify.tsv_out, "write grid series TSV (monotone laws)");

  SweepConfig sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "run one law over a parameter grid");
  add_input_flags(sweep_cmd, sweep.in);
  sweep_cmd->add_option("--law", sweep.law, "law identifier")->required();
  sweep_cmd->add_option("--n", sweep.n_axis, "n axis: value or lo..hi[:step]");
  sweep_cmd->add_option("--p", sweep.p_axis, "p axis: value or lo..hi:step");
  sweep_cmd->add_option("--q", sweep.q_axis, "q axis: value, lo..hi:step, or auto");
  sweep_cmd->add_option("--k", sweep.k_axis, "k axis: value or lo..hi[:step]");
  sweep_cmd->add_option("--family", sweep.family, "trial function for c2 sweeps");
  sweep_cmd->add_option("--tol", sweep.tol_flag, "relative tolerance (default 1e-9)");
  sweep_cmd->add_option("--csv", sweep.csv_out, "write one CSV row per grid point");
  sweep_cmd->add_option("--json", sweep.json_out, "write report JSON");

  IdentitiesConfig ident;
  auto* ident_cmd = app.add_subcommand("identities", "randomized identity battery");
  ident_cmd->add_option("--trials", ident.trials, "number of random pairs (default 200)");
  ident_cmd->add_option("--order", ident.order, "maximal matrix order (default 24)");
  ident_cmd->add_option("--seed", ident.seed, "RNG seed (fixed default)");
  ident_cmd->add_option("--tol", ident.tol_flag, "relative tolerance (default 1e-9)");

  ReportConfig report;
  auto* report_cmd = app.add_subcommand("report", "run every applicable law on one input");
  add_input_flags(report_cmd, report.in);
  report_cmd->add_option("--tol", report.tol_flag, "relative tolerance (default 1e-9)");
  report_cmd->add_option("--json", report.json_out, "write report JSON");
  report_cmd->add_option("--csv", report.csv_out, "write report CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen_cmd) return do_gen(gen);
    if (*verify_cmd) return do_verify(std::move(verify));
    if (*sweep_cmd) return do_sweep(std::move(sweep));
    if (*ident_cmd) return do_identities(ident);
    return do_report(std::move(report));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("specbound");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace specbound::cli
