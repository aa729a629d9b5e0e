#include "halfheavy/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "halfheavy/diagnostics.hpp"
#include "halfheavy/experiments.hpp"
#include "halfheavy/json_io.hpp"
#include "halfheavy/kernel.hpp"
#include "halfheavy/keyed_stream.hpp"

namespace halfheavy {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

json section(const json& cfg, const char* key) {
  if (!cfg.contains(key)) return json::object();
  const json& s = cfg.at(key);
  if (!s.is_object()) throw InputError(std::string("config section '") + key + "' must be an object");
  return s;
}

std::string fmtg(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string fmtz(cplx z) { return fmtg(z.real()) + (z.imag() < 0 ? "" : "+") + fmtg(z.imag()) + "i"; }

class Context {
 public:
  Context(const Invocation& inv) : inv_(inv) {
    config_ = inv.config;
    if (!config_.is_object()) throw InputError("config must be a JSON object");
    apply_overrides(config_, inv.overrides);
    if (inv.master_seed) config_["master_seed"] = *inv.master_seed;
    if (inv.threads) config_["threads"] = *inv.threads;
    header_ = {{"subcommand", inv.subcommand}, {"config", config_}, {"overrides", inv.overrides}};
    log("start " + inv.subcommand);
  }

  const json& config() const { return config_; }
  const json& header() const { return header_; }
  int threads() const { return get_or<int>(config_, "threads", 1); }
  std::uint64_t master_seed() const { return get_or<std::uint64_t>(config_, "master_seed", 1); }
  double alpha() const {
    if (!config_.contains("alpha")) throw InputError("config is missing 'alpha'");
    return config_.at("alpha").get<double>();
  }
  SymmetryClass symmetry_class() const {
    return parse_symmetry_class(get_or<std::string>(config_, "symmetry_class", "real"));
  }
  Tolerances tolerances() const {
    const json t = section(config_, "tolerances");
    Tolerances tol;
    tol.slope_abs = get_or(t, "slope_abs", tol.slope_abs);
    tol.covariance_rel = get_or(t, "covariance_rel", tol.covariance_rel);
    tol.skewness_z = get_or(t, "skewness_z", tol.skewness_z);
    tol.cdf_distance = get_or(t, "cdf_distance", tol.cdf_distance);
    return tol;
  }
  RunPlan plan() const {
    RunPlan p = config_.get<RunPlan>();
    return p;
  }

  void prepare_output() {
    std::error_code ec;
    fs::create_directories(inv_.output_dir, ec);
    if (ec || !fs::is_directory(inv_.output_dir)) {
      throw IoError("cannot create output directory " + inv_.output_dir.string());
    }
    prepared_ = true;
  }

  void write(const std::string& name, const std::string& content) {
    if (!prepared_) prepare_output();
    const fs::path path = inv_.output_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed on " + path.string());
    log("wrote " + name);
  }

  void write_json(const std::string& name, json body) {
    body["invocation"] = header_;
    write(name, body.dump(2) + "\n");
  }

  fs::path path(const std::string& name) {
    if (!prepared_) prepare_output();
    return inv_.output_dir / name;
  }

  void log(const std::string& line) { log_ << timestamp() << ' ' << line << '\n'; }

  void flush_log() {
    if (!prepared_) return;
    std::ofstream out(inv_.output_dir / "run.log", std::ios::app);
    out << log_.str();
  }

 private:
  const Invocation& inv_;
  json config_;
  json header_;
  std::ostringstream log_;
  bool prepared_ = false;
};

Outcome outcome_of(const std::vector<Flag>& flags) {
  const bool ok = std::all_of(flags.begin(), flags.end(), [](const Flag& f) { return f.pass; });
  return ok ? Outcome::ok : Outcome::acceptance_failed;
}

std::vector<std::pair<cplx, cplx>> read_pairs(const json& s, std::vector<std::pair<cplx, cplx>> fallback) {
  if (!s.contains("pairs")) return fallback;
  std::vector<std::pair<cplx, cplx>> out;
  for (const auto& p : s.at("pairs")) {
    if (!p.is_array() || p.size() != 2) throw InputError("each pair must be [z, zprime]");
    out.emplace_back(p[0].get<cplx>(), p[1].get<cplx>());
  }
  if (out.empty()) throw InputError("pairs is empty");
  return out;
}

// ---------------------------------------------------------------------------

Outcome run_calibrate(Context& ctx) {
  const DistSpec d = calibrate(ctx.alpha());
  json body;
  body["dist"] = d;
  body["laplace_constant"] = {{"real", laplace_constant(d, SymmetryClass::real)},
                              {"complex", laplace_constant(d, SymmetryClass::complex)}};
  const double eps = get_or(ctx.config(), "epsilon", 0.01);
  json trunc = json::array();
  for (auto n : get_or<std::vector<std::int64_t>>(ctx.config(), "N_list", {})) {
    trunc.push_back(truncation_params(d, n, eps));
  }
  body["truncation"] = trunc;
  ctx.write_json("dist.json", body);
  return Outcome::ok;
}

Outcome run_simulate(Context& ctx) {
  const RunPlan plan = ctx.plan();
  validate(plan);
  TraceCsvWriter writer(ctx.path("traces.csv"), ctx.header().dump());
  run_ensemble(plan, [&](const SpectralTrace& t) { writer.write(t, plan.alpha, plan.mode); });
  writer.finish();
  ctx.log("wrote traces.csv");
  return Outcome::ok;
}

ExperimentReport new_report(const RunPlan& plan, const Tolerances& tol) {
  ExperimentReport r;
  r.alpha = plan.alpha;
  r.mode = to_string(plan.mode);
  r.symmetry_class = to_string(plan.symmetry_class);
  r.tolerances = tol;
  return r;
}

void add_scaling(ExperimentReport& report, const RunPlan& plan, const Tolerances& tol) {
  const TraceTable table = run_ensemble(plan);
  for (std::size_t j = 0; j < plan.z_grid.size(); ++j) {
    ScalingRow row = scaling_row(table, plan, j, tol);
    report.flags.push_back({"scaling slope at z=" + fmtz(row.z), row.pass,
                            "slope " + fmtg(row.slope, "%.4f") + " +- " + fmtg(row.stderr_, "%.4f") + ", target " +
                                fmtg(row.target, "%.4f") + ", tolerance " + fmtg(tol.slope_abs)});
    report.scaling_fits.push_back(std::move(row));
  }
}

Outcome run_scaling(Context& ctx) {
  const RunPlan plan = ctx.plan();
  validate(plan);
  const Tolerances tol = ctx.tolerances();
  ExperimentReport report = new_report(plan, tol);
  add_scaling(report, plan, tol);
  ctx.write_json("scaling.json", json(report));
  ctx.write("scaling.txt", summary_table(report));
  return outcome_of(report.flags);
}

QuadratureParams quadrature_of(const Context& ctx, const json& s) {
  QuadratureParams q = s.contains("quadrature") ? s.at("quadrature").get<QuadratureParams>() : QuadratureParams{};
  if (!s.contains("quadrature") || !s.at("quadrature").contains("threads")) q.threads = ctx.threads();
  validate(q);
  return q;
}

Outcome run_kernel(Context& ctx) {
  const json s = section(ctx.config(), "kernel");
  const DistSpec d = calibrate(ctx.alpha());
  const SymmetryClass cls = ctx.symmetry_class();
  const auto pairs = read_pairs(s, {{cplx{0.0, 2.0}, cplx{0.0, 2.0}}});
  const QuadratureParams q = quadrature_of(ctx, s);
  json records = json::array();
  std::vector<Flag> flags;
  for (const auto& [z, zp] : pairs) {
    const KernelValue v = evaluate_C(z, zp, d, q, cls);
    const KernelValue w = evaluate_C(zp, z, d, q, cls);
    const bool symmetric = std::abs(v.value - w.value) <= v.est_abs_err + w.est_abs_err;
    json rec = v;
    rec["symmetric_pair_check"] = symmetric;
    rec["swapped_value"] = w.value;
    records.push_back(rec);
    flags.push_back({"kernel at (" + fmtz(z) + ", " + fmtz(zp) + ")", v.converged && symmetric,
                     std::string(v.converged ? "converged" : "not converged") +
                         (symmetric ? ", symmetric" : ", asymmetric")});
  }
  ctx.write_json("kernel.json", {{"records", records}, {"flags", flags}});
  return outcome_of(flags);
}

std::size_t grid_index(const std::vector<cplx>& grid, cplx z) {
  const auto it = std::find(grid.begin(), grid.end(), z);
  return static_cast<std::size_t>(it - grid.begin());
}

void add_covariance(ExperimentReport& report, Context& ctx, const RunPlan& base, const Tolerances& tol,
                    const std::optional<std::pair<std::int64_t, cplx>>& normality) {
  const json s = section(ctx.config(), "covariance");
  const auto Ns = get_or<std::vector<std::int64_t>>(s, "N_list", {256, 1024});
  const auto reps = get_or<std::int64_t>(s, "replicates", 2000);
  const auto min_reps = get_or<std::size_t>(s, "min_replicates", 500);
  const auto pairs = read_pairs(s, {{cplx{0.0, 2.0}, cplx{1.0, 1.0}}});
  if (Ns.empty()) throw InputError("covariance N_list is empty");

  std::vector<cplx> grid;
  auto add = [&](cplx z) {
    if (std::find(grid.begin(), grid.end(), z) == grid.end()) grid.push_back(z);
  };
  for (const auto& [z, zp] : pairs) {
    add(z);
    add(zp);
  }
  if (normality) add(normality->second);

  const DistSpec d = calibrate(base.alpha);
  const QuadratureParams q = quadrature_of(ctx, s);
  std::vector<KernelValue> kernels;
  for (const auto& [z, zp] : pairs) kernels.push_back(evaluate_C(z, zp, d, q, base.symmetry_class));

  std::vector<std::int64_t> run_Ns = Ns;
  if (normality && std::find(run_Ns.begin(), run_Ns.end(), normality->first) == run_Ns.end()) {
    run_Ns.push_back(normality->first);
  }
  for (auto n : run_Ns) {
    RunPlan plan = base;
    plan.N_list = {n};
    plan.replicates_per_N = reps;
    plan.z_grid = grid;
    const TraceTable table = run_ensemble(plan);
    const auto& rows = table.at(n);
    if (std::find(Ns.begin(), Ns.end(), n) != Ns.end()) {
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto tz = traces_at(rows, grid_index(grid, pairs[p].first));
        const auto tzp = traces_at(rows, grid_index(grid, pairs[p].second));
        CovarianceRow row;
        row.z = pairs[p].first;
        row.zprime = pairs[p].second;
        row.N = n;
        row.replicates = reps;
        row.empirical = empirical_covariance(tz, tzp, n, base.alpha, min_reps);
        row.kernel = kernels[p].value;
        row.kernel_est_abs_err = kernels[p].est_abs_err;
        row.rel_err = std::abs(row.empirical - row.kernel) / std::abs(row.kernel);
        report.covariance_table.push_back(row);
      }
    }
    if (normality && n == normality->first) {
      const auto t = traces_at(rows, grid_index(grid, normality->second));
      for (auto& row : normality_rows(t, normality->second, n, base.alpha, tol)) {
        report.flags.push_back({"gaussianity " + row.component + " at z=" + fmtz(row.z) + ", N=" + std::to_string(n),
                                row.pass,
                                "skewness_z " + fmtg(row.stats.skewness_z, "%.3f") + ", cdf_distance " +
                                    fmtg(row.stats.cdf_distance, "%.4f")});
        report.normality.push_back(std::move(row));
      }
    }
  }

  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::vector<const CovarianceRow*> rows;
    for (const auto& r : report.covariance_table) {
      if (r.z == pairs[p].first && r.zprime == pairs[p].second) rows.push_back(&r);
    }
    const std::string tag = "(" + fmtz(pairs[p].first) + ", " + fmtz(pairs[p].second) + ")";
    const CovarianceRow& last = *rows.back();
    report.flags.push_back({"covariance " + tag + " at N=" + std::to_string(last.N), last.rel_err <= tol.covariance_rel,
                            "relative error " + fmtg(last.rel_err, "%.4f") + ", tolerance " +
                                fmtg(tol.covariance_rel)});
    if (rows.size() >= 2) {
      const CovarianceRow& first = *rows.front();
      report.flags.push_back({"covariance " + tag + " gap shrinks", last.rel_err < first.rel_err,
                              "N=" + std::to_string(first.N) + ": " + fmtg(first.rel_err, "%.4f") +
                                  ", N=" + std::to_string(last.N) + ": " + fmtg(last.rel_err, "%.4f")});
    }
  }
}

Outcome run_covariance(Context& ctx) {
  const RunPlan plan = [&] {
    RunPlan p = ctx.plan();
    if (p.N_list.empty()) p.N_list = {1024};  // only alpha, seed and mode matter here
    return p;
  }();
  validate(plan);
  const Tolerances tol = ctx.tolerances();
  ExperimentReport report = new_report(plan, tol);
  add_covariance(report, ctx, plan, tol, std::nullopt);
  ctx.write_json("covariance.json", json(report));
  ctx.write("covariance.txt", summary_table(report));
  return outcome_of(report.flags);
}

Outcome run_report(Context& ctx) {
  const RunPlan plan = ctx.plan();
  validate(plan);
  const Tolerances tol = ctx.tolerances();
  const json ns = section(ctx.config(), "normality");
  const std::pair<std::int64_t, cplx> normality{get_or<std::int64_t>(ns, "N", 1024),
                                                ns.contains("z") ? ns.at("z").get<cplx>() : cplx{1.0, 1.0}};
  ExperimentReport report = new_report(plan, tol);
  add_scaling(report, plan, tol);
  add_covariance(report, ctx, plan, tol, normality);
  ctx.write_json("report.json", json(report));
  ctx.write("summary.txt", summary_table(report));
  return outcome_of(report.flags);
}

Outcome run_diagnostics(Context& ctx) {
  const json s = section(ctx.config(), "diagnostics");
  const DistSpec d = calibrate(ctx.alpha());
  const double eps = get_or(ctx.config(), "epsilon", 0.01);
  const std::uint64_t seed = ctx.master_seed();
  std::vector<Flag> flags;
  json body;
  std::ostringstream txt;

  EnsembleConfig base;
  base.dist = d;
  base.epsilon = eps;
  base.symmetry_class = ctx.symmetry_class();

  {
    const json o = section(s, "leave_one_out");
    EnsembleConfig cfg = base;
    cfg.mode = parse_entry_mode(get_or<std::string>(o, "mode", "raw"));
    const auto r = leave_one_out_suite(cfg, get_or<std::int64_t>(o, "triples", 50),
                                       get_or<std::int64_t>(o, "N_max", 200), keyed::derive_seed(seed, 101));
    body["leave_one_out"] = {{"triples", r.triples},
                             {"max_rel_residual", r.max_rel_residual},
                             {"all_bound_ok", r.all_bound_ok},
                             {"all_sign_ok", r.all_sign_ok}};
    flags.push_back({"leave-one-out identity", r.max_rel_residual <= 1e-9 && r.all_bound_ok,
                     "max relative residual " + fmtg(r.max_rel_residual, "%.3e") + " over " +
                         std::to_string(r.triples) + " triples"});
  }
  {
    const json o = section(s, "branch");
    const auto r = branch_suite(get_or(o, "grid", 20));
    body["branch"] = {{"z_points", r.z_points},
                      {"t_points", r.t_points},
                      {"max_quadratic_residual", r.max_quadratic_residual},
                      {"max_fixed_point_residual", r.max_fixed_point_residual},
                      {"min_re_K", r.min_re_K}};
    flags.push_back({"semicircle branch",
                     r.max_quadratic_residual <= 1e-12 && r.max_fixed_point_residual <= 1e-12 && r.min_re_K > 0.0,
                     "residuals " + fmtg(r.max_quadratic_residual, "%.2e") + ", " +
                         fmtg(r.max_fixed_point_residual, "%.2e") + ", min Re K " + fmtg(r.min_re_K, "%.3e")});
  }
  {
    const json o = section(s, "phi");
    const cplx lambda = o.contains("lambda") ? o.at("lambda").get<cplx>() : cplx{0.0, -1.0};
    const auto Ns = get_or<std::vector<std::int64_t>>(o, "N_list", {100, 1000, 10000, 100000});
    const EntryMode mode = parse_entry_mode(get_or<std::string>(o, "mode", "raw"));
    const auto r = phi_expansion_gaps(d, lambda, Ns, mode, eps, base.symmetry_class);
    body["phi_expansion"] = {{"lambda", r.lambda},        {"mode", to_string(mode)},    {"N", r.N},
                             {"scaled_gap", r.scaled_gap}, {"decreasing", r.decreasing}};
    std::string detail = "scaled gaps";
    for (double g : r.scaled_gap) detail += " " + fmtg(g, "%.4g");
    flags.push_back({"phi_N expansion gap decreasing", r.decreasing, detail});
  }
  {
    const json o = section(s, "quadratic_form");
    const cplx z = o.contains("z") ? o.at("z").get<cplx>() : cplx{0.3, 0.7};
    const auto r = quadratic_form_check(d, get_or<std::int64_t>(o, "N", 200), z, eps,
                                        get_or<std::int64_t>(o, "draws", 2000), keyed::derive_seed(seed, 102));
    body["quadratic_form"] = {{"N", r.N},
                              {"z", r.z},
                              {"EX2_hat", r.stats.EX2_hat},
                              {"X_stderr", r.stats.X_stderr},
                              {"boundX", r.stats.boundX},
                              {"EE2_hat", r.stats.EE2_hat},
                              {"E_stderr", r.stats.E_stderr},
                              {"boundE", r.stats.boundE},
                              {"moment_constant", r.stats.moment_constant},
                              {"draws", r.stats.draws}};
    flags.push_back({"quadratic form bound X", r.pass_X,
                     fmtg(r.stats.EX2_hat, "%.4e") + " vs bound " + fmtg(r.stats.boundX, "%.4e")});
    flags.push_back({"quadratic form bound E", r.pass_E,
                     fmtg(r.stats.EE2_hat, "%.4e") + " vs bound " + fmtg(r.stats.boundE, "%.4e")});
  }
  {
    const json o = section(s, "diag_concentration");
    EnsembleConfig cfg = base;
    cfg.mode = parse_entry_mode(get_or<std::string>(o, "mode", "truncated"));
    cfg.seed = keyed::derive_seed(seed, 103);
    const cplx z = o.contains("z") ? o.at("z").get<cplx>() : cplx{0.0, 2.0};
    const auto r = diag_concentration_check(cfg, get_or<std::vector<std::int64_t>>(o, "N_list", {128, 256, 512, 1024}),
                                            get_or<std::int64_t>(o, "replicates", 100), z, ctx.threads());
    json dev = json::array();
    std::string detail;
    for (const auto& [n, v] : r.mean_max_dev) {
      dev.push_back({{"N", n}, {"mean_max_dev", v}});
      detail += "N=" + std::to_string(n) + ": " + fmtg(v, "%.4g") + " ";
    }
    body["diag_concentration"] = {{"z", r.z},
                                  {"mode", to_string(cfg.mode)},
                                  {"replicates", r.replicates},
                                  {"mean_max_dev", dev},
                                  {"strictly_decreasing", r.strictly_decreasing}};
    flags.push_back({"diagonal concentration decreasing", r.strictly_decreasing, detail});
  }
  {
    const json o = section(s, "exceedance");
    EnsembleConfig cfg = base;
    cfg.N = get_or<std::int64_t>(o, "N", 256);
    cfg.mode = EntryMode::truncated;
    cfg.seed = keyed::derive_seed(seed, 104);
    const auto r = exceedance_check(cfg, get_or<std::int64_t>(o, "replicates", 200));
    body["exceedance"] = {{"N", r.N},
                          {"replicates", r.replicates},
                          {"mean_observed", r.mean_observed},
                          {"expected", r.expected},
                          {"pass", r.pass}};
    flags.push_back({"exceedance count", r.pass,
                     "mean observed " + fmtg(r.mean_observed, "%.4g") + ", expected " + fmtg(r.expected, "%.4g")});
  }

  body["flags"] = flags;
  for (const auto& f : flags) txt << "[" << (f.pass ? "PASS" : "FAIL") << "] " << f.name << ": " << f.detail << "\n";
  ctx.write_json("diagnostics.json", body);
  ctx.write("diagnostics.txt", txt.str());
  return outcome_of(flags);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"calibrate",  "simulate",    "scaling", "kernel",
                                                 "covariance", "diagnostics", "report"};
  return names;
}

void apply_overrides(json& config, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("override '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &config;
    std::size_t start = 0;
    for (;;) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw InputError("override key '" + key + "' has an empty component");
      if (!node->is_object()) throw InputError("override key '" + key + "' crosses a non-object value");
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      if (node->is_null()) *node = json::object();
      start = dot + 1;
    }
  }
}

Outcome dispatch(const Invocation& inv) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), inv.subcommand) == names.end()) {
    throw InputError("unknown subcommand '" + inv.subcommand + "'");
  }
  Context ctx(inv);
  try {
    Outcome out = Outcome::ok;
    if (inv.subcommand == "calibrate") out = run_calibrate(ctx);
    else if (inv.subcommand == "simulate") out = run_simulate(ctx);
    else if (inv.subcommand == "scaling") out = run_scaling(ctx);
    else if (inv.subcommand == "kernel") out = run_kernel(ctx);
    else if (inv.subcommand == "covariance") out = run_covariance(ctx);
    else if (inv.subcommand == "diagnostics") out = run_diagnostics(ctx);
    else out = run_report(ctx);
    ctx.log(out == Outcome::ok ? "done" : "done, acceptance flags failed");
    ctx.flush_log();
    return out;
  } catch (const std::exception& e) {
    ctx.log(std::string("error: ") + e.what());
    ctx.flush_log();
    throw;
  }
}

}  // namespace halfheavy
