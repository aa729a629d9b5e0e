#include "halfheavy/json_io.hpp"

#include <string>

namespace halfheavy {

namespace {

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

nlohmann::json variance_map(const std::map<std::int64_t, double>& m) {
  auto arr = nlohmann::json::array();
  for (const auto& [n, v] : m) arr.push_back({{"N", n}, {"variance", v}});
  return arr;
}

}  // namespace

void to_json(nlohmann::json& j, const DistSpec& d) {
  j = {{"alpha", d.alpha}, {"t0", d.t0}, {"c", d.c}, {"symmetric", d.symmetric}};
}

void from_json(const nlohmann::json& j, DistSpec& d) {
  d = calibrate(j.at("alpha").get<double>());
  if (j.contains("t0") || j.contains("c")) {
    DistSpec given = d;
    read_if(j, "t0", given.t0);
    read_if(j, "c", given.c);
    read_if(j, "symmetric", given.symmetric);
    validate(given);
  }
}

void to_json(nlohmann::json& j, const TruncationParams& t) {
  j = {{"N", t.N},         {"beta", t.beta},     {"epsilon", t.epsilon},
       {"cutoff", t.cutoff()}, {"mu_N", t.muN}, {"sigma_N", t.sigmaN}};
}

void to_json(nlohmann::json& j, const EnsembleConfig& c) {
  j = {{"N", c.N},
       {"alpha", c.dist.alpha},
       {"symmetry_class", to_string(c.symmetry_class)},
       {"mode", to_string(c.mode)},
       {"epsilon", c.epsilon},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, EnsembleConfig& c) {
  c = EnsembleConfig{};
  c.N = j.at("N").get<std::int64_t>();
  c.dist = calibrate(j.at("alpha").get<double>());
  if (j.contains("symmetry_class")) c.symmetry_class = parse_symmetry_class(j.at("symmetry_class").get<std::string>());
  if (j.contains("mode")) c.mode = parse_entry_mode(j.at("mode").get<std::string>());
  read_if(j, "epsilon", c.epsilon);
  read_if(j, "seed", c.seed);
}

void to_json(nlohmann::json& j, const QuadratureParams& q) {
  j = {{"T_max", q.T_max},
       {"panels_per_decade", q.panels_per_decade},
       {"points_per_panel", q.points_per_panel},
       {"t_min", q.t_min},
       {"target_rel_err", q.target_rel_err},
       {"max_refinements", q.max_refinements},
       {"threads", q.threads}};
}

void from_json(const nlohmann::json& j, QuadratureParams& q) {
  q = QuadratureParams{};
  read_if(j, "T_max", q.T_max);
  read_if(j, "panels_per_decade", q.panels_per_decade);
  read_if(j, "points_per_panel", q.points_per_panel);
  read_if(j, "t_min", q.t_min);
  read_if(j, "target_rel_err", q.target_rel_err);
  read_if(j, "max_refinements", q.max_refinements);
  read_if(j, "threads", q.threads);
}

void to_json(nlohmann::json& j, const KernelValue& k) {
  j = {{"alpha", k.alpha},
       {"c", k.c},
       {"kernel_constant", k.kernel_constant},
       {"z", k.z},
       {"zprime", k.zprime},
       {"value_re", k.value.real()},
       {"value_im", k.value.imag()},
       {"est_abs_err", k.est_abs_err},
       {"converged", k.converged},
       {"refinement_diff", k.refinement_diff},
       {"tail_estimate", k.tail_estimate},
       {"head_estimate", k.head_estimate},
       {"quadrature", k.params}};
}

void to_json(nlohmann::json& j, const RunPlan& p) {
  j = {{"alpha", p.alpha},
       {"epsilon", p.epsilon},
       {"symmetry_class", to_string(p.symmetry_class)},
       {"mode", to_string(p.mode)},
       {"N_list", p.N_list},
       {"replicates_per_N", p.replicates_per_N},
       {"z_grid", p.z_grid},
       {"master_seed", p.master_seed},
       {"threads", p.threads}};
}

void from_json(const nlohmann::json& j, RunPlan& p) {
  p = RunPlan{};
  read_if(j, "alpha", p.alpha);
  read_if(j, "epsilon", p.epsilon);
  if (j.contains("symmetry_class")) p.symmetry_class = parse_symmetry_class(j.at("symmetry_class").get<std::string>());
  if (j.contains("mode")) p.mode = parse_entry_mode(j.at("mode").get<std::string>());
  read_if(j, "N_list", p.N_list);
  read_if(j, "replicates_per_N", p.replicates_per_N);
  if (j.contains("z_grid")) {
    p.z_grid = j.at("z_grid").get<std::vector<cplx>>();
  } else {
    p.z_grid = default_z_grid();
  }
  read_if(j, "master_seed", p.master_seed);
  read_if(j, "threads", p.threads);
}

void to_json(nlohmann::json& j, const GaussianityStats& g) {
  j = {{"skewness", g.skewness},     {"excess_kurtosis", g.excess_kurtosis},
       {"skewness_z", g.skewness_z}, {"excess_kurtosis_z", g.excess_kurtosis_z},
       {"cdf_distance", g.cdf_distance}, {"samples", g.samples}};
}

void to_json(nlohmann::json& j, const ScalingRow& r) {
  j = {{"z", r.z},           {"slope", r.slope},   {"slope_stderr", r.stderr_},
       {"target", r.target}, {"replicates", r.replicates}, {"variances", variance_map(r.variances)},
       {"pass", r.pass}};
}

void to_json(nlohmann::json& j, const NormalityRow& r) {
  j = {{"z", r.z}, {"N", r.N}, {"component", r.component}, {"stats", r.stats}, {"pass", r.pass}};
}

void to_json(nlohmann::json& j, const CovarianceRow& r) {
  j = {{"z", r.z},
       {"zprime", r.zprime},
       {"N", r.N},
       {"replicates", r.replicates},
       {"empirical", r.empirical},
       {"kernel", r.kernel},
       {"kernel_est_abs_err", r.kernel_est_abs_err},
       {"rel_err", r.rel_err}};
}

void to_json(nlohmann::json& j, const Flag& f) { j = {{"name", f.name}, {"pass", f.pass}, {"detail", f.detail}}; }

void to_json(nlohmann::json& j, const Tolerances& t) {
  j = {{"slope_abs", t.slope_abs},
       {"covariance_rel", t.covariance_rel},
       {"skewness_z", t.skewness_z},
       {"cdf_distance", t.cdf_distance}};
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  j = {{"alpha", r.alpha},
       {"mode", r.mode},
       {"symmetry_class", r.symmetry_class},
       {"tolerances", r.tolerances},
       {"scaling_fits", r.scaling_fits},
       {"normality", r.normality},
       {"covariance_table", r.covariance_table},
       {"flags", r.flags},
       {"all_pass", r.all_pass()}};
}

}  // namespace halfheavy
