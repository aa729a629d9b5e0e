#include "halfheavy/halfheavy.h"

#include <cstring>
#include <string>

#include "halfheavy/commands.hpp"
#include "halfheavy/ensemble.hpp"
#include "halfheavy/heavytail.hpp"
#include "halfheavy/kernel.hpp"
#include "halfheavy/semicircle.hpp"
#include "halfheavy/spectral.hpp"

struct hh_sample {
  halfheavy::MatrixSample sample;
};

namespace {

using halfheavy::cplx;

thread_local std::string last_error;

cplx to_cplx(hh_complex z) { return {z.re, z.im}; }
hh_complex from_cplx(cplx z) { return {z.real(), z.imag()}; }

halfheavy::SymmetryClass to_class(int c) {
  if (c == HH_CLASS_REAL) return halfheavy::SymmetryClass::real;
  if (c == HH_CLASS_COMPLEX) return halfheavy::SymmetryClass::complex;
  throw halfheavy::InputError("unknown symmetry class code " + std::to_string(c));
}

halfheavy::EntryMode to_mode(int m) {
  if (m == HH_MODE_RAW) return halfheavy::EntryMode::raw;
  if (m == HH_MODE_TRUNCATED) return halfheavy::EntryMode::truncated;
  throw halfheavy::InputError("unknown entry mode code " + std::to_string(m));
}

halfheavy::DistSpec to_dist(const hh_dist_spec* d) {
  if (!d) throw halfheavy::InputError("null distribution");
  halfheavy::DistSpec out;
  out.alpha = d->alpha;
  out.t0 = d->t0;
  out.c = d->c;
  out.symmetric = d->symmetric != 0;
  halfheavy::validate(out);
  return out;
}

template <class T>
void require(const T* p, const char* what) {
  if (!p) throw halfheavy::InputError(std::string("null ") + what);
}

template <class Fn>
hh_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const halfheavy::DomainError& e) {
    last_error = e.what();
    return HH_ERR_DOMAIN;
  } catch (const halfheavy::InputError& e) {
    last_error = e.what();
    return HH_ERR_INPUT;
  } catch (const halfheavy::IoError& e) {
    last_error = e.what();
    return HH_ERR_IO;
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("malformed config: ") + e.what();
    return HH_ERR_INPUT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return HH_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return HH_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* hh_version(void) { return "0.1.0"; }

const char* hh_last_error(void) { return last_error.c_str(); }

const char* hh_status_string(hh_status status) {
  switch (status) {
    case HH_OK: return "ok";
    case HH_ERR_DOMAIN: return "domain error";
    case HH_ERR_INPUT: return "input error";
    case HH_ERR_IO: return "i/o error";
    case HH_ERR_NOT_CONVERGED: return "not converged";
    case HH_ACCEPTANCE_FAILED: return "acceptance flags failed";
    case HH_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

hh_status hh_calibrate(double alpha, hh_dist_spec* out) {
  return guarded([&] {
    require(out, "output");
    const auto d = halfheavy::calibrate(alpha);
    *out = {d.alpha, d.t0, d.c, d.symmetric ? 1 : 0};
    return HH_OK;
  });
}

hh_status hh_laplace_constant(const hh_dist_spec* dist, int symmetry_class, double* out) {
  return guarded([&] {
    require(out, "output");
    *out = halfheavy::laplace_constant(to_dist(dist), to_class(symmetry_class));
    return HH_OK;
  });
}

hh_status hh_truncation_params(const hh_dist_spec* dist, int64_t N, double epsilon, hh_truncation* out) {
  return guarded([&] {
    require(out, "output");
    const auto t = halfheavy::truncation_params(to_dist(dist), N, epsilon);
    *out = {t.N, t.beta, t.epsilon, t.muN, t.sigmaN, t.cutoff()};
    return HH_OK;
  });
}

hh_status hh_char_fn(const hh_dist_spec* dist, int64_t N, hh_complex lambda, const hh_truncation* truncation,
                     int symmetry_class, hh_complex* exact, hh_complex* expansion) {
  return guarded([&] {
    require(exact, "output");
    require(expansion, "output");
    std::optional<halfheavy::TruncationParams> tp;
    if (truncation) {
      halfheavy::TruncationParams t;
      t.N = truncation->N;
      t.beta = truncation->beta;
      t.epsilon = truncation->epsilon;
      t.muN = truncation->mu_N;
      t.sigmaN = truncation->sigma_N;
      tp = t;
    }
    const auto v = halfheavy::char_fn(to_dist(dist), N, to_cplx(lambda), tp, to_class(symmetry_class));
    *exact = from_cplx(v.exact);
    *expansion = from_cplx(v.expansion);
    return HH_OK;
  });
}

hh_status hh_g_sc(hh_complex z, hh_complex* out) {
  return guarded([&] {
    require(out, "output");
    *out = from_cplx(halfheavy::g_sc(to_cplx(z)));
    return HH_OK;
  });
}

hh_quadrature hh_quadrature_defaults(void) {
  const halfheavy::QuadratureParams q;
  return {q.T_max, q.panels_per_decade, q.points_per_panel, q.t_min, q.target_rel_err, q.max_refinements, q.threads};
}

hh_status hh_kernel_evaluate(hh_complex z, hh_complex zprime, const hh_dist_spec* dist, const hh_quadrature* params,
                             int symmetry_class, hh_kernel_value* out) {
  return guarded([&] {
    require(out, "output");
    halfheavy::QuadratureParams q;
    if (params) {
      q.T_max = params->T_max;
      q.panels_per_decade = params->panels_per_decade;
      q.points_per_panel = params->points_per_panel;
      q.t_min = params->t_min;
      q.target_rel_err = params->target_rel_err;
      q.max_refinements = params->max_refinements;
      q.threads = params->threads;
    }
    const auto v = halfheavy::evaluate_C(to_cplx(z), to_cplx(zprime), to_dist(dist), q, to_class(symmetry_class));
    *out = {from_cplx(v.value), v.est_abs_err, v.converged ? 1 : 0, v.kernel_constant};
    if (!v.converged) {
      last_error = "kernel quadrature did not reach the target accuracy";
      return HH_ERR_NOT_CONVERGED;
    }
    return HH_OK;
  });
}

hh_status hh_sample_build(const hh_ensemble_config* config, int64_t replicate_index, hh_sample** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "output");
    *out = nullptr;
    halfheavy::EnsembleConfig cfg;
    cfg.N = config->N;
    cfg.dist = halfheavy::calibrate(config->alpha);
    cfg.symmetry_class = to_class(config->symmetry_class);
    cfg.mode = to_mode(config->mode);
    cfg.epsilon = config->epsilon;
    cfg.seed = config->seed;
    *out = new hh_sample{halfheavy::build_matrix(cfg, replicate_index)};
    return HH_OK;
  });
}

void hh_sample_destroy(hh_sample* sample) { delete sample; }

int64_t hh_sample_dim(const hh_sample* sample) { return sample ? sample->sample.dim() : 0; }

hh_status hh_sample_eigenvalues(const hh_sample* sample, double* out, int64_t capacity) {
  return guarded([&] {
    require(sample, "sample");
    require(out, "output");
    const auto& eigs = sample->sample.eigenvalues();
    if (capacity < static_cast<int64_t>(eigs.size())) throw halfheavy::InputError("output buffer too small");
    std::memcpy(out, eigs.data(), eigs.size() * sizeof(double));
    return HH_OK;
  });
}

hh_status hh_sample_trace_resolvent(const hh_sample* sample, hh_complex z, hh_complex* out) {
  return guarded([&] {
    require(sample, "sample");
    require(out, "output");
    *out = from_cplx(halfheavy::trace_resolvent(sample->sample.eigenvalues(), to_cplx(z)));
    return HH_OK;
  });
}

hh_status hh_sample_leave_one_out(const hh_sample* sample, hh_complex z, int64_t k, hh_complex* lhs, hh_complex* rhs,
                                  int* bound_ok) {
  return guarded([&] {
    require(sample, "sample");
    const auto r = halfheavy::leave_one_out(sample->sample, to_cplx(z), k);
    if (lhs) *lhs = from_cplx(r.lhs);
    if (rhs) *rhs = from_cplx(r.rhs);
    if (bound_ok) *bound_ok = r.bound_ok ? 1 : 0;
    return HH_OK;
  });
}

hh_status hh_dispatch(const char* subcommand, const char* config_json, const char* out_dir,
                      const char* overrides_json, const uint64_t* seed, int threads) {
  return guarded([&] {
    require(subcommand, "subcommand");
    require(config_json, "config");
    require(out_dir, "output directory");
    halfheavy::Invocation inv;
    inv.subcommand = subcommand;
    inv.config = nlohmann::json::parse(config_json);
    inv.output_dir = out_dir;
    if (overrides_json) inv.overrides = nlohmann::json::parse(overrides_json).get<std::vector<std::string>>();
    if (seed) inv.master_seed = *seed;
    if (threads > 0) inv.threads = threads;
    return halfheavy::dispatch(inv) == halfheavy::Outcome::ok ? HH_OK : HH_ACCEPTANCE_FAILED;
  });
}

}  // extern "C"
