#include "halfheavy/ensemble.hpp"

#include <cmath>
#include <istream>
#include "json.hpp"
#include <ostream>
#include <string>

#include "halfheavy/json_io.hpp"
#include "halfheavy/keyed_stream.hpp"
#include "lapack.hpp"

namespace halfheavy {

void validate(const EnsembleConfig& cfg) {
  if (cfg.N < 2) throw InputError("ensemble requires N >= 2");
  validate(cfg.dist);
  if (cfg.mode == EntryMode::truncated && !(cfg.epsilon > 0.0)) {
    throw InputError("truncated mode requires epsilon > 0");
  }
}

MatrixSample::MatrixSample(EnsembleConfig config, std::int64_t replicate_index, RealMatrix entries)
    : config_(std::move(config)),
      replicate_index_(replicate_index),
      entries_(std::move(entries)),
      cache_(std::make_shared<Cache>()) {}

MatrixSample::MatrixSample(EnsembleConfig config, std::int64_t replicate_index, ComplexMatrix entries)
    : config_(std::move(config)),
      replicate_index_(replicate_index),
      entries_(std::move(entries)),
      cache_(std::make_shared<Cache>()) {}

std::int64_t MatrixSample::dim() const {
  return std::visit([](const auto& m) { return static_cast<std::int64_t>(m.rows()); }, entries_);
}

MatrixSample::ComplexMatrix MatrixSample::as_complex() const {
  if (is_real()) return real_entries().cast<cplx>();
  return complex_entries();
}

cplx MatrixSample::entry(std::int64_t i, std::int64_t j) const {
  if (is_real()) return real_entries()(i, j);
  return complex_entries()(i, j);
}

const std::vector<double>& MatrixSample::eigenvalues() const {
  std::call_once(cache_->once, [this] {
    const bool finite = std::visit([](const auto& m) { return m.allFinite(); }, entries_);
    if (!finite) throw InputError("matrix has non-finite entries");
    cache_->eigenvalues =
        is_real() ? detail::symmetric_eigenvalues(real_entries()) : detail::hermitian_eigenvalues(complex_entries());
  });
  return cache_->eigenvalues;
}

double raw_variable(const EnsembleConfig& cfg, std::int64_t replicate_index, std::int64_t i, std::int64_t j,
                    int component) {
  const auto bits = keyed::entry_bits(cfg.seed, static_cast<std::uint64_t>(replicate_index),
                                      static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j),
                                      static_cast<std::uint64_t>(component));
  return sample_from_uniform(cfg.dist, keyed::uniform_open_closed(bits), keyed::sign_bit(bits));
}

MatrixSample build_matrix(const EnsembleConfig& cfg, std::int64_t replicate_index) {
  validate(cfg);
  const std::int64_t n = cfg.N;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  double cutoff = INFINITY;
  double mu = 0.0;
  double sigma = 1.0;
  if (cfg.mode == EntryMode::truncated) {
    const auto tp = truncation_params(cfg.dist, n, cfg.epsilon);
    cutoff = tp.cutoff();
    mu = tp.muN;
    sigma = tp.sigmaN;
  }
  auto cut = [cutoff](double x) { return std::abs(x) <= cutoff ? x : 0.0; };

  if (cfg.symmetry_class == SymmetryClass::real) {
    MatrixSample::RealMatrix a(n, n);
    for (std::int64_t j = 0; j < n; ++j) {
      for (std::int64_t i = 0; i <= j; ++i) {
        const double x = raw_variable(cfg, replicate_index, i, j, 0);
        const double v = (cfg.mode == EntryMode::raw ? x : (cut(x) - mu) / sigma) * inv_sqrt_n;
        a(i, j) = v;
        a(j, i) = v;
      }
    }
    return MatrixSample(cfg, replicate_index, std::move(a));
  }

  // Complex class: real diagonal, off-diagonal (xR + i xI)/sqrt(2). The
  // family is symmetric so the truncated components stay centred.
  MatrixSample::ComplexMatrix a(n, n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::int64_t j = 0; j < n; ++j) {
    for (std::int64_t i = 0; i <= j; ++i) {
      const double xr = raw_variable(cfg, replicate_index, i, j, 0);
      if (i == j) {
        const double v = (cfg.mode == EntryMode::raw ? xr : (cut(xr) - mu) / sigma) * inv_sqrt_n;
        a(i, i) = cplx{v, 0.0};
        continue;
      }
      const double xi = raw_variable(cfg, replicate_index, i, j, 1);
      cplx v = cfg.mode == EntryMode::raw ? cplx{xr, xi} : cplx{cut(xr), cut(xi)} / sigma;
      v *= inv_sqrt2 * inv_sqrt_n;
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  return MatrixSample(cfg, replicate_index, std::move(a));
}

ExceedanceStats exceedance_stats(const EnsembleConfig& cfg, std::int64_t replicate_index) {
  validate(cfg);
  const std::int64_t n = cfg.N;
  const double beta = 0.25 * (1.0 + cfg.dist.alpha / 4.0) + cfg.epsilon;
  const double cutoff = std::pow(static_cast<double>(n), beta);
  const int components = cfg.symmetry_class == SymmetryClass::real ? 1 : 2;

  ExceedanceStats out;
  for (std::int64_t j = 0; j < n; ++j) {
    for (std::int64_t i = 0; i <= j; ++i) {
      const int here = (i == j) ? 1 : components;
      for (int c = 0; c < here; ++c) {
        ++out.variables;
        if (std::abs(raw_variable(cfg, replicate_index, i, j, c)) > cutoff) ++out.observed_count;
      }
    }
  }
  out.expected_count = static_cast<double>(out.variables) * tail_probability(cfg.dist, cutoff);
  return out;
}

void write_sample(std::ostream& out, const MatrixSample& sample) {
  nlohmann::json header;
  header["config"] = sample.config();
  header["replicate_index"] = sample.replicate_index();
  out << header.dump() << '\n';
  const std::int64_t n = sample.dim();
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      const cplx v = sample.entry(i, j);
      if (sample.is_real()) {
        const double re = v.real();
        out.write(reinterpret_cast<const char*>(&re), sizeof re);
      } else {
        const double parts[2] = {v.real(), v.imag()};
        out.write(reinterpret_cast<const char*>(parts), sizeof parts);
      }
    }
  }
  if (!out) throw IoError("failed writing matrix sample");
}

MatrixSample read_sample(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("missing sample header");
  const auto header = nlohmann::json::parse(line);
  const EnsembleConfig cfg = header.at("config").get<EnsembleConfig>();
  const std::int64_t rep = header.at("replicate_index").get<std::int64_t>();
  const std::int64_t n = cfg.N;
  if (cfg.symmetry_class == SymmetryClass::real) {
    MatrixSample::RealMatrix a(n, n);
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) in.read(reinterpret_cast<char*>(&a(i, j)), sizeof(double));
    if (!in) throw IoError("truncated sample payload");
    return MatrixSample(cfg, rep, std::move(a));
  }
  MatrixSample::ComplexMatrix a(n, n);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      double parts[2];
      in.read(reinterpret_cast<char*>(parts), sizeof parts);
      a(i, j) = cplx{parts[0], parts[1]};
    }
  }
  if (!in) throw IoError("truncated sample payload");
  return MatrixSample(cfg, rep, std::move(a));
}

}  // namespace halfheavy
