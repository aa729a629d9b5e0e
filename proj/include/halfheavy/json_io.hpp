#pragma once

// JSON mappings for the core value types (nlohmann ADL hooks). Complex
// numbers serialise as [re, im]; a bare number reads as a real value.

#include <complex>

#include "json.hpp"

#include "halfheavy/ensemble.hpp"
#include "halfheavy/experiments.hpp"
#include "halfheavy/heavytail.hpp"
#include "halfheavy/kernel.hpp"

namespace nlohmann {

template <>
struct adl_serializer<std::complex<double>> {
  static void to_json(json& j, const std::complex<double>& z) { j = json::array({z.real(), z.imag()}); }
  static void from_json(const json& j, std::complex<double>& z) {
    if (j.is_number()) {
      z = {j.get<double>(), 0.0};
    } else if (j.is_array() && j.size() == 2) {
      z = {j[0].get<double>(), j[1].get<double>()};
    } else {
      throw halfheavy::InputError("complex value must be [re, im] or a number");
    }
  }
};

}  // namespace nlohmann

namespace halfheavy {

void to_json(nlohmann::json& j, const DistSpec& d);
void from_json(const nlohmann::json& j, DistSpec& d);

void to_json(nlohmann::json& j, const TruncationParams& t);

/// Reads {"N", "alpha", "symmetry_class", "mode", "epsilon", "seed"}; the
/// distribution is recalibrated from alpha.
void to_json(nlohmann::json& j, const EnsembleConfig& c);
void from_json(const nlohmann::json& j, EnsembleConfig& c);

void to_json(nlohmann::json& j, const QuadratureParams& q);
void from_json(const nlohmann::json& j, QuadratureParams& q);

void to_json(nlohmann::json& j, const KernelValue& k);

void to_json(nlohmann::json& j, const RunPlan& p);
void from_json(const nlohmann::json& j, RunPlan& p);

void to_json(nlohmann::json& j, const GaussianityStats& g);
void to_json(nlohmann::json& j, const ScalingRow& r);
void to_json(nlohmann::json& j, const NormalityRow& r);
void to_json(nlohmann::json& j, const CovarianceRow& r);
void to_json(nlohmann::json& j, const Flag& f);
void to_json(nlohmann::json& j, const Tolerances& t);
void to_json(nlohmann::json& j, const ExperimentReport& r);

}  // namespace halfheavy
