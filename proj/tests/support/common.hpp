#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>

#include "pogc/pogc.hpp"

namespace testing_support {

inline std::string fixture(const std::string& name) { return std::string(POGC_FIXTURES) + "/" + name; }

inline pogc::Derivation derive_fixture(const std::string& name) {
  return pogc::derive_text(pogc::read_text_file(fixture(name)));
}

inline pogc::sym::SymMatrix sm(const std::vector<std::vector<std::string>>& rows) { return pogc::sym::SymMatrix::parse(rows); }

// Every parameter of `base` scaled by a log-uniform factor in [0.1, 10].
inline pogc::sym::ParamMap random_params(const pogc::sym::ParamMap& base, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> e(-1.0, 1.0);
  pogc::sym::ParamMap out;
  for (const auto& [k, v] : base) out[k] = v * std::pow(10.0, e(rng));
  return out;
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

}  // namespace testing_support
