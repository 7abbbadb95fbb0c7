#pragma once

// Congruent transformations x = T x^ + T_u u and degenerate-state elimination.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pogc/error.hpp"
#include "pogc/statespace.hpp"
#include "pogc/sym.hpp"

namespace pogc {

using MatrixOfTime = std::function<Eigen::MatrixXd(double)>;

struct CongruentTransform {
  Eigen::MatrixXd T;   // constant T (ignored when T_of is set)
  Eigen::MatrixXd Tu;  // n x m, may be empty for zero
  MatrixOfTime T_of;
  MatrixOfTime Tdot_of;
  std::optional<sym::SymMatrix> T_sym, Tu_sym;
  std::vector<std::string> labels;  // reduced state labels
  bool finite_difference_fallback = true;

  bool time_varying() const { return static_cast<bool>(T_of); }
  Eigen::MatrixXd at(double t) const { return T_of ? T_of(t) : T; }
};

struct TransformReport {
  double side_condition = 0.0;  // |T^T L T_u| relative
  std::vector<std::string> warnings;
};

inline constexpr double kSideWarn = 1e-12;
inline constexpr double kSideError = 1e-6;

inline double fd_step(double t) { return 1e-6 * std::max(1.0, std::abs(t)); }

// Central difference of T(t).
inline Eigen::MatrixXd finite_difference(const MatrixOfTime& f, double t) {
  double h = fd_step(t);
  return (f(t + h) - f(t - h)) / (2 * h);
}

namespace detail {

inline double side_condition(const Eigen::MatrixXd& L, const Eigen::MatrixXd& T, const Eigen::MatrixXd& Tu) {
  if (Tu.size() == 0 || T.size() == 0) return 0.0;
  double scale = L.norm() * T.norm() * Tu.norm();
  if (scale == 0.0) return 0.0;
  return (T.transpose() * L * Tu).norm() / scale;
}

inline std::vector<std::string> default_labels(std::size_t r) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < r; ++i) out.push_back("xh" + std::to_string(i + 1));
  return out;
}

}  // namespace detail

inline PogStateSpace apply_congruent(const PogStateSpace& ss, const CongruentTransform& tr, std::optional<double> t = {},
                                     TransformReport* report = nullptr) {
  TransformReport local;
  TransformReport& rep = report ? *report : local;
  double time = t.value_or(0.0);
  if (tr.time_varying() && !t)
    throw ModelError(ErrorCode::InvalidModel, "a time-varying transformation needs an evaluation time");

  Eigen::MatrixXd T = tr.at(time);
  const auto n = ss.n(), m = ss.m();
  Eigen::MatrixXd Tu = tr.Tu.size() ? tr.Tu : Eigen::MatrixXd::Zero(n, m);
  if (T.rows() != n || Tu.rows() != n || Tu.cols() != m)
    throw ModelError(ErrorCode::InvalidModel, "transformation dimensions do not match the model");
  const auto r = T.cols();

  Eigen::MatrixXd Tdot = Eigen::MatrixXd::Zero(n, r);
  if (tr.time_varying()) {
    if (tr.Tdot_of) {
      Tdot = tr.Tdot_of(time);
    } else if (tr.finite_difference_fallback) {
      Tdot = finite_difference(tr.T_of, time);
      rep.warnings.push_back("T' estimated by central difference (step " + format_real(fd_step(time)) + ")");
    } else {
      throw ModelError(ErrorCode::MissingTdot, "time-varying T needs its derivative");
    }
  }

  Eigen::MatrixXd L, A, B;
  ss.matrices_at(time, Eigen::VectorXd::Zero(n), L, A, B);

  rep.side_condition = detail::side_condition(L, T, Tu);
  if (rep.side_condition > kSideError)
    throw ModelError(ErrorCode::SideConditionViolated,
                     "T^T L T_u is not zero (relative " + format_real(rep.side_condition) + ")");
  if (rep.side_condition > kSideWarn)
    rep.warnings.push_back("T^T L T_u is small but nonzero (relative " + format_real(rep.side_condition) + ")");

  PogStateSpace out;
  out.L = T.transpose() * L * T;
  out.L = 0.5 * (out.L + out.L.transpose()).eval();
  out.A = T.transpose() * (A * T - L * Tdot);
  out.B = T.transpose() * (A * Tu + B);
  out.C = ss.C * T;
  out.D = ss.C * Tu + ss.D;
  out.state_labels = tr.labels.empty() ? detail::default_labels(static_cast<std::size_t>(r)) : tr.labels;
  out.input_labels = ss.input_labels;
  out.output_labels = ss.output_labels;
  out.params = ss.params;
  check_dimensions(out);

  // Exact coefficients survive a constant symbolic transform of a model without hooks.
  if (ss.symbolic && tr.T_sym && !tr.time_varying() && !ss.time_variant()) {
    const auto& s = *ss.symbolic;
    const sym::SymMatrix& Ts = *tr.T_sym;
    sym::SymMatrix Tus = tr.Tu_sym ? *tr.Tu_sym : sym::SymMatrix(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
    sym::SymMatrix Tt = Ts.transpose();
    SymbolicModel sm{Tt * s.L * Ts, Tt * s.A * Ts, Tt * (s.A * Tus + s.B), s.C * Ts, s.C * Tus + s.D};
    out.symbolic = std::move(sm);
  }
  return out;
}

enum class Limit { zero, infinity };

struct Elimination {
  CongruentTransform transform;
  PogStateSpace model;
  PogStateSpace limit_model;  // the model after substituting the limit, before the transform
  TransformReport report;
};

// The named state's energy coefficient goes to its limit. Zero: its row
// becomes the static constraint 0 = a_i x + b_i u, solved for the state.
// Infinity: the state cannot move, and is held at zero.
inline Elimination eliminate_degenerate_state(const PogStateSpace& ss, const std::string& label, Limit limit) {
  auto it = std::find(ss.state_labels.begin(), ss.state_labels.end(), label);
  if (it == ss.state_labels.end())
    throw ModelError(ErrorCode::IncompatibleLabels, "no state named '" + label + "'", {label});
  const auto i = static_cast<Eigen::Index>(it - ss.state_labels.begin());
  const auto n = ss.n(), m = ss.m();
  const auto si = static_cast<std::size_t>(i);

  PogStateSpace lim = ss;
  lim.hook = {};
  lim.hook_name.clear();
  Eigen::MatrixXd L0, A0, B0;
  ss.matrices_at(0.0, Eigen::VectorXd::Zero(n), L0, A0, B0);
  lim.L = L0;
  lim.A = A0;
  lim.B = B0;
  if (ss.time_variant()) lim.symbolic.reset();

  std::vector<std::string> kept;
  for (Eigen::Index k = 0; k < n; ++k)
    if (k != i) kept.push_back(ss.state_labels[static_cast<std::size_t>(k)]);

  Elimination out;
  CongruentTransform& tr = out.transform;
  tr.labels = kept;
  tr.T = Eigen::MatrixXd::Zero(n, n - 1);
  tr.Tu = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index k = 0, c = 0; k < n; ++k)
    if (k != i) tr.T(k, c++) = 1.0;
  sym::SymMatrix Ts(static_cast<std::size_t>(n), static_cast<std::size_t>(n - 1));
  sym::SymMatrix Tus(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
  for (std::size_t k = 0, c = 0; k < static_cast<std::size_t>(n); ++k)
    if (k != si) Ts(k, c++) = 1;
  bool symbolic_ok = lim.symbolic.has_value();

  if (limit == Limit::zero) {
    lim.L.row(i).setZero();
    lim.L.col(i).setZero();
    if (lim.symbolic) {
      for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
        lim.symbolic->L(si, k) = sym::Poly();
        lim.symbolic->L(k, si) = sym::Poly();
      }
    }
    double aii = lim.A(i, i);
    if (!(std::abs(aii) > 1e-14 * std::max(1.0, lim.A.norm())))
      throw ModelError(ErrorCode::NonEliminable, "the constraint row of '" + label + "' does not involve the state", {label});
    for (Eigen::Index k = 0, c = 0; k < n; ++k)
      if (k != i) tr.T(i, c++) = -lim.A(i, k) / aii;
    for (Eigen::Index k = 0; k < m; ++k) tr.Tu(i, k) = -lim.B(i, k) / aii;

    if (symbolic_ok) {
      const sym::Poly& a = lim.symbolic->A(si, si);
      if (a.is_monomial()) {
        sym::Poly inv = -a.inverse();
        for (std::size_t k = 0, c = 0; k < static_cast<std::size_t>(n); ++k)
          if (k != si) Ts(si, c++) = lim.symbolic->A(si, k) * inv;
        for (std::size_t k = 0; k < static_cast<std::size_t>(m); ++k) Tus(si, k) = lim.symbolic->B(si, k) * inv;
      } else {
        symbolic_ok = false;
      }
    }
  }
  // Infinity: T keeps the other states, the frozen one stays at zero.

  if (symbolic_ok) {
    tr.T_sym = Ts;
    tr.Tu_sym = Tus;
  }
  out.model = apply_congruent(lim, tr, std::nullopt, &out.report);
  out.limit_model = std::move(lim);
  return out;
}

}  // namespace pogc
