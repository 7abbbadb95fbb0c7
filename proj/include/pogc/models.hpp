#pragma once

// Hand-authored multidimensional models (hydraulic CVT, PMSM) and the
// hooks that make them time- or state-dependent.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pogc/error.hpp"
#include "pogc/statespace.hpp"
#include "pogc/sym.hpp"

namespace pogc::models {

namespace detail {

inline double param(const sym::ParamMap& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw ModelError(ErrorCode::InvalidModel, "model parameter '" + name + "' is missing", {name});
  return it->second;
}

inline sym::SymMatrix diag(const std::vector<std::string>& entries) {
  sym::SymMatrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = sym::Poly::parse(entries[i]);
  return m;
}

inline sym::SymMatrix block(const sym::SymMatrix& a, const sym::SymMatrix& b, const sym::SymMatrix& c,
                            const sym::SymMatrix& d) {
  sym::SymMatrix m(a.rows() + c.rows(), a.cols() + b.cols());
  auto put = [&](const sym::SymMatrix& s, std::size_t r0, std::size_t c0) {
    for (std::size_t i = 0; i < s.rows(); ++i)
      for (std::size_t j = 0; j < s.cols(); ++j) m(r0 + i, c0 + j) = s(i, j);
  };
  put(a, 0, 0);
  put(b, 0, a.cols());
  put(c, a.rows(), 0);
  put(d, a.rows(), a.cols());
  return m;
}

inline sym::SymMatrix negate(const sym::SymMatrix& m) { return sym::SymMatrix(m.rows(), m.cols()) - m; }

}  // namespace detail

// ------------------------------------------------------------------- CVT

// Tilt angle of the pump plates.
inline double cvt_theta(const sym::ParamMap& p, double t) {
  return detail::param(p, "theta0") + detail::param(p, "theta1") * std::sin(2 * std::numbers::pi * detail::param(p, "f_theta") * t);
}

inline double cvt_theta_dot(const sym::ParamMap& p, double t) {
  double w = 2 * std::numbers::pi * detail::param(p, "f_theta");
  return detail::param(p, "theta1") * w * std::cos(w * t);
}

// Conversion matrix R for a given pump displacement coefficient h_p.
inline sym::SymMatrix cvt_R_symbolic(const std::string& h_p) {
  return sym::SymMatrix::parse({{"-r_c", "r_p", "r_s", "0", "0", "0"},
                                {"r_c", "r_p", "0", "-r_r", "0", "0"},
                                {"0", "0", "r_a", "0", "r_d", "0"},
                                {"0", "0", "0", "r_re", "0", "r_e"},
                                {"0", "0", "0", "0", h_p, "-h_q"}});
}

inline Eigen::MatrixXd cvt_R(const sym::ParamMap& p, double t) {
  auto g = [&](const char* n) { return detail::param(p, n); };
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(5, 6);
  R(0, 0) = -g("r_c");
  R(0, 1) = g("r_p");
  R(0, 2) = g("r_s");
  R(1, 0) = g("r_c");
  R(1, 1) = g("r_p");
  R(1, 3) = -g("r_r");
  R(2, 2) = g("r_a");
  R(2, 4) = g("r_d");
  R(3, 3) = g("r_re");
  R(3, 5) = g("r_e");
  R(4, 4) = g("K_p") * cvt_theta(p, t);
  R(4, 5) = -g("h_q");
  return R;
}

// Speeds compatible with R(t) w = 0, parametrized by the sun speed.
inline Eigen::VectorXd cvt_Q(const sym::ParamMap& p, double t) {
  auto g = [&](const char* n) { return detail::param(p, n); };
  double th = cvt_theta(p, t);
  double hq = g("h_q"), rd = g("r_d"), rre = g("r_re"), rs = g("r_s"), Kp = g("K_p"), ra = g("r_a"), re = g("r_e"),
         rr = g("r_r"), rc = g("r_c"), rp = g("r_p");
  Eigen::VectorXd q(6);
  q(0) = (hq * rd * rre * rs + Kp * ra * re * rr * th) / (2 * hq * rd * rre * rc);
  q(1) = (Kp * ra * re * rr * th - hq * rd * rre * rs) / (2 * hq * rd * rp * rre);
  q(2) = 1;
  q(3) = Kp * ra * re * th / (hq * rd * rre);
  q(4) = -ra / rd;
  q(5) = -Kp * ra * th / (hq * rd);
  return q;
}

inline Eigen::MatrixXd cvt_T(const sym::ParamMap& p, double t) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(11, 1);
  T.topRows(6) = cvt_Q(p, t);
  return T;
}

inline const std::vector<std::string>& cvt_shafts() {
  static const std::vector<std::string> s{"c", "p", "s", "r", "d", "e"};
  return s;
}

inline const std::vector<std::string>& cvt_links() {
  static const std::vector<std::string> s{"sp", "pr", "sd", "re"};
  return s;
}

inline sym::ParamMap cvt_default_params() {
  return {{"J_c", 0.05},   {"J_p", 0.002},  {"J_s", 0.01},   {"J_r", 0.03},  {"J_d", 0.004}, {"J_e", 0.006},
          {"b_c", 1e-3},   {"b_p", 2e-4},   {"b_s", 5e-4},   {"b_r", 8e-4},  {"b_d", 3e-4},  {"b_e", 4e-4},
          {"K_sp", 2e5},   {"K_pr", 2e5},   {"K_sd", 1.5e5}, {"K_re", 1.5e5}, {"C_de", 1e-10},
          {"d_sp", 20},    {"d_pr", 20},    {"d_sd", 15},    {"d_re", 15},   {"R_de", 1e-9},
          {"r_c", 0.06},   {"r_p", 0.015},  {"r_s", 0.03},   {"r_r", 0.09},  {"r_a", 0.04},  {"r_d", 0.02},
          {"r_re", 0.05},  {"r_e", 0.025},  {"h_q", 8e-6},   {"K_p", 1e-5},  {"theta0", 0.3}, {"theta1", 0.1},
          {"f_theta", 0.5}};
}

// Time-variant A(t) with the pump coefficient h_p = K_p theta(t).
inline void cvt_hook(const sym::ParamMap& p, double t, Eigen::MatrixXd& A) {
  Eigen::MatrixXd R = cvt_R(p, t);
  Eigen::MatrixXd BJ = Eigen::MatrixXd::Zero(6, 6), BK = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 6; ++i) BJ(i, i) = detail::param(p, "b_" + cvt_shafts()[i]);
  for (int i = 0; i < 4; ++i) BK(i, i) = detail::param(p, "d_" + cvt_links()[i]);
  BK(4, 4) = detail::param(p, "R_de");
  A.setZero(11, 11);
  A.topLeftCorner(6, 6) = -BJ - R.transpose() * BK * R;
  A.topRightCorner(6, 5) = -R.transpose();
  A.bottomLeftCorner(5, 6) = R;
}

// Model at theta = theta0, with the hook supplying A(t).
inline PogStateSpace cvt_model(const sym::ParamMap& params = cvt_default_params()) {
  std::vector<std::string> L, BJ, BK, states, inputs;
  for (const auto& s : cvt_shafts()) {
    L.push_back("J_" + s);
    BJ.push_back("b_" + s);
    states.push_back("w_" + s);
    inputs.push_back("tau_" + s);
  }
  std::vector<std::string> Ll;
  for (const auto& s : cvt_links()) {
    Ll.push_back("1/K_" + s);
    BK.push_back("d_" + s);
    states.push_back("F_" + s);
  }
  Ll.push_back("C_de");
  BK.push_back("R_de");
  states.push_back("P_de");

  sym::SymMatrix R = cvt_R_symbolic("K_p*theta0");
  sym::SymMatrix Rt = R.transpose();
  SymbolicModel m;
  m.L = detail::block(detail::diag(L), sym::SymMatrix(6, 5), sym::SymMatrix(5, 6), detail::diag(Ll));
  m.A = detail::block(detail::negate(detail::diag(BJ)) - Rt * detail::diag(BK) * R, detail::negate(Rt), R,
                      sym::SymMatrix(5, 5));
  m.B = detail::block(sym::SymMatrix::identity(6), sym::SymMatrix(6, 0), sym::SymMatrix(5, 6), sym::SymMatrix(5, 0));
  m.C = sym::SymMatrix::identity(11);
  m.D = sym::SymMatrix(11, 6);
  PogStateSpace ss = from_symbolic(std::move(m), params, states, inputs, states);
  ss.hook_name = "cvt";
  return ss;
}

// ------------------------------------------------------------------ PMSM

inline sym::ParamMap pmsm_default_params() {
  return {{"p", 4},        {"L_s", 2.5e-3}, {"L_s0", 1e-3}, {"R_s", 0.4}, {"J_m", 2e-3},
          {"b_m", 1e-3},   {"K_d", 0.02},   {"K_q", 0.35}};
}

inline double pmsm_Le(const sym::ParamMap& p) { return detail::param(p, "L_s") + detail::param(p, "L_s0") / 2; }

// Speed-dependent skew coupling of the d-q currents.
inline Eigen::Matrix2d pmsm_skew(const sym::ParamMap& p, double omega) {
  double pp = detail::param(p, "p");
  double k = pp * pp * omega * pmsm_Le(p);
  Eigen::Matrix2d S;
  S << 0, -k, k, 0;
  return S;
}

inline void pmsm_hook(const sym::ParamMap& p, const Eigen::VectorXd& x, Eigen::MatrixXd& A) {
  A.topLeftCorner(2, 2) += pmsm_skew(p, x.size() > 2 ? x(2) : 0.0);
}

inline PogStateSpace pmsm_model(const sym::ParamMap& params = pmsm_default_params()) {
  SymbolicModel m;
  m.L = detail::diag({"p*(L_s + L_s0/2)", "p*(L_s + L_s0/2)", "J_m"});
  m.A = sym::SymMatrix::parse({{"-p*R_s", "0", "-K_d"}, {"0", "-p*R_s", "-K_q"}, {"K_d", "K_q", "-b_m"}});
  m.B = sym::SymMatrix::parse({{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "-1"}});
  m.C = sym::SymMatrix::identity(3);
  m.D = sym::SymMatrix(3, 3);
  std::vector<std::string> states{"I_d", "I_q", "w_m"};
  PogStateSpace ss = from_symbolic(std::move(m), params, states, {"V_d", "V_q", "tau"}, states);
  ss.hook_name = "pmsm";
  return ss;
}

// ---------------------------------------------------------------- registry

inline TimeVariantHook make_hook(const std::string& name, const sym::ParamMap& params) {
  if (name.empty()) return {};
  if (name == "cvt")
    return [params](double t, const Eigen::VectorXd&, Eigen::MatrixXd&, Eigen::MatrixXd& A, Eigen::MatrixXd&) {
      cvt_hook(params, t, A);
    };
  if (name == "pmsm")
    return [params](double, const Eigen::VectorXd& x, Eigen::MatrixXd&, Eigen::MatrixXd& A, Eigen::MatrixXd&) {
      pmsm_hook(params, x, A);
    };
  throw ModelError(ErrorCode::InvalidModel, "unknown model hook '" + name + "'", {name});
}

inline PogStateSpace attach_hook(PogStateSpace ss) {
  ss.hook = make_hook(ss.hook_name, ss.params);
  return ss;
}

}  // namespace pogc::models
