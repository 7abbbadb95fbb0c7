// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "support/common.hpp"
#include "support/oracles.hpp"

using namespace pogc;
using testing_support::derive_fixture;
using testing_support::fixture;
using testing_support::rel_err;
using testing_support::sm;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char* title, double budget_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && s > budget_s) {
    o.ok = false;
    o.detail += "; over the " + format_real(budget_s) + " s budget";
  }
  if (!o.ok) ++failures;
  std::printf("%s criterion %d: %s (%.3f s) %s\n", o.ok ? "PASS" : "FAIL", n, title, s, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

// Netlist with every element and coupling value scaled by a log-uniform factor in [0.1, 10].
Netlist scatter(Netlist net, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> e(-1.0, 1.0);
  for (auto& el : net.elements) el.value *= std::pow(10.0, e(rng));
  for (auto& c : net.couplings) c.ratio *= std::pow(10.0, e(rng));
  return net;
}

// ------------------------------------------------------------------ 1

Outcome motor_pump() {
  auto d = derive_fixture("motor_pump.pog");
  const auto& s = *d.model->symbolic;
  bool sym_ok = d.model->state_labels == std::vector<std::string>{"I_L1", "w_J2", "P_C3"} &&
                s.L == sm({{"L1", "0", "0"}, {"0", "J2", "0"}, {"0", "0", "C3"}}) &&
                s.A == sm({{"-R1", "-K12", "0"}, {"K12", "-b2", "-K23"}, {"0", "K23", "-R3"}}) &&
                s.B == sm({{"1", "0"}, {"0", "0"}, {"0", "-1"}}) && s.C == sm({{"1", "0", "0"}, {"0", "0", "1"}}) &&
                s.D == sm({{"0", "0"}, {"0", "0"}});
  std::mt19937_64 rng(1);
  int exact = 0;
  std::string why;
  for (int k = 0; k < 100; ++k) {
    auto r = derive_netlist(scatter(d.net, rng));
    auto oracle = permute_states(assemble_direct(r.chain), r.model->state_labels);
    std::string w;
    if (detail::same_model(*r.model, oracle, w))
      ++exact;
    else
      why = w;
  }
  Outcome o;
  o.ok = sym_ok && exact == 100;
  o.detail = std::string("symbolic ") + (sym_ok ? "match" : "MISMATCH") + ", " + std::to_string(exact) +
             "/100 draws bit-identical to direct assembly" + (why.empty() ? "" : " (" + why + ")");
  return o;
}

// ------------------------------------------------------------------ 2

Outcome clutch() {
  auto d = derive_fixture("clutch.pog");
  const auto& s = *d.model->symbolic;
  bool s10 = s.L == sm({{"C_m", "0", "0"}, {"0", "m_p", "0"}, {"0", "0", "1/K_m"}}) &&
             s.A == sm({{"-R_v", "-A", "0"}, {"A", "-b_p", "-1"}, {"0", "1", "0"}}) &&
             s.B == sm({{"R_v", "0"}, {"0", "0"}, {"0", "-1"}}) && s.C == sm({{"-R_v", "0", "0"}, {"0", "0", "1"}}) &&
             s.D == sm({{"R_v", "0"}, {"0", "0"}});

  auto e = eliminate_degenerate_state(*d.model, "P_C_m", Limit::zero);
  // T up to a nonzero scale per column: T_ref(:,j) = c_j T(:,j).
  auto T_ref = sm({{"-A/R_v", "0"}, {"1", "0"}, {"0", "1"}});
  auto Tu_ref = sm({{"1", "0"}, {"0", "0"}, {"0", "0"}});
  bool s11 = e.transform.T_sym && e.transform.Tu_sym && *e.transform.Tu_sym == Tu_ref;
  if (s11) {
    const auto& T = *e.transform.T_sym;
    for (std::size_t j = 0; j < 2 && s11; ++j) {
      // Pivot on the first nonzero reference entry.
      std::size_t piv = 0;
      while (T_ref(piv, j).is_zero()) ++piv;
      if (T(piv, j).is_zero()) {
        s11 = false;
        break;
      }
      for (std::size_t i = 0; i < 3; ++i)
        if (!(T(i, j) * T_ref(piv, j) == T_ref(i, j) * T(piv, j))) s11 = false;
    }
  }
  const auto& r = *e.model.symbolic;
  auto L12 = sm({{"m_p", "0"}, {"0", "1/K_m"}}), A12 = sm({{"-b_p - A^2/R_v", "-1"}, {"1", "0"}}),
       B12 = sm({{"A", "0"}, {"0", "-1"}}), C12 = sm({{"A", "0"}, {"0", "1"}}), D12 = sm({{"0", "0"}, {"0", "0"}});
  bool s12 = e.model.symbolic && r.L == L12 && r.A == A12 && r.B == B12 && r.C == C12 && r.D == D12;

  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto p = testing_support::random_params(d.model->params, rng);
    auto ek = eliminate_degenerate_state(with_params(*d.model, p), "P_C_m", Limit::zero);
    worst = std::max({worst, rel_err(ek.model.L, evaluate(L12, p)), rel_err(ek.model.A, evaluate(A12, p)),
                      rel_err(ek.model.B, evaluate(B12, p)), rel_err(ek.model.C, evaluate(C12, p))});
    // D is zero: measure against the size of the cancelling terms.
    double dscale = p.at("R_v") + ek.model.C.norm();
    worst = std::max(worst, ek.model.D.norm() / dscale);
  }
  Outcome o;
  o.ok = s10 && s11 && s12 && worst <= 1e-12;
  o.detail = std::string("clutch model ") + (s10 ? "match" : "MISMATCH") + ", (T, T_u) " + (s11 ? "match" : "MISMATCH") +
             ", reduced model " + (s12 ? "match" : "MISMATCH") + ", worst numeric rel err " + fmt(worst) + " over 100 draws";
  return o;
}

// ------------------------------------------------------------------ 3

Outcome ladder_simulation() {
  auto d = derive_fixture("electrical_fig10.pog");
  const auto& m = *d.model;
  InputSet u = netlist_inputs(d);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(m.n());
  SimConfig cfg;
  cfg.dt = 1e-5;
  cfg.t_end = 5.0;
  auto tr = simulate(m, u, x0, cfg);
  // Inputs are constant, so stepping the exact propagator gives the reference.
  oracle::Propagator p(m.L, m.A, m.B, u.at(0), cfg.dt);
  Eigen::VectorXd x = x0;
  double dev = 0.0;
  for (std::size_t k = 1; k < tr.size(); ++k) {
    x = p.step(x);
    dev = std::max(dev, (tr.states.col(static_cast<Eigen::Index>(k)) - x).cwiseAbs().maxCoeff());
  }
  auto nod = oracle::nodal(d.net);
  Eigen::VectorXd dc = oracle::nodal_dc(nod, u.at(0));
  Eigen::VectorXd xf = tr.states.col(static_cast<Eigen::Index>(tr.size() - 1));
  Eigen::Vector4d expected(0, 5, -5, 5);
  double ss = 0.0, dc_gap = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    ss = std::max(ss, std::abs(xf(i) - expected(i)));
    dc_gap = std::max(dc_gap, std::abs(expected(i) - oracle::storage_value(nod, d.net, dc, m.state_labels[static_cast<std::size_t>(i)].substr(2))));
  }
  Outcome o;
  o.ok = dev <= 1e-7 && ss <= 1e-3 && dc_gap <= 1e-12 && m.state_labels == std::vector<std::string>{"V_C1", "I_L2", "I_L3", "V_C4"};
  o.detail = "max |x - expm| " + fmt(dev) + ", steady-state error " + fmt(ss) + " (nodal DC agrees to " + fmt(dc_gap) + ")";
  return o;
}

// ------------------------------------------------------------------ 4

Outcome random_oracle() {
  RandomNetlist gen(4);
  int accepted = 0, generated = 0, equal = 0, max_n = 0;
  std::set<std::string> domains;
  std::set<std::size_t> couplings;
  std::string first_bad;
  while (accepted < 500) {
    std::string text = gen.generate();
    ++generated;
    Derivation d;
    try {
      d = derive_text(text);
    } catch (const ModelError&) {
      continue;  // rejection sampling: not every random circuit is derivable
    }
    ++accepted;
    max_n = std::max(max_n, static_cast<int>(d.model->n()));
    for (const auto& e : d.net.elements) domains.insert(domain_keyword(e.domain));
    couplings.insert(d.net.couplings.size());
    auto item = oracle_check(d.chain, *d.model);
    if (item.ok)
      ++equal;
    else if (first_bad.empty())
      first_bad = item.detail;
  }
  Outcome o;
  o.ok = equal == 500 && max_n <= 8 && domains.size() == 4 && couplings == std::set<std::size_t>{0, 1, 2};
  o.detail = std::to_string(equal) + "/500 equal (" + std::to_string(generated) + " generated, max n " + std::to_string(max_n) +
             ", " + std::to_string(domains.size()) + " domains, coupling counts " + std::to_string(couplings.size()) + "/3)" +
             (first_bad.empty() ? "" : " first mismatch: " + first_bad);
  return o;
}

// ------------------------------------------------------------------ 5

Outcome parity() {
  int schemes = 0, passing = 0, mutations = 0, caught = 0, off_loop = 0;
  auto sweep = [&](const PogScheme& s) {
    ++schemes;
    if (check_loop_signs(s).ok()) ++passing;
  };
  for (const char* f : {"motor_pump.pog", "clutch.pog", "electrical_fig10.pog", "hydraulic_nested.pog"}) {
    auto d = derive_fixture(f);
    sweep(d.scheme);
    auto slots = loop_node_inputs(d.scheme);
    for (const auto& [node, input] : slots) {
      ++mutations;
      if (!check_loop_signs(flip_node_sign(d.scheme, node, input)).ok()) ++caught;
    }
    std::size_t all = 0;
    for (const auto& n : d.scheme.nodes) all += n.inputs.size();
    off_loop += static_cast<int>(all - slots.size());
  }
  RandomNetlist gen(5);
  for (int k = 0, got = 0; got < 200 && k < 5000; ++k) {
    try {
      auto d = derive_text(gen.generate());
      sweep(d.scheme);
      ++got;
    } catch (const ModelError&) {
    }
  }
  Outcome o;
  o.ok = passing == schemes && caught == mutations && mutations > 0;
  o.detail = std::to_string(passing) + "/" + std::to_string(schemes) + " schemes pass; " + std::to_string(caught) + "/" +
             std::to_string(mutations) + " single-sign mutations of fixture loop inputs detected (" + std::to_string(off_loop) +
             " node inputs lie on no loop)";
  return o;
}

// ------------------------------------------------------------------ 6

struct SimCase {
  std::string name;
  PogStateSpace model;
  InputSet inputs;
  double dt, t_end;
};

std::vector<SimCase> simulated_fixtures() {
  std::vector<SimCase> out;
  auto add_netlist = [&](const char* f, double dt, double t_end) {
    auto d = derive_fixture(f);
    out.push_back({f, *d.model, netlist_inputs(d), dt, t_end});
  };
  add_netlist("electrical_fig10.pog", 1.5625e-6, 0.2);
  add_netlist("hydraulic_nested.pog", 2.5e-5, 0.5);
  add_netlist("motor_pump.pog", 2e-6, 0.02);
  add_netlist("clutch.pog", 1e-6, 0.005);
  auto cvt = model_from_json_text(read_text_file(fixture("cvt.json")));
  InputSet cu = InputSet::zeros(6);
  cu.signals[0] = InputSignal::constant(5.0);
  cu.signals[5] = InputSignal::constant(-2.0);
  out.push_back({"cvt.json", cvt, cu, 2e-6, 0.01});
  auto pm = model_from_json_text(read_text_file(fixture("pmsm.json")));
  InputSet pu = InputSet::zeros(3);
  pu.signals[1] = InputSignal::constant(20.0);
  pu.signals[2] = InputSignal::constant(-1.0);
  out.push_back({"pmsm.json", pm, pu, 1e-5, 0.05});
  return out;
}

Outcome energy_balance() {
  Outcome o;
  std::ostringstream os;
  for (const auto& c : simulated_fixtures()) {
    SimConfig cfg;
    cfg.dt = c.dt;
    cfg.t_end = c.t_end;
    cfg.record_every = 1000000;
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(c.model.n());
    auto a = simulate(c.model, c.inputs, x0, cfg);
    cfg.dt = c.dt / 2;
    auto b = simulate(c.model, c.inputs, x0, cfg);
    double rel = a.max_balance_residual / a.max_supplied_power;
    double ratio = a.max_balance_residual / b.max_balance_residual;
    bool ok = rel <= 1e-6 && ratio >= 4.0;
    o.ok = o.ok && ok;
    char r[16];
    std::snprintf(r, sizeof r, "%.5f", ratio);
    os << (os.tellp() ? "; " : "") << c.name << " dt " << fmt(c.dt) << ": residual/max|x'Bu| " << fmt(rel) << ", halving ratio "
       << r << (ok ? "" : " <-");
  }
  o.detail = os.str();
  return o;
}

// ------------------------------------------------------------------ 7

Outcome congruent_invariance() {
  auto d = derive_fixture("motor_pump.pog");
  const auto& m = *d.model;
  Eigen::VectorXcd poles = oracle::eigenvalues(m.L.partialPivLu().solve(m.A));
  double rho = poles.cwiseAbs().maxCoeff();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  double worst = 0.0;
  int evaluations = 0;
  for (int k = 0; k < 50; ++k) {
    // Random invertible T, column-scaled by L^-1/2 so states of very different units mix.
    Eigen::MatrixXd G(3, 3);
    for (auto& v : G.reshaped()) v = g(rng);
    if (std::abs(G.determinant()) < 1e-3) {
      --k;
      continue;
    }
    CongruentTransform tr;
    tr.T = m.L.diagonal().cwiseSqrt().cwiseInverse().asDiagonal() * G;
    auto r = apply_congruent(m, tr);
    for (int j = 0; j < 20; ++j) {
      std::complex<double> s(rho * un(rng), rho * un(rng));
      double gap = (poles.array() - s).abs().minCoeff();
      if (gap < 1e-3 * rho) {
        --j;
        continue;
      }
      Eigen::MatrixXcd h0 = transfer_matrix(m, s), h1 = transfer_matrix(r, s);
      worst = std::max(worst, (h1 - h0).norm() / h0.norm());
      ++evaluations;
    }
  }
  Outcome o;
  o.ok = worst <= 1e-9 && evaluations == 1000;
  o.detail = "worst |H^-H|/|H| " + fmt(worst) + " over 50 T x 20 s";
  return o;
}

// ------------------------------------------------------------------ 8

Outcome cvt_reduction() {
  auto m = model_from_json_text(read_text_file(fixture("cvt.json")));
  const auto& p = m.params;
  // Kernel of R(theta) from the symbolic conversion matrix, normalized on the sun speed.
  auto kernel = [&](double theta) {
    sym::ParamMap q = p;
    q["theta_val"] = theta;
    Eigen::MatrixXd R = evaluate(models::cvt_R_symbolic("K_p*theta_val"), q);
    Eigen::MatrixXd K = R.fullPivLu().kernel();
    Eigen::VectorXd v = K.col(0);
    return Eigen::VectorXd(v / v(2));
  };
  Eigen::VectorXd q0 = kernel(0.0), dq = kernel(1.0) - q0;  // affine in theta
  CongruentTransform tr;
  tr.T_of = [p](double t) { return models::cvt_T(p, t); };
  tr.labels = {"w_s"};
  double worst = 0.0;
  for (double t : {0.0, 0.13, 0.5, 0.77, 1.6}) {
    double th = models::cvt_theta(p, t), thd = models::cvt_theta_dot(p, t);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(11, 1), Td = Eigen::MatrixXd::Zero(11, 1);
    T.topRows(6) = q0 + th * dq;
    Td.topRows(6) = thd * dq;
    // A(t): the symbolic model evaluated at the current tilt.
    sym::ParamMap pt = p;
    pt["theta0"] = th;
    Eigen::MatrixXd At = evaluate(m.symbolic->A, pt), L = evaluate(m.symbolic->L, pt);
    Eigen::MatrixXd ref_A = T.transpose() * (At * T - L * Td);
    Eigen::MatrixXd ref_L = T.transpose() * L * T;
    auto r = apply_congruent(m, tr, t);
    worst = std::max({worst, rel_err(r.A, ref_A), rel_err(r.L, ref_L), rel_err(r.B, T.transpose() * evaluate(m.symbolic->B, pt))});
  }
  Outcome o;
  o.ok = worst <= 1e-6;
  o.detail = "worst rel err " + fmt(worst) + " at 5 times (central-difference T')";
  return o;
}

// ------------------------------------------------------------------ 9

Outcome pmsm() {
  auto m = model_from_json_text(read_text_file(fixture("pmsm.json")));
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd x(3);
    x << 10 * g(rng), 10 * g(rng), 300 * g(rng);
    Eigen::MatrixXd L, A, B;
    m.matrices_at(0, x, L, A, B);
    Eigen::MatrixXd skew = A - m.A;  // the speed-dependent block only
    worst = std::max(worst, std::abs(dissipated_power(skew, x)));
  }
  // L_e here is the electrical block, p (L_s + L_s0/2) on its diagonal.
  double Le = m.params.at("p") * models::pmsm_Le(m.params);
  Eigen::Vector3d diag(Le, Le, m.params.at("J_m"));
  Eigen::MatrixXd Ld = diag.asDiagonal();
  auto e = check_energy_matrix(m.L);
  Outcome o;
  o.ok = worst <= 1e-14 && e.symmetric && e.psd && m.L == Ld;
  o.detail = "max |x'S x| " + fmt(worst) + " over 100 states; L = diag(L_e, L_e, J_m) " + (m.L == Ld ? "yes" : "NO") +
             ", PSD " + (e.psd ? "yes" : "NO");
  return o;
}

// ----------------------------------------------------------------- 10

Outcome hydraulic_eigenvalues() {
  auto base = derive_fixture("hydraulic_nested.pog");
  std::mt19937_64 rng(10);
  double worst = 0.0;
  bool counts = true;
  for (int k = 0; k < 20; ++k) {
    Netlist net = k == 0 ? base.net : scatter(base.net, rng);
    auto d = derive_netlist(net);
    const auto& m = *d.model;
    Eigen::VectorXcd mine = oracle::eigenvalues(m.L.partialPivLu().solve(m.A));
    auto ref = oracle::nodal_eigenvalues(oracle::nodal(net), 0.37);
    if (static_cast<Eigen::Index>(ref.size()) != mine.size()) {
      counts = false;
      continue;
    }
    // Greedy nearest matching.
    std::vector<bool> used(ref.size(), false);
    for (Eigen::Index i = 0; i < mine.size(); ++i) {
      std::size_t best = 0;
      double bd = INFINITY;
      for (std::size_t j = 0; j < ref.size(); ++j)
        if (!used[j] && std::abs(mine(i) - ref[j]) < bd) {
          bd = std::abs(mine(i) - ref[j]);
          best = j;
        }
      used[best] = true;
      worst = std::max(worst, bd / std::abs(ref[best]));
    }
  }
  Outcome o;
  o.ok = counts && worst <= 1e-9;
  o.detail = "worst relative eigenvalue gap " + fmt(worst) + " over 20 draws" + (counts ? "" : ", eigenvalue counts differ");
  return o;
}

}  // namespace

int main() {
  criterion(1, "motor-pump model symbolic and numeric", 1.0, motor_pump);
  criterion(2, "clutch reduction", 1.0, clutch);
  criterion(3, "RLC ladder simulation vs matrix exponential and DC", 10.0, ladder_simulation);
  criterion(4, "500 random netlists vs direct assembly", 30.0, random_oracle);
  criterion(5, "loop parity and sign mutations", 0, parity);
  criterion(6, "energy balance residual", 0, energy_balance);
  criterion(7, "congruent invariance of H(s)", 0, congruent_invariance);
  criterion(8, "CVT time-varying reduction", 0, cvt_reduction);
  criterion(9, "PMSM skew coupling and energy matrix", 0, pmsm);
  criterion(10, "hydraulic circuit eigenvalues vs nodal analysis", 0, hydraulic_eigenvalues);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
