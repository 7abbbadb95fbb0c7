#include <catch_amalgamated.hpp>

#include "support/common.hpp"

using namespace pogc;
using testing_support::derive_fixture;
using testing_support::sm;

TEST_CASE("motor-pump model, symbolic") {
  auto d = derive_fixture("motor_pump.pog");
  const auto& m = *d.model;
  REQUIRE(m.symbolic);
  const auto& s = *m.symbolic;
  CHECK(m.state_labels == std::vector<std::string>{"I_L1", "w_J2", "P_C3"});
  CHECK(m.input_labels == std::vector<std::string>{"Va", "Qb"});
  CHECK(s.L == sm({{"L1", "0", "0"}, {"0", "J2", "0"}, {"0", "0", "C3"}}));
  CHECK(s.A == sm({{"-R1", "-K12", "0"}, {"K12", "-b2", "-K23"}, {"0", "K23", "-R3"}}));
  CHECK(s.B == sm({{"1", "0"}, {"0", "0"}, {"0", "-1"}}));
  CHECK(s.C == sm({{"1", "0", "0"}, {"0", "0", "1"}}));
  CHECK(s.D == sm({{"0", "0"}, {"0", "0"}}));
  CHECK(m.L(0, 0) == 2e-3);
  CHECK(m.A(1, 2) == -2.5e-6);
}

TEST_CASE("clutch model, symbolic") {
  auto d = derive_fixture("clutch.pog");
  const auto& s = *d.model->symbolic;
  CHECK(d.model->state_labels == std::vector<std::string>{"P_C_m", "v_m_p", "F_K_m"});
  CHECK(s.L == sm({{"C_m", "0", "0"}, {"0", "m_p", "0"}, {"0", "0", "1/K_m"}}));
  CHECK(s.A == sm({{"-R_v", "-A", "0"}, {"A", "-b_p", "-1"}, {"0", "1", "0"}}));
  CHECK(s.B == sm({{"R_v", "0"}, {"0", "0"}, {"0", "-1"}}));
  CHECK(s.C == sm({{"-R_v", "0", "0"}, {"0", "0", "1"}}));
  CHECK(s.D == sm({{"R_v", "0"}, {"0", "0"}}));
}

TEST_CASE("RLC ladder model, symbolic") {
  auto d = derive_fixture("electrical_fig10.pog");
  const auto& s = *d.model->symbolic;
  CHECK(d.model->state_labels == std::vector<std::string>{"V_C1", "I_L2", "I_L3", "V_C4"});
  CHECK(s.L == sm({{"C1", "0", "0", "0"}, {"0", "L2", "0", "0"}, {"0", "0", "L3", "0"}, {"0", "0", "0", "C4"}}));
  CHECK(s.A == sm({{"0", "1", "1", "0"}, {"-1", "0", "0", "0"}, {"-1", "0", "-R3", "-1"}, {"0", "0", "1", "-1/R4"}}));
  CHECK(s.B == sm({{"0", "0"}, {"1", "0"}, {"1", "0"}, {"0", "1/R4"}}));
}

TEST_CASE("extraction equals direct assembly on the fixtures") {
  for (const char* f : {"electrical_fig10.pog", "hydraulic_nested.pog", "motor_pump.pog", "clutch.pog"}) {
    INFO(f);
    auto d = derive_fixture(f);
    auto item = oracle_check(d.chain, *d.model);
    CHECK(item.ok);
    CHECK(storage_constraints(d.chain) == 0);
  }
}

TEST_CASE("numeric extraction is bit-identical to the evaluated oracle") {
  auto d = derive_fixture("motor_pump.pog");
  auto oracle = permute_states(assemble_direct(d.chain), d.model->state_labels);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    auto p = testing_support::random_params(d.scheme.params, rng);
    auto num = extract_numeric(d.scheme, p);
    CHECK(num.L == evaluate(oracle.symbolic->L, p));
    CHECK(num.A == evaluate(oracle.symbolic->A, p));
    CHECK(num.B == evaluate(oracle.symbolic->B, p));
    CHECK(num.C == evaluate(oracle.symbolic->C, p));
    CHECK(num.D == evaluate(oracle.symbolic->D, p));
  }
}

TEST_CASE("energy matrix checks") {
  Eigen::MatrixXd L = Eigen::Vector3d(1, 2, 3).asDiagonal();
  auto c = check_energy_matrix(L);
  CHECK(c.symmetric);
  CHECK(c.psd);
  CHECK(c.min_eigenvalue == Catch::Approx(1));
  CHECK(c.condition == Catch::Approx(3));
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 0, 1;
  CHECK_FALSE(check_energy_matrix(bad).symmetric);
  Eigen::MatrixXd ind(2, 2);
  ind << 1, 0, 0, -1;
  CHECK_FALSE(check_energy_matrix(ind).psd);
  // Units alone do not make L singular; a zero coefficient does.
  Eigen::MatrixXd units = Eigen::Vector2d(1e-12, 1e6).asDiagonal();
  CHECK(check_energy_matrix(units).condition > 1e12);
  CHECK_NOTHROW(require_invertible_energy(units));
  Eigen::MatrixXd zero = Eigen::Vector2d(0, 1).asDiagonal();
  CHECK_THROWS_AS(require_invertible_energy(zero), ModelError);
}

TEST_CASE("power balance identity") {
  auto d = derive_fixture("motor_pump.pog");
  const auto& m = *d.model;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x(3), u(2);
    for (auto& v : x) v = g(rng);
    for (auto& v : u) v = g(rng);
    Eigen::VectorXd xdot = m.L.partialPivLu().solve(m.A * x + m.B * u);
    double dE = x.dot(m.L * xdot);
    CHECK(dE == Catch::Approx(dissipated_power(m, x) + supplied_power(m.B, x, u)).epsilon(1e-10));
    CHECK(dissipated_power(m, x) <= 0.0);
  }
}

TEST_CASE("classical form and transfer matrices agree") {
  auto d = derive_fixture("hydraulic_nested.pog");
  const auto& m = *d.model;
  auto cs = to_classical(m);
  for (std::complex<double> s : {std::complex<double>(0.3, 1.0), std::complex<double>(-2.0, 5.0), std::complex<double>(10.0, 0)}) {
    Eigen::MatrixXcd a = transfer_matrix(m, s), b = transfer_matrix(cs, s);
    CHECK((a - b).norm() <= 1e-9 * a.norm());
  }
  CHECK_THROWS_AS(transfer_matrix(Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Ones(1, 1),
                                  Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1), 2.0),
                  ModelError);
}

TEST_CASE("similitude transform keeps the transfer matrix") {
  auto d = derive_fixture("electrical_fig10.pog");
  auto cs = to_classical(*d.model);
  Eigen::MatrixXd T(4, 4);
  T << 1, 2, 0, 0, 0, 1, 0, 3, 1, 0, 1, 0, 0, 0, 2, 1;
  auto ts = similitude_transform(cs, T, {});
  std::complex<double> s(0.5, 3.0);
  CHECK((transfer_matrix(ts, s) - transfer_matrix(cs, s)).norm() <= 1e-10 * transfer_matrix(cs, s).norm());
  CHECK_THROWS_AS(similitude_transform(cs, Eigen::MatrixXd::Zero(4, 4), {}), ModelError);
}

TEST_CASE("permuting states and overriding parameters") {
  auto d = derive_fixture("motor_pump.pog");
  auto p = permute_states(*d.model, {"P_C3", "I_L1", "w_J2"});
  CHECK(p.A(0, 0) == d.model->A(2, 2));
  CHECK(p.symbolic->A(1, 2) == sym::Poly::parse("-K12"));
  CHECK_THROWS_AS(permute_states(*d.model, {"a", "b", "c"}), ModelError);
  auto w = with_params(*d.model, {{"R1", 7.0}});
  CHECK(w.A(0, 0) == -7.0);
  CHECK_THROWS_AS(with_params(*d.model, {{"nope", 1.0}}), ModelError);
}
