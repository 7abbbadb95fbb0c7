#include <catch_amalgamated.hpp>

#include "pogc/sym.hpp"

using pogc::sym::Poly;
using pogc::sym::Rational;
using pogc::sym::SymMatrix;

TEST_CASE("rationals stay normalized") {
  Rational a(2, 4), b(-3, 6);
  CHECK(a.str() == "1/2");
  CHECK((a + b).is_zero());
  CHECK((a * Rational(4)).str() == "2");
  CHECK(Rational(3, -9).str() == "-1/3");
}

TEST_CASE("parse and print polynomials") {
  CHECK(Poly::parse("K12").str() == "K12");
  CHECK(Poly::parse("-R_1 - R_1").str() == "-2*R_1");
  CHECK(Poly::parse("1/K_m").str() == "1/K_m");
  CHECK(Poly::parse("A^2/R_v").str() == "A^2/R_v");
  CHECK(Poly::parse("(a + b)*(a - b)") == Poly::parse("a^2 - b^2"));
  CHECK(Poly::parse("2*x/4") == Poly::parse("x/2"));
  CHECK_THROWS(Poly::parse("a +"));
  CHECK_THROWS(Poly::parse("a $ b"));
}

TEST_CASE("printed form reads back to the same polynomial") {
  for (const char* s : {"-b_p - A^2/R_v", "3/2*x*y^2 - 1/z", "0", "p*L_s + p*L_s0/2", "-1"}) {
    Poly p = Poly::parse(s);
    CHECK(Poly::parse(p.str()) == p);
  }
}

TEST_CASE("monomials invert, sums do not") {
  Poly m = Poly::parse("-2*R_v/A");
  CHECK((m * m.inverse()) == Poly(1));
  CHECK_THROWS_AS(Poly::parse("a + b").inverse(), std::domain_error);
}

TEST_CASE("evaluation and substitution") {
  pogc::sym::ParamMap p{{"a", 2.0}, {"b", 0.5}};
  CHECK(Poly::parse("a^2 - 3*b/a").eval(p) == Catch::Approx(4.0 - 0.75));
  CHECK(Poly::parse("h_p*x").substitute("h_p", Poly::parse("K_p*theta")) == Poly::parse("K_p*theta*x"));
  CHECK(Poly::parse("1/C").substitute("C", Poly::parse("2*c")) == Poly::parse("1/(2*c)"));
  CHECK_THROWS(Poly::parse("q").eval(p));
  auto names = Poly::parse("a*b + c/a").parameters();
  CHECK(names == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("latex rendering") {
  CHECK(Poly::latex_name("K12") == "K_{12}");
  CHECK(Poly::latex_name("R_v") == "R_{v}");
  CHECK(Poly::latex_name("theta0") == "\\theta_{0}");
  CHECK(Poly::parse("-b_p - A^2/R_v").latex() == "-\\frac{A^{2}}{R_{v}} - b_{p}");
  CHECK(Poly::parse("1/K_m").latex() == "\\frac{1}{K_{m}}");
}

TEST_CASE("symbolic matrices") {
  SymMatrix a = SymMatrix::parse({{"a", "b"}, {"0", "c"}});
  SymMatrix i = SymMatrix::identity(2);
  CHECK(a * i == a);
  CHECK(a.transpose()(1, 0) == Poly::parse("b"));
  CHECK((a - a) == SymMatrix(2, 2));
  CHECK((a * a)(0, 1) == Poly::parse("a*b + b*c"));
  CHECK_THROWS(SymMatrix::parse({{"a"}, {"b", "c"}}));
  CHECK_THROWS(a * SymMatrix(3, 1));
}
