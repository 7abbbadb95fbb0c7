#pragma once

// Laurent polynomials over named positive parameters with exact rational
// coefficients. Enough algebra to keep model matrices in named-coefficient
// form (sums of signed products such as -K12 or -b_p - A^2/R_v).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pogc::sym {

using ParamMap = std::map<std::string, double>;

class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rational from_wide(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr __int128 lim = INT64_MAX;
    if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational coefficient overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  void normalize() { *this = from_wide(num_, den_); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Product of named parameters with integer (possibly negative) exponents,
// kept sorted by name with no zero exponents.
class Monomial {
 public:
  Monomial() = default;
  static Monomial symbol(const std::string& name, int exponent = 1) {
    Monomial m;
    if (exponent != 0) m.factors_.emplace_back(name, exponent);
    return m;
  }

  const std::vector<std::pair<std::string, int>>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() || j != b.factors_.end()) {
      if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
        r.factors_.push_back(*i++);
      } else if (i == a.factors_.end() || j->first < i->first) {
        r.factors_.push_back(*j++);
      } else {
        int e = i->second + j->second;
        if (e != 0) r.factors_.emplace_back(i->first, e);
        ++i;
        ++j;
      }
    }
    return r;
  }
  Monomial inverse() const {
    Monomial r = *this;
    for (auto& f : r.factors_) f.second = -f.second;
    return r;
  }
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.factors_ < b.factors_; }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.factors_ == b.factors_; }

  double eval(const ParamMap& params) const {
    double v = 1.0;
    for (const auto& [name, e] : factors_) {
      auto it = params.find(name);
      if (it == params.end()) throw std::out_of_range("no value for parameter '" + name + "'");
      double p = it->second;
      if (e > 0) {
        for (int k = 0; k < e; ++k) v *= p;
      } else {
        double d = 1.0;
        for (int k = 0; k < -e; ++k) d *= p;
        v /= d;
      }
    }
    return v;
  }

 private:
  std::vector<std::pair<std::string, int>> factors_;
};

class Poly {
 public:
  Poly() = default;
  Poly(std::int64_t c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  Poly(Rational c) {                           // NOLINT(google-explicit-constructor)
    if (!c.is_zero()) terms_.emplace(Monomial(), c);
  }
  static Poly symbol(const std::string& name, int exponent = 1) {
    Poly p;
    p.terms_.emplace(Monomial::symbol(name, exponent), Rational(1));
    return p;
  }
  static Poly term(Rational c, Monomial m) {
    Poly p;
    if (!c.is_zero()) p.terms_.emplace(std::move(m), c);
    return p;
  }
  static Poly parse(const std::string& text);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }
  Rational constant_value() const {
    auto it = terms_.find(Monomial());
    return it == terms_.end() ? Rational(0) : it->second;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  Poly operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  // Only single-term divisors are invertible in this ring.
  Poly inverse() const {
    if (!is_monomial()) throw std::domain_error("cannot invert non-monomial '" + str() + "'");
    const auto& [m, c] = *terms_.begin();
    return term(Rational(1) / c, m.inverse());
  }
  friend Poly operator/(const Poly& a, const Poly& b) { return a * b.inverse(); }

  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    auto i = a.terms_.begin();
    for (auto j = b.terms_.begin(); j != b.terms_.end(); ++i, ++j)
      if (!(i->first == j->first) || i->second != j->second) return false;
    return true;
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  double eval(const ParamMap& params) const {
    double v = 0.0;
    for (const auto& [m, c] : terms_) v += c.to_double() * m.eval(params);
    return v;
  }

  // Replace a parameter by a polynomial. Negative powers need a monomial.
  Poly substitute(const std::string& name, const Poly& value) const {
    Poly r;
    for (const auto& [m, c] : terms_) {
      Poly t = term(c, Monomial());
      for (const auto& [f, e] : m.factors()) {
        if (f != name) {
          t *= symbol(f, e);
          continue;
        }
        Poly base = e > 0 ? value : value.inverse();
        for (int k = 0; k < std::abs(e); ++k) t *= base;
      }
      r += t;
    }
    return r;
  }

  std::vector<std::string> parameters() const {
    std::vector<std::string> out;
    for (const auto& [m, c] : terms_)
      for (const auto& f : m.factors()) out.push_back(f.first);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // LaTeX form: K12 -> K_{12}, R_v -> R_{v}, theta0 -> \theta_{0}.
  static std::string latex_name(const std::string& n) {
    static const char* greek[] = {"alpha", "beta", "gamma", "delta", "epsilon", "theta", "lambda", "mu",
                                  "nu",    "rho",  "sigma", "tau",   "phi",     "psi",   "omega"};
    std::size_t cut = n.find('_');
    std::string base, sub;
    if (cut != std::string::npos) {
      base = n.substr(0, cut);
      sub = n.substr(cut + 1);
    } else {
      cut = n.find_first_of("0123456789");
      base = cut == std::string::npos ? n : n.substr(0, cut);
      sub = cut == std::string::npos ? "" : n.substr(cut);
    }
    for (const char* g : greek)
      if (base == g) base = std::string("\\") + g;
    std::replace(sub.begin(), sub.end(), '_', ',');
    return sub.empty() ? base : base + "_{" + sub + "}";
  }

  std::string latex() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      bool neg = c.num() < 0;
      Rational a = neg ? -c : c;
      out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
      first = false;
      std::string num, den;
      auto put = [](std::string& s, const std::string& f) { s += (s.empty() ? "" : " ") + f; };
      if (a.num() != 1) put(num, std::to_string(a.num()));
      if (a.den() != 1) put(den, std::to_string(a.den()));
      for (const auto& [f, e] : m.factors()) {
        std::string t = latex_name(f);
        if (std::abs(e) != 1) t += "^{" + std::to_string(std::abs(e)) + "}";
        put(e > 0 ? num : den, t);
      }
      if (num.empty()) num = "1";
      out += den.empty() ? num : "\\frac{" + num + "}{" + den + "}";
    }
    return out;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      bool neg = c.num() < 0;
      Rational a = neg ? -c : c;
      if (first) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      first = false;
      out += term_str(a, m);
    }
    return out;
  }

 private:
  void add_term(const Monomial& m, const Rational& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (!c.is_zero()) terms_.emplace(m, c);
      return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  static std::string factor_str(const std::string& name, int e) {
    return e == 1 ? name : name + "^" + std::to_string(e);
  }

  static std::string term_str(const Rational& a, const Monomial& m) {
    std::vector<std::string> num, den;
    for (const auto& [f, e] : m.factors()) (e > 0 ? num : den).push_back(factor_str(f, std::abs(e)));
    std::string s;
    bool unit = a.num() == 1;
    if (!unit || num.empty()) s = std::to_string(a.num());
    for (const auto& f : num) {
      if (!s.empty()) s += "*";
      s += f;
    }
    if (a.den() != 1) den.insert(den.begin(), std::to_string(a.den()));
    for (const auto& f : den) s += "/" + f;
    return s;
  }

  std::map<Monomial, Rational> terms_;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(const std::string& text) : s_(text) {}

  Poly run() {
    Poly p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression '" + s_ + "' at " + std::to_string(pos_) + ": " + what);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly acc;
    bool first = true;
    for (;;) {
      int sign = 1;
      if (eat('-')) sign = -1;
      else if (!first && !eat('+')) break;
      else if (first) eat('+');
      Poly t = term();
      acc += sign < 0 ? -t : t;
      first = false;
      skip_ws();
      if (pos_ >= s_.size() || (s_[pos_] != '+' && s_[pos_] != '-')) break;
    }
    return acc;
  }

  Poly term() {
    Poly acc = power();
    for (;;) {
      if (eat('*')) acc *= power();
      else if (eat('/')) acc = acc / power();
      else break;
    }
    return acc;
  }

  Poly power() {
    Poly base;
    if (eat('-')) return -power();
    if (eat('(')) {
      base = expr();
      if (!eat(')')) fail("expected ')'");
    } else {
      base = primary();
    }
    if (eat('^')) {
      skip_ws();
      int sign = 1;
      if (eat('-')) sign = -1;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      int e = sign * std::stoi(s_.substr(start, pos_ - start));
      Poly r = 1;
      Poly b = e < 0 ? base.inverse() : base;
      for (int k = 0; k < std::abs(e); ++k) r *= b;
      return r;
    }
    return base;
  }

  Poly primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      return Poly::symbol(s_.substr(start, pos_ - start));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  // Decimal literals become exact rationals (1.25 -> 5/4).
  Poly number() {
    std::int64_t num = 0, den = 1;
    bool seen_dot = false;
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      if (s_[pos_] == '.') {
        if (seen_dot) fail("malformed number");
        seen_dot = true;
      } else {
        if (num > INT64_MAX / 10 - 10) fail("number too long");
        num = num * 10 + (s_[pos_] - '0');
        if (seen_dot) den *= 10;
      }
      ++pos_;
    }
    if (pos_ - start == 1 && seen_dot) fail("malformed number");
    Rational r(num, den);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      int sign = 1;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) sign = s_[pos_++] == '-' ? -1 : 1;
      std::size_t es = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (es == pos_) fail("malformed exponent");
      int e = std::stoi(s_.substr(es, pos_ - es));
      for (int k = 0; k < e; ++k) r = sign > 0 ? r * Rational(10) : r / Rational(10);
    }
    return Poly(r);
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Poly Poly::parse(const std::string& text) { return detail::ExprParser(text).run(); }

// Dense matrix of polynomials, row-major.
class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static SymMatrix parse(const std::vector<std::vector<std::string>>& rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows[0].size() : 0;
    SymMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw std::invalid_argument("ragged matrix");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = Poly::parse(rows[i][j]);
    }
    return m;
  }
  static SymMatrix identity(std::size_t n) {
    SymMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Poly& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Poly& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  SymMatrix transpose() const {
    SymMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
  friend SymMatrix operator*(const SymMatrix& a, const SymMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("symbolic matrix dimension mismatch");
    SymMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!b(k, j).is_zero()) r(i, j) += a(i, k) * b(k, j);
      }
    return r;
  }
  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("symbolic matrix dimension mismatch");
    SymMatrix r = a;
    for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] += b.data_[k];
    return r;
  }
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    SymMatrix nb = b;
    for (auto& p : nb.data_) p = -p;
    return a + nb;
  }
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const SymMatrix& a, const SymMatrix& b) { return !(a == b); }

  SymMatrix substitute(const std::string& name, const Poly& value) const {
    SymMatrix r = *this;
    for (auto& p : r.data_) p = p.substitute(name, value);
    return r;
  }

  std::vector<std::vector<std::string>> strings() const {
    std::vector<std::vector<std::string>> out(rows_, std::vector<std::string>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j).str();
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Poly> data_;
};

}  // namespace pogc::sym
