#pragma once

// Fixed-step integration of L x' = A x + B u with energy bookkeeping.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pogc/error.hpp"
#include "pogc/netlist.hpp"
#include "pogc/statespace.hpp"

namespace pogc {

struct InputSignal {
  enum class Kind { constant, step, sine, samples };
  Kind kind = Kind::constant;
  double value = 0.0;
  double t0 = 0.0;
  double amplitude = 0.0, frequency = 0.0, phase = 0.0;
  std::vector<double> times, values;

  static InputSignal constant(double v) {
    InputSignal s;
    s.value = v;
    return s;
  }
  static InputSignal step(double v, double t0) {
    InputSignal s;
    s.kind = Kind::step;
    s.value = v;
    s.t0 = t0;
    return s;
  }
  static InputSignal sine(double amp, double freq, double phase) {
    InputSignal s;
    s.kind = Kind::sine;
    s.amplitude = amp;
    s.frequency = freq;
    s.phase = phase;
    return s;
  }
  static InputSignal samples(std::vector<double> t, std::vector<double> v) {
    if (t.size() != v.size() || t.empty()) throw std::invalid_argument("sampled signal needs matching, non-empty columns");
    for (std::size_t k = 1; k < t.size(); ++k)
      if (!(t[k] > t[k - 1])) throw std::invalid_argument("sample times must increase strictly");
    InputSignal s;
    s.kind = Kind::samples;
    s.times = std::move(t);
    s.values = std::move(v);
    return s;
  }

  double at(double t) const {
    switch (kind) {
      case Kind::constant: return value;
      case Kind::step: return t >= t0 ? value : 0.0;
      case Kind::sine: return amplitude * std::sin(2 * std::numbers::pi * frequency * t + phase);
      case Kind::samples: {
        if (t <= times.front()) return values.front();
        if (t >= times.back()) return values.back();
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t k = static_cast<std::size_t>(it - times.begin());
        double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
        return values[k - 1] + w * (values[k] - values[k - 1]);
      }
    }
    return 0.0;
  }
};

struct InputSet {
  std::vector<InputSignal> signals;

  Eigen::VectorXd at(double t) const {
    Eigen::VectorXd u(static_cast<Eigen::Index>(signals.size()));
    for (std::size_t k = 0; k < signals.size(); ++k) u(static_cast<Eigen::Index>(k)) = signals[k].at(t);
    return u;
  }
  static InputSet zeros(std::size_t m) { return {std::vector<InputSignal>(m, InputSignal::constant(0.0))}; }
};

// Two numeric columns (time, value); a non-numeric first line is a header.
inline InputSignal load_csv_signal(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open signal file '" + path.string() + "'");
  std::vector<double> t, v;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    double a, b;
    if (!(ls >> a >> b)) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error("malformed row in '" + path.string() + "': " + line);
    }
    first = false;
    t.push_back(a);
    v.push_back(b);
  }
  return InputSignal::samples(std::move(t), std::move(v));
}

inline InputSignal signal_from_spec(const SignalSpec& s, const std::filesystem::path& base = {}) {
  switch (s.kind) {
    case SignalSpec::Kind::constant: return InputSignal::constant(s.value);
    case SignalSpec::Kind::step: return InputSignal::step(s.value, s.t0);
    case SignalSpec::Kind::sine: return InputSignal::sine(s.amplitude, s.frequency, s.phase);
    case SignalSpec::Kind::csv: {
      std::filesystem::path p = s.path;
      if (p.is_relative() && !base.empty()) p = base / p;
      return load_csv_signal(p);
    }
  }
  return {};
}

// --------------------------------------------------------------- simulate

enum class Method { rk4, trapezoidal };

struct SimConfig {
  Method method = Method::rk4;
  double dt = 1e-5;
  double t_end = 1.0;
  double t_start = 0.0;
  std::size_t record_every = 1;
};

struct Trajectory {
  std::vector<std::string> state_labels, output_labels;
  std::vector<double> times;
  Eigen::MatrixXd states;   // n x samples
  Eigen::MatrixXd outputs;  // p x samples
  Eigen::MatrixXd inputs;   // m x samples
  std::vector<double> energy;
  std::vector<double> balance_residual;
  double max_balance_residual = 0.0;  // over every step, recorded or not
  double max_supplied_power = 0.0;    // max |x^T B u| over every step

  std::size_t size() const { return times.size(); }
};

namespace detail {

struct Frame {
  Eigen::MatrixXd L, A, B;
};

inline double balance_power(const Frame& f, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  return dissipated_power(f.A, x) + supplied_power(f.B, x, u);
}

// |dE/dt - mean of the balance power at both ends| over one step.
inline double step_residual(const Frame& f0, const Eigen::VectorXd& x0, const Eigen::VectorXd& u0, const Frame& f1,
                            const Eigen::VectorXd& x1, const Eigen::VectorXd& u1, double h) {
  double dE = (stored_energy(f1.L, x1) - stored_energy(f0.L, x0)) / h;
  double mid = 0.5 * (balance_power(f0, x0, u0) + balance_power(f1, x1, u1));
  return std::abs(dE - mid);
}

}  // namespace detail

inline Trajectory simulate(const PogStateSpace& ss, const InputSet& u, const Eigen::VectorXd& x0, const SimConfig& cfg) {
  if (!(cfg.dt > 0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("time step must be positive");
  if (!(cfg.t_end >= cfg.t_start)) throw std::invalid_argument("end time precedes start time");
  const auto n = ss.n();
  if (x0.size() != n) throw ModelError(ErrorCode::InvalidModel, "initial state has the wrong dimension");
  if (static_cast<Eigen::Index>(u.signals.size()) != ss.m())
    throw ModelError(ErrorCode::InvalidModel, "one input signal per model input is required");

  const bool tv = ss.time_variant();
  require_invertible_energy(ss.L);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_const;
  if (n > 0) lu_const.compute(ss.L);

  auto frame = [&](double t, const Eigen::VectorXd& x) {
    detail::Frame f;
    ss.matrices_at(t, x, f.L, f.A, f.B);
    return f;
  };
  auto rhs = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (n == 0) return Eigen::VectorXd();
    if (!tv) return lu_const.solve(ss.A * x + ss.B * u.at(t));
    detail::Frame f = frame(t, x);
    return f.L.partialPivLu().solve(f.A * x + f.B * u.at(t));
  };

  const double h = cfg.dt;
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil((cfg.t_end - cfg.t_start) / h - 1e-9)));
  const std::size_t every = std::max<std::size_t>(1, cfg.record_every);
  const std::size_t samples = steps / every + 1 + (steps % every ? 1 : 0);

  Trajectory tr;
  tr.state_labels = ss.state_labels;
  tr.output_labels = ss.output_labels;
  tr.times.reserve(samples);
  tr.states.resize(n, static_cast<Eigen::Index>(samples));
  tr.outputs.resize(ss.p(), static_cast<Eigen::Index>(samples));
  tr.inputs.resize(ss.m(), static_cast<Eigen::Index>(samples));
  tr.energy.reserve(samples);
  tr.balance_residual.reserve(samples);

  Eigen::VectorXd x = x0;
  double t = cfg.t_start;
  Eigen::VectorXd uk = u.at(t);
  detail::Frame fk = frame(t, x);
  double since_record = 0.0;
  auto record = [&](double resid) {
    auto c = static_cast<Eigen::Index>(tr.times.size());
    tr.times.push_back(t);
    tr.states.col(c) = x;
    tr.inputs.col(c) = uk;
    tr.outputs.col(c) = ss.C * x + ss.D * uk;
    tr.energy.push_back(stored_energy(fk.L, x));
    tr.balance_residual.push_back(resid);
  };
  record(0.0);
  tr.max_supplied_power = std::abs(supplied_power(fk.B, x, uk));

  // Trapezoidal: (L - h/2 A) x+ = (L + h/2 A) x + h/2 B (u + u+).
  Eigen::PartialPivLU<Eigen::MatrixXd> trap_lu;
  if (cfg.method == Method::trapezoidal && !tv && n > 0) trap_lu.compute(ss.L - 0.5 * h * ss.A);

  for (std::size_t k = 1; k <= steps; ++k) {
    double t1 = cfg.t_start + static_cast<double>(k) * h;
    double hk = t1 - t;
    Eigen::VectorXd x1;
    if (n == 0) {
      x1 = x;
    } else if (cfg.method == Method::rk4) {
      Eigen::VectorXd k1 = rhs(t, x);
      Eigen::VectorXd k2 = rhs(t + hk / 2, x + hk / 2 * k1);
      Eigen::VectorXd k3 = rhs(t + hk / 2, x + hk / 2 * k2);
      Eigen::VectorXd k4 = rhs(t1, x + hk * k3);
      x1 = x + hk / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    } else if (!tv) {
      x1 = trap_lu.solve(ss.L * x + 0.5 * hk * (ss.A * x + ss.B * (u.at(t) + u.at(t1))));
    } else {
      // State-dependent coefficients: end-of-step matrices taken at an Euler predictor.
      detail::Frame f1 = frame(t1, x + hk * rhs(t, x));
      Eigen::MatrixXd lhs = f1.L - 0.5 * hk * f1.A;
      Eigen::VectorXd r = fk.L * x + 0.5 * hk * (fk.A * x + fk.B * u.at(t) + f1.B * u.at(t1));
      x1 = lhs.partialPivLu().solve(r);
    }
    if (!x1.allFinite())
      throw ModelError(ErrorCode::NonFiniteState, "state became non-finite at step " + std::to_string(k) + " (t = " +
                                                      format_real(t1) + ")");
    Eigen::VectorXd u1 = u.at(t1);
    detail::Frame f1 = tv ? frame(t1, x1) : fk;
    double resid = detail::step_residual(fk, x, uk, f1, x1, u1, hk);
    tr.max_balance_residual = std::max(tr.max_balance_residual, resid);
    x = std::move(x1);
    uk = std::move(u1);
    fk = std::move(f1);
    t = t1;
    tr.max_supplied_power = std::max(tr.max_supplied_power, std::abs(supplied_power(fk.B, x, uk)));
    since_record = std::max(since_record, resid);
    if (k % every == 0 || k == steps) {
      record(since_record);
      since_record = 0.0;
    }
  }
  tr.states.conservativeResize(n, static_cast<Eigen::Index>(tr.times.size()));
  tr.outputs.conservativeResize(ss.p(), static_cast<Eigen::Index>(tr.times.size()));
  tr.inputs.conservativeResize(ss.m(), static_cast<Eigen::Index>(tr.times.size()));
  return tr;
}

// Max over consecutive samples of |dE/dt - midpoint of (x^T A_s x + x^T B u)|.
inline double power_balance_residual(const Trajectory& tr, const PogStateSpace& ss, const InputSet& u) {
  double worst = 0.0;
  if (tr.size() < 2) return 0.0;
  auto frame = [&](std::size_t k) {
    detail::Frame f;
    ss.matrices_at(tr.times[k], tr.states.col(static_cast<Eigen::Index>(k)), f.L, f.A, f.B);
    return f;
  };
  detail::Frame f0 = frame(0);
  for (std::size_t k = 1; k < tr.size(); ++k) {
    detail::Frame f1 = ss.time_variant() ? frame(k) : f0;
    auto a = static_cast<Eigen::Index>(k - 1), b = static_cast<Eigen::Index>(k);
    worst = std::max(worst, detail::step_residual(f0, tr.states.col(a), u.at(tr.times[k - 1]), f1, tr.states.col(b),
                                                  u.at(tr.times[k]), tr.times[k] - tr.times[k - 1]));
    f0 = std::move(f1);
  }
  return worst;
}

// -------------------------------------------------------------- comparison

struct SignalError {
  double max_abs = 0.0;
  double rms = 0.0;
};

struct TrajectoryComparison {
  double max_abs = 0.0;
  double rms = 0.0;
  std::map<std::string, SignalError> per_signal;
};

namespace detail {

inline double interpolate(const std::vector<double>& t, const Eigen::RowVectorXd& v, double at) {
  if (at <= t.front()) return v(0);
  if (at >= t.back()) return v(v.size() - 1);
  auto it = std::upper_bound(t.begin(), t.end(), at);
  auto k = static_cast<Eigen::Index>(it - t.begin());
  double w = (at - t[k - 1]) / (t[k] - t[k - 1]);
  return v(k - 1) + w * (v(k) - v(k - 1));
}

}  // namespace detail

inline TrajectoryComparison compare_trajectories(const Trajectory& a, const Trajectory& b) {
  if (a.state_labels != b.state_labels || a.output_labels != b.output_labels)
    throw ModelError(ErrorCode::IncompatibleLabels, "trajectories carry different signals");
  if (a.size() == 0 || b.size() == 0) return {};
  bool same_grid = a.times == b.times;
  TrajectoryComparison out;
  double total_sq = 0.0;
  std::size_t total_n = 0;
  auto compare_rows = [&](const Eigen::MatrixXd& ma, const Eigen::MatrixXd& mb, const std::vector<std::string>& labels) {
    for (Eigen::Index r = 0; r < ma.rows(); ++r) {
      SignalError e;
      double sq = 0.0;
      Eigen::RowVectorXd rb = mb.row(r);
      for (std::size_t k = 0; k < a.size(); ++k) {
        double vb = same_grid ? rb(static_cast<Eigen::Index>(k)) : detail::interpolate(b.times, rb, a.times[k]);
        double d = std::abs(ma(r, static_cast<Eigen::Index>(k)) - vb);
        e.max_abs = std::max(e.max_abs, d);
        sq += d * d;
      }
      e.rms = std::sqrt(sq / static_cast<double>(a.size()));
      total_sq += sq;
      total_n += a.size();
      out.max_abs = std::max(out.max_abs, e.max_abs);
      out.per_signal[labels[static_cast<std::size_t>(r)]] = e;
    }
  };
  compare_rows(a.states, b.states, a.state_labels);
  compare_rows(a.outputs, b.outputs, a.output_labels);
  out.rms = total_n ? std::sqrt(total_sq / static_cast<double>(total_n)) : 0.0;
  return out;
}

// ---------------------------------------------------------------------- CSV

inline std::string csv_number(double v) { return format_real(v); }

inline void write_csv(std::ostream& os, const Trajectory& tr) {
  os << "t";
  for (const auto& l : tr.state_labels) os << "," << l;
  for (const auto& l : tr.output_labels) os << "," << l;
  os << ",E_s,balance_residual\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    auto c = static_cast<Eigen::Index>(k);
    os << csv_number(tr.times[k]);
    for (Eigen::Index i = 0; i < tr.states.rows(); ++i) os << "," << csv_number(tr.states(i, c));
    for (Eigen::Index i = 0; i < tr.outputs.rows(); ++i) os << "," << csv_number(tr.outputs(i, c));
    os << "," << csv_number(tr.energy[k]) << "," << csv_number(tr.balance_residual[k]) << "\n";
  }
}

}  // namespace pogc
