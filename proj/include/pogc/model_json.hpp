#pragma once

// JSON form of a state-space model. Entries are numbers, or expression
// strings evaluated against "params".

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"
#include "pogc/error.hpp"
#include "pogc/models.hpp"
#include "pogc/netlist.hpp"
#include "pogc/statespace.hpp"
#include "pogc/sym.hpp"

namespace pogc {

using Json = nlohmann::ordered_json;

inline Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Json matrix_json(const sym::SymMatrix& m) {
  Json rows = Json::array();
  for (const auto& row : m.strings()) rows.push_back(row);
  return rows;
}

inline Json model_to_json(const PogStateSpace& ss, bool symbolic = true) {
  Json j;
  j["states"] = ss.state_labels;
  j["inputs"] = ss.input_labels;
  j["outputs"] = ss.output_labels;
  bool sym = symbolic && ss.symbolic.has_value();
  auto put = [&](const char* key, const Eigen::MatrixXd& num, const sym::SymMatrix* s) {
    j[key] = sym ? matrix_json(*s) : matrix_json(num);
  };
  const SymbolicModel* sm = sym ? &*ss.symbolic : nullptr;
  put("L", ss.L, sm ? &sm->L : nullptr);
  put("A", ss.A, sm ? &sm->A : nullptr);
  put("B", ss.B, sm ? &sm->B : nullptr);
  put("C", ss.C, sm ? &sm->C : nullptr);
  put("D", ss.D, sm ? &sm->D : nullptr);
  if (sym) {
    Json p = Json::object();
    for (const auto& [k, v] : ss.params) p[k] = v;
    j["params"] = p;
  }
  if (!ss.hook_name.empty()) j["hook"] = ss.hook_name;
  return j;
}

namespace detail {

inline sym::Poly entry_poly(const Json& e) {
  if (e.is_string()) return sym::Poly::parse(e.get<std::string>());
  return sym::Poly::parse(format_real(e.get<double>()));
}

inline std::vector<std::string> labels(const Json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<std::string>>();
}

inline void read_matrix(const Json& j, const char* key, std::size_t rows, std::size_t cols, sym::SymMatrix& s,
                        Eigen::MatrixXd& num, bool& any_string) {
  s = sym::SymMatrix(rows, cols);
  num = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (!j.contains(key)) {
    if (rows && cols) throw ModelError(ErrorCode::InvalidModel, std::string("model JSON lacks matrix '") + key + "'");
    return;
  }
  const auto& m = j.at(key);
  if (!m.is_array() || m.size() != rows)
    throw ModelError(ErrorCode::InvalidModel, std::string("matrix '") + key + "' has the wrong number of rows");
  for (std::size_t i = 0; i < rows; ++i) {
    if (!m[i].is_array() || m[i].size() != cols)
      throw ModelError(ErrorCode::InvalidModel, std::string("matrix '") + key + "' has the wrong number of columns");
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& e = m[i][c];
      if (e.is_string()) {
        any_string = true;
        s(i, c) = sym::Poly::parse(e.get<std::string>());
      } else if (e.is_number()) {
        num(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = e.get<double>();
        s(i, c) = entry_poly(e);
      } else {
        throw ModelError(ErrorCode::InvalidModel, std::string("matrix '") + key + "' holds a non-numeric entry");
      }
    }
  }
}

}  // namespace detail

inline PogStateSpace model_from_json(const Json& j) {
  auto states = detail::labels(j, "states");
  auto inputs = detail::labels(j, "inputs");
  auto outputs = detail::labels(j, "outputs");
  std::size_t n = states.size(), m = inputs.size(), p = outputs.size();
  SymbolicModel sm;
  Eigen::MatrixXd L, A, B, C, D;
  bool any_string = false;
  try {
    detail::read_matrix(j, "L", n, n, sm.L, L, any_string);
    detail::read_matrix(j, "A", n, n, sm.A, A, any_string);
    detail::read_matrix(j, "B", n, m, sm.B, B, any_string);
    detail::read_matrix(j, "C", p, n, sm.C, C, any_string);
    detail::read_matrix(j, "D", p, m, sm.D, D, any_string);
  } catch (const ModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelError(ErrorCode::InvalidModel, std::string("bad matrix entry: ") + e.what());
  }
  sym::ParamMap params;
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items()) params[k] = v.get<double>();

  PogStateSpace ss;
  if (any_string) {
    try {
      ss = from_symbolic(std::move(sm), params, states, inputs, outputs);
    } catch (const std::out_of_range& e) {
      throw ModelError(ErrorCode::InvalidModel, e.what());
    }
  } else {
    ss.L = L;
    ss.A = A;
    ss.B = B;
    ss.C = C;
    ss.D = D;
    ss.state_labels = states;
    ss.input_labels = inputs;
    ss.output_labels = outputs;
    ss.params = params;
    check_dimensions(ss);
  }
  if (j.contains("hook")) ss.hook_name = j.at("hook").get<std::string>();
  return models::attach_hook(std::move(ss));
}

// Parameter overrides; named hooks are rebuilt with the new values.
inline PogStateSpace apply_params(const PogStateSpace& ss, const sym::ParamMap& overrides) {
  if (overrides.empty()) return ss;
  return models::attach_hook(with_params(ss, overrides));
}

inline PogStateSpace model_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(1, static_cast<int>(e.byte), std::string("invalid JSON: ") + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const Json::exception& e) {
    throw ModelError(ErrorCode::InvalidModel, std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace pogc
