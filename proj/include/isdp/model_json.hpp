#pragma once

// JSON interchange for single-LMI ISDP models:
// {"n","m","C","A","b","bounds","linear_rows"[,"integral"]}.
// Infinite bound sides serialize as null.

#include <json.hpp>

#include "isdp/conic.hpp"

namespace isdp {

inline nlohmann::json model_to_json(const DualIsdpModel& model) {
  model.validate();
  if (model.lmis.size() != 1)
    throw std::invalid_argument("model_to_json: interchange format carries one LMI");
  const LmiBlock& blk = model.lmis[0];
  const int n = blk.order();
  nlohmann::json j;
  j["n"] = n;
  j["m"] = model.num_vars;
  auto mat = [n](const SymMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < n; ++c) row.push_back(m(i, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["C"] = mat(blk.C);
  nlohmann::json as = nlohmann::json::array();
  for (int v = 0; v < model.num_vars; ++v) {
    const auto it = blk.coeff.find(v);
    as.push_back(it == blk.coeff.end() ? mat(SymMatrix(n)) : mat(it->second));
  }
  j["A"] = std::move(as);
  j["b"] = model.objective;
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : model.var_bounds) {
    nlohmann::json pair = nlohmann::json::array();
    pair.push_back(std::isfinite(b.lo) ? nlohmann::json(b.lo) : nlohmann::json());
    pair.push_back(std::isfinite(b.hi) ? nlohmann::json(b.hi) : nlohmann::json());
    bounds.push_back(std::move(pair));
  }
  j["bounds"] = std::move(bounds);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : model.linear_rows) {
    nlohmann::json row;
    std::vector<double> dense(model.num_vars, 0.0);
    for (auto [c, v] : r.coeffs) dense[c] = v;
    row["coeffs"] = dense;
    row["sense"] = r.sense == RowSense::kLe ? "<=" : (r.sense == RowSense::kEq ? "=" : ">=");
    row["rhs"] = r.rhs;
    rows.push_back(std::move(row));
  }
  j["linear_rows"] = std::move(rows);
  j["integral"] = model.integral;
  return j;
}

inline DualIsdpModel model_from_json(const nlohmann::json& j) {
  DualIsdpModel model;
  const int n = j.at("n").get<int>();
  model.num_vars = j.at("m").get<int>();
  auto mat = [n](const nlohmann::json& rows) {
    std::vector<std::vector<double>> m;
    for (const auto& r : rows) m.push_back(r.get<std::vector<double>>());
    if (static_cast<int>(m.size()) != n)
      throw std::invalid_argument("model_from_json: matrix order mismatch");
    return SymMatrix::from_rows(m, 1e-9);
  };
  LmiBlock blk;
  blk.C = mat(j.at("C"));
  const auto& as = j.at("A");
  if (static_cast<int>(as.size()) != model.num_vars)
    throw std::invalid_argument("model_from_json: |A| must equal m");
  for (int v = 0; v < model.num_vars; ++v) {
    SymMatrix a = mat(as.at(v));
    if (a.frobenius_norm() > 0.0) blk.coeff.emplace(v, std::move(a));
  }
  model.lmis.push_back(std::move(blk));
  model.objective = j.at("b").get<std::vector<double>>();
  for (const auto& pair : j.at("bounds")) {
    Bounds b;
    if (!pair.at(0).is_null()) b.lo = pair.at(0).get<double>();
    if (!pair.at(1).is_null()) b.hi = pair.at(1).get<double>();
    model.var_bounds.push_back(b);
  }
  if (j.contains("linear_rows"))
    for (const auto& row : j.at("linear_rows")) {
      LinearRow r;
      const auto dense = row.at("coeffs").get<std::vector<double>>();
      for (int c = 0; c < static_cast<int>(dense.size()); ++c)
        if (dense[c] != 0.0) r.coeffs.emplace_back(c, dense[c]);
      const std::string s = row.at("sense").get<std::string>();
      r.sense = s == "<=" ? RowSense::kLe : (s == "=" ? RowSense::kEq : RowSense::kGe);
      r.rhs = row.at("rhs").get<double>();
      model.linear_rows.push_back(std::move(r));
    }
  if (j.contains("integral"))
    model.integral = j.at("integral").get<std::vector<bool>>();
  else
    model.integral.assign(model.num_vars, true);
  model.validate();
  return model;
}

}  // namespace isdp
