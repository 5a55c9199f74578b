#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include <json.hpp>

#include "nebit/errors.hpp"

namespace nebit {

inline constexpr double kStochasticTol = 1e-12;

// Real square matrix with unit column sums (and usually unit row sums).
// Entries may be negative; a column-stochastic matrix with negative entries
// is a quasi-stochastic process.
class QuasiStochasticMatrix {
 public:
  explicit QuasiStochasticMatrix(Eigen::MatrixXd entries, double tol = kStochasticTol)
      : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
      throw domain_error("QuasiStochasticMatrix: entries must be square and non-empty");
    }
    col_stochastic_ = true;
    row_stochastic_ = true;
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      if (std::abs(m_.col(j).sum() - 1.0) > tol) col_stochastic_ = false;
      if (std::abs(m_.row(j).sum() - 1.0) > tol) row_stochastic_ = false;
    }
  }

  static QuasiStochasticMatrix identity(int d) {
    return QuasiStochasticMatrix(Eigen::MatrixXd::Identity(d, d));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& entries() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  bool column_stochastic() const { return col_stochastic_; }
  bool row_stochastic() const { return row_stochastic_; }
  bool bistochastic() const { return col_stochastic_ && row_stochastic_; }

  double min_entry() const { return m_.minCoeff(); }
  bool positive(double tol = kStochasticTol) const { return min_entry() >= -tol; }

 private:
  Eigen::MatrixXd m_;
  bool col_stochastic_ = false;
  bool row_stochastic_ = false;
};

inline nlohmann::json to_json(const QuasiStochasticMatrix& w) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < w.dim(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < w.dim(); ++c) row.push_back(w(r, c));
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"d", w.dim()}, {"rows", std::move(rows)}};
}

inline QuasiStochasticMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.contains("d") || !j["d"].is_number_integer()) {
    throw domain_error("matrix json: missing or non-integer field \"d\"");
  }
  const int d = j["d"].get<int>();
  if (d < 1) throw domain_error("matrix json: field \"d\" must be positive");
  if (!j.contains("rows") || !j["rows"].is_array() || j["rows"].size() != static_cast<size_t>(d)) {
    throw domain_error("matrix json: field \"rows\" must be an array of d rows");
  }
  Eigen::MatrixXd m(d, d);
  for (int r = 0; r < d; ++r) {
    const auto& row = j["rows"][r];
    if (!row.is_array() || row.size() != static_cast<size_t>(d)) {
      throw domain_error("matrix json: field \"rows\" row " + std::to_string(r) +
                         " must hold d numbers");
    }
    for (int c = 0; c < d; ++c) {
      if (!row[c].is_number()) {
        throw domain_error("matrix json: field \"rows\" entry (" + std::to_string(r) + "," +
                           std::to_string(c) + ") is not a number");
      }
      m(r, c) = row[c].get<double>();
    }
  }
  return QuasiStochasticMatrix(std::move(m));
}

}  // namespace nebit
