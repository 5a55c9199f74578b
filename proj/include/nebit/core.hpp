#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nebit/errors.hpp"
#include "nebit/quasi_matrix.hpp"

namespace nebit {

inline constexpr double kNormalizationTol = 1e-12;
inline constexpr int kMaxTotalVariables = 24;

// A multi-party binary-outcome measurement scenario: party k (1-based) owns
// M_k settings, every (party, setting) variable takes values in {+1, -1}.
//
// Canonical variable order is party-major, setting-minor; outcome a maps to
// the bit b = (1 - a) / 2 and an assignment maps to the index sum(b_i * 2^i).
class Scenario {
 public:
  explicit Scenario(std::vector<int> settings_per_party) : settings_(std::move(settings_per_party)) {
    if (settings_.empty()) throw domain_error("Scenario: need at least one party");
    int total = 0;
    for (int m : settings_) {
      if (m < 1) throw domain_error("Scenario: every party needs at least one setting");
      total += m;
    }
    if (total > kMaxTotalVariables) {
      throw size_error("Scenario: total variable count " + std::to_string(total) +
                       " exceeds enumeration guard " + std::to_string(kMaxTotalVariables));
    }
    offsets_.resize(settings_.size());
    int off = 0;
    for (size_t k = 0; k < settings_.size(); ++k) {
      offsets_[k] = off;
      off += settings_[k];
    }
    total_ = total;
  }

  static Scenario uniform(int n_parties, int settings_each) {
    if (n_parties < 1) throw domain_error("Scenario: need at least one party");
    return Scenario(std::vector<int>(static_cast<size_t>(n_parties), settings_each));
  }

  int parties() const { return static_cast<int>(settings_.size()); }
  int settings(int party) const {
    check_party(party);
    return settings_[static_cast<size_t>(party - 1)];
  }
  const std::vector<int>& settings_per_party() const { return settings_; }
  int total_variables() const { return total_; }
  std::uint64_t assignment_count() const { return std::uint64_t{1} << total_; }

  // Bit position of variable (party, setting), both 1-based.
  int var_index(int party, int setting) const {
    check_party(party);
    if (setting < 1 || setting > settings_[static_cast<size_t>(party - 1)]) {
      throw domain_error("Scenario: unknown setting " + std::to_string(setting) + " for party " +
                         std::to_string(party));
    }
    return offsets_[static_cast<size_t>(party - 1)] + setting - 1;
  }

  int party_offset(int party) const {
    check_party(party);
    return offsets_[static_cast<size_t>(party - 1)];
  }

  bool operator==(const Scenario& other) const { return settings_ == other.settings_; }
  bool operator!=(const Scenario& other) const { return !(*this == other); }

 private:
  void check_party(int party) const {
    if (party < 1 || party > parties()) {
      throw domain_error("Scenario: unknown party " + std::to_string(party));
    }
  }

  std::vector<int> settings_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// One +/-1 value per scenario variable.
class OutcomeAssignment {
 public:
  OutcomeAssignment(Scenario scenario, std::vector<int> values)
      : scenario_(std::move(scenario)), values_(std::move(values)) {
    if (values_.size() != static_cast<size_t>(scenario_.total_variables())) {
      throw domain_error("OutcomeAssignment: value count does not match scenario");
    }
    for (int v : values_) {
      if (v != 1 && v != -1) throw domain_error("OutcomeAssignment: outcomes must be +1 or -1");
    }
  }

  static OutcomeAssignment from_index(const Scenario& scenario, std::uint64_t index) {
    std::vector<int> values(static_cast<size_t>(scenario.total_variables()));
    for (size_t i = 0; i < values.size(); ++i) {
      values[i] = ((index >> i) & 1u) ? -1 : +1;
    }
    return OutcomeAssignment(scenario, std::move(values));
  }

  std::uint64_t index() const {
    std::uint64_t idx = 0;
    for (size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] == -1) idx |= (std::uint64_t{1} << i);
    }
    return idx;
  }

  const Scenario& scenario() const { return scenario_; }
  const std::vector<int>& values() const { return values_; }
  int value(int party, int setting) const {
    return values_[static_cast<size_t>(scenario_.var_index(party, setting))];
  }

 private:
  Scenario scenario_;
  std::vector<int> values_;
};

// Real-valued joint distribution over all scenario variables. Entries may be
// negative (quasi-probability); the total weight is always 1.
class QuasiDistribution {
 public:
  QuasiDistribution(Scenario scenario, Eigen::VectorXd weights, double tol = kNormalizationTol)
      : scenario_(std::move(scenario)), weights_(std::move(weights)) {
    if (weights_.size() != static_cast<Eigen::Index>(scenario_.assignment_count())) {
      throw domain_error("QuasiDistribution: weight count must be 2^V");
    }
    if (std::abs(weights_.sum() - 1.0) > tol) {
      throw domain_error("QuasiDistribution: weights must sum to 1");
    }
  }

  static QuasiDistribution uniform(const Scenario& scenario) {
    const auto n = static_cast<Eigen::Index>(scenario.assignment_count());
    return QuasiDistribution(scenario, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
  }

  const Scenario& scenario() const { return scenario_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double weight(std::uint64_t index) const { return weights_[static_cast<Eigen::Index>(index)]; }
  double sum() const { return weights_.sum(); }
  double min_entry() const { return weights_.minCoeff(); }
  bool is_positive(double tol = kNormalizationTol) const { return min_entry() >= -tol; }

 private:
  Scenario scenario_;
  Eigen::VectorXd weights_;
};

namespace detail {

inline std::uint32_t choice_mask(const Scenario& scenario,
                                 const std::vector<std::pair<int, int>>& pairs) {
  std::uint32_t mask = 0;
  std::vector<bool> party_used(static_cast<size_t>(scenario.parties()), false);
  for (const auto& [party, setting] : pairs) {
    const int v = scenario.var_index(party, setting);
    if (party_used[static_cast<size_t>(party - 1)]) {
      throw domain_error("correlation: more than one setting chosen for party " +
                         std::to_string(party));
    }
    party_used[static_cast<size_t>(party - 1)] = true;
    mask |= (std::uint32_t{1} << v);
  }
  return mask;
}

}  // namespace detail

// Distribution over a subset of variables, summing out everything else.
// Kept variables are renumbered canonically: parties in ascending original
// order become parties 1..n', and each kept setting keeps its relative order.
inline QuasiDistribution marginal(const QuasiDistribution& dist,
                                  const std::vector<std::pair<int, int>>& keep) {
  if (keep.empty()) throw domain_error("marginal: keep set must be non-empty");
  const Scenario& sc = dist.scenario();

  std::vector<std::pair<int, int>> vars = keep;
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

  std::vector<int> kept_bits;
  std::vector<int> out_settings;
  int last_party = 0;
  for (const auto& [party, setting] : vars) {
    kept_bits.push_back(sc.var_index(party, setting));
    if (party != last_party) {
      out_settings.push_back(1);
      last_party = party;
    } else {
      ++out_settings.back();
    }
  }

  Scenario out_scenario(out_settings);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_scenario.assignment_count()));
  const auto n = dist.scenario().assignment_count();
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    std::uint64_t out_idx = 0;
    for (size_t j = 0; j < kept_bits.size(); ++j) {
      out_idx |= ((idx >> kept_bits[j]) & 1u) << j;
    }
    out[static_cast<Eigen::Index>(out_idx)] += dist.weight(idx);
  }
  return QuasiDistribution(out_scenario, std::move(out), 1e-9);
}

// r-point correlation: expectation of the product of the chosen variables,
// at most one setting per party.
inline double correlation(const QuasiDistribution& dist,
                          const std::vector<std::pair<int, int>>& choice) {
  if (choice.empty()) throw domain_error("correlation: choice must be non-empty");
  const std::uint32_t mask = detail::choice_mask(dist.scenario(), choice);
  double acc = 0.0;
  const auto n = dist.scenario().assignment_count();
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    const int parity = std::popcount(static_cast<std::uint32_t>(idx) & mask) & 1;
    acc += parity ? -dist.weight(idx) : dist.weight(idx);
  }
  return acc;
}

namespace detail {

// Signed CHSH combination a11*a21 + a11*a22 + a12*a21 - a12*a22 for the
// two-party two-setting assignment encoded in `idx`.
inline int chsh_sign_sum(std::uint64_t idx) {
  const int a11 = (idx & 1u) ? -1 : 1;
  const int a12 = (idx & 2u) ? -1 : 1;
  const int a21 = (idx & 4u) ? -1 : 1;
  const int a22 = (idx & 8u) ? -1 : 1;
  return a11 * a21 + a11 * a22 + a12 * a21 - a12 * a22;
}

}  // namespace detail

// Positive joint distribution saturating the classical CHSH bound of 2.
inline QuasiDistribution chsh_lhv_jpd() {
  Eigen::VectorXd w(16);
  for (std::uint64_t idx = 0; idx < 16; ++idx) {
    w[static_cast<Eigen::Index>(idx)] =
        (1.0 + 0.5 * detail::chsh_sign_sum(idx)) / 16.0;
  }
  return QuasiDistribution(Scenario::uniform(2, 2), std::move(w));
}

// Quasi-probability joint distribution with CHSH value 2*eta. eta = 1 gives
// the positive saturating distribution, eta = sqrt(2) the Tsirelson point,
// eta = 2 the PR box.
inline QuasiDistribution chsh_quasi_jpd(double eta) {
  if (!(eta >= 0.0)) throw domain_error("chsh_quasi_jpd: eta must be >= 0");
  Eigen::VectorXd w(16);
  for (std::uint64_t idx = 0; idx < 16; ++idx) {
    w[static_cast<Eigen::Index>(idx)] =
        (1.0 + 0.5 * eta * detail::chsh_sign_sum(idx)) / 16.0;
  }
  return QuasiDistribution(Scenario::uniform(2, 2), std::move(w));
}

inline int mermin_classical_bound_exponent(int n_parties) {
  return (n_parties % 2 == 0) ? n_parties / 2 : (n_parties - 1) / 2;
}

// Local-realistic bound C_N: 2^(N/2) for even N, 2^((N-1)/2) for odd N.
inline double mermin_classical_bound(int n_parties) {
  if (n_parties < 2) throw domain_error("mermin_classical_bound: need N >= 2");
  return std::ldexp(1.0, mermin_classical_bound_exponent(n_parties));
}

// Maximal quantum value Q_N = 2^(N-1).
inline double mermin_quantum_bound(int n_parties) {
  if (n_parties < 2) throw domain_error("mermin_quantum_bound: need N >= 2");
  return std::ldexp(1.0, n_parties - 1);
}

// N-party Mermin polynomial Im prod_k (a^k_1 + i a^k_2), evaluated with
// exact Gaussian-integer arithmetic so that +/-1 assignments never drift.
inline double mermin_observable(const OutcomeAssignment& assignment, int n_parties) {
  const Scenario& sc = assignment.scenario();
  if (sc.parties() != n_parties) {
    throw domain_error("mermin_observable: assignment party count does not match N");
  }
  for (int k = 1; k <= n_parties; ++k) {
    if (sc.settings(k) != 2) {
      throw domain_error("mermin_observable: every party needs exactly 2 settings");
    }
  }
  long long re = 1, im = 0;
  for (int k = 1; k <= n_parties; ++k) {
    const long long a1 = assignment.value(k, 1);
    const long long a2 = assignment.value(k, 2);
    const long long nre = re * a1 - im * a2;
    const long long nim = re * a2 + im * a1;
    re = nre;
    im = nim;
  }
  return static_cast<double>(im);
}

// Positive joint distribution saturating the Bell-Mermin bound C_N:
// weights (1/2^(2N)) * (1 + M_N(a)/C_N).
inline QuasiDistribution mermin_jpd(int n_parties) {
  if (n_parties < 2 || n_parties > 10) {
    throw size_error("mermin_jpd: N must be in [2, 10]");
  }
  const Scenario sc = Scenario::uniform(n_parties, 2);
  const double c_n = mermin_classical_bound(n_parties);
  const auto count = sc.assignment_count();
  const double norm = 1.0 / static_cast<double>(count);
  Eigen::VectorXd w(static_cast<Eigen::Index>(count));
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const double m = mermin_observable(OutcomeAssignment::from_index(sc, idx), n_parties);
    w[static_cast<Eigen::Index>(idx)] = norm * (1.0 + m / c_n);
  }
  return QuasiDistribution(sc, std::move(w));
}

// q(alpha, rest) = sum_a W(alpha | a) p(a, rest) with W acting on the full
// setting block of one party. W must be column-stochastic; no-signalling for
// the remaining parties follows from the unit column sums.
inline QuasiDistribution apply_local_process(const QuasiDistribution& dist, int party,
                                             const QuasiStochasticMatrix& process) {
  const Scenario& sc = dist.scenario();
  const int m_party = sc.settings(party);
  const int block = 1 << m_party;
  if (process.dim() != block) {
    throw domain_error("apply_local_process: process dimension " + std::to_string(process.dim()) +
                       " does not match 2^M = " + std::to_string(block));
  }
  if (!process.column_stochastic()) {
    throw domain_error("apply_local_process: process columns must sum to 1");
  }

  const int off = sc.party_offset(party);
  const std::uint64_t block_mask = static_cast<std::uint64_t>(block - 1) << off;
  const auto n = sc.assignment_count();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    const std::uint64_t rest = idx & ~block_mask;
    const int a_block = static_cast<int>((idx >> off) & static_cast<std::uint64_t>(block - 1));
    const double p = dist.weight(idx);
    if (p == 0.0) continue;
    for (int alpha = 0; alpha < block; ++alpha) {
      const double w = process(alpha, a_block);
      if (w == 0.0) continue;
      const std::uint64_t out_idx = rest | (static_cast<std::uint64_t>(alpha) << off);
      out[static_cast<Eigen::Index>(out_idx)] += w * p;
    }
  }
  return QuasiDistribution(sc, std::move(out), 1e-9);
}

inline nlohmann::json to_json(const QuasiDistribution& dist) {
  nlohmann::json weights = nlohmann::json::array();
  for (Eigen::Index i = 0; i < dist.weights().size(); ++i) weights.push_back(dist.weights()[i]);
  return nlohmann::json{{"parties", dist.scenario().settings_per_party()},
                        {"weights", std::move(weights)}};
}

inline QuasiDistribution distribution_from_json(const nlohmann::json& j) {
  if (!j.contains("parties") || !j["parties"].is_array() || j["parties"].empty()) {
    throw domain_error("distribution json: missing or empty field \"parties\"");
  }
  std::vector<int> settings;
  for (const auto& m : j["parties"]) {
    if (!m.is_number_integer()) {
      throw domain_error("distribution json: field \"parties\" must hold integers");
    }
    settings.push_back(m.get<int>());
  }
  Scenario sc(settings);
  if (!j.contains("weights") || !j["weights"].is_array() ||
      j["weights"].size() != sc.assignment_count()) {
    throw domain_error("distribution json: field \"weights\" must hold 2^V numbers");
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(sc.assignment_count()));
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const auto& v = j["weights"][static_cast<size_t>(i)];
    if (!v.is_number()) throw domain_error("distribution json: field \"weights\" must hold numbers");
    w[i] = v.get<double>();
  }
  return QuasiDistribution(std::move(sc), std::move(w), 1e-9);
}

}  // namespace nebit
