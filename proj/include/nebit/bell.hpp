#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nebit/core.hpp"
#include "nebit/errors.hpp"

namespace nebit {

struct BellTerm {
  double coefficient = 0.0;
  // One (party, setting) pair per involved party, 1-based.
  std::vector<std::pair<int, int>> choice;
};

// Linear combination of r-point correlations together with its
// classical (C), quantum (Q) and, when known, no-signalling bounds.
class BellFunctional {
 public:
  BellFunctional(std::vector<BellTerm> terms, double classical_bound, double quantum_bound,
                 std::optional<double> ns_bound = std::nullopt)
      : terms_(std::move(terms)),
        classical_(classical_bound),
        quantum_(quantum_bound),
        ns_(ns_bound) {
    if (terms_.empty()) throw domain_error("BellFunctional: need at least one term");
    for (const auto& t : terms_) {
      if (!std::isfinite(t.coefficient)) throw domain_error("BellFunctional: non-finite coefficient");
      if (t.choice.empty()) throw domain_error("BellFunctional: empty correlation choice");
    }
    if (classical_ > quantum_ + 1e-12 || (ns_ && quantum_ > *ns_ + 1e-12)) {
      throw domain_error("BellFunctional: bounds must satisfy C <= Q <= NS");
    }
  }

  const std::vector<BellTerm>& terms() const { return terms_; }
  double classical_bound() const { return classical_; }
  double quantum_bound() const { return quantum_; }
  const std::optional<double>& ns_bound() const { return ns_; }

 private:
  std::vector<BellTerm> terms_;
  double classical_;
  double quantum_;
  std::optional<double> ns_;
};

// CHSH: T11 + T12 + T21 - T22 with bounds 2 / 2*sqrt(2) / 4.
inline BellFunctional chsh() {
  std::vector<BellTerm> terms = {
      {+1.0, {{1, 1}, {2, 1}}},
      {+1.0, {{1, 1}, {2, 2}}},
      {+1.0, {{1, 2}, {2, 1}}},
      {-1.0, {{1, 2}, {2, 2}}},
  };
  return BellFunctional(std::move(terms), 2.0, 2.0 * std::sqrt(2.0), 4.0);
}

// N-party Mermin functional: the expansion of Im prod_k (a^k_1 + i a^k_2)
// into 2^(N-1) full correlations with +/-1 coefficients. A term uses
// setting 2 for the parties in an odd-size subset S and carries the sign
// (-1)^((|S|-1)/2).
inline BellFunctional mermin(int n_parties) {
  if (n_parties < 2) throw domain_error("mermin: need N >= 2");
  if (n_parties > 24) throw size_error("mermin: N too large for term enumeration");
  std::vector<BellTerm> terms;
  const std::uint32_t limit = std::uint32_t{1} << n_parties;
  for (std::uint32_t subset = 0; subset < limit; ++subset) {
    const int size = std::popcount(subset);
    if (size % 2 == 0) continue;
    BellTerm term;
    term.coefficient = (((size - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    for (int k = 0; k < n_parties; ++k) {
      term.choice.emplace_back(k + 1, (subset >> k) & 1u ? 2 : 1);
    }
    terms.push_back(std::move(term));
  }
  return BellFunctional(std::move(terms), mermin_classical_bound(n_parties),
                        mermin_quantum_bound(n_parties));
}

inline double evaluate(const BellFunctional& functional, const QuasiDistribution& dist) {
  double acc = 0.0;
  for (const auto& term : functional.terms()) {
    acc += term.coefficient * correlation(dist, term.choice);
  }
  return acc;
}

inline nlohmann::json to_json(const BellFunctional& f) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : f.terms()) {
    nlohmann::json choice = nlohmann::json::array();
    for (const auto& [party, setting] : t.choice) choice.push_back({party, setting});
    terms.push_back({{"coef", t.coefficient}, {"choice", std::move(choice)}});
  }
  nlohmann::json j{{"terms", std::move(terms)},
                   {"classical", f.classical_bound()},
                   {"quantum", f.quantum_bound()}};
  if (f.ns_bound()) j["ns"] = *f.ns_bound();
  return j;
}

inline BellFunctional functional_from_json(const nlohmann::json& j) {
  if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty()) {
    throw domain_error("functional json: missing or empty field \"terms\"");
  }
  std::vector<BellTerm> terms;
  for (const auto& tj : j["terms"]) {
    if (!tj.contains("coef") || !tj["coef"].is_number()) {
      throw domain_error("functional json: term missing numeric field \"coef\"");
    }
    if (!tj.contains("choice") || !tj["choice"].is_array()) {
      throw domain_error("functional json: term missing array field \"choice\"");
    }
    BellTerm term;
    term.coefficient = tj["coef"].get<double>();
    for (const auto& pj : tj["choice"]) {
      if (!pj.is_array() || pj.size() != 2 || !pj[0].is_number_integer() ||
          !pj[1].is_number_integer()) {
        throw domain_error("functional json: field \"choice\" must hold [party, setting] pairs");
      }
      term.choice.emplace_back(pj[0].get<int>(), pj[1].get<int>());
    }
    terms.push_back(std::move(term));
  }
  if (!j.contains("classical") || !j["classical"].is_number()) {
    throw domain_error("functional json: missing numeric field \"classical\"");
  }
  if (!j.contains("quantum") || !j["quantum"].is_number()) {
    throw domain_error("functional json: missing numeric field \"quantum\"");
  }
  std::optional<double> ns;
  if (j.contains("ns")) {
    if (!j["ns"].is_number()) throw domain_error("functional json: field \"ns\" must be a number");
    ns = j["ns"].get<double>();
  }
  return BellFunctional(std::move(terms), j["classical"].get<double>(), j["quantum"].get<double>(), ns);
}

}  // namespace nebit
