#ifndef CSTSSOS_POP_HPP
#define CSTSSOS_POP_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cstssos/polynomial.hpp"

namespace cstssos {

enum class ConstraintKind { Geq0, Eq0 };
enum class Sense { Minimize, Maximize };

struct Constraint {
  Polynomial poly;
  ConstraintKind kind = ConstraintKind::Geq0;
};

/// Polynomial optimization problem: optimize f over {g_j >= 0, h_j = 0}.
struct POPInstance {
  std::size_t n = 0;
  Polynomial objective;
  std::vector<Constraint> constraints;
  std::string name;
  std::optional<double> known_optimum;
  Sense sense = Sense::Minimize;

  std::size_t m() const noexcept { return constraints.size(); }

  /// d_j for j in 1..m; d_0 = 0 for the objective slot.
  unsigned constraint_order(std::size_t j) const {
    return j == 0 ? 0u : half_degree(constraints.at(j - 1).poly);
  }

  /// g_j with g_0 = 1.
  Polynomial constraint_poly(std::size_t j) const {
    return j == 0 ? Polynomial::constant(n, 1.0) : constraints.at(j - 1).poly;
  }

  unsigned d_min() const {
    unsigned d = half_degree(objective);
    for (std::size_t j = 1; j <= m(); ++j) d = std::max(d, constraint_order(j));
    return d;
  }

  /// supp(f) together with supp(g_j) for every constraint.
  std::vector<Exponent> joint_support() const {
    std::vector<Exponent> a = objective.support();
    for (const auto& c : constraints)
      for (const auto& e : c.poly.support()) a.push_back(e);
    std::sort(a.begin(), a.end(), GrlexLess{});
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
  }

  void validate() const {
    if (objective.arity() != n) throw std::invalid_argument("objective arity differs from n");
    for (const auto& c : constraints)
      if (c.poly.arity() != n) throw std::invalid_argument("constraint arity differs from n");
  }
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Polynomial terms_from_json(const nlohmann::json& terms, std::size_t n, const char* what) {
  if (!terms.is_array()) throw ParseError(std::string(what) + ": terms must be an array");
  Polynomial p(n);
  for (const auto& t : terms) {
    if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_array())
      throw ParseError(std::string(what) + ": term must be [coeff, [exponents]]");
    const double c = t[0].get<double>();
    if (!std::isfinite(c)) throw ParseError(std::string(what) + ": non-finite coefficient");
    if (t[1].size() != n)
      throw ParseError(std::string(what) + ": exponent arity " + std::to_string(t[1].size()) +
                       " does not match n = " + std::to_string(n));
    std::vector<int> e;
    for (const auto& v : t[1]) {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ParseError(std::string(what) + ": exponent entries must be nonnegative integers");
      e.push_back(v.get<int>());
    }
    p.add_term(Exponent(std::span<const int>(e)), c);
  }
  return p;
}

inline nlohmann::json terms_to_json(const Polynomial& p) {
  auto arr = nlohmann::json::array();
  for (const auto& [a, c] : p.terms()) {
    auto e = nlohmann::json::array();
    for (auto v : a.entries()) e.push_back(static_cast<int>(v));
    arr.push_back(nlohmann::json::array({c, e}));
  }
  return arr;
}

}  // namespace detail

inline POPInstance parse_pop(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("problem document must be a JSON object");
  if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<long long>() < 1)
    throw ParseError("field \"n\" must be a positive integer");
  POPInstance pop;
  pop.n = doc["n"].get<std::size_t>();
  pop.objective = doc.contains("objective")
                      ? detail::terms_from_json(doc["objective"], pop.n, "objective")
                      : Polynomial(pop.n);
  if (doc.contains("constraints")) {
    if (!doc["constraints"].is_array()) throw ParseError("\"constraints\" must be an array");
    for (const auto& c : doc["constraints"]) {
      if (!c.is_object() || !c.contains("kind") || !c.contains("terms"))
        throw ParseError("constraint must have \"kind\" and \"terms\"");
      const auto kind = c["kind"].get<std::string>();
      Constraint con;
      if (kind == "geq0") con.kind = ConstraintKind::Geq0;
      else if (kind == "eq0") con.kind = ConstraintKind::Eq0;
      else throw ParseError("unknown constraint kind \"" + kind + "\"");
      con.poly = detail::terms_from_json(c["terms"], pop.n, "constraint");
      pop.constraints.push_back(std::move(con));
    }
  }
  if (doc.contains("name")) pop.name = doc["name"].get<std::string>();
  if (doc.contains("sense")) {
    const auto s = doc["sense"].get<std::string>();
    if (s == "min") pop.sense = Sense::Minimize;
    else if (s == "max") pop.sense = Sense::Maximize;
    else throw ParseError("\"sense\" must be \"min\" or \"max\"");
  }
  if (doc.contains("optimum") && !doc["optimum"].is_null())
    pop.known_optimum = doc["optimum"].get<double>();
  return pop;
}

inline POPInstance parse_pop(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed problem document: ") + e.what());
  }
  try {
    return parse_pop(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid problem document: ") + e.what());
  }
}

inline nlohmann::json to_json(const POPInstance& pop) {
  nlohmann::json doc;
  doc["n"] = pop.n;
  doc["objective"] = detail::terms_to_json(pop.objective);
  doc["constraints"] = nlohmann::json::array();
  for (const auto& c : pop.constraints)
    doc["constraints"].push_back(
        {{"kind", c.kind == ConstraintKind::Geq0 ? "geq0" : "eq0"},
         {"terms", detail::terms_to_json(c.poly)}});
  doc["name"] = pop.name;
  if (pop.sense == Sense::Maximize) doc["sense"] = "max";
  if (pop.known_optimum) doc["optimum"] = *pop.known_optimum;
  return doc;
}

}  // namespace cstssos

#endif  // CSTSSOS_POP_HPP
