#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "valdetect/classmap.hpp"
#include "valdetect/tower.hpp"

namespace valdetect {

// Parsed form of the JSON field description consumed by the CLI:
// {"ell":3, "base":{"kind":"rational","q":7,"var":"x"}, "laurent":["s","t"],
//  "context":{"irreducibles":["x","x+1"],"degree_bound":2}}
// base.kind is "finite" or "rational"; laurent lists variables innermost
// first; context is optional.
struct FieldSpec {
  int ell = 3;
  bool rational = false;
  u64 q = 7;
  std::string var = "x";
  std::vector<std::string> laurent;
  std::vector<std::string> irreducibles;
  int degree_bound = 0;  // 0 = unset; CLI applies its own default
};

inline FieldSpec parse_field_spec(const nlohmann::json& j) {
  FieldSpec s;
  try {
    if (!j.is_object()) fail(Errc::SpecParse, "field spec must be an object");
    s.ell = j.at("ell").get<int>();
    const auto& base = j.at("base");
    std::string kind = base.at("kind").get<std::string>();
    s.q = base.at("q").get<u64>();
    if (kind == "rational") {
      s.rational = true;
      s.var = base.at("var").get<std::string>();
    } else if (kind == "finite") {
      s.rational = false;
    } else {
      fail(Errc::SpecParse, "base.kind must be finite or rational");
    }
    if (j.contains("laurent"))
      s.laurent = j.at("laurent").get<std::vector<std::string>>();
    if (j.contains("context")) {
      const auto& c = j.at("context");
      if (c.contains("irreducibles"))
        s.irreducibles = c.at("irreducibles").get<std::vector<std::string>>();
      if (c.contains("degree_bound"))
        s.degree_bound = c.at("degree_bound").get<int>();
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(Errc::SpecParse, std::string("field spec: ") + e.what());
  }
  return s;
}

inline FieldSpec parse_field_spec(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::SpecParse, "invalid JSON");
  return parse_field_spec(j);
}

inline Tower tower_from_spec(const FieldSpec& s) {
  return Tower(s.ell, s.q, s.rational, s.var, s.laurent);
}

// Seed context plus any irreducibles the spec lists (parsed, validated,
// stored under their canonical balanced print).
inline Context context_from_spec(const Tower& t, const FieldSpec& s) {
  Context ctx = t.seed_context();
  for (const std::string& text : s.irreducibles) {
    if (!t.base_rational())
      fail(Errc::SpecParse, "irreducibles need a rational base");
    Poly p = t.ring().parse(text, t.base_var());
    p = t.ring().monic(p);
    if (p.deg() < 1 || !t.ring().is_irreducible(p))
      fail(Errc::SpecParse, "not irreducible: " + text);
    ctx.add(BasisIndex::irr(p.deg(), t.ring().to_string(p, t.base_var())));
  }
  return ctx;
}

}  // namespace valdetect
