#include "tergm/model.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "tergm/errors.hpp"
#include "tergm/util.hpp"

namespace tergm {

const char* term_kind_name(TermKind k) {
  switch (k) {
    case TermKind::edges: return "edges";
    case TermKind::isolates: return "isolates";
    case TermKind::mixed_two_star: return "mixed_two_star";
    case TermKind::mixed_triangle: return "mixed_triangle";
    case TermKind::gwesp: return "gwesp";
    case TermKind::dyad_cov: return "dyad_cov";
    case TermKind::year_cov: return "year_cov";
    case TermKind::joint_indicator: return "joint_indicator";
    case TermKind::weak_link: return "weak_link";
  }
  return "?";
}

const char* regime_name(RegimeType r) { return r == RegimeType::dem ? "dem" : "aut"; }

namespace {

bool needs_same_type(TermKind k) {
  return k == TermKind::mixed_two_star || k == TermKind::mixed_triangle ||
         k == TermKind::joint_indicator;
}

bool needs_cov_name(TermKind k) {
  return k == TermKind::dyad_cov || k == TermKind::year_cov;
}

std::optional<TermKind> kind_from_name(const std::string& s) {
  for (TermKind k : {TermKind::edges, TermKind::isolates, TermKind::mixed_two_star,
                     TermKind::mixed_triangle, TermKind::gwesp, TermKind::dyad_cov,
                     TermKind::year_cov, TermKind::joint_indicator, TermKind::weak_link}) {
    if (s == term_kind_name(k)) return k;
  }
  return std::nullopt;
}

}  // namespace

std::string TermSpec::name() const {
  switch (kind) {
    case TermKind::edges:
    case TermKind::isolates:
    case TermKind::weak_link:
      return term_kind_name(kind);
    case TermKind::mixed_two_star:
    case TermKind::mixed_triangle:
      return std::string(term_kind_name(kind)) + "_" + regime_name(same_type.value_or(RegimeType::dem));
    case TermKind::joint_indicator:
      return std::string("joint_") + regime_name(same_type.value_or(RegimeType::dem));
    case TermKind::gwesp:
      return "gwesp_" + format_double(alpha);
    case TermKind::dyad_cov:
    case TermKind::year_cov:
      return cov_name;
  }
  return "?";
}

std::vector<std::string> ModelSpec::term_names() const {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(t.name());
  return out;
}

int ModelSpec::index_of(const std::string& term_name) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i].name() == term_name) return static_cast<int>(i);
  return -1;
}

void ModelSpec::validate(bool require_edges) const {
  if (terms.empty()) throw ValidationError("model has no terms");
  std::set<std::string> seen;
  bool has_edges = false;
  for (const auto& t : terms) {
    if (t.kind == TermKind::edges) has_edges = true;
    if (needs_same_type(t.kind) && !t.same_type)
      throw ValidationError(std::string(term_kind_name(t.kind)) + " term requires same_type");
    if (needs_cov_name(t.kind) && t.cov_name.empty())
      throw ValidationError(std::string(term_kind_name(t.kind)) + " term requires cov_name");
    if (!needs_cov_name(t.kind) && !t.cov_name.empty())
      throw ValidationError(std::string(term_kind_name(t.kind)) + " term does not take cov_name");
    if (t.kind == TermKind::gwesp && !(t.alpha > 0.0 && std::isfinite(t.alpha)))
      throw ValidationError("gwesp alpha must be positive and finite");
    std::string nm = t.name();
    if (!seen.insert(nm).second)
      throw ValidationError("duplicate model term: " + nm);
  }
  if (require_edges && !has_edges)
    throw ValidationError("model must include an edges term");
}

std::string model_to_json(const ModelSpec& spec) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : spec.terms) {
    nlohmann::json o;
    o["term"] = term_kind_name(t.kind);
    if (t.same_type) o["same_type"] = regime_name(*t.same_type);
    if (!t.cov_name.empty()) o["cov_name"] = t.cov_name;
    if (t.kind == TermKind::gwesp) o["alpha"] = t.alpha;
    arr.push_back(std::move(o));
  }
  return arr.dump(2);
}

ModelSpec model_from_json(const std::string& json_text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("model JSON parse failed: ") + e.what());
  }
  if (!arr.is_array()) throw ValidationError("model JSON must be an array of terms");
  ModelSpec spec;
  for (const auto& o : arr) {
    if (!o.is_object() || !o.contains("term") || !o["term"].is_string())
      throw ValidationError("each model term must be an object with a \"term\" string");
    TermSpec t;
    auto kind = kind_from_name(o["term"].get<std::string>());
    if (!kind)
      throw ValidationError("unknown model term: " + o["term"].get<std::string>());
    t.kind = *kind;
    if (o.contains("same_type")) {
      std::string s = o["same_type"].is_string() ? o["same_type"].get<std::string>() : "";
      if (s == "dem") t.same_type = RegimeType::dem;
      else if (s == "aut") t.same_type = RegimeType::aut;
      else throw ValidationError("same_type must be \"dem\" or \"aut\"");
    }
    if (o.contains("cov_name")) {
      if (!o["cov_name"].is_string())
        throw ValidationError("cov_name must be a string");
      t.cov_name = o["cov_name"].get<std::string>();
    }
    if (o.contains("alpha")) {
      if (!o["alpha"].is_number())
        throw ValidationError("alpha must be a number");
      t.alpha = o["alpha"].get<double>();
    }
    spec.terms.push_back(std::move(t));
  }
  spec.validate(/*require_edges=*/false);
  return spec;
}

}  // namespace tergm
