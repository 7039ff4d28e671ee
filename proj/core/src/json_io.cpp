#include "circleflow/json_io.hpp"

#include <json.hpp>

#include "circleflow/errors.hpp"

namespace circleflow {

namespace {

using json = nlohmann::ordered_json;

json rat_out(const Rat& x) { return format_rat(x); }

Rat rat_in(const json& j, const std::string& where) {
  if (!j.is_string())
    throw validation_error(where + " must be a rational string like \"p/q\"");
  try {
    return parse_rat(j.get<std::string>());
  } catch (const validation_error& e) {
    throw validation_error(where + ": " + e.what());
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw validation_error(where + " is missing \"" + key + "\"");
  return j.at(key);
}

int int_in(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw validation_error(where + " must be an integer");
  return j.get<int>();
}

json domain_out(const Domain& d) {
  json comps = json::array();
  for (const Rat& len : d.lens) comps.push_back(rat_out(len));
  return json{{"components", comps}};
}

Domain domain_in(const json& j, const std::string& where) {
  const json& comps = field(j, "components", where);
  if (!comps.is_array() || comps.empty())
    throw validation_error(where + ".components must be a nonempty array");
  std::vector<Rat> lens;
  for (std::size_t i = 0; i < comps.size(); ++i)
    lens.push_back(rat_in(comps[i], where + ".components[" + std::to_string(i) + "]"));
  return make_domain(std::move(lens));
}

json transform_out(const Transform& tf) {
  if (transform_is_affine(tf)) {
    const Affine& a = std::get<Affine>(tf);
    return json{{"kind", "affine"},
                {"slope", rat_out(a.slope)},
                {"offset", rat_out(a.offset)}};
  }
  const FlowChart& c = std::get<FlowChart>(tf);
  json out{{"kind", "flowchart"}, {"r", rat_out(c.r)}, {"a", rat_out(c.a)}, {"t", c.t}};
  if (c.post != 0) out["post"] = rat_out(c.post);
  return out;
}

Transform transform_in(const json& j, const std::string& where) {
  const json& jk = field(j, "kind", where);
  if (!jk.is_string()) throw validation_error(where + ".kind must be a string");
  std::string kind = jk.get<std::string>();
  if (kind == "affine") {
    return Affine{rat_in(field(j, "slope", where), where + ".slope"),
                  rat_in(field(j, "offset", where), where + ".offset")};
  }
  if (kind == "flowchart") {
    FlowChart c;
    c.r = rat_in(field(j, "r", where), where + ".r");
    c.a = rat_in(field(j, "a", where), where + ".a");
    const json& jt = field(j, "t", where);
    if (!jt.is_number()) throw validation_error(where + ".t must be a number");
    c.t = jt.get<double>();
    if (j.contains("post")) c.post = rat_in(j.at("post"), where + ".post");
    return c;
  }
  throw validation_error(where + ".kind must be \"affine\" or \"flowchart\"");
}

json map_out(const PacMap& m) {
  json pieces = json::array();
  bool has_chart = false;
  for (const Piece& p : m.pieces()) {
    has_chart = has_chart || !transform_is_affine(p.tf);
    pieces.push_back(json{
        {"arc", json{{"component", p.src_comp},
                     {"start", rat_out(p.start)},
                     {"length", rat_out(p.len)}}},
        {"target_component", p.dst_comp},
        {"transform", transform_out(p.tf)}});
  }
  json out{{"source", domain_out(m.source())},
           {"target", domain_out(m.target())},
           {"pieces", pieces}};
  // A derived map can be all-affine yet carry double noise in its constants;
  // mark it so a reparse validates with the numeric tolerance. Chart pieces
  // already imply the flag.
  if (m.numeric() && !has_chart) out["numeric"] = true;
  return out;
}

PacMap map_in(const json& j, const std::string& where) {
  Domain src = domain_in(field(j, "source", where), where + ".source");
  Domain dst = domain_in(field(j, "target", where), where + ".target");
  const json& jp = field(j, "pieces", where);
  if (!jp.is_array()) throw validation_error(where + ".pieces must be an array");
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < jp.size(); ++i) {
    std::string at = where + ".pieces[" + std::to_string(i) + "]";
    const json& e = jp[i];
    const json& arc = field(e, "arc", at);
    Piece p;
    p.src_comp = int_in(field(arc, "component", at + ".arc"), at + ".arc.component");
    p.start = rat_in(field(arc, "start", at + ".arc"), at + ".arc.start");
    p.len = rat_in(field(arc, "length", at + ".arc"), at + ".arc.length");
    p.dst_comp = int_in(field(e, "target_component", at), at + ".target_component");
    p.tf = transform_in(field(e, "transform", at), at + ".transform");
    pieces.push_back(std::move(p));
  }
  bool numeric = false;
  if (j.contains("numeric")) {
    if (!j.at("numeric").is_boolean())
      throw validation_error(where + ".numeric must be a boolean");
    numeric = j.at("numeric").get<bool>();
  }
  if (numeric)
    return PacMap::with_numeric_constants(std::move(src), std::move(dst),
                                          std::move(pieces));
  return PacMap(std::move(src), std::move(dst), std::move(pieces));
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw validation_error(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string pac_map_to_json(const PacMap& m, int indent) {
  return map_out(m).dump(indent);
}

PacMap pac_map_from_json(const std::string& text) {
  json j = parse_text(text);
  try {
    return map_in(j, "map");
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("invalid JSON structure: ") + e.what());
  }
}

std::string straighten_result_to_json(const StraighteningResult& r,
                                      const std::string& family, int indent) {
  json j;
  j["family"] = family;
  j["trivial"] = r.trivial;
  json b = json::array();
  for (const Rat& p : r.cuts.points) b.push_back(rat_out(p));
  j["B"] = std::move(b);
  j["delta_B"] = rat_out(r.cuts.delta_b);
  j["t_q"] = rat_out(r.jump_maps.t_q);
  j["sigma"] = r.jump_maps.sigma;
  j["tau"] = r.jump_maps.tau;
  j["sigma1"] = r.jump_maps.sigma1;
  j["tau1"] = r.jump_maps.tau1;
  j["sigma2"] = r.jump_maps.sigma2;
  j["tau2"] = r.jump_maps.tau2;
  j["orbits"] = r.orbits.orbits;
  j["representatives"] = r.orbits.reps;
  json lam = json::array();
  for (const Rat& len : r.domain.lens) lam.push_back(rat_out(len));
  j["lambda"] = std::move(lam);
  j["f"] = map_out(r.conjugator);

  json hom;
  hom["passed"] = r.hom.passed;
  hom["identity_ok"] = r.hom.identity_ok;
  hom["max_defect"] = r.hom.max_defect;
  hom["worst_s"] = rat_out(r.hom.worst_s);
  hom["worst_t"] = rat_out(r.hom.worst_t);
  json cont = json::array();
  for (const auto& [tk, dk] : r.hom.continuity)
    cont.push_back(json{{"t", rat_out(tk)}, {"d_to_identity", dk}});
  hom["continuity"] = std::move(cont);
  hom["message"] = r.hom.message;

  json ver;
  ver["passed"] = r.verification.passed;
  ver["tol"] = r.verification.tol;
  json entries = json::array();
  for (const VerificationEntry& e : r.verification.entries)
    entries.push_back(json{{"t", rat_out(e.t)},
                           {"invariant", e.invariant},
                           {"max_residual", e.max_residual},
                           {"residuals_above_tol", e.residual_count}});
  ver["entries"] = std::move(entries);
  ver["message"] = r.verification.message;

  j["report"] = json{{"homomorphism", std::move(hom)}, {"verification", std::move(ver)}};
  return j.dump(indent);
}

PacMap conjugator_from_json(const std::string& text) {
  json j = parse_text(text);
  try {
    return map_in(field(j, "f", "result"), "result.f");
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("invalid JSON structure: ") + e.what());
  }
}

}  // namespace circleflow
