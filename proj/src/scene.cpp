#include "geodeq/scene.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "geodeq/errors.hpp"

namespace geodeq {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw SpecError(where + ": " + what); }

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::size_t index(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

cplx coefficient(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(where, "coefficient must be a number or a [re, im] pair");
}

// Coordinate each parameter of each kind depends on (a complex index for
// the complex kinds).
std::size_t role_var(const std::string& kind, const std::string& name, std::size_t n) {
  if (kind == "dini") return name == "Y" ? 1 : 0;
  if (kind == "levicivita3") return name == "Z" ? 2 : (name == "Y" ? 1 : 0);
  if (kind == "aminova") return 3;
  if (kind == "real_jordan" || kind == "real_jordan_normalized" || kind == "complex_jordan" ||
      kind == "complex_jordan_normalized")
    return n == 0 ? 0 : n - 1;
  return 0;
}

std::vector<SpectralBox> region_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of [re_lo, re_hi, im_lo, im_hi] boxes");
  std::vector<SpectralBox> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string w = where + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != 4) fail(w, "expected [re_lo, re_hi, im_lo, im_hi]");
    SpectralBox b{number(j[k][0], w), number(j[k][1], w), number(j[k][2], w), number(j[k][3], w)};
    if (b.re_lo > b.re_hi || b.im_lo > b.im_hi) fail(w, "box bounds out of order");
    out.push_back(b);
  }
  return out;
}

Chart chart_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains("box") || !j["box"].is_array() || j["box"].empty()) fail(where + ".box", "expected a list of [lo, hi]");
  std::vector<std::pair<double, double>> box;
  for (std::size_t k = 0; k < j["box"].size(); ++k) {
    const auto& iv = j["box"][k];
    const std::string w = where + ".box[" + std::to_string(k) + "]";
    if (!iv.is_array() || iv.size() != 2) fail(w, "expected [lo, hi]");
    box.emplace_back(number(iv[0], w), number(iv[1], w));
  }
  const double margin = j.contains("margin") ? number(j["margin"], where + ".margin") : 1e-3;
  try {
    return Chart(box, margin);
  } catch (const SpecError& e) {
    fail(where, e.what());
  }
}

json chart_to_json(const Chart& c) {
  json box = json::array();
  for (const auto& [lo, hi] : c.box()) box.push_back({lo, hi});
  return {{"box", box}, {"margin", c.margin()}};
}

}  // namespace

ParamFn param_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return ParamFn(0, {j.get<double>()});
  if (j.is_array()) {
    std::vector<cplx> c;
    for (std::size_t k = 0; k < j.size(); ++k) c.push_back(coefficient(j[k], where + "[" + std::to_string(k) + "]"));
    return ParamFn(0, c);
  }
  if (!j.is_object() || !j.contains("coeffs")) fail(where, "expected {\"var\": k, \"coeffs\": [...]}");
  const auto& cs = j["coeffs"];
  if (!cs.is_array() || cs.empty()) fail(where + ".coeffs", "expected a non-empty list");
  std::vector<cplx> c;
  for (std::size_t k = 0; k < cs.size(); ++k)
    c.push_back(coefficient(cs[k], where + ".coeffs[" + std::to_string(k) + "]"));
  const std::size_t var = j.contains("var") ? index(j["var"], where + ".var") : 0;
  try {
    return ParamFn(var, c);
  } catch (const SpecError& e) {
    fail(where, e.what());
  }
}

json param_to_json(const ParamFn& f) {
  json cs = json::array();
  for (const auto& c : f.coeffs()) {
    if (c.imag() == 0.0)
      cs.push_back(c.real());
    else
      cs.push_back({c.real(), c.imag()});
  }
  return {{"var", f.var()}, {"coeffs", cs}};
}

NormalFormSpec normal_form_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains("kind") || !j["kind"].is_string()) fail(where + ".kind", "missing or not a string");
  NormalFormSpec s;
  s.kind = j["kind"].get<std::string>();
  static const std::vector<std::string> kinds{"dini",         "levicivita3",  "interval",
                                              "real_jordan",  "real_jordan_normalized",
                                              "complex_jordan", "complex_jordan_normalized",
                                              "affine_complex3", "aminova"};
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) fail(where + ".kind", "unknown kind '" + s.kind + "'");
  const bool jordan = s.kind.find("jordan") != std::string::npos;
  if (j.contains("n")) s.n = index(j["n"], where + ".n");
  if (jordan && !j.contains("n")) fail(where + ".n", "required for " + s.kind);
  if (j.contains("epsilon")) {
    const double e = number(j["epsilon"], where + ".epsilon");
    if (e != 1.0 && e != -1.0) fail(where + ".epsilon", "must be +1 or -1");
    s.epsilon = int(e);
  }
  if (j.contains("corner")) {
    const auto v = j["corner"].is_string() ? j["corner"].get<std::string>() : std::string();
    if (v == "theorem")
      s.corner = CornerVariant::theorem;
    else if (v == "remark")
      s.corner = CornerVariant::remark;
    else
      fail(where + ".corner", "must be \"theorem\" or \"remark\"");
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) fail(where + ".params", "expected an object");
    for (const auto& [name, v] : j["params"].items()) {
      const std::string w = where + ".params." + name;
      if (v.is_number()) s.scalars[name] = v.get<double>();
      ParamFn f = param_from_json(v, w);
      const std::size_t role = role_var(s.kind, name, s.n);
      if (v.is_object() && v.contains("var") && f.var() != role)
        fail(w + ".var", "must be " + std::to_string(role) + " for " + s.kind);
      s.params[name] = f.with_var(role);
    }
  }
  const std::size_t d = spec_dimension(s);
  if (d == 0 || d > kMaxDim) fail(where + ".n", "dimension out of range");
  if (j.contains("chart")) {
    s.chart = chart_from_json(j["chart"], where + ".chart");
    if (s.chart->dim() != d)
      fail(where + ".chart.box", "has " + std::to_string(s.chart->dim()) + " intervals, expected " + std::to_string(d));
  }
  return s;
}

json normal_form_to_json(const NormalFormSpec& s) {
  json j;
  j["kind"] = s.kind;
  if (s.kind.find("jordan") != std::string::npos) j["n"] = s.n;
  json params = json::object();
  for (const auto& [name, f] : s.params) {
    auto it = s.scalars.find(name);
    params[name] = it != s.scalars.end() ? json(it->second) : param_to_json(f);
  }
  j["params"] = params;
  j["epsilon"] = s.epsilon;
  if (s.kind.find("normalized") != std::string::npos)
    j["corner"] = s.corner == CornerVariant::theorem ? "theorem" : "remark";
  j["chart"] = chart_to_json(s.chart ? *s.chart : default_chart(s));
  return j;
}

ConstructionSpec construction_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  ConstructionSpec c;
  if (j.contains("blocks")) {
    const auto& bs = j["blocks"];
    if (!bs.is_array() || bs.empty()) fail(where + ".blocks", "expected a non-empty list");
    for (std::size_t k = 0; k < bs.size(); ++k)
      c.blocks.push_back(construction_from_json(bs[k], where + ".blocks[" + std::to_string(k) + "]"));
  } else {
    c.normal_form = normal_form_from_json(j, where);
  }
  if (j.contains("region")) c.region = region_from_json(j["region"], where + ".region");
  return c;
}

json construction_to_json(const ConstructionSpec& c) {
  json j;
  if (c.normal_form) {
    j = normal_form_to_json(*c.normal_form);
  } else {
    j["blocks"] = json::array();
    for (const auto& b : c.blocks) j["blocks"].push_back(construction_to_json(b));
  }
  if (!c.region.empty()) {
    json r = json::array();
    for (const auto& b : c.region) r.push_back({b.re_lo, b.re_hi, b.im_lo, b.im_hi});
    j["region"] = r;
  }
  return j;
}

SceneSpec scene_from_json(const json& j) {
  if (!j.is_object()) fail("scene", "expected a JSON object");
  SceneSpec s;
  s.construction = construction_from_json(j.contains("construction") ? j["construction"] : j,
                                          j.contains("construction") ? "construction" : "scene");
  if (j.contains("verification")) {
    const auto& v = j["verification"];
    if (!v.is_object()) fail("verification", "expected an object");
    auto& o = s.verification;
    if (v.contains("n_points")) o.n_points = index(v["n_points"], "verification.n_points");
    if (v.contains("seed")) o.seed = index(v["seed"], "verification.seed");
    if (v.contains("tolerances")) {
      const auto& t = v["tolerances"];
      if (!t.is_object()) fail("verification.tolerances", "expected an object");
      auto get = [&](const char* key, double& dst) {
        if (t.contains(key)) dst = number(t[key], std::string("verification.tolerances.") + key);
      };
      get("selfadjoint", o.tol.selfadjoint);
      get("compatibility", o.tol.compatibility);
      get("nijenhuis", o.tol.nijenhuis);
      get("integral", o.tol.integral);
      get("geodesic", o.tol.geodesic);
      get("integrator", o.tol.integrator);
    }
    if (v.contains("geodesic_trials")) {
      const auto& ts = v["geodesic_trials"];
      if (!ts.is_array()) fail("verification.geodesic_trials", "expected a list");
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const std::string w = "verification.geodesic_trials[" + std::to_string(k) + "]";
        const auto& t = ts[k];
        if (!t.is_object() || !t.contains("p0") || !t.contains("v0")) fail(w, "expected {p0, v0, T}");
        GeodesicTrial g;
        for (const auto& x : t["p0"]) g.p0.push_back(number(x, w + ".p0"));
        for (const auto& x : t["v0"]) g.v0.push_back(number(x, w + ".v0"));
        if (t.contains("T")) g.T = number(t["T"], w + ".T");
        o.trials.push_back(g);
      }
    }
  }
  return s;
}

json scene_to_json(const SceneSpec& s) {
  const auto& o = s.verification;
  json trials = json::array();
  for (const auto& t : o.trials) trials.push_back({{"p0", t.p0}, {"v0", t.v0}, {"T", t.T}});
  json tol = {{"selfadjoint", o.tol.selfadjoint}, {"compatibility", o.tol.compatibility},
              {"nijenhuis", o.tol.nijenhuis},     {"integral", o.tol.integral},
              {"geodesic", o.tol.geodesic},       {"integrator", o.tol.integrator}};
  return {{"construction", construction_to_json(s.construction)},
          {"verification", {{"n_points", o.n_points}, {"seed", o.seed}, {"tolerances", tol}, {"geodesic_trials", trials}}}};
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path + ": " + e.what());
  }
  return scene_from_json(j);
}

Block build_block(const ConstructionSpec& c) {
  if (c.normal_form) return make_block(generate(*c.normal_form), c.region);
  std::vector<Block> parts;
  for (const auto& b : c.blocks) parts.push_back(build_block(b));
  if (parts.size() == 1) return parts.front();
  Block out = glue(parts);
  if (!c.region.empty()) out.region = c.region;
  return out;
}

MetricPair build_pair(const ConstructionSpec& c) {
  if (c.normal_form) return generate(*c.normal_form);
  return build_block(c).pair;
}

std::size_t top_level_blocks(const ConstructionSpec& c) { return c.normal_form ? 1 : c.blocks.size(); }

}  // namespace geodeq
