#include "avc/report.hpp"

#include <sstream>

namespace avc {

using nlohmann::json;

json to_json(const Dist& p) { return p.pmf(); }

json to_json(const JointDist& p) { return json{{"axes", p.axes()}, {"shape", p.shape()}, {"pmf", p.pmf()}}; }

json to_json(const CondDist& c) {
  json rows = json::array();
  for (const auto& r : c.rows()) rows.push_back(r.pmf());
  return json{{"cond_shape", c.cond_shape()}, {"rows", rows}};
}

json to_json(const JammingKernel& k) {
  return json{{"mode", to_string(k.mode)}, {"L", k.L}, {"nu", k.nu}, {"U", to_json(k.U)}};
}

json to_json(const CpDecomposition& d) {
  json f = json::array();
  for (const auto& x : d.factors) f.push_back(x.pmf());
  return json{{"order", d.order}, {"weights", d.weights.pmf()}, {"factors", f}};
}

json to_json(const SymVerdict& v) {
  json j{{"notion", v.notion},         {"L", v.L},
         {"answer", to_string(v.answer)}, {"certificate", v.certificate},
         {"lp_count", v.lp_count}};
  if (v.witness) {
    j["witness"] = to_json(*v.witness);
    j["witness_residual"] = v.residual;
    j["costs"] = v.costs;
  }
  if (v.coupling) j["coupling"] = to_json(*v.coupling);
  if (v.decomposition) j["decomposition"] = to_json(*v.decomposition);
  if (v.answer == Answer::no) j["infeasibility"] = v.infeasibility;
  if (v.answer == Answer::yes_up_to_net) j["resolution"] = v.resolution;
  return j;
}

json to_json(const SymProfile& p) {
  json entries = json::array();
  for (const auto& e : p.entries) {
    json vs = json::array();
    for (const auto& v : e.verdicts) vs.push_back(to_json(v));
    entries.push_back(json{{"P_x", e.P_x.pmf()}, {"strong", e.strong}, {"cp", e.cp}, {"weak", e.weak}, {"verdicts", vs}});
  }
  return json{{"L_max", p.L_max},
              {"L_strong", p.strong},
              {"L_cp", p.cp},
              {"L_weak", p.weak},
              {"argmin_strong", p.argmin_strong},
              {"argmin_cp", p.argmin_cp},
              {"argmin_weak", p.argmin_weak},
              {"entries", entries}};
}

json to_json(const SingletonResult& r) {
  json j{{"kind", to_string(r.kind)}, {"lp_count", r.lp_count}, {"equations", r.equations}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  return j;
}

json to_json(const SeparationReport& r) {
  return json{{"main", to_json(r.main)},
              {"singleton", to_json(r.singleton)},
              {"singleton_px", r.singleton_px.pmf()},
              {"at_L", to_json(r.at_L)},
              {"at_L_plus_1", to_json(r.at_L_plus_1)},
              {"strong_below", r.strong_below},
              {"cp_below", r.cp_below}};
}

json to_json(const CapacityEstimate& e) {
  json j{{"value", e.value},
         {"label", "lower bound estimate"},
         {"all_symmetrizable", e.all_symmetrizable},
         {"admissible", e.admissible},
         {"swept", e.swept},
         {"undecided", e.undecided}};
  if (e.argmax) j["argmax"] = to_json(*e.argmax);
  return j;
}

json to_json(const SgBounds& b) {
  json j{{"upper", b.upper},
         {"lower", b.lower},
         {"upper_all_symmetrizable", b.upper_all_symmetrizable},
         {"lower_all_symmetrizable", b.lower_all_symmetrizable}};
  if (b.upper_px) j["upper_px"] = b.upper_px->pmf();
  if (b.lower_px) j["lower_px"] = b.lower_px->pmf();
  return j;
}

json to_json(const CpAttackPlan& p) {
  return json{{"L", p.L},
              {"subcode_size", p.subcode.size()},
              {"P_hat_x", p.P_hat_x.pmf()},
              {"P_hat", to_json(p.P_hat)},
              {"cell_count", p.cell_count},
              {"tuples", p.tuples},
              {"decomposition", to_json(p.decomposition)},
              {"cp_distance", p.cp_distance},
              {"kernel", to_json(p.kernel)},
              {"plan_costs", p.plan_costs},
              {"margins", p.margins},
              {"warnings", p.warnings}};
}

json to_json(const AttackTranscript& t) {
  return json{{"list", t.list},
              {"s_seq", t.s_seq},
              {"u_seq", t.u_seq},
              {"costs", t.costs},
              {"list_costs", t.list_costs},
              {"compliant", t.compliant},
              {"good_event", t.good_event},
              {"list_distance", t.list_distance}};
}

json to_json(const McError& e) {
  return json{{"mean", e.mean},     {"ci_low", e.lo},     {"ci_high", e.hi},
              {"trials", e.trials}, {"errors", e.errors}, {"overflows", e.overflows}};
}

json to_json(const TimeshareSubcode& t) {
  json cells = json::array(), comps = json::array();
  for (const auto& c : t.column_cells) cells.push_back(c.pmf());
  for (const auto& c : t.chunk_compositions) comps.push_back(c.pmf());
  return json{{"kept", t.kept},
              {"size", t.kept.size()},
              {"nu", t.nu},
              {"u_seq", t.u_seq},
              {"column_cells", cells},
              {"chunk_compositions", comps},
              {"theta", t.theta},
              {"theta_bound", t.theta_bound},
              {"meets_floor", t.meets_floor}};
}

namespace {

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void flatten(const json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
  } else if (j.is_array()) {
    if (j.empty()) out << csv_cell(path) << ",\n";
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out << csv_cell(path) << "," << csv_cell(j) << "\n";
  }
}

bool flat_table(const json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_object()) return false;
  for (const auto& r : rows) {
    if (!r.is_object() || r.size() != rows[0].size()) return false;
    for (const auto& [k, v] : r.items())
      if (!rows[0].contains(k) || v.is_structured()) return false;
  }
  return true;
}

}  // namespace

std::string to_csv(const json& j) {
  std::ostringstream out;
  if (j.is_object() && j.contains("rows") && flat_table(j["rows"])) {
    const auto& rows = j["rows"];
    bool first = true;
    for (const auto& [k, v] : rows[0].items()) {
      out << (first ? "" : ",") << csv_cell(k);
      first = false;
    }
    out << "\n";
    for (const auto& r : rows) {
      first = true;
      for (const auto& [k, v] : rows[0].items()) {
        out << (first ? "" : ",") << csv_cell(r[k]);
        first = false;
      }
      out << "\n";
    }
    return out.str();
  }
  out << "path,value\n";
  flatten(j, "", out);
  return out.str();
}

std::string render(const json& j, const std::string& format) {
  if (format == "json") return j.dump(2) + "\n";
  if (format == "csv") return to_csv(j);
  throw ValidationError("format: expected json or csv, got '" + format + "'");
}

}  // namespace avc
