#include "gridflex/caseio.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gridflex {

namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(const ParseOptions& options) : options_(options) {}

  void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
    if (!obj.is_object()) throw CaseError(where + ": expected an object");
    std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (allowed.count(it.key())) continue;
      const std::string msg = where + ": unknown field '" + it.key() + "'";
      if (!options_.lenient) throw CaseError(msg);
      if (options_.warnings) options_.warnings->push_back(msg);
    }
  }

  static double number(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw CaseError(where + ": missing field '" + key + "'");
    if (!it->is_number()) throw CaseError(where + ": field '" + key + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw CaseError(where + ": field '" + key + "' must be finite");
    return v;
  }

  static double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
  }

  static int integer(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw CaseError(where + ": missing field '" + key + "'");
    if (!it->is_number_integer()) throw CaseError(where + ": field '" + key + "' must be an integer");
    return it->get<int>();
  }

  static bool boolean_or(const json& obj, const char* key, bool fallback, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_boolean()) throw CaseError(where + ": field '" + key + "' must be a boolean");
    return it->get<bool>();
  }

  static std::string string_or(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return {};
    if (!it->is_string()) throw CaseError(where + ": field '" + key + "' must be a string");
    return it->get<std::string>();
  }

  static const json& array(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw CaseError(std::string("missing field '") + key + "'");
    if (!it->is_array()) throw CaseError(std::string("field '") + key + "' must be an array");
    return *it;
  }

 private:
  const ParseOptions& options_;
};

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

CaseFile parse_case(std::string_view text, const ParseOptions& options) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte after the offending one.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(text, byte);
    throw CaseError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col), line, col);
  }

  Reader r(options);
  r.check_keys(root, "case", {"schema_version", "name", "reconstructed", "notes", "base_mva", "reference_bus",
                              "default_uncertainty", "buses", "generators", "lines"});
  CaseFile c;
  auto sv = root.find("schema_version");
  if (sv == root.end() || !sv->is_string()) throw CaseError("case: missing string field 'schema_version'");
  c.schema_version = sv->get<std::string>();
  if (c.schema_version != kSchemaVersion)
    throw CaseError("case: unsupported schema_version '" + c.schema_version + "'");
  c.name = Reader::string_or(root, "name", "case");
  c.notes = Reader::string_or(root, "notes", "case");
  c.reconstructed = Reader::boolean_or(root, "reconstructed", false, "case");

  Network& net = c.network;
  net.base_mva = Reader::number_or(root, "base_mva", 100.0, "case");
  if (root.contains("reference_bus")) net.reference_bus = Reader::integer(root, "reference_bus", "case");
  if (root.contains("default_uncertainty")) {
    const double u = Reader::number(root, "default_uncertainty", "case");
    if (u < 0.0 || u >= 1.0) throw CaseError("case: default_uncertainty must lie in [0, 1)");
    c.default_uncertainty = u;
  }

  for (const json& b : Reader::array(root, "buses")) {
    const std::string where0 = "bus";
    Bus bus;
    bus.id = Reader::integer(b, "id", where0);
    const std::string where = "bus " + std::to_string(bus.id);
    r.check_keys(b, where, {"id", "weight", "demand"});
    bus.weight = Reader::number_or(b, "weight", 1.0, where);
    auto d = b.find("demand");
    if (d != b.end() && !d->is_null()) {
      FuzzyDemand fd;
      if (d->is_number()) {
        fd.forecast = d->get<double>();
      } else {
        r.check_keys(*d, where + " demand", {"forecast", "upper", "lower"});
        fd.forecast = Reader::number(*d, "forecast", where);
      }
      const bool explicit_bounds = d->is_object() && d->contains("upper") && d->contains("lower");
      if (d->is_object() && (d->contains("upper") != d->contains("lower")))
        throw CaseError(where + ": demand needs both 'upper' and 'lower' or neither");
      if (explicit_bounds) {
        fd.upper = Reader::number(*d, "upper", where);
        fd.lower = Reader::number(*d, "lower", where);
      } else if (c.default_uncertainty) {
        fd.upper = (1.0 + *c.default_uncertainty) * fd.forecast;
        fd.lower = (1.0 - *c.default_uncertainty) * fd.forecast;
      } else {
        throw CaseError(where + ": demand bounds missing and no default_uncertainty");
      }
      bus.demand = fd;
    }
    net.buses.push_back(bus);
  }

  int gi = 0;
  for (const json& g : Reader::array(root, "generators")) {
    const std::string where = "generator " + std::to_string(gi++);
    r.check_keys(g, where, {"bus", "p_min", "p_max"});
    Generator gen;
    gen.bus = Reader::integer(g, "bus", where);
    gen.p_min = Reader::number_or(g, "p_min", 0.0, where);
    gen.p_max = Reader::number(g, "p_max", where);
    net.generators.push_back(gen);
  }

  for (const json& l : Reader::array(root, "lines")) {
    Line line;
    line.from = Reader::integer(l, "from", "line");
    line.to = Reader::integer(l, "to", "line");
    line.circuit = l.contains("circuit") ? Reader::integer(l, "circuit", "line") : 1;
    const std::string where = "line " + line_label(line);
    r.check_keys(l, where,
                 {"from", "to", "circuit", "x", "limit", "beta_min", "beta_max", "candidate", "in_service"});
    line.x = Reader::number(l, "x", where);
    line.limit = Reader::number(l, "limit", where);
    line.beta_min = Reader::number_or(l, "beta_min", 0.0, where);
    line.beta_max = Reader::number_or(l, "beta_max", 0.0, where);
    line.candidate = Reader::boolean_or(l, "candidate", true, where);
    line.in_service = Reader::boolean_or(l, "in_service", true, where);
    net.lines.push_back(line);
  }

  const std::vector<std::string> issues = validate_network(net);
  if (!issues.empty()) throw CaseError(issues.front());
  return c;
}

std::string write_case(const CaseFile& c) {
  using nlohmann::ordered_json;
  ordered_json root;
  root["schema_version"] = c.schema_version;
  if (!c.name.empty()) root["name"] = c.name;
  if (c.reconstructed) root["reconstructed"] = true;
  if (!c.notes.empty()) root["notes"] = c.notes;
  root["base_mva"] = c.network.base_mva;
  if (c.network.reference_bus) root["reference_bus"] = *c.network.reference_bus;
  if (c.default_uncertainty) root["default_uncertainty"] = *c.default_uncertainty;

  ordered_json buses = ordered_json::array();
  for (const Bus& b : c.network.buses) {
    ordered_json jb;
    jb["id"] = b.id;
    jb["weight"] = b.weight;
    if (b.demand) {
      jb["demand"] = {{"forecast", b.demand->forecast}, {"upper", b.demand->upper}, {"lower", b.demand->lower}};
    }
    buses.push_back(jb);
  }
  root["buses"] = buses;

  ordered_json gens = ordered_json::array();
  for (const Generator& g : c.network.generators)
    gens.push_back({{"bus", g.bus}, {"p_min", g.p_min}, {"p_max", g.p_max}});
  root["generators"] = gens;

  ordered_json lines = ordered_json::array();
  for (const Line& l : c.network.lines) {
    ordered_json jl;
    jl["from"] = l.from;
    jl["to"] = l.to;
    jl["circuit"] = l.circuit;
    jl["x"] = l.x;
    jl["limit"] = l.limit;
    jl["beta_min"] = l.beta_min;
    jl["beta_max"] = l.beta_max;
    jl["candidate"] = l.candidate;
    jl["in_service"] = l.in_service;
    lines.push_back(jl);
  }
  root["lines"] = lines;
  return root.dump(2) + "\n";
}

CaseFile load_case(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str(), options);
}

}  // namespace gridflex
