#include "spectral/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace spectral {

namespace {

using nlohmann::json;

std::string join_violations(const std::vector<std::string>& v) {
  std::string s = "config violations:";
  for (const std::string& x : v) {
    s += "\n  - ";
    s += x;
  }
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error(join_violations(v)), violations(std::move(v)) {}

const std::vector<std::string> kCommands = {
    "pseudospectrum", "regularize",   "verify-theorem-b",
    "tails",          "jordan-scan",  "bulk-profile",
    "sde-couple",     "sde-marginal", "optimize-st"};

bool is_known_command(const std::string& name) {
  return std::find(kCommands.begin(), kCommands.end(), name) != kCommands.end();
}

namespace {

struct Violations {
  std::vector<std::string> v;
  void add(std::string s) { v.push_back(std::move(s)); }
};

std::optional<std::int64_t> as_int(const json& j, const std::string& path,
                                   Violations& viol) {
  if (j.is_number_integer() || j.is_number_unsigned())
    return j.get<std::int64_t>();
  viol.add(path + ": expected an integer");
  return std::nullopt;
}

std::optional<double> as_double(const json& j, const std::string& path,
                                Violations& viol) {
  if (j.is_number()) {
    double d = j.get<double>();
    if (std::isfinite(d)) return d;
  }
  viol.add(path + ": expected a finite number");
  return std::nullopt;
}

std::optional<std::string> as_string(const json& j, const std::string& path,
                                     Violations& viol) {
  if (j.is_string()) return j.get<std::string>();
  viol.add(path + ": expected a string");
  return std::nullopt;
}

std::optional<std::vector<double>> as_double_array(const json& j,
                                                   const std::string& path,
                                                   Violations& viol) {
  if (!j.is_array()) {
    viol.add(path + ": expected an array of numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::optional<double> d =
        as_double(j[i], path + "[" + std::to_string(i) + "]", viol);
    if (!d) return std::nullopt;
    out.push_back(*d);
  }
  return out;
}

std::optional<cdouble> as_complex_pair(const json& j, const std::string& path,
                                       Violations& viol) {
  if (!j.is_array() || j.size() != 2) {
    viol.add(path + ": expected [re, im]");
    return std::nullopt;
  }
  std::optional<double> re = as_double(j[0], path + "[0]", viol);
  std::optional<double> im = as_double(j[1], path + "[1]", viol);
  if (!re || !im) return std::nullopt;
  return cdouble(*re, *im);
}

std::optional<RegionSpec> as_region(const json& j, const std::string& path,
                                    Violations& viol) {
  try {
    return region_from_json(j);
  } catch (const std::exception& e) {
    viol.add(path + ": " + e.what());
    return std::nullopt;
  }
}

bool positive_strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) return false;
    if (i + 1 < v.size() && !(v[i] > v[i + 1])) return false;
  }
  return true;
}

bool finite_nonnegative(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x) || x < 0.0) return false;
  return true;
}

std::optional<FieldSpec> parse_field(const json& j, Violations& viol) {
  if (!j.is_object()) {
    viol.add("field: expected an object");
    return std::nullopt;
  }
  FieldSpec f;
  bool ok = true;
  std::set<std::string> seen;
  for (const auto& [key, value] : j.items()) {
    seen.insert(key);
    if (key == "z0") {
      auto z = as_complex_pair(value, "field.z0", viol);
      if (z) f.z0 = *z; else ok = false;
    } else if (key == "z1") {
      auto z = as_complex_pair(value, "field.z1", viol);
      if (z) f.z1 = *z; else ok = false;
    } else if (key == "nx" || key == "ny") {
      auto n = as_int(value, "field." + key, viol);
      if (n && *n >= 2) {
        (key == "nx" ? f.nx : f.ny) = *n;
      } else {
        if (n) viol.add("field." + key + ": must be >= 2");
        ok = false;
      }
    } else if (key == "levels") {
      auto lv = as_double_array(value, "field.levels", viol);
      if (lv && !lv->empty() && positive_strictly_decreasing(*lv)) {
        f.levels = *lv;
      } else {
        if (lv)
          viol.add("field.levels: must be nonempty, positive, strictly decreasing");
        ok = false;
      }
    } else {
      viol.add("field." + key + ": unknown field");
      ok = false;
    }
  }
  for (const char* req : {"z0", "z1", "nx", "ny", "levels"})
    if (!seen.count(req)) {
      viol.add(std::string("field.") + req + ": required");
      ok = false;
    }
  if (!ok) return std::nullopt;
  return f;
}

std::optional<AreaSpec> parse_area(const json& j, Violations& viol) {
  if (!j.is_object()) {
    viol.add("area: expected an object");
    return std::nullopt;
  }
  AreaSpec a;
  bool ok = true;
  std::set<std::string> seen;
  for (const auto& [key, value] : j.items()) {
    seen.insert(key);
    if (key == "epsilon") {
      auto e = as_double(value, "area.epsilon", viol);
      if (e && *e > 0.0) {
        a.epsilon = *e;
      } else {
        if (e) viol.add("area.epsilon: must be > 0");
        ok = false;
      }
    } else if (key == "region") {
      auto r = as_region(value, "area.region", viol);
      if (r) a.region = *r; else ok = false;
    } else if (key == "resolution") {
      auto n = as_int(value, "area.resolution", viol);
      if (n && *n >= 2) {
        a.resolution = *n;
      } else {
        if (n) viol.add("area.resolution: must be >= 2");
        ok = false;
      }
    } else {
      viol.add("area." + key + ": unknown field");
      ok = false;
    }
  }
  for (const char* req : {"epsilon", "region", "resolution"})
    if (!seen.count(req)) {
      viol.add(std::string("area.") + req + ": required");
      ok = false;
    }
  if (!ok) return std::nullopt;
  return a;
}

std::optional<LimitSpec> parse_limit(const json& j, Violations& viol) {
  if (!j.is_object()) {
    viol.add("limit: expected an object");
    return std::nullopt;
  }
  LimitSpec l;
  bool ok = true;
  bool saw_region = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "region") {
      saw_region = true;
      auto r = as_region(value, "limit.region", viol);
      if (r) l.region = *r; else ok = false;
    } else if (key == "eps_schedule") {
      auto sched = as_double_array(value, "limit.eps_schedule", viol);
      if (sched && sched->size() >= 2 && positive_strictly_decreasing(*sched)) {
        l.eps_schedule = *sched;
      } else {
        if (sched)
          viol.add(
              "limit.eps_schedule: needs >= 2 positive strictly decreasing "
              "values");
        ok = false;
      }
    } else {
      viol.add("limit." + key + ": unknown field");
      ok = false;
    }
  }
  if (!saw_region) {
    viol.add("limit.region: required");
    ok = false;
  }
  if (!ok) return std::nullopt;
  return l;
}

RngSpec parse_rng(const json& j, Violations& viol) {
  RngSpec spec;
  if (!j.is_object()) {
    viol.add("rng: expected an object");
    return spec;
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "seed" || key == "stream") {
      if (value.is_number_unsigned() ||
          (value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
        (key == "seed" ? spec.seed : spec.stream) = value.get<std::uint64_t>();
      } else {
        viol.add("rng." + key + ": expected a nonnegative integer");
      }
    } else {
      viol.add("rng." + key + ": unknown field");
    }
  }
  return spec;
}

struct CommandSchema {
  std::set<std::string> required;
  std::set<std::string> allowed;  // superset of required
};

const std::map<std::string, CommandSchema>& command_schema() {
  static const std::map<std::string, CommandSchema> schema = {
      {"pseudospectrum",
       {{"matrix", "field"},
        {"matrix", "field", "area", "limit", "perturb_delta", "attempts"}}},
      {"regularize",
       {{"matrix", "delta"},
        {"matrix", "delta", "attempts", "davies_epsilon"}}},
      {"verify-theorem-b",
       {{"matrix", "delta", "region"},
        {"matrix", "delta", "region", "trials"}}},
      {"tails",
       {{"law"},
        {"law", "n", "matrix", "delta", "eps_grid", "t_grid", "trials"}}},
      {"jordan-scan",
       {{"n", "delta_list"}, {"n", "delta_list", "trials"}}},
      {"bulk-profile", {{"n"}, {"n", "trials", "r_bins"}}},
      {"sde-couple",
       {{"variant", "init1", "init2", "t_final"},
        {"variant", "init1", "init2", "t_final", "steps", "runs",
         "dump_paths"}}},
      {"sde-marginal",
       {{"matrix", "variant", "t"},
        {"matrix", "variant", "t", "trials", "steps"}}},
      {"optimize-st", {{}, {}}},
  };
  return schema;
}

// Fields every command accepts.
const std::set<std::string>& global_fields() {
  static const std::set<std::string> g = {"command", "rng", "workers", "out"};
  return g;
}

// Duplicate-key detection during parse: nlohmann keeps the last duplicate
// silently, so track keys per object depth in the SAX callback.
json parse_with_duplicate_check(const std::string& text, Violations& viol) {
  std::vector<std::set<std::string>> stack;
  auto cb = [&stack, &viol](int /*depth*/, json::parse_event_t event,
                            json& parsed) {
    if (event == json::parse_event_t::object_start) {
      stack.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      stack.pop_back();
    } else if (event == json::parse_event_t::key) {
      std::string key = parsed.get<std::string>();
      if (!stack.empty() && !stack.back().insert(key).second)
        viol.add("duplicate key: " + key);
    }
    return true;
  };
  return json::parse(text, cb);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& cli_command) {
  Violations viol;
  json root;
  try {
    root = parse_with_duplicate_check(text, viol);
  } catch (const json::parse_error& e) {
    viol.add(std::string("not valid JSON: ") + e.what());
    throw ConfigError(std::move(viol.v));
  }
  if (!root.is_object()) {
    viol.add("top level: expected an object");
    throw ConfigError(std::move(viol.v));
  }

  ExperimentConfig c;
  std::set<std::string> present;

  for (const auto& [key, value] : root.items()) {
    present.insert(key);
    if (key == "command") {
      auto s = as_string(value, "command", viol);
      if (s) c.command = *s;
    } else if (key == "matrix") {
      auto s = as_string(value, "matrix", viol);
      if (s) {
        if (s->empty())
          viol.add("matrix: must be a file path or generator expression");
        else
          c.matrix = *s;
      }
    } else if (key == "delta") {
      auto d = as_double(value, "delta", viol);
      if (d) c.delta = *d;
    } else if (key == "epsilon") {
      auto d = as_double(value, "epsilon", viol);
      if (d) c.epsilon = *d;
    } else if (key == "t") {
      auto d = as_double(value, "t", viol);
      if (d) {
        if (*d < 0.0) viol.add("t: must be >= 0");
        else c.t = *d;
      }
    } else if (key == "t_final") {
      auto d = as_double(value, "t_final", viol);
      if (d) {
        if (*d < 0.0) viol.add("t_final: must be >= 0");
        else c.t_final = *d;
      }
    } else if (key == "trials" || key == "attempts" || key == "steps" ||
               key == "runs") {
      auto n = as_int(value, key, viol);
      if (n) {
        if (*n < 1) {
          viol.add(key + ": must be >= 1");
        } else {
          if (key == "trials") c.trials = *n;
          if (key == "attempts") c.attempts = *n;
          if (key == "steps") c.steps = *n;
          if (key == "runs") c.runs = *n;
        }
      }
    } else if (key == "dump_paths") {
      auto n = as_int(value, key, viol);
      if (n) {
        if (*n < 0) viol.add("dump_paths: must be >= 0");
        else c.dump_paths = *n;
      }
    } else if (key == "n") {
      auto n = as_int(value, "n", viol);
      if (n) {
        if (*n < 1) viol.add("n: must be >= 1");
        else c.n = *n;
      }
    } else if (key == "r_bins") {
      auto n = as_int(value, "r_bins", viol);
      if (n) {
        if (*n < 1) viol.add("r_bins: must be >= 1");
        else c.r_bins = *n;
      }
    } else if (key == "law") {
      auto s = as_string(value, "law", viol);
      if (s) {
        static const std::set<std::string> laws = {"smin-exact", "s1-tail",
                                                   "small-ball", "sst-real"};
        if (!laws.count(*s))
          viol.add("law: must be one of smin-exact, s1-tail, small-ball, "
                   "sst-real");
        else
          c.law = *s;
      }
    } else if (key == "variant") {
      auto s = as_string(value, "variant", viol);
      if (s) {
        if (*s != "complex" && *s != "real")
          viol.add("variant: must be \"complex\" or \"real\"");
        else
          c.variant = *s;
      }
    } else if (key == "eps_grid" || key == "t_grid") {
      auto g = as_double_array(value, key, viol);
      if (g) {
        if (g->empty() || !finite_nonnegative(*g))
          viol.add(key + ": must be a nonempty array of finite values >= 0");
        else
          (key == "eps_grid" ? c.eps_grid : c.t_grid) = *g;
      }
    } else if (key == "delta_list") {
      auto g = as_double_array(value, "delta_list", viol);
      if (g) {
        if (g->size() < 2 || !positive_strictly_decreasing(*g))
          viol.add(
              "delta_list: needs >= 2 positive strictly decreasing values");
        else
          c.delta_list = *g;
      }
    } else if (key == "init1" || key == "init2") {
      auto g = as_double_array(value, key, viol);
      if (g) {
        if (g->empty() || !positive_strictly_decreasing(*g))
          viol.add(key +
                   ": must be a nonempty positive strictly decreasing array");
        else
          (key == "init1" ? c.init1 : c.init2) = *g;
      }
    } else if (key == "region") {
      auto r = as_region(value, "region", viol);
      if (r) c.region = *r;
    } else if (key == "field") {
      auto f = parse_field(value, viol);
      if (f) c.field = *f;
    } else if (key == "area") {
      auto a = parse_area(value, viol);
      if (a) c.area = *a;
    } else if (key == "limit") {
      auto l = parse_limit(value, viol);
      if (l) c.limit = *l;
    } else if (key == "perturb_delta") {
      auto d = as_double(value, "perturb_delta", viol);
      if (d) {
        if (!(*d > 0.0 && *d < 1.0))
          viol.add("perturb_delta: must lie in (0, 1)");
        else
          c.perturb_delta = *d;
      }
    } else if (key == "davies_epsilon") {
      auto d = as_double(value, "davies_epsilon", viol);
      if (d) {
        if (!(*d > 0.0 && *d <= 1.0))
          viol.add("davies_epsilon: must lie in (0, 1]");
        else
          c.davies_epsilon = *d;
      }
    } else if (key == "rng") {
      c.rng = parse_rng(value, viol);
    } else if (key == "workers") {
      auto n = as_int(value, "workers", viol);
      if (n) {
        if (*n < 1 || *n > 4096)
          viol.add("workers: must lie in [1, 4096]");
        else
          c.workers = static_cast<int>(*n);
      }
    } else if (key == "out") {
      auto s = as_string(value, "out", viol);
      if (s) {
        if (s->empty()) viol.add("out: must be nonempty");
        else c.out = *s;
      }
    } else {
      viol.add("unknown field: " + key);
      present.erase(key);
    }
  }

  // Resolve the command, honoring an explicit CLI subcommand.
  if (!cli_command.empty()) {
    if (present.count("command") && c.command != cli_command)
      viol.add("command mismatch: config says \"" + c.command +
               "\", command line says \"" + cli_command + "\"");
    if (!present.count("command")) {
      c.command = cli_command;
      present.insert("command");
    }
  } else if (!present.count("command")) {
    viol.add("command: required");
  }

  if (present.count("command") && !c.command.empty() &&
      !is_known_command(c.command)) {
    std::string all;
    for (const std::string& k : kCommands) {
      if (!all.empty()) all += ", ";
      all += k;
    }
    viol.add("command: unknown command \"" + c.command + "\" (known: " + all +
             ")");
  }

  if (is_known_command(c.command)) {
    const CommandSchema& schema = command_schema().at(c.command);
    for (const std::string& req : schema.required)
      if (!present.count(req))
        viol.add(req + ": required by command \"" + c.command + "\"");
    for (const std::string& key : present)
      if (!global_fields().count(key) && !schema.allowed.count(key))
        viol.add(key + ": not used by command \"" + c.command + "\"");

    // Per-command numeric domains for the shared fields.
    if (c.delta &&
        (c.command == "regularize" || c.command == "verify-theorem-b")) {
      if (!(*c.delta > 0.0 && *c.delta < 1.0))
        viol.add("delta: must lie in (0, 1)");
    }
    if (c.delta && c.command == "tails" && !(*c.delta > 0.0))
      viol.add("delta: must be > 0");
    if (c.epsilon && !(*c.epsilon > 0.0)) viol.add("epsilon: must be > 0");
    if (c.command == "jordan-scan" && c.n && *c.n < 2)
      viol.add("n: jordan-scan needs n >= 2");

    if (c.command == "tails" && c.law) {
      std::set<std::string> need, forbid;
      if (*c.law == "smin-exact") {
        need = {"n", "eps_grid"};
        forbid = {"matrix", "delta", "t_grid"};
      } else if (*c.law == "s1-tail") {
        need = {"n", "t_grid"};
        forbid = {"matrix", "delta", "eps_grid"};
      } else if (*c.law == "small-ball") {
        need = {"matrix", "delta", "eps_grid"};
        forbid = {"n", "t_grid"};
      } else {  // sst-real
        need = {"matrix", "eps_grid"};
        forbid = {"n", "delta", "t_grid"};
      }
      for (const std::string& k : need)
        if (!present.count(k))
          viol.add(k + ": required by law \"" + *c.law + "\"");
      for (const std::string& k : forbid)
        if (present.count(k))
          viol.add(k + ": not used by law \"" + *c.law + "\"");
    }

    if (c.command == "sde-couple" && c.init1 && c.init2) {
      if (c.init1->size() != c.init2->size()) {
        viol.add("init1/init2: sizes must match");
      } else {
        for (std::size_t i = 0; i < c.init1->size(); ++i)
          if ((*c.init1)[i] > (*c.init2)[i]) {
            viol.add("init1/init2: init1 must be <= init2 componentwise");
            break;
          }
      }
    }
  }

  if (!viol.v.empty()) throw ConfigError(std::move(viol.v));
  return c;
}

ExperimentConfig parse_config_file(const std::string& path,
                                   const std::string& cli_command) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError({"cannot open config file: " + path});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), cli_command);
}

nlohmann::json config_echo(const ExperimentConfig& c) {
  json j;
  j["command"] = c.command;
  j["rng"] = {{"seed", c.rng.seed}, {"stream", c.rng.stream}};
  j["out"] = c.out;
  if (c.workers) j["workers"] = *c.workers;

  auto it = command_schema().find(c.command);
  const CommandSchema* schema = it != command_schema().end() ? &it->second : nullptr;
  auto allowed = [&](const char* key) {
    return schema && schema->allowed.count(key) > 0;
  };

  if (c.matrix && allowed("matrix")) j["matrix"] = *c.matrix;
  if (c.delta && allowed("delta")) j["delta"] = *c.delta;
  if (c.epsilon && allowed("epsilon")) j["epsilon"] = *c.epsilon;
  if (c.t && allowed("t")) j["t"] = *c.t;
  if (c.t_final && allowed("t_final")) j["t_final"] = *c.t_final;
  if (allowed("trials")) j["trials"] = c.trials;
  if (allowed("attempts")) j["attempts"] = c.attempts;
  if (allowed("steps")) j["steps"] = c.steps;
  if (allowed("runs")) j["runs"] = c.runs;
  if (allowed("dump_paths")) j["dump_paths"] = c.dump_paths;
  if (c.n && allowed("n")) j["n"] = *c.n;
  if (allowed("r_bins")) j["r_bins"] = c.r_bins;
  if (c.law && allowed("law")) j["law"] = *c.law;
  if (c.variant && allowed("variant")) j["variant"] = *c.variant;
  if (c.eps_grid && allowed("eps_grid")) j["eps_grid"] = *c.eps_grid;
  if (c.t_grid && allowed("t_grid")) j["t_grid"] = *c.t_grid;
  if (c.delta_list && allowed("delta_list")) j["delta_list"] = *c.delta_list;
  if (c.init1 && allowed("init1")) j["init1"] = *c.init1;
  if (c.init2 && allowed("init2")) j["init2"] = *c.init2;
  if (c.region && allowed("region")) j["region"] = region_to_json(*c.region);
  if (c.field && allowed("field")) {
    j["field"] = {{"z0", {c.field->z0.real(), c.field->z0.imag()}},
                  {"z1", {c.field->z1.real(), c.field->z1.imag()}},
                  {"nx", c.field->nx},
                  {"ny", c.field->ny},
                  {"levels", c.field->levels}};
  }
  if (c.area && allowed("area")) {
    j["area"] = {{"epsilon", c.area->epsilon},
                 {"region", region_to_json(c.area->region)},
                 {"resolution", c.area->resolution}};
  }
  if (c.limit && allowed("limit")) {
    json l = {{"region", region_to_json(c.limit->region)}};
    if (!c.limit->eps_schedule.empty())
      l["eps_schedule"] = c.limit->eps_schedule;
    j["limit"] = l;
  }
  if (c.perturb_delta && allowed("perturb_delta"))
    j["perturb_delta"] = *c.perturb_delta;
  if (c.davies_epsilon && allowed("davies_epsilon"))
    j["davies_epsilon"] = *c.davies_epsilon;
  return j;
}

}  // namespace spectral
