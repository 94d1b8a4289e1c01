#include "hyperfix/bench.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hyperfix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DiagnosticError("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::vector<Value> json_values(const json& arr, Sort sort) {
  std::vector<Value> out;
  for (const auto& v : arr) {
    switch (sort) {
      case Sort::Int: out.push_back(Value::of_int(v.get<int64_t>())); break;
      case Sort::Bool: out.push_back(Value::of_bool(v.get<bool>())); break;
      case Sort::String: out.push_back(Value::of_string(v.get<std::string>())); break;
    }
  }
  return out;
}

}  // namespace

std::string domain_to_json(const FiniteDomain& dom) {
  nlohmann::ordered_json j;
  j["ints"] = dom.ints;
  j["strings"] = dom.strings;
  nlohmann::ordered_json vars = nlohmann::ordered_json::object();
  for (const auto& [name, vals] : dom.perVar) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& v : vals) {
      switch (v.sort) {
        case Sort::Int: arr.push_back(v.i); break;
        case Sort::Bool: arr.push_back(v.i != 0); break;
        case Sort::String: arr.push_back(v.s); break;
      }
    }
    vars[name] = std::move(arr);
  }
  j["vars"] = std::move(vars);
  return j.dump(2);
}

FiniteDomain domain_from_json(const std::string& text) {
  json j = json::parse(text);
  FiniteDomain dom;
  if (j.contains("ints")) {
    dom.ints.clear();
    for (const auto& v : j["ints"]) dom.ints.push_back(v.get<int64_t>());
  }
  if (j.contains("strings")) {
    dom.strings.clear();
    for (const auto& v : j["strings"]) dom.strings.push_back(v.get<std::string>());
  }
  if (j.contains("vars")) {
    for (auto it = j["vars"].begin(); it != j["vars"].end(); ++it) {
      std::vector<Value> vals;
      for (const auto& v : *it) {
        if (v.is_number_integer()) vals.push_back(Value::of_int(v.get<int64_t>()));
        else if (v.is_boolean()) vals.push_back(Value::of_bool(v.get<bool>()));
        else vals.push_back(Value::of_string(v.get<std::string>()));
      }
      dom.perVar[it.key()] = std::move(vals);
    }
  }
  return dom;
}

BenchInstance load_instance(const std::string& dir) {
  BenchInstance inst;
  inst.dir = dir;
  inst.name = fs::path(dir).filename().string();
  inst.program = parse_program(slurp(dir + "/program.imp"));
  inst.formula = parse_formula(slurp(dir + "/property.hltl"), inst.program.vars);

  json cfg = json::parse(slurp(dir + "/bench.json"));
  inst.suite = cfg.value("suite", "misc");
  inst.iterative = cfg.value("mode", std::string("iterative")) == "iterative";
  inst.maxTermSize = cfg.value("max_term_size", 14);

  RepairConfig& rc = inst.config;
  rc.bounds.unrollPerLoop = cfg.value("unroll", 3);
  rc.maxIterations = cfg.value("max_iters", 10);
  rc.timeoutSeconds = cfg.value("timeout", 120.0);

  if (cfg.contains("domain")) {
    const json& d = cfg["domain"];
    if (d.contains("ints")) {
      rc.domain.ints.clear();
      for (const auto& v : d["ints"]) rc.domain.ints.push_back(v.get<int64_t>());
    }
    if (d.contains("strings")) {
      rc.domain.strings.clear();
      if (d["strings"].is_string() && d["strings"] == "lexicon") {
        rc.domain.strings = FiniteDomain::auto_lexicon(inst.program, &inst.formula);
      } else {
        for (const auto& v : d["strings"]) rc.domain.strings.push_back(v.get<std::string>());
      }
    } else {
      rc.domain.strings = FiniteDomain::auto_lexicon(inst.program, &inst.formula);
    }
    if (d.contains("vars")) {
      for (auto it = d["vars"].begin(); it != d["vars"].end(); ++it) {
        int vi = inst.program.var_index(it.key());
        if (vi < 0) throw DiagnosticError("domain override for undeclared variable " + it.key());
        rc.domain.perVar[it.key()] = json_values(*it, inst.program.vars[vi].sort);
      }
    }
  } else {
    rc.domain.strings = FiniteDomain::auto_lexicon(inst.program, &inst.formula);
  }

  if (cfg.contains("grammar_literals")) {
    const json& g = cfg["grammar_literals"];
    if (g.contains("ints"))
      for (const auto& v : g["ints"]) rc.extraLiterals.ints.push_back(v.get<int64_t>());
    if (g.contains("strings"))
      for (const auto& v : g["strings"])
        rc.extraLiterals.strings.push_back(v.get<std::string>());
    if (g.contains("ints_full")) {
      rc.intPool = std::vector<int64_t>{};
      for (const auto& v : g["ints_full"]) rc.intPool->push_back(v.get<int64_t>());
    }
    if (g.contains("strings_full")) {
      rc.stringPool = std::vector<std::string>{};
      for (const auto& v : g["strings_full"]) rc.stringPool->push_back(v.get<std::string>());
    }
  }
  if (cfg.contains("args")) {
    for (auto it = cfg["args"].begin(); it != cfg["args"].end(); ++it) {
      std::vector<std::string> names;
      for (const auto& v : *it) names.push_back(v.get<std::string>());
      rc.argOverrides[std::stoi(it.key())] = std::move(names);
    }
  }
  if (cfg.contains("grammars")) {
    // Per-location grammar override written as the two grammar sections of a
    // synth-fun; wrapped here into a dummy synth-fun and parsed with the
    // SyGuS reader. Parameters are the location's inferred arguments.
    Skeleton sk = instrument(inst.program, &inst.formula, rc.argOverrides);
    for (auto it = cfg["grammars"].begin(); it != cfg["grammars"].end(); ++it) {
      int loc = std::stoi(it.key());
      if (loc < 0 || loc >= static_cast<int>(sk.funs.size()))
        throw DiagnosticError("grammar override for unknown location " + it.key());
      const SynthFun& f = sk.funs[loc];
      std::string wrapper = "(synth-fun g (";
      for (size_t i = 0; i < f.params.size(); ++i) {
        if (i) wrapper += ' ';
        wrapper += "(" + f.params[i].name + " " + to_string(f.params[i].sort) + ")";
      }
      wrapper += ") " + std::string(to_string(f.ret)) + "\n" + it->get<std::string>() + ")\n";
      wrapper += "(check-synth)\n";
      SygusProblem parsed = parse_sygus(wrapper);
      rc.grammarOverrides[loc] = parsed.funs.at(0).grammar;
    }
  }

  if (cfg.contains("expect")) {
    if (cfg["expect"].contains("iterations"))
      inst.expectIterations = cfg["expect"]["iterations"].get<int>();
    if (cfg["expect"].contains("size")) inst.expectSize = cfg["expect"]["size"].get<int>();
  }

  if (fs::exists(dir + "/expected.imp"))
    inst.expected = parse_program(slurp(dir + "/expected.imp"));
  return inst;
}

std::vector<std::string> suite_instances(const std::string& corpusRoot, const std::string& suite) {
  std::string root = corpusRoot + "/" + suite;
  if (!fs::is_directory(root)) throw DiagnosticError("no such suite directory: " + root);
  std::vector<std::pair<int, std::string>> found;
  for (const auto& e : fs::directory_iterator(root)) {
    if (!e.is_directory()) continue;
    std::string dir = e.path().string();
    if (!fs::exists(dir + "/bench.json")) continue;
    int order = 1000;
    try {
      json cfg = json::parse(slurp(dir + "/bench.json"));
      order = cfg.value("order", 1000);
    } catch (...) {
    }
    found.emplace_back(order, dir);
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto& [o, d] : found) out.push_back(d);
  return out;
}

BenchResult run_instance(const BenchInstance& inst, const std::string& solverCmdTemplate,
                         const std::string& runRoot) {
  BenchResult res;
  res.name = inst.name;

  RepairConfig cfg = inst.config;
  cfg.runDir = runRoot + "/" + inst.name;
  fs::create_directories(cfg.runDir);
  std::string domFile = cfg.runDir + "/domain.json";
  {
    std::ofstream f(domFile);
    f << domain_to_json(cfg.domain);
  }
  std::string cmd = solverCmdTemplate;
  auto replace_all = [&](const std::string& key, const std::string& val) {
    size_t pos;
    while ((pos = cmd.find(key)) != std::string::npos) cmd.replace(pos, key.size(), val);
  };
  replace_all("{domain}", domFile);
  replace_all("{maxsize}", std::to_string(inst.maxTermSize));
  replace_all("{timeout}", std::to_string(static_cast<int>(cfg.timeoutSeconds)));
  cfg.solverCmd = cmd;

  res.report = inst.iterative ? iterative_repair(inst.program, inst.formula, cfg)
                              : direct_repair(inst.program, inst.formula, cfg);

  if (inst.expectIterations) {
    res.expectationsChecked = true;
    if (res.report.improvementIterations != *inst.expectIterations) {
      res.expectationsMet = false;
      res.note += "expected " + std::to_string(*inst.expectIterations) + " iterations, got " +
                  std::to_string(res.report.improvementIterations) + "; ";
    }
  }
  if (inst.expectSize) {
    res.expectationsChecked = true;
    if (static_cast<int>(res.report.solutionSize) != *inst.expectSize) {
      res.expectationsMet = false;
      res.note += "expected solution size " + std::to_string(*inst.expectSize) + ", got " +
                  std::to_string(res.report.solutionSize) + "; ";
    }
  }
  return res;
}

std::string bench_table(const std::vector<BenchResult>& results) {
  std::ostringstream os;
  os << "Instance            #Iter  #Locations       t    Size  Status\n";
  for (const auto& r : results) {
    char buf[256];
    const char* status = r.report.outcome == RepairReport::Repaired          ? "repaired"
                         : r.report.outcome == RepairReport::NoRepairNeeded  ? "no-repair-needed"
                         : r.report.outcome == RepairReport::NoRepairInGrammar
                             ? "no-repair-in-grammar"
                             : "solver-failed";
    std::snprintf(buf, sizeof(buf), "%-18s %6d %10d %7.1fs %7zu  %s%s%s", r.name.c_str(),
                  r.report.improvementIterations, r.report.locations, r.report.totalSeconds,
                  r.report.solutionSize, status, r.note.empty() ? "" : "  !! ", r.note.c_str());
    os << buf << "\n";
  }
  return os.str();
}

}  // namespace hyperfix
