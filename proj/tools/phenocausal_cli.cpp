// phenocausal: exemplars, classification, discovery and verification from the shell.
//
//   phenocausal exemplar urn2 --kb0 11 --kr0 11 --rounds 1 --seed 7 --out data.csv
//   phenocausal discover --method bivariate --in data.csv
//   phenocausal verify --which boundary --trials 500 --seed 1
//
// Exit codes: 0 ok, 1 verification failure or runtime error, 2 usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phenocausal/serialize.hpp"

using namespace phenocausal;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kExemplars{"urn2",   "urnN",   "bundles",   "rabbits1", "rabbits2",
                                          "macro1", "macro2", "balltrack", "farmers"};

struct ExemplarArgs {
  std::string name;
  double kb0 = 11, kr0 = 11, k0 = -1;
  int rounds = 1;
  std::size_t n = 4;
  std::string endpoint = "type1";
  std::vector<double> bias;  // plus,minus pairs by action
  double n_rabbits = 3, food = -1, demand = -1;
  double theta = 0.2, offset = 0.5;
  double exchange = 2, elasticity = 0;
};

void add_exemplar_options(CLI::App* app, ExemplarArgs& a) {
  app->add_option("name", a.name, "exemplar name")->required()->check(CLI::IsMember(kExemplars));
  app->add_option("--kb0", a.kb0, "urn2: initial blue balls")->capture_default_str();
  app->add_option("--kr0", a.kr0, "urn2: initial red balls")->capture_default_str();
  app->add_option("--k0", a.k0, "urnN/bundles: initial balls per type (default 12 / 5)");
  app->add_option("--rounds", a.rounds, "urn rounds")->capture_default_str()->check(CLI::NonNegativeNumber);
  app->add_option("--n", a.n, "urnN/bundles: number of ball types")->capture_default_str()->check(CLI::Range(2, 12));
  app->add_option("--endpoint", a.endpoint, "urnN: type1 or typeN")->check(CLI::IsMember({"type1", "typeN"}));
  app->add_option("--bias", a.bias, "coin biases plus,minus per action, or one pair for all")->delimiter(',');
  app->add_option("--rabbits", a.n_rabbits, "rabbits: number of rabbits")->capture_default_str();
  app->add_option("--food", a.food, "rabbits: food supply (default 1000 / 60)");
  app->add_option("--demand", a.demand, "rabbits: demand per rabbit (default 1 / 100)");
  app->add_option("--theta", a.theta, "balltrack: inclination")->capture_default_str();
  app->add_option("--offset", a.offset, "balltrack: barrier offset")->capture_default_str();
  app->add_option("--exchange", a.exchange, "farmers: exchange factor")->capture_default_str();
  app->add_option("--elasticity", a.elasticity, "farmers: demand elasticity")->capture_default_str();
}

std::vector<CoinBias> biases(const std::vector<double>& v) {
  if (v.size() % 2) throw UsageError("--bias takes plus,minus pairs");
  std::vector<CoinBias> out;
  for (std::size_t i = 0; i < v.size(); i += 2) out.push_back({v[i], v[i + 1]});
  return out;
}

Exemplar make_exemplar(const ExemplarArgs& a, std::uint64_t seed, bool exact) {
  const UrnOptions opt{0.3, exact};
  const auto& nm = a.name;
  if (nm == "urn2") return urn_bivariate(a.kb0, a.kr0, a.rounds, biases(a.bias), seed, opt);
  if (nm == "urnN")
    return urn_chain(a.n, std::vector<double>(a.n, a.k0 < 0 ? 12.0 : a.k0), a.rounds, biases(a.bias), seed,
                     a.endpoint == "typeN" ? Endpoint::TypeN : Endpoint::TypeOne, opt);
  if (nm == "bundles")
    return bundles_chain(a.n, a.rounds, biases(a.bias), seed, std::vector<double>(a.n, a.k0 < 0 ? 5.0 : a.k0), opt);
  if (nm == "rabbits1") return rabbits(a.n_rabbits, a.food < 0 ? 1000 : a.food, a.demand < 0 ? 1 : a.demand, 1);
  if (nm == "rabbits2") return rabbits(a.n_rabbits, a.food < 0 ? 60 : a.food, a.demand < 0 ? 100 : a.demand, 2);
  if (nm == "macro1") return macro_pair(MacroChoice::ActOnOnes);
  if (nm == "macro2") return macro_pair(MacroChoice::ActOnTwos);
  if (nm == "balltrack") return ball_track(a.theta, a.offset, seed);
  if (nm == "farmers") return farmers(a.exchange, a.elasticity);
  throw UsageError("unknown exemplar '" + nm + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Dataset load_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  return read_csv(f);
}

std::string csv_of(const Dataset& d) {
  std::ostringstream s;
  write_csv(d, s);
  return s.str();
}

// ---------------------------------------------------------------------------

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  bool text = false;
  std::size_t jobs = 1;
};

int run_exemplar(const ExemplarArgs& a, const Common& c, std::size_t rows) {
  auto ex = make_exemplar(a, c.seed, false);
  auto doc = document("exemplar", c.seed, {{"exemplar", to_json(ex)}});
  if (!c.out.empty()) {
    if (!ex.sampler) throw UsageError("exemplar '" + ex.name + "' has no sampler");
    write_text(c.out, csv_of(ex.sampler(rows, c.seed)));
    doc["dataset"] = {{"path", std::filesystem::path(c.out).filename().string()}, {"rows", rows}};
    auto sidecar = std::filesystem::path(c.out).replace_extension(".json").string();
    write_text(sidecar, dump(doc));
  }
  std::cout << dump(doc);
  return 0;
}

Json classification(const Exemplar& ex, const std::optional<Dag>& graph, const std::string& mode, std::size_t trials,
                    std::uint64_t seed) {
  Json reports = Json::array();
  Json valid = Json::array();
  std::optional<std::string> direction;
  const bool stat = (mode == "statistical" || mode == "both") && ex.baseline;
  const bool unit = (mode == "unit" || mode == "both") && ex.units;
  if (!stat && !unit) throw UsageError("exemplar '" + ex.name + "' has no " + mode + " action suite");
  std::optional<UnitEvidence> ev;
  if (unit) ev = collect_unit_evidence(*ex.units, ex.unit_actions, trials, seed);
  if (graph) {
    if (stat) reports.push_back(to_json(classify_statistical(*graph, *ex.baseline, ex.statistical)));
    if (unit) reports.push_back(to_json(classify_unit(*graph, *ev)));
  }
  if (ex.variables.size() <= kDefaultValidGraphCap) {
    auto list = [&](const std::vector<GraphVerdict>& v, const char* m) {
      Json gs = Json::array();
      for (const auto& x : v) gs.push_back(to_json(x.graph));
      valid.push_back({{"mode", m}, {"graphs", gs}});
      if (ex.variables.size() == 2) direction = to_string(direction_from(v));
    };
    if (stat) list(valid_graphs(*ex.baseline, ex.statistical), "statistical");
    if (unit) list(valid_graphs(*ev), "unit");
  }
  Json j{{"exemplar", ex.name}, {"reports", reports}, {"valid_graphs", valid}};
  if (direction) j["direction"] = *direction;
  return j;
}

int run_classify(const ExemplarArgs& a, const Common& c, const std::string& graph_text, const std::string& mode,
                 std::size_t trials) {
  auto ex = make_exemplar(a, c.seed, true);
  std::optional<Dag> g = ex.ground_truth;
  if (!graph_text.empty()) g = parse_graph(ex.variables, graph_text);
  auto doc = document("classification", c.seed, classification(ex, g, mode, trials, c.seed));
  if (!c.out.empty()) write_text(c.out, dump(doc));
  std::cout << dump(doc);
  return 0;
}

int run_discover(const Common& c, const std::string& method, const std::vector<std::string>& inputs,
                 const std::string& graph_text, const std::string& x, const std::string& y, double prune,
                 double alpha) {
  Json payload{{"method", method}};
  if (method == "bivariate") {
    if (inputs.size() != 1) throw UsageError("bivariate discovery takes one --in file");
    auto d = load_csv(inputs[0]);
    if (d.names.size() < 2) throw UsageError("need at least two columns");
    const auto xs = x.empty() ? d.names[0] : x, ys = y.empty() ? d.names[1] : y;
    auto fit = lingam_bivariate(d, xs, ys);
    payload["result"] = to_json(fit);
  } else if (method == "multivariate") {
    if (inputs.size() != 1) throw UsageError("multivariate discovery takes one --in file");
    auto r = lingam_multivariate(load_csv(inputs[0]), prune);
    r.seed = c.seed;
    payload["result"] = to_json(r);
  } else {
    if (inputs.size() < 2) throw UsageError("shift localization needs two or more --in files");
    std::vector<Dataset> envs;
    for (const auto& p : inputs) envs.push_back(load_csv(p));
    if (graph_text.empty()) throw UsageError("shift localization needs --graph");
    auto g = parse_graph(envs[0].names, graph_text);
    Json res = Json::array();
    for (const auto& e : localize_mechanism_change(envs, g, alpha)) res.push_back(to_json(e));
    payload["graph"] = to_json(g);
    payload["alpha"] = alpha;
    payload["environments"] = res;
  }
  Json files = Json::array();
  for (const auto& p : inputs) files.push_back(std::filesystem::path(p).filename().string());
  payload["inputs"] = files;
  auto doc = document("discovery", c.seed, payload);
  if (!c.out.empty()) write_text(c.out, dump(doc));
  std::cout << dump(doc);
  return 0;
}

std::string verify_text(const VerificationReport& rep) {
  std::ostringstream s;
  s << "verification: " << (rep.pass() ? "PASS" : "FAIL") << " (" << rep.trials << " trials)\n";
  for (const auto& [k, t] : rep.tally)
    s << "  " << k << ": " << t.run << " run, " << t.rejected << " rejected, " << t.failed << " failed\n";
  for (const auto& f : rep.failures)
    s << "  FAIL " << f.verifier << " trial " << f.trial << " seed " << f.seed << ": " << f.detail << "\n    "
      << f.instance << "\n";
  for (const auto& n : rep.notes) s << "  note " << n << "\n";
  return s.str();
}

int run_verify(const Common& c, const std::string& which, std::optional<std::size_t> trials, bool entries) {
  SuiteConfig cfg;
  cfg.jobs = c.jobs;
  if (trials) cfg.prop_trials = cfg.boundary_trials = cfg.embedding_trials = cfg.backdoor_trials = *trials;
  std::vector<std::string> list;
  if (which != "all") list.push_back(which);
  auto rep = randomized_suite(cfg, c.seed, list);
  auto doc = document("verification", c.seed, to_json(rep, entries));
  doc["which"] = which;
  if (!c.out.empty()) write_text(c.out, dump(doc));
  std::cout << (c.text ? verify_text(rep) : dump(doc));
  return rep.pass() ? 0 : 1;
}

std::string report_text(const Json& d) {
  std::ostringstream s;
  s << "exemplar " << d["exemplar"]["name"].get<std::string>() << " (seed " << d["seed"] << ")\n";
  const auto& gt = d["exemplar"]["ground_truth"];
  s << "  ground truth: ";
  if (gt.is_null()) {
    s << "none declared\n";
  } else {
    std::string e;
    for (const auto& x : gt["edges"]) e += (e.empty() ? "" : ", ") + x[0].get<std::string>() + "->" + x[1].get<std::string>();
    s << (e.empty() ? "(no edges)" : e) << "\n";
  }
  for (const auto& r : d["classification"]["reports"]) {
    s << "  " << r["mode"].get<std::string>() << " classification: " << (r["valid"].get<bool>() ? "valid" : "invalid")
      << "\n";
    for (const auto& v : r["verdicts"]) {
      s << "    " << v["action"].get<std::string>() << ": " << v["kind"].get<std::string>();
      std::string nodes;
      for (const auto& n : v["nodes"]) nodes += (nodes.empty() ? "" : ",") + n.get<std::string>();
      if (!nodes.empty()) s << " " << nodes;
      if (v.contains("reason")) s << " (" << v["reason"].get<std::string>() << ")";
      s << "\n";
    }
  }
  for (const auto& v : d["classification"]["valid_graphs"])
    s << "  valid graphs (" << v["mode"].get<std::string>() << "): " << v["graphs"].size() << "\n";
  if (d["classification"].contains("direction"))
    s << "  direction: " << d["classification"]["direction"].get<std::string>() << "\n";
  if (d.contains("discovery")) {
    const auto& r = d["discovery"];
    s << "  discovery (" << r["method"].get<std::string>() << ", " << r["rows"] << " rows): ";
    if (r["method"] == "bivariate")
      s << r["result"]["verdict"].get<std::string>() << " slope " << r["result"]["coefficient"].dump() << "\n";
    else {
      std::string e;
      for (const auto& x : r["result"]["dag"]["edges"])
        e += (e.empty() ? "" : ", ") + x[0].get<std::string>() + "->" + x[1].get<std::string>();
      s << (e.empty() ? "(no edges)" : e) << "\n";
    }
    if (r.contains("matches_ground_truth"))
      s << "  matches ground truth: " << (r["matches_ground_truth"].get<bool>() ? "yes" : "no") << "\n";
  }
  return s.str();
}

int run_report(const ExemplarArgs& a, const Common& c, std::size_t rows, std::size_t trials) {
  auto ex = make_exemplar(a, c.seed, true);
  Json payload{{"exemplar", to_json(ex)},
               {"classification", classification(ex, ex.ground_truth, ex.baseline ? "statistical" : "unit", trials, c.seed)}};
  if (ex.sampler && ex.linear) {
    auto d = ex.sampler(rows, c.seed);
    Json disc{{"rows", rows}};
    if (d.names.size() == 2) {
      auto fit = lingam_bivariate(d, d.names[0], d.names[1]);
      disc["method"] = "bivariate";
      disc["result"] = to_json(fit);
      if (ex.ground_truth) {
        const auto& g = *ex.ground_truth;
        const bool xy = g.has_edge(0, 1);
        disc["matches_ground_truth"] = (xy && fit.verdict == LingamVerdict::XcausesY) ||
                                       (!xy && g.has_edge(1, 0) && fit.verdict == LingamVerdict::YcausesX);
      }
    } else {
      auto r = lingam_multivariate(d);
      r.seed = c.seed;
      disc["method"] = "multivariate";
      disc["result"] = to_json(r);
      if (ex.ground_truth) {
        auto ge = ex.ground_truth->named_edges(), re = r.dag.named_edges();
        std::sort(ge.begin(), ge.end());
        std::sort(re.begin(), re.end());
        disc["matches_ground_truth"] = ge == re;
      }
    }
    payload["discovery"] = disc;
  }
  auto doc = document("report", c.seed, payload);
  if (!c.out.empty()) write_text(c.out, dump(doc));
  std::cout << (c.text ? report_text(doc) : dump(doc));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phenocausal: actions, causal graphs and their checks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common c;
  ExemplarArgs ea;
  std::size_t rows = 10000, trials_unit = kDefaultUnitTrials;

  auto* ex = app.add_subcommand("exemplar", "write an exemplar description and, with --out, a CSV sample");
  add_exemplar_options(ex, ea);
  ex->add_option("--seed", c.seed, "random seed")->required();
  ex->add_option("--rows", rows, "sample size")->capture_default_str()->check(CLI::PositiveNumber);
  ex->add_option("--out", c.out, "CSV path; the description goes next to it with a .json extension");

  std::string graph_text, mode = "both";
  auto* cl = app.add_subcommand("classify", "classify the exemplar's actions against a graph");
  add_exemplar_options(cl, ea);
  cl->add_option("--seed", c.seed, "random seed")->required();
  cl->add_option("--graph", graph_text, "graph as A->B,B->C (default: the exemplar's ground truth)");
  cl->add_option("--mode", mode, "statistical, unit or both")->check(CLI::IsMember({"statistical", "unit", "both"}));
  cl->add_option("--unit-trials", trials_unit, "unit-mode sampled states")->capture_default_str();
  cl->add_option("--out", c.out, "also write the JSON here");

  std::string method = "bivariate", x, y;
  std::vector<std::string> inputs;
  double prune = kPruneThreshold, alpha = kDefaultShiftAlpha;
  auto* di = app.add_subcommand("discover", "structure recovery from CSV data");
  di->add_option("--method", method, "bivariate, multivariate or shift")
      ->check(CLI::IsMember({"bivariate", "multivariate", "shift"}));
  di->add_option("--in", inputs, "CSV input; repeat for environments (shift)")->required()->check(CLI::ExistingFile);
  di->add_option("--graph", graph_text, "shift: graph as A->B,B->C");
  di->add_option("-x", x, "bivariate: first column (default: first in file)");
  di->add_option("-y", y, "bivariate: second column (default: second in file)");
  di->add_option("--prune", prune, "multivariate: standardized coefficient threshold")->capture_default_str();
  di->add_option("--alpha", alpha, "shift: test level")->capture_default_str();
  di->add_option("--seed", c.seed, "recorded in the output; discovery itself is deterministic");
  di->add_option("--out", c.out, "also write the JSON here");

  std::string which = "all";
  std::optional<std::size_t> trials;
  bool entries = false;
  auto* ve = app.add_subcommand("verify", "randomized exact checks");
  ve->add_option("--which", which, "prop1, embedding, boundary, backdoor or all")
      ->check(CLI::IsMember({"prop1", "embedding", "boundary", "backdoor", "all"}));
  ve->add_option("--trials", trials, "trials per verifier (default: suite defaults)");
  ve->add_option("--seed", c.seed, "random seed")->required();
  ve->add_option("--jobs", c.jobs, "worker threads")->capture_default_str()->check(CLI::Range(1, 256));
  ve->add_flag("--entries", entries, "include every trial in the JSON");
  ve->add_flag("--text", c.text, "human-readable summary on stdout instead of JSON");
  ve->add_option("--out", c.out, "also write the JSON here");

  auto* re = app.add_subcommand("report", "classification and discovery summary for an exemplar");
  add_exemplar_options(re, ea);
  re->add_option("--seed", c.seed, "random seed")->required();
  re->add_option("--rows", rows, "sample size for discovery")->capture_default_str()->check(CLI::PositiveNumber);
  re->add_option("--unit-trials", trials_unit, "unit-mode sampled states")->capture_default_str();
  re->add_flag("--text", c.text, "human-readable summary on stdout instead of JSON");
  re->add_option("--out", c.out, "also write the JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ex) return run_exemplar(ea, c, rows);
    if (*cl) return run_classify(ea, c, graph_text, mode, trials_unit);
    if (*di) return run_discover(c, method, inputs, graph_text, x, y, prune, alpha);
    if (*ve) return run_verify(c, which, trials, entries);
    if (*re) return run_report(ea, c, rows, trials_unit);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
