// cak: command-line front end for the causal abstraction checks.
//
// Reports go to stdout as JSON, a one-line summary to stderr. Exit codes:
// 0 holds / ok, 1 fails, 2 bad input.

#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cak/abstraction.hpp"
#include "cak/corpus.hpp"
#include "cak/errors.hpp"
#include "cak/io.hpp"
#include "cak/transform.hpp"

using namespace cak;
namespace fs = std::filesystem;

namespace {

struct Options {
  bool quiet = false;
  bool timing = false;
  std::optional<std::size_t> max_interventions;
  std::optional<std::size_t> max_contexts;

  Limits limits() const {
    Limits l = Limits::from_environment();
    if (max_interventions) l.max_interventions = *max_interventions;
    if (max_contexts) l.max_contexts = *max_contexts;
    return l;
  }
};

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr))
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < length; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Collects input files with their digests, in the order they are read.
class Inputs {
 public:
  Json load(const std::string& role, const std::string& path) {
    std::string bytes = read_file(path);
    record_[role] = {{"path", path}, {"sha256", sha256_hex(bytes)}};
    return parse_json_text(bytes, path);
  }
  const Json& record() const { return record_; }

 private:
  Json record_ = Json::object();
};

// Reads "U1=0,U2=1" as a total assignment over `space`.
std::vector<Value> parse_assignment(const std::string& text, const Space& space) {
  Intervention parsed = Intervention::parse(text);
  std::vector<Value> out(space.arity());
  for (std::size_t k = 0; k < space.arity(); ++k) {
    const auto& name = space.variables()[k].name;
    auto v = parsed.value(name);
    if (!v) throw InputError("no value given for " + name);
    if (!space.in_domain(k, *v))
      throw InputError("value " + std::to_string(*v) + " is outside the domain of " + name);
    out[k] = *v;
  }
  for (const auto& name : parsed.variables())
    if (!space.position(name)) throw InputError("unknown variable '" + name + "'");
  return out;
}

class Runner {
 public:
  Runner(const Options& options, std::string command)
      : options_(options), command_(std::move(command)),
        start_(std::chrono::steady_clock::now()) {}

  Inputs inputs;

  // Prints the report and returns the exit code.
  int finish(Json body, int code, const std::string& summary) {
    Json out = {{"command", command_}, {"inputs", inputs.record()}};
    for (auto& [k, v] : body.items()) out[k] = v;
    if (options_.timing) {
      auto elapsed = std::chrono::steady_clock::now() - start_;
      out["timing"] = {
          {"elapsed_ms",
           std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()}};
    }
    std::cout << out.dump(2) << '\n';
    if (!options_.quiet) std::cerr << command_ << ": " << summary << '\n';
    return code;
  }

  int fail_input(const std::string& message) {
    return finish({{"error", message}}, 2, "error: " + message);
  }

 private:
  const Options& options_;
  std::string command_;
  std::chrono::steady_clock::time_point start_;
};

// Runs `body`, mapping input problems to exit code 2.
template <class F>
int guarded(Runner& runner, F&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    return runner.fail_input(e.what());
  } catch (const EvaluationError& e) {
    return runner.fail_input(std::string("evaluation failed: ") + e.what());
  }
}

CausalModel load_model(Runner& r, const std::string& role, const std::string& path,
                       const Limits& limits) {
  CausalModel m = model_from_json(r.inputs.load(role, path));
  try {
    require_valid(m, limits);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
  return m;
}

Json verdict_json(const CheckReport& report, bool with_witness) {
  Json out = {{"verdict", report.holds ? "holds" : "fails"}};
  if (!report.holds) out["condition"] = report.condition;
  out["summary"] = report.summary;
  if (!report.holds && !report.counterexample.is_null())
    out["counterexample"] = report.counterexample;
  if (report.holds && with_witness && !report.witness.is_null())
    out["witness"] = report.witness;
  return out;
}

struct CheckArgs {
  std::string kind, low, high, tau, omega, partition;
  std::vector<std::string> dists;
  bool witness = false;
  bool correspondents = false;
};

int run_check(const Options& options, const CheckArgs& a) {
  Runner runner(options, "check " + a.kind);
  return guarded(runner, [&] {
    Limits limits = options.limits();
    CausalModel low = load_model(runner, "low", a.low, limits);
    CausalModel high = load_model(runner, "high", a.high, limits);
    StateMap tau(variable_map_from_json(runner.inputs.load("tau", a.tau),
                                        low.signature().states(),
                                        high.signature().states(), limits));
    auto need_omega = [&] {
      if (a.omega.empty()) throw InputError("check " + a.kind + " needs --omega");
      return intervention_map_from_json(runner.inputs.load("omega", a.omega));
    };

    CheckReport report;
    Json extra = Json::object();
    if (a.kind == "exact") {
      auto omega = need_omega();
      if (a.dists.size() != 2) throw InputError("check exact needs --dists LOW HIGH");
      auto dl = distribution_from_json(runner.inputs.load("low_distribution", a.dists[0]), low);
      auto dh = distribution_from_json(runner.inputs.load("high_distribution", a.dists[1]), high);
      report = check_exact(low, dl, high, dh, tau, omega, limits);
    } else if (a.kind == "uniform") {
      auto omega = need_omega();
      report = check_uniform(low, high, tau, omega, limits);
      auto low_list = low.allowed_interventions(limits);
      if (a.correspondents) {
        SearchOptions search{.list_correspondents = true};
        report = find_compatible_tau_u(low, high, tau, omega, low_list, search, limits);
      }
      auto check = check_omega(omega, low_list, high.allowed_interventions(limits));
      extra["omega_strictly_order_preserving"] = check.strictly_order_preserving;
    } else if (a.kind == "abstraction") {
      report = check_tau_abstraction(low, high, tau, limits);
    } else if (a.kind == "strong") {
      report = check_strong_abstraction(low, high, tau, limits);
    } else if (a.kind == "constructive") {
      if (a.partition.empty()) {
        auto search = search_constructive_partition(low, high, tau, limits);
        report = std::move(search.report);
        if (search.partition) extra["partition"] = partition_json(*search.partition);
      } else {
        auto partition = partition_from_json(runner.inputs.load("partition", a.partition), high);
        report = check_constructive(low, high, tau, partition, std::nullopt, limits);
      }
    } else {
      throw InputError("unknown check '" + a.kind + "'");
    }
    Json body = verdict_json(report, a.witness);
    for (auto& [k, v] : extra.items()) body[k] = v;
    return runner.finish(body, report.holds ? 0 : 1,
                         (report.holds ? "holds: " : "fails: ") + report.summary);
  });
}

int run_solve(const Options& options, const std::string& model_path,
              const std::string& context, const std::string& intervene) {
  Runner runner(options, "solve");
  return guarded(runner, [&] {
    Limits limits = options.limits();
    CausalModel m = load_model(runner, "model", model_path, limits);
    Context u{parse_assignment(context, m.signature().contexts())};
    Intervention i = Intervention::parse(intervene);
    EndoState s = solve_under(m, u, i);
    Json body = {{"context", assignment_json(m.signature().contexts(), u.values)},
                 {"intervention", intervention_json(i)},
                 {"state", assignment_json(m.signature().states(), s.values)}};
    return runner.finish(body, 0, describe(m, s));
  });
}

int run_derive_omega(const Options& options, const std::string& low_path,
                     const std::string& high_path, const std::string& tau_path,
                     const std::optional<std::string>& intervention) {
  Runner runner(options, "derive-omega");
  return guarded(runner, [&] {
    Limits limits = options.limits();
    CausalModel low = load_model(runner, "low", low_path, limits);
    CausalModel high = load_model(runner, "high", high_path, limits);
    StateMap tau(variable_map_from_json(runner.inputs.load("tau", tau_path),
                                        low.signature().states(),
                                        high.signature().states(), limits));
    if (intervention) {
      Intervention i = Intervention::parse(*intervention);
      auto image = derive_omega_tau(tau, i, limits);
      Json body = {{"intervention", intervention_json(i)},
                   {"defined", image.has_value()},
                   {"image", image ? intervention_json(*image) : Json()}};
      return runner.finish(body, 0,
                           "{" + i.to_string() + "} ↦ " +
                               (image ? "{" + image->to_string() + "}" : "undefined"));
    }
    auto induced = compute_induced_sets(low, high, tau, limits);
    Json body = {{"omega_tau", intervention_map_to_json(induced.omega)},
                 {"induced_low", interventions_json(induced.low)},
                 {"induced_high", interventions_json(induced.high)},
                 {"undefined", interventions_json(induced.undefined)}};
    return runner.finish(body, 0,
                         "ω_τ is defined on " + std::to_string(induced.low.size()) +
                             " low interventions and induces " +
                             std::to_string(induced.high.size()) + " high ones");
  });
}

std::string uev_path(const std::string& path) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + ".uev.json")).string();
}

int run_to_uev(const Options& options, const std::string& model_path,
               const std::string& dist_path, std::string out_model, std::string out_dist) {
  Runner runner(options, "to-uev");
  return guarded(runner, [&] {
    Limits limits = options.limits();
    CausalModel m = load_model(runner, "model", model_path, limits);
    auto d = distribution_from_json(runner.inputs.load("distribution", dist_path), m);
    auto [uev_model, uev_dist] = to_uev(m, d, limits);
    auto uev = check_uev(uev_model, limits);
    auto eq = equivalent(m, d, uev_model, uev_dist, std::nullopt, limits);
    if (out_model.empty()) out_model = uev_path(model_path);
    if (out_dist.empty()) out_dist = uev_path(dist_path);
    Json model_json = model_to_json(uev_model);
    Json dist_json = distribution_to_json(uev_model, uev_dist);
    write_file(out_model, model_json);
    write_file(out_dist, dist_json);
    bool ok = uev.holds && eq.holds;
    Json body = {{"verdict", ok ? "holds" : "fails"},
                 {"uev", uev.holds},
                 {"equivalent", eq.holds},
                 {"summary", eq.reason},
                 {"outputs",
                  {{"model", {{"path", out_model},
                              {"sha256", sha256_hex(model_json.dump(2) + "\n")}}},
                   {"distribution", {{"path", out_dist},
                                     {"sha256", sha256_hex(dist_json.dump(2) + "\n")}}}}}};
    return runner.finish(body, ok ? 0 : 1,
                         ok ? "wrote " + out_model + " and " + out_dist +
                                  "; the uev model is equivalent"
                            : "the re-encoded model is not equivalent: " + eq.reason);
  });
}

int run_corpus_list(const Options& options) {
  Runner runner(options, "corpus list");
  return guarded(runner, [&] {
    Json list = Json::array();
    for (const auto& name : corpus_names())
      list.push_back({{"name", name}, {"description", build_named(name).description}});
    return runner.finish({{"examples", list}}, 0,
                         std::to_string(list.size()) + " examples");
  });
}

int run_corpus_emit(const Options& options, const std::string& name,
                    const std::string& out_dir) {
  Runner runner(options, "corpus emit");
  return guarded(runner, [&] {
    ExampleBundle b = build_named(name);
    Json bundle = bundle_to_json(b);
    if (out_dir.empty()) return runner.finish({{"bundle", bundle}}, 0, b.description);
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + out_dir + ": " + ec.message());
    Json files = Json::object();
    auto put = [&](const std::string& key, const std::string& file) {
      if (!bundle.contains(key)) return;
      write_file(dir / file, bundle[key]);
      files[key] = (dir / file).string();
    };
    put("low", "low.json");
    put("high", "high.json");
    put("tau", "tau.json");
    put("omega", "omega.json");
    put("low_distribution", "low_dist.json");
    put("high_distribution", "high_dist.json");
    put("partition", "partition.json");
    put("expected", "expected.json");
    return runner.finish({{"name", b.name}, {"files", files}}, 0,
                         "wrote " + std::to_string(files.size()) + " files to " + out_dir);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite causal models: solve, transform and abstraction checks"};
  app.require_subcommand(1);
  Options options;
  app.add_flag("-q,--quiet", options.quiet, "No summary on stderr");
  app.add_flag("--timing", options.timing, "Add elapsed time to the report");
  app.add_option("--max-interventions", options.max_interventions,
                 "Cap on enumerated interventions (also CAK_MAX_INTERVENTIONS)");
  app.add_option("--max-contexts", options.max_contexts,
                 "Cap on enumerated assignment spaces (also CAK_MAX_CONTEXTS)");

  std::string model, context, intervene;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a model in one context");
  solve_cmd->add_option("model", model, "Model file")->required();
  solve_cmd->add_option("--context", context, "U1=0,U2=1")->required();
  solve_cmd->add_option("--intervene", intervene, "X1=0,...");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Run a transformation or abstraction check");
  check_cmd->add_option("kind", check.kind, "exact | uniform | abstraction | strong | constructive")
      ->required()
      ->check(CLI::IsMember({"exact", "uniform", "abstraction", "strong", "constructive"}));
  check_cmd->add_option("low", check.low, "Low model file")->required();
  check_cmd->add_option("high", check.high, "High model file")->required();
  check_cmd->add_option("--tau", check.tau, "State map file")->required();
  check_cmd->add_option("--omega", check.omega, "Intervention map file");
  check_cmd->add_option("--partition", check.partition, "Partition file");
  check_cmd->add_option("--dists", check.dists, "Low and high distribution files")
      ->expected(2);
  check_cmd->add_flag("--witness", check.witness, "Include the witness when the check holds");
  check_cmd->add_flag("--correspondents", check.correspondents,
                      "With uniform: list every compatible high context per low context");

  std::string low, high, tau;
  std::optional<std::string> intervention;
  auto* derive_cmd = app.add_subcommand("derive-omega", "Compute ω_τ");
  derive_cmd->add_option("low", low, "Low model file")->required();
  derive_cmd->add_option("high", high, "High model file")->required();
  derive_cmd->add_option("--tau", tau, "State map file")->required();
  derive_cmd->add_option("--intervention", intervention, "X1=0,...; empty for ∅");

  std::string dist, out_model, out_dist;
  auto* uev_cmd = app.add_subcommand("to-uev", "Re-encode a model with one exogenous variable per endogenous one");
  uev_cmd->add_option("model", model, "Model file")->required();
  uev_cmd->add_option("--dist", dist, "Distribution file")->required();
  uev_cmd->add_option("--out-model", out_model, "Default: <model>.uev.json");
  uev_cmd->add_option("--out-dist", out_dist, "Default: <dist>.uev.json");

  std::string name, out_dir;
  auto* corpus_cmd = app.add_subcommand("corpus", "Built-in examples");
  corpus_cmd->require_subcommand(1);
  auto* list_cmd = corpus_cmd->add_subcommand("list", "List the examples");
  auto* emit_cmd = corpus_cmd->add_subcommand("emit", "Print or write one example");
  emit_cmd->add_option("name", name, "Example name")->required();
  emit_cmd->add_option("--out-dir", out_dir, "Write one file per artifact here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (solve_cmd->parsed()) return run_solve(options, model, context, intervene);
  if (check_cmd->parsed()) return run_check(options, check);
  if (derive_cmd->parsed()) return run_derive_omega(options, low, high, tau, intervention);
  if (uev_cmd->parsed()) return run_to_uev(options, model, dist, out_model, out_dist);
  if (list_cmd->parsed()) return run_corpus_list(options);
  if (emit_cmd->parsed()) return run_corpus_emit(options, name, out_dir);
  return 2;
}
