#pragma once

#include <wsc/wsc.hpp>

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace wsc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoComposition = 2;

struct RunConfig {
  std::string ontology;
  std::string registry;
  std::string request;
  std::size_t request_index = 0;
  std::string service;
  std::string tree;
  std::string network;
  std::string out;
  std::string table;
  std::string out_dir = ".";
  std::string mode = "retrieval";
  AcoParams params;
  std::size_t leaf_cap = kDefaultLeafCap;
  std::size_t guard = kOracleGuardLimit;
  bool force = false;
  unsigned threads = 1;
  int verbosity = 0;
  GenParams gen;
  std::size_t instances = 30;
  std::size_t seeds = 20;
};

namespace detail {

inline json params_echo(const RunConfig &cfg) {
  json echo = params_to_json(cfg.params);
  echo["leaf_cap"] = cfg.leaf_cap;
  return echo;
}

inline void emit(const RunConfig &cfg, const std::string &text, std::ostream &out) {
  if (cfg.out.empty()) {
    out << text;
  } else {
    jsonio::write_file_atomic(cfg.out, text);
  }
}

inline bool exists(const std::string &path) {
  return !path.empty() && std::filesystem::exists(path);
}

struct Workspace {
  Ontology ontology;
  Registry registry;
};

inline Workspace load_workspace(const RunConfig &cfg) {
  Workspace ws;
  ws.ontology = load_ontology(jsonio::read_json_file(cfg.ontology));
  ws.registry = load_registry(jsonio::read_json_file(cfg.registry), ws.ontology);
  return ws;
}

inline SemanticNetwork network_for(const RunConfig &cfg, const Workspace &ws) {
  if (exists(cfg.network)) {
    auto net = network_from_json(jsonio::read_json_file(cfg.network));
    for (const auto &s : ws.registry.services()) {
      if (!net.contains(s.id)) {
        throw Error(ErrorCode::invalid_value,
                    "network file lacks service \"" + s.id + "\"");
      }
    }
    if (net.node_count() != ws.registry.size()) {
      throw Error(ErrorCode::invalid_value, "network file has unregistered services");
    }
    return net;
  }
  return build_network(ws.registry, ws.ontology, cfg.params.theta_match);
}

inline ClusterTree tree_for(const RunConfig &cfg, const Workspace &ws) {
  if (exists(cfg.tree)) {
    return tree_from_json(jsonio::read_json_file(cfg.tree), ws.registry, ws.ontology);
  }
  return build_tree(ws.registry, ws.ontology, cfg.leaf_cap);
}

inline Request request_for(const RunConfig &cfg, const Ontology &ont) {
  const auto reqs = requests_from_json(jsonio::read_json_file(cfg.request));
  if (cfg.request_index >= reqs.size()) {
    throw Error(ErrorCode::invalid_value,
                "request index " + std::to_string(cfg.request_index) + " out of range");
  }
  validate_request(reqs[cfg.request_index], ont);
  return reqs[cfg.request_index];
}

} // namespace detail

// Registers the service, its network edges and its cluster placement. All
// output files are staged before any is replaced; a validation failure
// leaves every file untouched.
inline int cmd_publish(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  auto ws = detail::load_workspace(cfg);
  auto svc = service_from_json(jsonio::read_json_file(cfg.service));

  std::optional<SemanticNetwork> net;
  if (!cfg.network.empty()) net = detail::network_for(cfg, ws);
  std::optional<ClusterTree> tree;
  if (!cfg.tree.empty()) {
    if (detail::exists(cfg.tree)) {
      tree = detail::tree_for(cfg, ws);
    } else if (!ws.registry.empty()) {
      tree = build_tree(ws.registry, ws.ontology, cfg.leaf_cap);
    } else {
      tree = ClusterTree(cfg.leaf_cap);
    }
  }

  Registry next = publish(ws.registry, ws.ontology, svc);
  if (net) add_service_edges(*net, ws.ontology, next, svc.id);
  if (tree) insert_service(*tree, ws.ontology, svc);

  std::vector<std::pair<std::filesystem::path, std::string>> files;
  files.emplace_back(cfg.registry, jsonio::dump(save_registry(next)));
  if (net) files.emplace_back(cfg.network, jsonio::dump(network_to_json(*net)));
  if (tree) files.emplace_back(cfg.tree, jsonio::dump(tree_to_json(*tree, ws.ontology)));
  jsonio::write_files_atomic(files);
  if (cfg.verbosity > 0) {
    err << "published " << svc.id << "; registry now holds " << next.size()
        << " services\n";
  }
  (void)out;
  return kExitOk;
}

inline int cmd_compose(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  const auto ws = detail::load_workspace(cfg);
  const auto req = detail::request_for(cfg, ws.ontology);
  const auto net = detail::network_for(cfg, ws);
  const auto tree = detail::tree_for(cfg, ws);
  const auto result = solve(net, tree, ws.registry, ws.ontology, req, cfg.params,
                            SolveOptions{cfg.threads});
  detail::emit(cfg, jsonio::dump(composition_result_to_json(result, detail::params_echo(cfg))),
               out);
  if (cfg.verbosity > 0) {
    err << (result.best ? "composition found" : "no composition") << " after "
        << result.iterations_run << " iterations, " << result.retries_used << " retries\n";
  }
  return result.best ? kExitOk : kExitNoComposition;
}

inline int cmd_oracle(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  const auto ws = detail::load_workspace(cfg);
  const auto req = detail::request_for(cfg, ws.ontology);
  const auto net = detail::network_for(cfg, ws);
  const auto result = exhaustive_search(net, ws.registry, ws.ontology, req,
                                        cfg.params.theta_match, cfg.params.max_path_len,
                                        cfg.params.weights, OracleOptions{cfg.guard, cfg.force});
  json doc = path_to_json(result.best);
  doc["retries_used"] = 0;
  doc["paths_enumerated"] = result.paths_enumerated;
  doc["params_echo"] = detail::params_echo(cfg);
  detail::emit(cfg, jsonio::dump(doc), out);
  if (cfg.verbosity > 0) {
    err << "oracle scored " << result.paths_enumerated << " goal-reaching paths\n";
  }
  return result.best ? kExitOk : kExitNoComposition;
}

inline int cmd_eval(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  if (cfg.mode == "retrieval") {
    const auto ws = detail::load_workspace(cfg);
    const auto reqs = requests_from_json(jsonio::read_json_file(cfg.request));
    for (const auto &r : reqs) validate_request(r, ws.ontology);
    const auto tree = detail::tree_for(cfg, ws);
    const auto rep = retrieval_benchmark(ws.registry, ws.ontology, tree, reqs,
                                         cfg.params.beam_width, cfg.params.theta_retrieval);
    detail::emit(cfg, jsonio::dump(retrieval_report_to_json(rep)), out);
    if (!cfg.table.empty()) jsonio::write_file_atomic(cfg.table, retrieval_report_table(rep));
    if (cfg.verbosity > 0) {
      err << "mean comparisons " << rep.mean_tree_comparisons << " (tree) vs "
          << rep.mean_linear_comparisons << " (linear)\n";
    }
    return kExitOk;
  }
  if (cfg.mode == "optimality") {
    ExperimentOptions opts;
    opts.leaf_cap = cfg.leaf_cap;
    opts.oracle = OracleOptions{cfg.guard, cfg.force};
    opts.solve = SolveOptions{cfg.threads};
    const auto rep = optimality_experiment(cfg.gen, cfg.params, cfg.instances, cfg.seeds, opts);
    json doc = optimality_report_to_json(rep);
    doc["gen_params"] = gen_params_to_json(cfg.gen);
    doc["params_echo"] = detail::params_echo(cfg);
    detail::emit(cfg, jsonio::dump(doc), out);
    if (!cfg.table.empty()) jsonio::write_file_atomic(cfg.table, optimality_report_table(rep));
    if (cfg.verbosity > 0) err << "optimal fraction " << rep.optimal_fraction << "\n";
    return kExitOk;
  }
  throw Error(ErrorCode::invalid_value, "unknown eval mode \"" + cfg.mode + "\"");
}

inline int cmd_gen(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  const auto ds = generate_dataset(cfg.gen);
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  jsonio::write_files_atomic({
      {dir / "ontology.json", jsonio::dump(save_ontology(ds.ontology))},
      {dir / "registry.json", jsonio::dump(save_registry(ds.registry))},
      {dir / "requests.json", jsonio::dump(requests_to_json(ds.requests))},
  });
  if (cfg.verbosity > 0) {
    err << "generated " << ds.registry.size() << " services over " << ds.ontology.size() - 1
        << " concepts in " << dir.string() << "\n";
  }
  (void)out;
  return kExitOk;
}

inline int cmd_network(const RunConfig &cfg, std::ostream &out, std::ostream &) {
  const auto ws = detail::load_workspace(cfg);
  detail::emit(cfg, jsonio::dump(network_to_json(detail::network_for(cfg, ws))), out);
  return kExitOk;
}

inline int cmd_tree(const RunConfig &cfg, std::ostream &out, std::ostream &) {
  const auto ws = detail::load_workspace(cfg);
  detail::emit(cfg, jsonio::dump(tree_to_json(detail::tree_for(cfg, ws), ws.ontology)), out);
  return kExitOk;
}

namespace detail {

inline void add_aco_flags(CLI::App &app, RunConfig &cfg) {
  auto &p = cfg.params;
  app.add_option("--iterations", p.n_iterations, "Colony iterations per attempt")
      ->capture_default_str();
  app.add_option("--alpha", p.alpha, "Pheromone exponent")->capture_default_str();
  app.add_option("--beta", p.beta, "Heuristic exponent")->capture_default_str();
  app.add_option("--rho", p.rho, "Evaporation rate")->capture_default_str();
  app.add_option("--q", p.q, "Deposit scale")->capture_default_str();
  app.add_option("--tau0", p.tau0, "Initial pheromone")->capture_default_str();
  app.add_option("--max-retries", p.max_retries, "Threshold relaxations")->capture_default_str();
  app.add_option("--retry-delta", p.retry_delta, "Retrieval threshold step per retry")
      ->capture_default_str();
  app.add_option("--seed", p.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Threads for ant walks (not echoed)")
      ->capture_default_str();
}

inline void add_search_flags(CLI::App &app, RunConfig &cfg) {
  auto &p = cfg.params;
  app.add_option("--max-path-len", p.max_path_len, "Longest composition")->capture_default_str();
  app.add_option("--w-sim", p.weights.sim, "Similarity weight")->capture_default_str();
  app.add_option("--w-rt", p.weights.rt, "Response time weight")->capture_default_str();
  app.add_option("--w-cost", p.weights.cost, "Cost weight")->capture_default_str();
  app.add_option("--w-av", p.weights.av, "Availability weight")->capture_default_str();
  app.add_option("--w-rel", p.weights.rel, "Reliability weight")->capture_default_str();
  app.add_option("--theta-match", p.theta_match, "Concept match threshold")
      ->capture_default_str();
}

inline void add_retrieval_flags(CLI::App &app, RunConfig &cfg) {
  app.add_option("--theta-retrieval", cfg.params.theta_retrieval, "Retrieval threshold")
      ->capture_default_str();
  app.add_option("--beam", cfg.params.beam_width, "Leaf clusters opened by retrieval")
      ->capture_default_str();
  app.add_option("--leaf-cap", cfg.leaf_cap, "Services per leaf cluster")->capture_default_str();
}

inline void add_gen_flags(CLI::App &app, GenParams &g) {
  app.add_option("--n-services", g.n_services, "Services (eval optimality defaults to 10)")
      ->capture_default_str();
  app.add_option("--n-concepts", g.n_concepts)->capture_default_str();
  app.add_option("--taxonomy-depth", g.taxonomy_depth)->capture_default_str();
  app.add_option("--n-domains", g.n_domains, "0 derives from n-concepts")->capture_default_str();
  app.add_option("--max-io-size", g.max_io_size)->capture_default_str();
  app.add_option("--chain-density", g.chain_density)->capture_default_str();
  app.add_option("--n-requests", g.n_requests)->capture_default_str();
  app.add_option("--rt-min", g.rt_min)->capture_default_str();
  app.add_option("--rt-max", g.rt_max)->capture_default_str();
  app.add_option("--cost-min", g.cost_min)->capture_default_str();
  app.add_option("--cost-max", g.cost_max)->capture_default_str();
  app.add_option("--av-min", g.av_min)->capture_default_str();
  app.add_option("--av-max", g.av_max)->capture_default_str();
  app.add_option("--rel-min", g.rel_min)->capture_default_str();
  app.add_option("--rel-max", g.rel_max)->capture_default_str();
}

inline void add_workspace_flags(CLI::App &app, RunConfig &cfg) {
  app.add_option("--ontology", cfg.ontology, "Ontology document")->required();
  app.add_option("--registry", cfg.registry, "Registry document")->required();
}

} // namespace detail

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Semantic web-service composition: cluster retrieval + ant colony search"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("-v,--verbose", cfg.verbosity, "Progress on stderr");

  auto *publish = app.add_subcommand("publish", "Register a service (registry, network, tree)");
  detail::add_workspace_flags(*publish, cfg);
  publish->add_option("--service", cfg.service, "Service document")->required();
  publish->add_option("--network", cfg.network, "Network document to update");
  publish->add_option("--tree", cfg.tree, "Cluster tree document to update");
  publish->add_option("--theta-match", cfg.params.theta_match)->capture_default_str();
  publish->add_option("--leaf-cap", cfg.leaf_cap)->capture_default_str();

  auto *compose = app.add_subcommand("compose", "Find the best composition for a request");
  auto *oracle = app.add_subcommand("oracle", "Exhaustive best composition (small registries)");
  for (auto *sub : {compose, oracle}) {
    detail::add_workspace_flags(*sub, cfg);
    sub->add_option("--request", cfg.request, "Request document")->required();
    sub->add_option("--request-index", cfg.request_index, "Entry of a request list")
        ->capture_default_str();
    sub->add_option("--network", cfg.network, "Precomputed network document");
    sub->add_option("--out", cfg.out, "Result document (default stdout)");
    detail::add_search_flags(*sub, cfg);
  }
  compose->add_option("--tree", cfg.tree, "Precomputed cluster tree document");
  detail::add_aco_flags(*compose, cfg);
  detail::add_retrieval_flags(*compose, cfg);
  oracle->add_option("--guard", cfg.guard, "Largest registry searched")->capture_default_str();
  oracle->add_flag("--force", cfg.force, "Ignore the guard limit");

  auto *eval = app.add_subcommand("eval", "Retrieval benchmark or optimality experiment");
  eval->add_option("--mode", cfg.mode, "retrieval | optimality")
      ->check(CLI::IsMember({"retrieval", "optimality"}))
      ->capture_default_str();
  eval->add_option("--ontology", cfg.ontology, "Ontology document (retrieval)");
  eval->add_option("--registry", cfg.registry, "Registry document (retrieval)");
  eval->add_option("--requests", cfg.request, "Request list (retrieval)");
  eval->add_option("--tree", cfg.tree, "Precomputed cluster tree document");
  eval->add_option("--out", cfg.out, "Report document (default stdout)");
  eval->add_option("--table", cfg.table, "Tab-separated per-row table");
  eval->add_option("--instances", cfg.instances, "Generated instances (optimality)")
      ->capture_default_str();
  eval->add_option("--seeds", cfg.seeds, "Seeds per instance (optimality)")
      ->capture_default_str();
  eval->add_option("--guard", cfg.guard)->capture_default_str();
  eval->add_option("--gen-seed", cfg.gen.seed, "Base generator seed (optimality)")
      ->capture_default_str();
  detail::add_search_flags(*eval, cfg);
  detail::add_aco_flags(*eval, cfg);
  detail::add_retrieval_flags(*eval, cfg);
  detail::add_gen_flags(*eval, cfg.gen);

  auto *gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  detail::add_gen_flags(*gen, cfg.gen);
  gen->add_option("--seed", cfg.gen.seed)->capture_default_str();
  gen->add_option("--out-dir", cfg.out_dir, "Directory for the three documents")
      ->capture_default_str();

  auto *network = app.add_subcommand("network", "Dump the semantic network");
  detail::add_workspace_flags(*network, cfg);
  network->add_option("--theta-match", cfg.params.theta_match)->capture_default_str();
  network->add_option("--out", cfg.out);

  auto *tree = app.add_subcommand("tree", "Dump the cluster tree");
  detail::add_workspace_flags(*tree, cfg);
  tree->add_option("--leaf-cap", cfg.leaf_cap)->capture_default_str();
  tree->add_option("--out", cfg.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    cfg.params.validate();
    if (publish->parsed()) return cmd_publish(cfg, out, err);
    if (compose->parsed()) return cmd_compose(cfg, out, err);
    if (oracle->parsed()) return cmd_oracle(cfg, out, err);
    if (eval->parsed()) {
      if (cfg.mode == "retrieval" &&
          (cfg.ontology.empty() || cfg.registry.empty() || cfg.request.empty())) {
        throw Error(ErrorCode::invalid_value,
                    "retrieval eval needs --ontology, --registry and --requests");
      }
      // Generated instances must stay within the oracle guard by default.
      if (cfg.mode == "optimality" && eval->count("--n-services") == 0) {
        cfg.gen.n_services = 10;
      }
      return cmd_eval(cfg, out, err);
    }
    if (gen->parsed()) return cmd_gen(cfg, out, err);
    if (network->parsed()) return cmd_network(cfg, out, err);
    if (tree->parsed()) return cmd_tree(cfg, out, err);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

} // namespace wsc::cli
