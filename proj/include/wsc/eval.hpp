#pragma once

#include <wsc/aco.hpp>
#include <wsc/cluster.hpp>
#include <wsc/generator.hpp>
#include <wsc/json_io.hpp>
#include <wsc/network.hpp>
#include <wsc/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace wsc {

using ServiceSet = std::set<ServiceId>;

inline std::size_t intersection_size(const ServiceSet &a, const ServiceSet &b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

// |A ∩ B| / |B|; undefined (nullopt) when nothing was retrieved.
inline std::optional<double> precision(const ServiceSet &relevant,
                                       const ServiceSet &retrieved) {
  if (retrieved.empty()) return std::nullopt;
  return static_cast<double>(intersection_size(relevant, retrieved)) /
         static_cast<double>(retrieved.size());
}

// |A ∩ B| / |A|; undefined (nullopt) when nothing is relevant.
inline std::optional<double> recall(const ServiceSet &relevant, const ServiceSet &retrieved) {
  if (relevant.empty()) return std::nullopt;
  return static_cast<double>(intersection_size(relevant, retrieved)) /
         static_cast<double>(relevant.size());
}

struct EvalReport {
  ServiceSet relevant;
  ServiceSet retrieved;
  std::optional<double> precision;
  std::optional<double> recall;
};

inline EvalReport make_eval_report(ServiceSet relevant, ServiceSet retrieved) {
  EvalReport r{std::move(relevant), std::move(retrieved), std::nullopt, std::nullopt};
  r.precision = wsc::precision(r.relevant, r.retrieved);
  r.recall = wsc::recall(r.relevant, r.retrieved);
  return r;
}

namespace detail {

inline json optional_number(const std::optional<double> &v) {
  return v ? json(*v) : json("undefined");
}

inline std::string optional_cell(const std::optional<double> &v) {
  if (!v) return "undefined";
  std::ostringstream ss;
  ss << std::setprecision(6) << *v;
  return ss.str();
}

inline std::optional<double> mean_defined(const std::vector<std::optional<double>> &v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto &x : v) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

inline ServiceSet id_set(const RetrievalResult &r) {
  ServiceSet s;
  for (const auto &x : r.services) s.insert(x.id);
  return s;
}

} // namespace detail

struct RetrievalRow {
  std::size_t request = 0;
  std::size_t tree_comparisons = 0;
  std::size_t linear_comparisons = 0;
  std::size_t relevant = 0;  // |A|: linear-scan result
  std::size_t retrieved = 0; // |B|: tree result
  std::size_t hits = 0;      // |A ∩ B|
  std::optional<double> precision;
  std::optional<double> recall;
};

struct RetrievalReport {
  std::size_t n_services = 0;
  std::size_t leaf_cap = 0;
  std::size_t beam_width = 0;
  double theta_retrieval = 0.0;
  std::vector<RetrievalRow> rows;
  double mean_tree_comparisons = 0.0;
  double mean_linear_comparisons = 0.0;
  std::optional<double> mean_precision;
  std::optional<double> mean_recall;
};

// Tree retrieval against the linear baseline; the baseline's result set is
// the relevant set. Comparison counts are the retrievals' own counters.
inline RetrievalReport retrieval_benchmark(const Registry &reg, const Ontology &ont,
                                           const ClusterTree &tree,
                                           const std::vector<Request> &requests,
                                           std::size_t beam_width, double theta_retrieval) {
  RetrievalReport rep;
  rep.n_services = reg.size();
  rep.leaf_cap = tree.leaf_cap();
  rep.beam_width = beam_width;
  rep.theta_retrieval = theta_retrieval;
  std::vector<std::optional<double>> precisions, recalls;
  double tree_sum = 0.0, linear_sum = 0.0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto by_tree = find_initial_services(tree, ont, requests[i], theta_retrieval, beam_width);
    const auto by_scan = linear_scan(reg, ont, requests[i], theta_retrieval);
    const auto metrics = make_eval_report(detail::id_set(by_scan), detail::id_set(by_tree));
    RetrievalRow row;
    row.request = i;
    row.tree_comparisons = by_tree.comparisons;
    row.linear_comparisons = by_scan.comparisons;
    row.relevant = metrics.relevant.size();
    row.retrieved = metrics.retrieved.size();
    row.hits = intersection_size(metrics.relevant, metrics.retrieved);
    row.precision = metrics.precision;
    row.recall = metrics.recall;
    tree_sum += static_cast<double>(row.tree_comparisons);
    linear_sum += static_cast<double>(row.linear_comparisons);
    precisions.push_back(row.precision);
    recalls.push_back(row.recall);
    rep.rows.push_back(row);
  }
  if (!requests.empty()) {
    rep.mean_tree_comparisons = tree_sum / static_cast<double>(requests.size());
    rep.mean_linear_comparisons = linear_sum / static_cast<double>(requests.size());
  }
  rep.mean_precision = detail::mean_defined(precisions);
  rep.mean_recall = detail::mean_defined(recalls);
  return rep;
}

inline RetrievalReport retrieval_benchmark(const Registry &reg, const Ontology &ont,
                                           const std::vector<Request> &requests,
                                           std::size_t leaf_cap, std::size_t beam_width,
                                           double theta_retrieval) {
  const auto tree = build_tree(reg, ont, leaf_cap);
  return retrieval_benchmark(reg, ont, tree, requests, beam_width, theta_retrieval);
}

inline json retrieval_report_to_json(const RetrievalReport &rep) {
  json rows = json::array();
  for (const auto &r : rep.rows) {
    rows.push_back({{"request", r.request},
                    {"tree_comparisons", r.tree_comparisons},
                    {"linear_comparisons", r.linear_comparisons},
                    {"relevant", r.relevant},
                    {"retrieved", r.retrieved},
                    {"hits", r.hits},
                    {"precision", detail::optional_number(r.precision)},
                    {"recall", detail::optional_number(r.recall)}});
  }
  return json{{"kind", "retrieval"},
              {"n_services", rep.n_services},
              {"leaf_cap", rep.leaf_cap},
              {"beam_width", rep.beam_width},
              {"theta_retrieval", rep.theta_retrieval},
              {"mean_tree_comparisons", rep.mean_tree_comparisons},
              {"mean_linear_comparisons", rep.mean_linear_comparisons},
              {"mean_precision", detail::optional_number(rep.mean_precision)},
              {"mean_recall", detail::optional_number(rep.mean_recall)},
              {"rows", std::move(rows)}};
}

// Tab-separated, one row per request.
inline std::string retrieval_report_table(const RetrievalReport &rep) {
  std::ostringstream ss;
  ss << "request\ttree_comparisons\tlinear_comparisons\trelevant\tretrieved\thits\tprecision"
        "\trecall\n";
  for (const auto &r : rep.rows) {
    ss << r.request << '\t' << r.tree_comparisons << '\t' << r.linear_comparisons << '\t'
       << r.relevant << '\t' << r.retrieved << '\t' << r.hits << '\t'
       << detail::optional_cell(r.precision) << '\t' << detail::optional_cell(r.recall)
       << '\n';
  }
  return ss.str();
}

struct OptimalityRow {
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  std::optional<double> oracle_score;
  std::optional<double> aco_score;
  bool optimal = false;
  std::size_t best_iteration = 0;
};

struct OptimalityReport {
  std::vector<OptimalityRow> rows;
  double optimal_fraction = 0.0;
  std::optional<double> mean_iterations_to_optimum;
};

inline constexpr double kOptimalityTolerance = 1e-9;

struct ExperimentOptions {
  std::size_t leaf_cap = kDefaultLeafCap;
  OracleOptions oracle;
  SolveOptions solve;
};

// Generated instance i uses generator seed gen.seed + i and its planted
// request; trial j runs the colony with seed aco.seed + j.
inline OptimalityReport optimality_experiment(const GenParams &gen, const AcoParams &aco,
                                              std::size_t n_instances, std::size_t n_seeds,
                                              const ExperimentOptions &opts = {}) {
  OptimalityReport rep;
  std::size_t hits = 0;
  std::vector<std::optional<double>> iters;
  for (std::size_t i = 0; i < n_instances; ++i) {
    GenParams gp = gen;
    gp.seed = gen.seed + i;
    const Dataset ds = generate_dataset(gp);
    const Request &req = ds.requests.front();
    const auto net = build_network(ds.registry, ds.ontology, aco.theta_match);
    const auto tree = build_tree(ds.registry, ds.ontology, opts.leaf_cap);
    const auto exact = exhaustive_best(net, ds.registry, ds.ontology, req, aco.theta_match,
                                       aco.max_path_len, aco.weights, opts.oracle);
    for (std::size_t j = 0; j < n_seeds; ++j) {
      AcoParams p = aco;
      p.seed = aco.seed + j;
      const auto res = solve(net, tree, ds.registry, ds.ontology, req, p, opts.solve);
      OptimalityRow row;
      row.instance = i;
      row.seed = p.seed;
      if (exact) row.oracle_score = exact->score;
      if (res.best) row.aco_score = res.best->score;
      row.optimal = (exact && res.best)
                        ? std::abs(exact->score - res.best->score) <= kOptimalityTolerance
                        : (!exact && !res.best);
      if (row.optimal && res.best) {
        row.best_iteration = res.best_iteration;
        iters.push_back(static_cast<double>(res.best_iteration));
      }
      hits += row.optimal ? 1 : 0;
      rep.rows.push_back(row);
    }
  }
  if (!rep.rows.empty()) {
    rep.optimal_fraction = static_cast<double>(hits) / static_cast<double>(rep.rows.size());
  }
  rep.mean_iterations_to_optimum = detail::mean_defined(iters);
  return rep;
}

inline json optimality_report_to_json(const OptimalityReport &rep) {
  json rows = json::array();
  for (const auto &r : rep.rows) {
    rows.push_back({{"instance", r.instance},
                    {"seed", r.seed},
                    {"oracle_score", r.oracle_score ? json(*r.oracle_score) : json(nullptr)},
                    {"aco_score", r.aco_score ? json(*r.aco_score) : json(nullptr)},
                    {"optimal", r.optimal},
                    {"best_iteration", r.best_iteration}});
  }
  return json{{"kind", "optimality"},
              {"trials", rep.rows.size()},
              {"optimal_fraction", rep.optimal_fraction},
              {"mean_iterations_to_optimum",
               detail::optional_number(rep.mean_iterations_to_optimum)},
              {"rows", std::move(rows)}};
}

inline std::string optimality_report_table(const OptimalityReport &rep) {
  std::ostringstream ss;
  ss << std::setprecision(12);
  ss << "instance\tseed\toracle_score\taco_score\toptimal\tbest_iteration\n";
  for (const auto &r : rep.rows) {
    ss << r.instance << '\t' << r.seed << '\t'
       << (r.oracle_score ? std::to_string(*r.oracle_score) : "none") << '\t'
       << (r.aco_score ? std::to_string(*r.aco_score) : "none") << '\t'
       << (r.optimal ? 1 : 0) << '\t' << r.best_iteration << '\n';
  }
  return ss.str();
}

} // namespace wsc
