#pragma once

#include <wsc/cluster.hpp>
#include <wsc/error.hpp>
#include <wsc/json_io.hpp>
#include <wsc/network.hpp>
#include <wsc/ontology.hpp>
#include <wsc/registry.hpp>
#include <wsc/request.hpp>
#include <wsc/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace wsc {

// Soft-normalization constants of the response-time and cost score terms.
inline constexpr double kResponseTimeScaleMs = 1000.0;
inline constexpr double kCostScale = 100.0;

struct ScoreWeights {
  double sim = 0.2;
  double rt = 0.2;
  double cost = 0.2;
  double av = 0.2;
  double rel = 0.2;

  ScoreWeights normalized() const {
    for (double w : {sim, rt, cost, av, rel}) {
      if (!std::isfinite(w) || w < 0.0) {
        throw Error(ErrorCode::invalid_value, "score weights must be finite and >= 0");
      }
    }
    const double total = sim + rt + cost + av + rel;
    if (!(total > 0.0)) {
      throw Error(ErrorCode::invalid_value, "score weights must not all be zero");
    }
    return {sim / total, rt / total, cost / total, av / total, rel / total};
  }

  friend bool operator==(const ScoreWeights &, const ScoreWeights &) = default;
};

struct AcoParams {
  unsigned n_iterations = 100;
  double alpha = 1.0;
  double beta = 2.0;
  double rho = 0.1;
  double q = 1.0;
  double tau0 = 1.0;
  unsigned max_path_len = 10;
  ScoreWeights weights;
  double theta_match = kDefaultThetaMatch;
  double theta_retrieval = kDefaultThetaRetrieval;
  double retry_delta = 0.1;
  unsigned max_retries = 3;
  std::size_t beam_width = kDefaultBeamWidth;
  std::uint64_t seed = 0;

  void validate() const {
    auto fail = [](const char *what) { throw Error(ErrorCode::invalid_value, what); };
    if (!(alpha >= 0.0) || !(beta >= 0.0)) fail("alpha and beta must be >= 0");
    if (!(rho > 0.0 && rho < 1.0)) fail("rho must lie in (0, 1)");
    if (!(q > 0.0)) fail("Q must be positive");
    if (!(tau0 > 0.0)) fail("tau0 must be positive");
    if (max_path_len == 0) fail("max_path_len must be positive");
    if (!(theta_match > 0.0 && theta_match <= 1.0)) fail("theta_match must lie in (0, 1]");
    if (!(theta_retrieval >= 0.0 && theta_retrieval <= 1.0)) {
      fail("theta_retrieval must lie in [0, 1]");
    }
    if (!(retry_delta >= 0.0)) fail("retry_delta must be >= 0");
    if (beam_width == 0) fail("beam_width must be positive");
    (void)weights.normalized();
  }
};

struct AggregateQos {
  double response_time_ms = 0.0; // sum
  double cost = 0.0;             // sum
  double availability = 1.0;     // product
  double reliability = 1.0;      // product

  friend bool operator==(const AggregateQos &, const AggregateQos &) = default;
};

struct CompositionPath {
  std::vector<ServiceId> services;
  AggregateQos qos;
  double mean_edge_sim = 1.0; // 1 for single-service paths
  double score = 0.0;

  friend bool operator==(const CompositionPath &, const CompositionPath &) = default;
};

// Weighted sum of the similarity, availability and reliability terms plus
// soft-normalized response time and cost. Weights are normalized first.
inline double score_path(const CompositionPath &path, const ScoreWeights &weights) {
  const ScoreWeights w = weights.normalized();
  return w.sim * path.mean_edge_sim + w.av * path.qos.availability +
         w.rel * path.qos.reliability +
         w.rt * (1.0 / (1.0 + path.qos.response_time_ms / kResponseTimeScaleMs)) +
         w.cost * (1.0 / (1.0 + path.qos.cost / kCostScale));
}

// Fills in aggregates and score for a service sequence. A consecutive pair
// with no network edge contributes similarity 0.
inline CompositionPath make_path(const SemanticNetwork &net, const Registry &reg,
                                 std::vector<ServiceId> ids,
                                 const ScoreWeights &weights) {
  CompositionPath p;
  double sim_sum = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto &q = reg.at(ids[i]).qos;
    p.qos.response_time_ms += q.response_time_ms;
    p.qos.cost += q.cost;
    p.qos.availability *= q.availability;
    p.qos.reliability *= q.reliability;
    if (i > 0) {
      if (const EdgeInfo *e = net.edge(ids[i - 1], ids[i])) sim_sum += e->weight;
    }
  }
  p.mean_edge_sim = ids.size() > 1 ? sim_sum / static_cast<double>(ids.size() - 1) : 1.0;
  p.services = std::move(ids);
  p.score = score_path(p, weights);
  return p;
}

inline bool invokable(const Ontology &ont, const ServiceDescription &svc,
                      const std::set<ConceptId> &available, double theta_match) {
  for (const auto &in : svc.inputs) {
    const ConceptIndex i = ont.index_of(in);
    bool ok = false;
    for (const auto &c : available) {
      if (meets_threshold(ont.similarity(ont.index_of(c), i), theta_match)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

inline bool goal_satisfied(const Ontology &ont, const Request &req,
                           const std::set<ConceptId> &available, double theta_match) {
  for (const auto &g : req.required) {
    const ConceptIndex gi = ont.index_of(g);
    bool ok = false;
    for (const auto &c : available) {
      if (meets_threshold(ont.similarity(ont.index_of(c), gi), theta_match)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

// Step-by-step invokability from the request's inputs, then goal coverage.
inline bool path_valid(const Ontology &ont, const std::vector<ServiceDescription> &path,
                       const Request &req, double theta_match) {
  std::set<ConceptId> available = req.provided;
  for (const auto &svc : path) {
    if (!invokable(ont, svc, available, theta_match)) return false;
    available.insert(svc.outputs.begin(), svc.outputs.end());
  }
  return goal_satisfied(ont, req, available, theta_match);
}

inline bool path_valid(const Ontology &ont, const Registry &reg,
                       const std::vector<ServiceId> &ids, const Request &req,
                       double theta_match) {
  std::vector<ServiceDescription> path;
  path.reserve(ids.size());
  for (const auto &id : ids) path.push_back(reg.at(id));
  return path_valid(ont, path, req, theta_match);
}

namespace detail {

// Dense, index-based view of the network used by the ants and the oracle.
class SearchSpace {
public:
  using Index = std::uint32_t;
  struct Arc {
    Index to;
    double weight;
    double eta; // heuristic desirability of taking this arc
    std::size_t edge;
  };

  SearchSpace(const SemanticNetwork &net, const Registry &reg, const Ontology &ont,
              const Request &req, double theta_match)
      : ont_(&ont), theta_(theta_match) {
    validate_request(req, ont);
    if (reg.empty()) throw Error(ErrorCode::invalid_value, "registry is empty");
    if (net.node_count() != reg.size()) {
      throw Error(ErrorCode::invalid_value, "network nodes do not match the registry");
    }
    const auto utility = qos_utilities(reg);
    for (const auto &s : reg.services()) {
      if (!net.contains(s.id)) {
        throw Error(ErrorCode::unknown_service, "\"" + s.id + "\" missing from network");
      }
    }
    // Index order is lexicographic by id, so index comparisons order ids.
    std::vector<const ServiceDescription *> order;
    for (const auto &s : reg.services()) order.push_back(&s);
    std::sort(order.begin(), order.end(),
              [](auto *a, auto *b) { return a->id < b->id; });
    for (const auto *s : order) {
      index_.emplace(s->id, static_cast<Index>(ids_.size()));
      ids_.push_back(s->id);
      auto r = resolve(ont, *s);
      inputs_.push_back(std::move(r.inputs));
      outputs_.push_back(std::move(r.outputs));
      qos_.push_back(s->qos);
      utility_.push_back(utility[reg.position(s->id)]);
    }
    out_.resize(ids_.size());
    for (Index u = 0; u < ids_.size(); ++u) {
      for (const auto &[to, e] : net.out_edges(ids_[u])) {
        const Index v = index_.at(to);
        out_[u].push_back({v, e.weight, 0.5 * e.weight + 0.5 * utility_[v], edge_count_++});
      }
    }
    for (const auto &c : req.provided) provided_.push_back(ont.index_of(c));
    for (const auto &c : req.required) required_.push_back(ont.index_of(c));
  }

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  const std::vector<ServiceId> &ids() const noexcept { return ids_; }
  const ServiceId &id(Index i) const { return ids_[i]; }
  const std::vector<Arc> &arcs(Index u) const { return out_[u]; }
  const std::vector<ConceptIndex> &provided() const noexcept { return provided_; }
  const std::vector<ConceptIndex> &outputs(Index u) const { return outputs_[u]; }
  double theta() const noexcept { return theta_; }

  std::optional<Index> find(const ServiceId &id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const Arc *arc(Index u, Index v) const {
    for (const auto &a : out_[u]) {
      if (a.to == v) return &a;
    }
    return nullptr;
  }

  bool covered(ConceptIndex c, const std::vector<ConceptIndex> &available) const {
    for (ConceptIndex a : available) {
      if (meets_threshold(ont_->similarity(a, c), theta_)) return true;
    }
    return false;
  }

  bool invokable(Index s, const std::vector<ConceptIndex> &available) const {
    for (ConceptIndex in : inputs_[s]) {
      if (!covered(in, available)) return false;
    }
    return true;
  }

  bool goal_met(const std::vector<ConceptIndex> &available) const {
    for (ConceptIndex g : required_) {
      if (!covered(g, available)) return false;
    }
    return true;
  }

  // Aggregates and score, accumulated in path order.
  CompositionPath materialize(const std::vector<Index> &path,
                              const ScoreWeights &weights) const {
    CompositionPath p;
    double sim_sum = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const auto &q = qos_[path[i]];
      p.qos.response_time_ms += q.response_time_ms;
      p.qos.cost += q.cost;
      p.qos.availability *= q.availability;
      p.qos.reliability *= q.reliability;
      if (i > 0) {
        if (const Arc *a = arc(path[i - 1], path[i])) sim_sum += a->weight;
      }
      p.services.push_back(ids_[path[i]]);
    }
    p.mean_edge_sim =
        path.size() > 1 ? sim_sum / static_cast<double>(path.size() - 1) : 1.0;
    p.score = score_path(p, weights);
    return p;
  }

private:
  const Ontology *ont_;
  double theta_;
  std::vector<ServiceId> ids_;
  std::unordered_map<ServiceId, Index> index_;
  std::vector<std::vector<ConceptIndex>> inputs_, outputs_;
  std::vector<QosVector> qos_;
  std::vector<double> utility_;
  std::vector<std::vector<Arc>> out_;
  std::size_t edge_count_ = 0;
  std::vector<ConceptIndex> provided_, required_;
};

// Higher score wins; then the shorter path; then the smaller id sequence.
inline bool better_path(const CompositionPath &a, const CompositionPath &b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.services.size() != b.services.size()) {
    return a.services.size() < b.services.size();
  }
  return a.services < b.services;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn &&fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

} // namespace detail

// Pheromone level per network edge.
class PheromoneTable {
public:
  explicit PheromoneTable(std::size_t edge_count = 0, double tau0 = 1.0)
      : tau_(edge_count, tau0) {}

  std::size_t size() const noexcept { return tau_.size(); }
  double at(std::size_t edge) const { return tau_.at(edge); }
  const std::vector<double> &values() const noexcept { return tau_; }

  void reset(double tau0) { std::fill(tau_.begin(), tau_.end(), tau0); }
  // Floored at the smallest normal double so long runs cannot underflow to 0.
  void evaporate(double rho) {
    for (double &t : tau_) t = std::max(t * (1.0 - rho), std::numeric_limits<double>::min());
  }
  void deposit(std::size_t edge, double amount) { tau_.at(edge) += amount; }

private:
  std::vector<double> tau_;
};

// Everything an ant needs to walk: the indexed network plus the request
// and parameters it is solving for.
class Colony {
public:
  Colony(const SemanticNetwork &net, const Registry &reg, const Ontology &ont,
         const Request &req, const AcoParams &params)
      : params_((params.validate(), params)),
        weights_(params.weights.normalized()),
        space_(net, reg, ont, req, params.theta_match) {}

  const detail::SearchSpace &space() const noexcept { return space_; }
  const AcoParams &params() const noexcept { return params_; }
  const ScoreWeights &weights() const noexcept { return weights_; }

  PheromoneTable make_pheromone() const {
    return PheromoneTable(space_.edge_count(), params_.tau0);
  }

  double pheromone(const PheromoneTable &pher, const ServiceId &from,
                   const ServiceId &to) const {
    auto u = space_.find(from), v = space_.find(to);
    const auto *a = (u && v) ? space_.arc(*u, *v) : nullptr;
    if (!a) {
      throw Error(ErrorCode::unknown_service, "no edge " + from + " -> " + to);
    }
    return pher.at(a->edge);
  }

  // One ant from `start`. Returns the index path when the goal is reached.
  std::optional<std::vector<detail::SearchSpace::Index>>
  walk_indices(const PheromoneTable &pher, detail::SearchSpace::Index start,
               Engine &eng) const {
    using Index = detail::SearchSpace::Index;
    std::vector<ConceptIndex> available = space_.provided();
    if (!space_.invokable(start, available)) return std::nullopt;
    std::vector<char> visited(space_.size(), 0);
    std::vector<Index> path{start};
    visited[start] = 1;
    const auto &out0 = space_.outputs(start);
    available.insert(available.end(), out0.begin(), out0.end());

    std::vector<const detail::SearchSpace::Arc *> cand;
    std::vector<double> attract;
    while (true) {
      if (space_.goal_met(available)) return path;
      if (path.size() >= params_.max_path_len) return std::nullopt;
      cand.clear();
      for (const auto &a : space_.arcs(path.back())) {
        if (!visited[a.to] && space_.invokable(a.to, available)) cand.push_back(&a);
      }
      if (cand.empty()) return std::nullopt;
      const detail::SearchSpace::Arc *pick = cand.front();
      if (cand.size() > 1) {
        attract.clear();
        double total = 0.0;
        for (const auto *a : cand) {
          const double w = std::pow(pher.at(a->edge), params_.alpha) *
                           std::pow(a->eta, params_.beta);
          attract.push_back(w);
          total += w;
        }
        double r = uniform01(eng) * total;
        pick = cand.back();
        for (std::size_t i = 0; i < cand.size(); ++i) {
          if (r < attract[i]) {
            pick = cand[i];
            break;
          }
          r -= attract[i];
        }
      }
      visited[pick->to] = 1;
      path.push_back(pick->to);
      const auto &out = space_.outputs(pick->to);
      available.insert(available.end(), out.begin(), out.end());
    }
  }

  std::optional<CompositionPath> walk(const PheromoneTable &pher, const ServiceId &start,
                                      Engine &eng) const {
    auto s = space_.find(start);
    if (!s) {
      throw Error(ErrorCode::unknown_service, "\"" + start + "\" not in network");
    }
    auto p = walk_indices(pher, *s, eng);
    if (!p) return std::nullopt;
    return space_.materialize(*p, weights_);
  }

private:
  AcoParams params_;
  ScoreWeights weights_;
  detail::SearchSpace space_;
};

inline std::optional<CompositionPath> ant_walk(const Colony &colony,
                                               const PheromoneTable &pher,
                                               const ServiceId &start, Engine &eng) {
  return colony.walk(pher, start, eng);
}

struct SolveOptions {
  unsigned threads = 1; // ant walks per iteration run on this many threads
};

struct CompositionResult {
  std::optional<CompositionPath> best;
  unsigned retries_used = 0;
  std::size_t iterations_run = 0;
  std::size_t ants_per_iteration = 0;
  double theta_retrieval_used = 0.0;
  // Iteration (1-based, counted across attempts) that first produced `best`.
  std::size_t best_iteration = 0;
  // Best score of each iteration of the final attempt; empty when no ant
  // succeeded in that iteration.
  std::vector<std::optional<double>> iteration_best;
};

// Retrieval, then iterated ant walks with evaporation and score-weighted
// deposits. When no valid path turns up the retrieval threshold is relaxed
// and the colony restarts from fresh pheromone.
inline CompositionResult solve(const SemanticNetwork &net, const ClusterTree &tree,
                               const Registry &reg, const Ontology &ont,
                               const Request &req, const AcoParams &params,
                               const SolveOptions &opts = {}) {
  using Index = detail::SearchSpace::Index;
  const Colony colony(net, reg, ont, req, params);
  const auto &space = colony.space();
  PheromoneTable pher = colony.make_pheromone();

  CompositionResult result;
  std::size_t global_iter = 0;
  for (unsigned attempt = 0; attempt <= params.max_retries; ++attempt) {
    // Snapped to a 1e-9 grid so 0.7 - 2 * 0.1 reports as 0.5.
    const double theta = std::max(
        0.0, std::round((params.theta_retrieval - attempt * params.retry_delta) * 1e9) / 1e9);
    const auto retrieved =
        find_initial_services(tree, ont, req, theta, params.beam_width);
    std::vector<Index> starts;
    for (const auto &r : retrieved.services) {
      auto s = space.find(r.id);
      if (!s) {
        throw Error(ErrorCode::unknown_service, "\"" + r.id + "\" not in network");
      }
      starts.push_back(*s);
    }
    result.retries_used = attempt;
    result.theta_retrieval_used = theta;
    result.ants_per_iteration = starts.size();
    result.iteration_best.clear();
    pher.reset(params.tau0);

    std::vector<std::optional<std::vector<Index>>> walks(starts.size());
    std::vector<std::optional<CompositionPath>> scored(starts.size());
    for (unsigned it = 0; it < params.n_iterations; ++it) {
      ++global_iter;
      detail::parallel_for(starts.size(), opts.threads, [&](std::size_t a) {
        Engine eng = make_engine(derive_seed(params.seed, {attempt, it, a}));
        walks[a] = colony.walk_indices(pher, starts[a], eng);
        scored[a] = walks[a] ? std::optional(space.materialize(*walks[a], colony.weights()))
                             : std::nullopt;
      });
      pher.evaporate(params.rho);
      const CompositionPath *iter_best = nullptr;
      for (std::size_t a = 0; a < starts.size(); ++a) {
        if (!scored[a]) continue;
        const double amount = params.q * scored[a]->score;
        const auto &w = *walks[a];
        for (std::size_t i = 1; i < w.size(); ++i) {
          pher.deposit(space.arc(w[i - 1], w[i])->edge, amount);
        }
        if (!iter_best || detail::better_path(*scored[a], *iter_best)) {
          iter_best = &*scored[a];
        }
      }
      result.iteration_best.push_back(iter_best ? std::optional(iter_best->score)
                                                : std::nullopt);
      if (iter_best && (!result.best || detail::better_path(*iter_best, *result.best))) {
        result.best = *iter_best;
        result.best_iteration = global_iter;
      }
    }
    result.iterations_run = global_iter;
    if (result.best) break;
  }
  return result;
}

inline json params_to_json(const AcoParams &p) {
  const ScoreWeights w = p.weights.normalized();
  return json{{"n_iterations", p.n_iterations},
              {"alpha", p.alpha},
              {"beta", p.beta},
              {"rho", p.rho},
              {"q", p.q},
              {"tau0", p.tau0},
              {"max_path_len", p.max_path_len},
              {"weights",
               {{"sim", w.sim}, {"rt", w.rt}, {"cost", w.cost}, {"av", w.av}, {"rel", w.rel}}},
              {"theta_match", p.theta_match},
              {"theta_retrieval", p.theta_retrieval},
              {"retry_delta", p.retry_delta},
              {"max_retries", p.max_retries},
              {"beam_width", p.beam_width},
              {"seed", p.seed}};
}

inline json path_to_json(const std::optional<CompositionPath> &best) {
  json out;
  out["found"] = best.has_value();
  if (best) {
    out["path"] = best->services;
    out["score"] = best->score;
    out["mean_edge_sim"] = best->mean_edge_sim;
    out["qos"] = {{"response_time_ms", best->qos.response_time_ms},
                  {"cost", best->qos.cost},
                  {"availability", best->qos.availability},
                  {"reliability", best->qos.reliability}};
  } else {
    out["path"] = json::array();
    out["score"] = nullptr;
    out["mean_edge_sim"] = nullptr;
    out["qos"] = nullptr;
  }
  return out;
}

// {"found", "path", "score", "qos", "retries_used", "params_echo", ...}
inline json composition_result_to_json(const CompositionResult &r, const json &params_echo) {
  json out = path_to_json(r.best);
  out["retries_used"] = r.retries_used;
  out["iterations_run"] = r.iterations_run;
  out["ants_per_iteration"] = r.ants_per_iteration;
  out["theta_retrieval_used"] = r.theta_retrieval_used;
  out["params_echo"] = params_echo;
  return out;
}

} // namespace wsc
