#pragma once

#include <wsc/error.hpp>
#include <wsc/json_io.hpp>
#include <wsc/ontology.hpp>
#include <wsc/registry.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wsc {

inline constexpr double kDefaultThetaMatch = 0.7;

// Which inputs of the target the source supplies, and how well.
struct EdgeInfo {
  std::map<ConceptId, double> provided; // target input -> best similarity
  double weight = 0.0;                  // sum(provided) / |inputs(target)|

  friend bool operator==(const EdgeInfo &, const EdgeInfo &) = default;
};

namespace detail {

struct ResolvedConcepts {
  std::vector<ConceptIndex> inputs;  // same order as the service's set
  std::vector<ConceptIndex> outputs;
};

inline ResolvedConcepts resolve(const Ontology &ont,
                                const ServiceDescription &s) {
  ResolvedConcepts r;
  r.inputs.reserve(s.inputs.size());
  r.outputs.reserve(s.outputs.size());
  for (const auto &c : s.inputs) r.inputs.push_back(ont.index_of(c));
  for (const auto &c : s.outputs) r.outputs.push_back(ont.index_of(c));
  return r;
}

inline void check_theta(double theta, const char *name) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::invalid_value,
                std::string(name) + " must lie in (0, 1]");
  }
}

inline std::optional<EdgeInfo> match_resolved(const Ontology &ont,
                                              const ResolvedConcepts &from,
                                              const ResolvedConcepts &to,
                                              const ServiceDescription &to_svc,
                                              double theta) {
  if (to.inputs.empty()) {
    return std::nullopt;
  }
  EdgeInfo info;
  double sum = 0.0;
  auto name = to_svc.inputs.begin();
  for (ConceptIndex in : to.inputs) {
    double best = 0.0;
    for (ConceptIndex out : from.outputs) {
      best = std::max(best, ont.similarity(out, in));
    }
    if (meets_threshold(best, theta)) {
      info.provided.emplace(*name, best);
      sum += best;
    }
    ++name;
  }
  if (info.provided.empty()) {
    return std::nullopt;
  }
  info.weight = sum / static_cast<double>(to.inputs.size());
  return info;
}

} // namespace detail

inline std::optional<EdgeInfo> edge_match(const Ontology &ont,
                                          const ServiceDescription &from,
                                          const ServiceDescription &to,
                                          double theta_match) {
  detail::check_theta(theta_match, "theta_match");
  if (from.id == to.id) {
    throw Error(ErrorCode::invalid_value,
                "edge_match on service \"" + from.id + "\" with itself");
  }
  return detail::match_resolved(ont, detail::resolve(ont, from),
                                detail::resolve(ont, to), to, theta_match);
}

// Directed service graph: an edge s -> t exists when some output of s
// matches some input of t at or above theta_match.
class SemanticNetwork {
public:
  using Adjacency = std::map<ServiceId, EdgeInfo>;

  explicit SemanticNetwork(double theta_match = kDefaultThetaMatch)
      : theta_match_(theta_match) {
    detail::check_theta(theta_match, "theta_match");
  }

  double theta_match() const noexcept { return theta_match_; }
  std::size_t node_count() const noexcept { return out_.size(); }

  std::size_t edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto &[_, adj] : out_) n += adj.size();
    return n;
  }

  bool contains(const ServiceId &id) const { return out_.count(id) != 0; }

  std::vector<ServiceId> nodes() const {
    std::vector<ServiceId> ids;
    ids.reserve(out_.size());
    for (const auto &[id, _] : out_) ids.push_back(id);
    return ids;
  }

  const Adjacency &out_edges(const ServiceId &id) const {
    auto it = out_.find(id);
    if (it == out_.end()) {
      throw Error(ErrorCode::unknown_service, "\"" + id + "\" not in network");
    }
    return it->second;
  }

  const EdgeInfo *edge(const ServiceId &from, const ServiceId &to) const {
    auto it = out_.find(from);
    if (it == out_.end()) return nullptr;
    auto e = it->second.find(to);
    return e == it->second.end() ? nullptr : &e->second;
  }

  void add_node(const ServiceId &id) {
    if (!out_.emplace(id, Adjacency{}).second) {
      throw Error(ErrorCode::duplicate_id, "\"" + id + "\" already in network");
    }
  }

  void set_edge(const ServiceId &from, const ServiceId &to, EdgeInfo info) {
    if (from == to) {
      throw Error(ErrorCode::invalid_value, "self-edge on \"" + from + "\"");
    }
    if (!contains(to)) {
      throw Error(ErrorCode::unknown_service, "\"" + to + "\" not in network");
    }
    auto it = out_.find(from);
    if (it == out_.end()) {
      throw Error(ErrorCode::unknown_service, "\"" + from + "\" not in network");
    }
    it->second.insert_or_assign(to, std::move(info));
  }

  friend bool operator==(const SemanticNetwork &,
                         const SemanticNetwork &) = default;

private:
  double theta_match_;
  std::map<ServiceId, Adjacency> out_;
};

inline SemanticNetwork build_network(const Registry &reg, const Ontology &ont,
                                     double theta_match = kDefaultThetaMatch) {
  SemanticNetwork net(theta_match);
  const auto &svcs = reg.services();
  std::vector<detail::ResolvedConcepts> resolved;
  resolved.reserve(svcs.size());
  for (const auto &s : svcs) {
    resolved.push_back(detail::resolve(ont, s));
    net.add_node(s.id);
  }
  for (std::size_t i = 0; i < svcs.size(); ++i) {
    for (std::size_t j = 0; j < svcs.size(); ++j) {
      if (i == j) continue;
      if (auto e = detail::match_resolved(ont, resolved[i], resolved[j],
                                          svcs[j], theta_match)) {
        net.set_edge(svcs[i].id, svcs[j].id, std::move(*e));
      }
    }
  }
  return net;
}

// Adds a registered service and every edge touching it. The result equals
// build_network over the registry restricted to the network's nodes.
inline void add_service_edges(SemanticNetwork &net, const Ontology &ont,
                              const Registry &reg, const ServiceId &id) {
  if (net.contains(id)) {
    throw Error(ErrorCode::duplicate_id, "\"" + id + "\" already in network");
  }
  const auto &svc = reg.at(id);
  const auto mine = detail::resolve(ont, svc);
  const double theta = net.theta_match();
  std::vector<std::pair<ServiceId, EdgeInfo>> incoming, outgoing;
  for (const auto &other_id : net.nodes()) {
    const auto &other = reg.at(other_id);
    const auto theirs = detail::resolve(ont, other);
    if (auto e = detail::match_resolved(ont, theirs, mine, svc, theta)) {
      incoming.emplace_back(other_id, std::move(*e));
    }
    if (auto e = detail::match_resolved(ont, mine, theirs, other, theta)) {
      outgoing.emplace_back(other_id, std::move(*e));
    }
  }
  net.add_node(id);
  for (auto &[from, e] : incoming) net.set_edge(from, id, std::move(e));
  for (auto &[to, e] : outgoing) net.set_edge(id, to, std::move(e));
}

inline json network_to_json(const SemanticNetwork &net) {
  json nodes = json::array();
  json edges = json::array();
  for (const auto &id : net.nodes()) {
    nodes.push_back(id);
    for (const auto &[to, e] : net.out_edges(id)) {
      edges.push_back({{"from", id},
                       {"to", to},
                       {"weight", e.weight},
                       {"provided", e.provided}});
    }
  }
  return json{{"theta_match", net.theta_match()},
              {"nodes", std::move(nodes)},
              {"edges", std::move(edges)}};
}

inline SemanticNetwork network_from_json(const json &doc) {
  const std::string where = "network document";
  SemanticNetwork net(jsonio::get_number(doc, "theta_match", where));
  for (const auto &n : jsonio::get_array(doc, "nodes", where)) {
    if (!n.is_string()) {
      throw Error(ErrorCode::schema, "network nodes must be strings");
    }
    net.add_node(n.get<std::string>());
  }
  for (const auto &e : jsonio::get_array(doc, "edges", where)) {
    EdgeInfo info;
    info.weight = jsonio::get_number(e, "weight", "network edge");
    const json &p = jsonio::require(e, "provided", "network edge");
    if (!p.is_object()) {
      throw Error(ErrorCode::schema, "edge \"provided\" must be an object");
    }
    for (const auto &[c, sim] : p.items()) {
      if (!sim.is_number()) {
        throw Error(ErrorCode::schema, "edge similarity must be a number");
      }
      info.provided.emplace(c, sim.get<double>());
    }
    net.set_edge(jsonio::get_string(e, "from", "network edge"),
                 jsonio::get_string(e, "to", "network edge"), std::move(info));
  }
  return net;
}

} // namespace wsc
