#pragma once

#include <wsc/error.hpp>
#include <wsc/json_io.hpp>
#include <wsc/ontology.hpp>
#include <wsc/registry.hpp>
#include <wsc/request.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace wsc {

inline constexpr std::size_t kDefaultLeafCap = 10;
inline constexpr std::size_t kDefaultBeamWidth = 3;
inline constexpr double kDefaultThetaRetrieval = 0.7;

using ConceptFrequency = std::map<ConceptIndex, unsigned>;

// Concept-frequency representative of a service or a cluster.
struct Signature {
  ConceptFrequency in_freq;
  ConceptFrequency out_freq;

  Signature &operator+=(const Signature &other) {
    for (const auto &[c, n] : other.in_freq) in_freq[c] += n;
    for (const auto &[c, n] : other.out_freq) out_freq[c] += n;
    return *this;
  }

  friend bool operator==(const Signature &, const Signature &) = default;
};

inline Signature service_signature(const Ontology &ont,
                                   const ServiceDescription &svc) {
  Signature sig;
  for (const auto &c : svc.inputs) sig.in_freq[ont.index_of(c)] = 1;
  for (const auto &c : svc.outputs) sig.out_freq[ont.index_of(c)] = 1;
  return sig;
}

inline Signature request_signature(const Ontology &ont, const Request &req) {
  Signature sig;
  for (const auto &c : req.provided) sig.in_freq[ont.index_of(c)] = 1;
  for (const auto &c : req.required) sig.out_freq[ont.index_of(c)] = 1;
  return sig;
}

namespace detail {

inline double best_match(const Ontology &ont, ConceptIndex c,
                         const ConceptFrequency &side) {
  double best = 0.0;
  for (const auto &[other, _] : side) {
    best = std::max(best, ont.similarity(c, other));
    if (best == 1.0) break;
  }
  return best;
}

} // namespace detail

// Frequency-weighted average, taken over both sides, of each concept's best
// similarity against the opposite side.
inline double coverage(const Ontology &ont, const ConceptFrequency &p,
                       const ConceptFrequency &q) {
  if (p.empty() && q.empty()) return 1.0;
  if (p.empty() || q.empty()) return 0.0;
  double num = 0.0;
  double den = 0.0;
  for (const auto &[c, n] : p) {
    num += n * detail::best_match(ont, c, q);
    den += n;
  }
  for (const auto &[c, n] : q) {
    num += n * detail::best_match(ont, c, p);
    den += n;
  }
  return num / den;
}

inline double signature_similarity(const Ontology &ont, const Signature &p,
                                   const Signature &q) {
  return 0.5 * (coverage(ont, p.in_freq, q.in_freq) +
                coverage(ont, p.out_freq, q.out_freq));
}

// Mean over the service inputs of their best match against the provided
// concepts; 1 for services with no inputs.
inline double invokability_score(const Ontology &ont,
                                 const ConceptFrequency &inputs,
                                 const ConceptFrequency &provided) {
  if (inputs.empty()) return 1.0;
  double sum = 0.0;
  for (const auto &[c, _] : inputs) sum += detail::best_match(ont, c, provided);
  return sum / static_cast<double>(inputs.size());
}

namespace detail {

// Binary merge history; ids below n are items, n + k is the k-th merge.
struct Dendrogram {
  std::size_t n_items = 0;
  std::vector<std::pair<std::size_t, std::size_t>> merges;
  std::vector<std::size_t> sizes; // indexed by dendrogram node id
};

// Complete-linkage agglomeration with distance 1 - signature_similarity.
// Among equal distances the pair with the lexicographically smallest
// (min id, min id) cluster keys merges first; a cluster's key is its
// smallest member id.
inline Dendrogram complete_linkage(const Ontology &ont,
                                   const std::vector<ServiceId> &ids,
                                   const std::vector<const Signature *> &sigs) {
  const std::size_t n = ids.size();
  Dendrogram dg;
  dg.n_items = n;
  dg.sizes.assign(n, 1);
  if (n < 2) return dg;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  std::vector<std::size_t> key(n);
  for (std::size_t r = 0; r < n; ++r) key[order[r]] = r;

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = 1.0 - signature_similarity(ont, *sigs[i], *sigs[j]);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }

  std::vector<char> active(n, 1);
  std::vector<std::size_t> node(n);
  for (std::size_t i = 0; i < n; ++i) node[i] = i;

  auto rank = [&](std::size_t a, std::size_t b) {
    return std::make_tuple(dist[a * n + b], std::min(key[a], key[b]),
                           std::max(key[a], key[b]));
  };
  std::vector<std::size_t> nn(n, n);
  auto rescan = [&](std::size_t i) {
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      if (best == n || rank(i, j) < rank(i, best)) best = j;
    }
    nn[i] = best;
  };
  for (std::size_t i = 0; i < n; ++i) rescan(i);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t i = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c]) continue;
      if (i == n || rank(c, nn[c]) < rank(i, nn[i])) i = c;
    }
    std::size_t j = nn[i];
    std::size_t keep = key[i] < key[j] ? i : j;
    std::size_t gone = keep == i ? j : i;

    dg.merges.emplace_back(node[keep], node[gone]);
    dg.sizes.push_back(dg.sizes[node[keep]] + dg.sizes[node[gone]]);
    node[keep] = n + step;
    active[gone] = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == keep) continue;
      const double d = std::max(dist[keep * n + k], dist[gone * n + k]);
      dist[keep * n + k] = d;
      dist[k * n + keep] = d;
    }
    // The kept slot retains the smaller key, so only clusters whose nearest
    // neighbour was one of the merged pair can change their choice.
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k]) continue;
      if (k == keep || nn[k] == keep || nn[k] == gone) rescan(k);
    }
  }
  return dg;
}

} // namespace detail

// Hierarchical cluster tree. Leaves hold service ids; each node caches the
// sum of the signatures below it.
class ClusterTree {
public:
  using NodeId = std::size_t;
  static constexpr NodeId npos = std::numeric_limits<NodeId>::max();

  struct Node {
    Signature signature;
    std::vector<NodeId> children;  // empty for leaf clusters
    std::vector<ServiceId> members; // sorted; leaf clusters only
    NodeId parent = npos;
    std::size_t service_count = 0;
    ServiceId min_member;

    bool is_leaf() const noexcept { return children.empty(); }
  };

  explicit ClusterTree(std::size_t leaf_cap = kDefaultLeafCap)
      : leaf_cap_(leaf_cap) {
    if (leaf_cap == 0) {
      throw Error(ErrorCode::invalid_value, "leaf cap must be positive");
    }
  }

  std::size_t leaf_cap() const noexcept { return leaf_cap_; }
  bool empty() const noexcept { return nodes_.empty(); }
  NodeId root() const noexcept { return root_; }
  const Node &node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t service_count() const noexcept { return leaf_of_.size(); }
  bool contains(const ServiceId &id) const { return leaf_of_.count(id) != 0; }

  NodeId leaf_of(const ServiceId &id) const {
    auto it = leaf_of_.find(id);
    if (it == leaf_of_.end()) {
      throw Error(ErrorCode::unknown_service, "\"" + id + "\" not in tree");
    }
    return it->second;
  }

  const Signature &signature_of(const ServiceId &id) const {
    auto it = service_sigs_.find(id);
    if (it == service_sigs_.end()) {
      throw Error(ErrorCode::unknown_service, "\"" + id + "\" not in tree");
    }
    return it->second;
  }

  std::vector<NodeId> leaf_clusters() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].is_leaf()) out.push_back(i);
    }
    return out;
  }

  // Empty when every structural invariant holds; otherwise one entry per
  // violation found.
  std::vector<std::string> check_invariants() const {
    std::vector<std::string> problems;
    if (nodes_.empty()) return problems;
    std::map<ServiceId, std::size_t> seen;
    for (NodeId i = 0; i < nodes_.size(); ++i) {
      const Node &nd = nodes_[i];
      const std::string tag = "node " + std::to_string(i);
      if (i != root_ && nd.parent == npos) {
        problems.push_back(tag + " is detached");
      }
      if (nd.is_leaf()) {
        if (nd.members.empty() || nd.members.size() > 2 * leaf_cap_) {
          problems.push_back(tag + " holds " +
                             std::to_string(nd.members.size()) + " services");
        }
        Signature sum;
        for (const auto &m : nd.members) {
          ++seen[m];
          auto it = leaf_of_.find(m);
          if (it == leaf_of_.end() || it->second != i) {
            problems.push_back(tag + " member " + m + " not indexed");
          }
          auto sig = service_sigs_.find(m);
          if (sig != service_sigs_.end()) sum += sig->second;
        }
        if (!(sum == nd.signature)) {
          problems.push_back(tag + " signature differs from its members");
        }
        if (nd.service_count != nd.members.size()) {
          problems.push_back(tag + " service count mismatch");
        }
      } else {
        Signature sum;
        std::size_t count = 0;
        for (NodeId c : nd.children) {
          if (nodes_[c].parent != i) {
            problems.push_back(tag + " child " + std::to_string(c) +
                               " has wrong parent");
          }
          sum += nodes_[c].signature;
          count += nodes_[c].service_count;
        }
        if (!(sum == nd.signature)) {
          problems.push_back(tag + " signature differs from children sum");
        }
        if (count != nd.service_count) {
          problems.push_back(tag + " service count mismatch");
        }
        if (!nd.members.empty()) {
          problems.push_back(tag + " is internal but holds services");
        }
      }
    }
    for (const auto &[id, n] : seen) {
      if (n != 1) {
        problems.push_back("service " + id + " appears in " +
                           std::to_string(n) + " leaves");
      }
    }
    if (seen.size() != leaf_of_.size()) {
      problems.push_back("leaf index does not match leaf membership");
    }
    return problems;
  }

private:
  friend ClusterTree build_tree(const Registry &, const Ontology &,
                                std::size_t);
  friend void insert_service(ClusterTree &, const Ontology &,
                             const ServiceDescription &);
  friend ClusterTree tree_from_json(const json &, const Registry &,
                                    const Ontology &);

  NodeId new_node() {
    nodes_.emplace_back();
    return nodes_.size() - 1;
  }

  NodeId new_leaf(std::vector<ServiceId> members) {
    std::sort(members.begin(), members.end());
    const NodeId id = new_node();
    for (const auto &m : members) {
      nodes_[id].signature += service_sigs_.at(m);
      leaf_of_[m] = id;
    }
    nodes_[id].service_count = members.size();
    nodes_[id].min_member = members.front();
    nodes_[id].members = std::move(members);
    return id;
  }

  void attach(NodeId parent, NodeId child) {
    nodes_[child].parent = parent;
    nodes_[parent].children.push_back(child);
    nodes_[parent].signature += nodes_[child].signature;
    nodes_[parent].service_count += nodes_[child].service_count;
    if (nodes_[parent].min_member.empty() ||
        nodes_[child].min_member < nodes_[parent].min_member) {
      nodes_[parent].min_member = nodes_[child].min_member;
    }
  }

  // Emits a dendrogram subtree: subtrees of at most leaf_cap services become
  // leaf clusters. Returns the id of the emitted node.
  NodeId emit(const detail::Dendrogram &dg, std::size_t dnode,
              const std::vector<ServiceId> &ids) {
    if (dg.sizes[dnode] <= leaf_cap_) {
      std::vector<ServiceId> members;
      std::vector<std::size_t> stack{dnode};
      while (!stack.empty()) {
        std::size_t d = stack.back();
        stack.pop_back();
        if (d < dg.n_items) {
          members.push_back(ids[d]);
        } else {
          stack.push_back(dg.merges[d - dg.n_items].first);
          stack.push_back(dg.merges[d - dg.n_items].second);
        }
      }
      return new_leaf(std::move(members));
    }
    const auto [left, right] = dg.merges[dnode - dg.n_items];
    const NodeId l = emit(dg, left, ids);
    const NodeId r = emit(dg, right, ids);
    const NodeId id = new_node();
    attach(id, l);
    attach(id, r);
    return id;
  }

  detail::Dendrogram cluster_members(const Ontology &ont,
                                     const std::vector<ServiceId> &ids) const {
    std::vector<const Signature *> sigs;
    sigs.reserve(ids.size());
    for (const auto &id : ids) sigs.push_back(&service_sigs_.at(id));
    return detail::complete_linkage(ont, ids, sigs);
  }

  std::size_t leaf_cap_;
  NodeId root_ = npos;
  std::vector<Node> nodes_;
  std::unordered_map<ServiceId, NodeId> leaf_of_;
  std::unordered_map<ServiceId, Signature> service_sigs_;
};

inline ClusterTree build_tree(const Registry &reg, const Ontology &ont,
                              std::size_t leaf_cap = kDefaultLeafCap) {
  if (reg.empty()) {
    throw Error(ErrorCode::invalid_value, "cannot cluster an empty registry");
  }
  ClusterTree tree(leaf_cap);
  std::vector<ServiceId> ids;
  ids.reserve(reg.size());
  for (const auto &s : reg.services()) {
    ids.push_back(s.id);
    tree.service_sigs_.emplace(s.id, service_signature(ont, s));
  }
  const auto dg = tree.cluster_members(ont, ids);
  const std::size_t top = dg.merges.empty() ? 0 : dg.n_items + dg.merges.size() - 1;
  tree.root_ = tree.emit(dg, top, ids);
  return tree;
}

// Descends towards the most similar child, joins that leaf cluster, and
// re-splits the leaf locally once it exceeds twice the leaf cap.
inline void insert_service(ClusterTree &tree, const Ontology &ont,
                           const ServiceDescription &svc) {
  using NodeId = ClusterTree::NodeId;
  if (tree.contains(svc.id)) {
    throw Error(ErrorCode::duplicate_id, "service \"" + svc.id + "\" already clustered");
  }
  Signature sig = service_signature(ont, svc);
  if (tree.empty()) {
    tree.service_sigs_.emplace(svc.id, std::move(sig));
    tree.root_ = tree.new_leaf({svc.id});
    return;
  }

  NodeId cur = tree.root_;
  std::vector<NodeId> path{cur};
  while (!tree.nodes_[cur].is_leaf()) {
    NodeId best = ClusterTree::npos;
    double best_sim = -1.0;
    for (NodeId c : tree.nodes_[cur].children) {
      const auto &child = tree.nodes_[c];
      const double s = signature_similarity(ont, child.signature, sig);
      if (best == ClusterTree::npos || s > best_sim ||
          (s == best_sim &&
           std::tie(child.service_count, child.min_member) <
               std::tie(tree.nodes_[best].service_count,
                        tree.nodes_[best].min_member))) {
        best = c;
        best_sim = s;
      }
    }
    cur = best;
    path.push_back(cur);
  }

  for (NodeId n : path) {
    auto &nd = tree.nodes_[n];
    nd.signature += sig;
    ++nd.service_count;
    if (svc.id < nd.min_member) nd.min_member = svc.id;
  }
  auto &members = tree.nodes_[cur].members;
  members.insert(std::lower_bound(members.begin(), members.end(), svc.id), svc.id);
  tree.leaf_of_[svc.id] = cur;
  tree.service_sigs_.emplace(svc.id, std::move(sig));

  if (tree.nodes_[cur].members.size() <= 2 * tree.leaf_cap_) return;

  // Overfull: cluster the members and hang the result under this node.
  std::vector<ServiceId> ids = std::move(tree.nodes_[cur].members);
  tree.nodes_[cur].members.clear();
  const auto dg = tree.cluster_members(ont, ids);
  const auto [left, right] = dg.merges.back();
  const NodeId l = tree.emit(dg, left, ids);
  const NodeId r = tree.emit(dg, right, ids);
  for (NodeId c : {l, r}) {
    tree.nodes_[c].parent = cur;
    tree.nodes_[cur].children.push_back(c);
  }
}

struct RankedService {
  ServiceId id;
  double score = 0.0;

  friend bool operator==(const RankedService &, const RankedService &) = default;
};

struct RetrievalResult {
  std::vector<RankedService> services; // descending score, then id
  std::size_t comparisons = 0;
  std::vector<ClusterTree::NodeId> leaves_opened;
};

namespace detail {

inline void rank_services(std::vector<RankedService> &v) {
  std::sort(v.begin(), v.end(), [](const RankedService &a, const RankedService &b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
}

} // namespace detail

// Best-first descent from the root. Children of an expanded node are scored
// by input-side coverage against the request's provided concepts; the k
// best-scoring leaf clusters reached are opened and their members scored by
// invokability. Each node or service scoring is one comparison.
inline RetrievalResult find_initial_services(const ClusterTree &tree,
                                             const Ontology &ont,
                                             const Request &req,
                                             double theta_retrieval,
                                             std::size_t beam_width) {
  using NodeId = ClusterTree::NodeId;
  if (beam_width == 0) {
    throw Error(ErrorCode::invalid_value, "beam width must be positive");
  }
  RetrievalResult result;
  if (tree.empty()) return result;
  const Signature want = request_signature(ont, req);

  struct Entry {
    double score;
    std::size_t count;
    const ServiceId *min_member;
    NodeId node;
  };
  auto worse = [](const Entry &a, const Entry &b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.count != b.count) return a.count > b.count;
    return *a.min_member > *b.min_member;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> frontier(worse);
  const auto &root = tree.node(tree.root());
  frontier.push({1.0, root.service_count, &root.min_member, tree.root()});

  while (!frontier.empty() && result.leaves_opened.size() < beam_width) {
    const Entry top = frontier.top();
    frontier.pop();
    const auto &nd = tree.node(top.node);
    if (nd.is_leaf()) {
      result.leaves_opened.push_back(top.node);
      for (const auto &m : nd.members) {
        ++result.comparisons;
        const double s =
            invokability_score(ont, tree.signature_of(m).in_freq, want.in_freq);
        if (meets_threshold(s, theta_retrieval)) result.services.push_back({m, s});
      }
      continue;
    }
    for (NodeId c : nd.children) {
      const auto &child = tree.node(c);
      ++result.comparisons;
      frontier.push({coverage(ont, child.signature.in_freq, want.in_freq),
                     child.service_count, &child.min_member, c});
    }
  }
  detail::rank_services(result.services);
  return result;
}

// Baseline: score every registered service.
inline RetrievalResult linear_scan(const Registry &reg, const Ontology &ont,
                                   const Request &req, double theta_retrieval) {
  RetrievalResult result;
  const Signature want = request_signature(ont, req);
  for (const auto &s : reg.services()) {
    ++result.comparisons;
    const double score =
        invokability_score(ont, service_signature(ont, s).in_freq, want.in_freq);
    if (meets_threshold(score, theta_retrieval)) result.services.push_back({s.id, score});
  }
  detail::rank_services(result.services);
  return result;
}

namespace detail {

inline json frequency_to_json(const Ontology &ont, const ConceptFrequency &f) {
  json out = json::object();
  for (const auto &[c, n] : f) out[ont.id_of(c)] = n;
  return out;
}

inline json node_to_json(const ClusterTree &tree, const Ontology &ont,
                         ClusterTree::NodeId id) {
  const auto &nd = tree.node(id);
  json out = {{"size", nd.service_count},
              {"signature",
               {{"in", frequency_to_json(ont, nd.signature.in_freq)},
                {"out", frequency_to_json(ont, nd.signature.out_freq)}}}};
  if (nd.is_leaf()) {
    out["services"] = nd.members;
  } else {
    json children = json::array();
    for (auto c : nd.children) children.push_back(node_to_json(tree, ont, c));
    out["children"] = std::move(children);
  }
  return out;
}

} // namespace detail

// Nested cluster structure with leaf membership and signatures.
inline json tree_to_json(const ClusterTree &tree, const Ontology &ont) {
  json out = {{"leaf_cap", tree.leaf_cap()}};
  out["root"] = tree.empty() ? json(nullptr) : detail::node_to_json(tree, ont, tree.root());
  return out;
}

// Rebuilds a persisted tree. Signatures are recomputed from the registry;
// the leaves must partition the registry's services.
inline ClusterTree tree_from_json(const json &doc, const Registry &reg,
                                  const Ontology &ont) {
  const std::string where = "cluster tree document";
  const json &cap = jsonio::require(doc, "leaf_cap", where);
  if (!cap.is_number_unsigned()) {
    throw Error(ErrorCode::schema, "leaf_cap must be a positive integer");
  }
  ClusterTree tree(cap.get<std::size_t>());
  const json &root = jsonio::require(doc, "root", where);
  if (root.is_null()) {
    if (!reg.empty()) {
      throw Error(ErrorCode::invalid_value, "cluster tree is empty but registry is not");
    }
    return tree;
  }
  for (const auto &s : reg.services()) {
    tree.service_sigs_.emplace(s.id, service_signature(ont, s));
  }
  std::size_t seen = 0;
  auto build = [&](auto &&self, const json &nd) -> ClusterTree::NodeId {
    if (nd.contains("services")) {
      std::vector<ServiceId> members;
      for (const auto &m : jsonio::get_array(nd, "services", "leaf cluster")) {
        if (!m.is_string()) {
          throw Error(ErrorCode::schema, "leaf members must be strings");
        }
        const auto id = m.get<std::string>();
        if (!reg.contains(id)) {
          throw Error(ErrorCode::unknown_service, "\"" + id + "\" in cluster tree");
        }
        if (tree.leaf_of_.count(id) != 0) {
          throw Error(ErrorCode::duplicate_id, "\"" + id + "\" in two leaf clusters");
        }
        tree.leaf_of_[id] = ClusterTree::npos;
        members.push_back(id);
      }
      if (members.empty()) {
        throw Error(ErrorCode::invalid_value, "empty leaf cluster");
      }
      seen += members.size();
      return tree.new_leaf(std::move(members));
    }
    const auto &kids = jsonio::get_array(nd, "children", "cluster node");
    if (kids.empty()) {
      throw Error(ErrorCode::invalid_value, "internal cluster node without children");
    }
    std::vector<ClusterTree::NodeId> ids;
    for (const auto &k : kids) ids.push_back(self(self, k));
    const auto id = tree.new_node();
    for (auto c : ids) tree.attach(id, c);
    return id;
  };
  tree.root_ = build(build, root);
  if (seen != reg.size()) {
    throw Error(ErrorCode::invalid_value,
                "cluster tree covers " + std::to_string(seen) + " of " +
                    std::to_string(reg.size()) + " registered services");
  }
  return tree;
}

} // namespace wsc
