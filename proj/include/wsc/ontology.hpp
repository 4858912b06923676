#pragma once

#include <wsc/error.hpp>
#include <wsc/json_io.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wsc {

using ConceptId = std::string;
using ConceptIndex = std::uint32_t;

// Name of the virtual root every taxonomy hangs from.
inline constexpr std::string_view kRootConcept = "Thing";

struct ConceptDecl {
  ConceptId id;
  std::optional<ConceptId> parent;
};

// Single-inheritance concept taxonomy. Index 0 is always the virtual root;
// the remaining indices follow declaration order. Immutable once built.
class Ontology {
public:
  static constexpr ConceptIndex root_index = 0;

  // Empty taxonomy: only the virtual root.
  Ontology() { add_root(); }

  static Ontology from_declarations(const std::vector<ConceptDecl> &decls) {
    Ontology ont;
    std::vector<std::optional<ConceptId>> parent_names;
    parent_names.reserve(decls.size());
    for (const auto &d : decls) {
      if (d.id.empty()) {
        throw Error(ErrorCode::schema, "concept id must be non-empty");
      }
      if (ont.index_.count(d.id) != 0) {
        throw Error(ErrorCode::duplicate_id, "concept \"" + d.id + "\"");
      }
      ont.index_.emplace(d.id, static_cast<ConceptIndex>(ont.ids_.size()));
      ont.ids_.push_back(d.id);
      parent_names.push_back(d.parent);
    }
    ont.parent_.assign(ont.ids_.size(), root_index);
    for (std::size_t i = 0; i < decls.size(); ++i) {
      const auto &p = parent_names[i];
      if (!p) {
        continue;
      }
      auto it = ont.index_.find(*p);
      if (it == ont.index_.end()) {
        throw Error(ErrorCode::unknown_concept,
                    "\"" + *p + "\" (parent of \"" + decls[i].id + "\")");
      }
      ont.parent_[i + 1] = it->second;
    }
    ont.compute_depths();
    return ont;
  }

  std::size_t size() const noexcept { return ids_.size(); }

  bool contains(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
  }

  ConceptIndex index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
      throw Error(ErrorCode::unknown_concept, "\"" + std::string(id) + "\"");
    }
    return it->second;
  }

  const ConceptId &id_of(ConceptIndex c) const { return ids_.at(c); }
  ConceptIndex parent_of(ConceptIndex c) const { return parent_.at(c); }
  unsigned depth(ConceptIndex c) const { return depth_.at(c); }
  unsigned depth(std::string_view id) const { return depth(index_of(id)); }

  ConceptIndex lowest_common_ancestor(ConceptIndex a, ConceptIndex b) const {
    while (depth_[a] > depth_[b]) a = parent_[a];
    while (depth_[b] > depth_[a]) b = parent_[b];
    while (a != b) {
      a = parent_[a];
      b = parent_[b];
    }
    return a;
  }

  // Wu-Palmer similarity, forced to 0 when the only shared ancestor is the
  // virtual root.
  double similarity(ConceptIndex a, ConceptIndex b) const {
    const ConceptIndex lca = lowest_common_ancestor(a, b);
    if (lca == root_index) {
      return 0.0;
    }
    return 2.0 * depth_[lca] / static_cast<double>(depth_[a] + depth_[b]);
  }

  double similarity(std::string_view a, std::string_view b) const {
    return similarity(index_of(a), index_of(b));
  }

  json to_json() const {
    json concepts = json::array();
    for (std::size_t i = 1; i < ids_.size(); ++i) {
      json c = {{"id", ids_[i]}};
      if (parent_[i] != root_index) {
        c["parent"] = ids_[parent_[i]];
      }
      concepts.push_back(std::move(c));
    }
    return json{{"concepts", std::move(concepts)}};
  }

  // FNV-1a over the canonical document; identifies an ontology from a
  // registry document.
  std::string checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : to_json().dump()) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out = "fnv1a64:";
    for (int shift = 60; shift >= 0; shift -= 4) {
      out.push_back(hex[(h >> shift) & 0xF]);
    }
    return out;
  }

  friend bool operator==(const Ontology &a, const Ontology &b) {
    return a.ids_ == b.ids_ && a.parent_ == b.parent_;
  }

private:
  void add_root() {
    ids_.emplace_back(kRootConcept);
    index_.emplace(std::string(kRootConcept), root_index);
    parent_.push_back(root_index);
    depth_.push_back(1);
  }

  void compute_depths() {
    enum : unsigned char { unvisited, active, done };
    std::vector<unsigned char> state(ids_.size(), unvisited);
    depth_.assign(ids_.size(), 0);
    depth_[root_index] = 1;
    state[root_index] = done;
    std::vector<ConceptIndex> stack;
    for (ConceptIndex start = 1; start < ids_.size(); ++start) {
      ConceptIndex c = start;
      while (state[c] == unvisited) {
        state[c] = active;
        stack.push_back(c);
        c = parent_[c];
      }
      if (state[c] == active) {
        throw Error(ErrorCode::cycle, "through concept \"" + ids_[c] + "\"");
      }
      unsigned d = depth_[c];
      while (!stack.empty()) {
        ConceptIndex top = stack.back();
        stack.pop_back();
        depth_[top] = ++d;
        state[top] = done;
      }
    }
  }

  std::vector<ConceptId> ids_;
  std::vector<ConceptIndex> parent_;
  std::vector<unsigned> depth_;
  std::unordered_map<std::string, ConceptIndex> index_;
};

// {"concepts": [{"id": "...", "parent": "..."}]}; the parent field is
// optional and the root is never named.
inline Ontology load_ontology(const json &doc) {
  const std::string where = "ontology document";
  std::vector<ConceptDecl> decls;
  for (const auto &c : jsonio::get_array(doc, "concepts", where)) {
    ConceptDecl d;
    d.id = jsonio::get_string(c, "id", "concept");
    if (c.contains("parent") && !c["parent"].is_null()) {
      d.parent = jsonio::get_string(c, "parent", "concept \"" + d.id + "\"");
    }
    decls.push_back(std::move(d));
  }
  return Ontology::from_declarations(decls);
}

// Threshold test shared by every match decision. The slack absorbs rounding
// in thresholds produced by repeated subtraction (0.7 - 0.1 - 0.1).
inline constexpr double kThresholdSlack = 1e-12;

inline bool meets_threshold(double value, double threshold) {
  return value >= threshold - kThresholdSlack;
}

inline json save_ontology(const Ontology &ont) { return ont.to_json(); }

inline double concept_similarity(const Ontology &ont, std::string_view a,
                                 std::string_view b) {
  return ont.similarity(a, b);
}

} // namespace wsc
