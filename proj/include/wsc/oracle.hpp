#pragma once

#include <wsc/aco.hpp>
#include <wsc/error.hpp>

#include <optional>
#include <string>
#include <vector>

namespace wsc {

inline constexpr std::size_t kOracleGuardLimit = 14;

struct OracleOptions {
  std::size_t guard_limit = kOracleGuardLimit;
  bool force = false;
};

struct OracleResult {
  std::optional<CompositionPath> best;
  std::size_t paths_enumerated = 0; // goal-reaching paths scored
};

// Exhaustive search over the same space the ants explore: simple paths
// along network edges, starting from any service invokable from the
// request, where each step is invokable from what is already available and
// extension stops as soon as the goal is met (or max_path_len is reached).
inline OracleResult exhaustive_search(const SemanticNetwork &net, const Registry &reg,
                                      const Ontology &ont, const Request &req,
                                      double theta_match, unsigned max_path_len,
                                      const ScoreWeights &weights,
                                      const OracleOptions &opts = {}) {
  using Index = detail::SearchSpace::Index;
  if (!opts.force && net.node_count() > opts.guard_limit) {
    throw Error(ErrorCode::guard_limit,
                "oracle refuses " + std::to_string(net.node_count()) +
                    " services (limit " + std::to_string(opts.guard_limit) +
                    "); pass force to override");
  }
  if (max_path_len == 0) {
    throw Error(ErrorCode::invalid_value, "max_path_len must be positive");
  }
  const ScoreWeights w = weights.normalized();
  const detail::SearchSpace space(net, reg, ont, req, theta_match);

  OracleResult result;
  std::vector<Index> path;
  std::vector<char> visited(space.size(), 0);
  std::vector<ConceptIndex> available = space.provided();

  auto visit = [&](auto &&self, Index s) -> void {
    const std::size_t mark = available.size();
    path.push_back(s);
    visited[s] = 1;
    const auto &out = space.outputs(s);
    available.insert(available.end(), out.begin(), out.end());
    if (space.goal_met(available)) {
      ++result.paths_enumerated;
      auto p = space.materialize(path, w);
      if (!result.best || detail::better_path(p, *result.best)) result.best = std::move(p);
    } else if (path.size() < max_path_len) {
      for (const auto &a : space.arcs(s)) {
        if (!visited[a.to] && space.invokable(a.to, available)) self(self, a.to);
      }
    }
    available.resize(mark);
    visited[s] = 0;
    path.pop_back();
  };

  for (Index s = 0; s < space.size(); ++s) {
    if (space.invokable(s, available)) visit(visit, s);
  }
  return result;
}

inline std::optional<CompositionPath>
exhaustive_best(const SemanticNetwork &net, const Registry &reg, const Ontology &ont,
                const Request &req, double theta_match, unsigned max_path_len,
                const ScoreWeights &weights, const OracleOptions &opts = {}) {
  return exhaustive_search(net, reg, ont, req, theta_match, max_path_len, weights, opts)
      .best;
}

} // namespace wsc
