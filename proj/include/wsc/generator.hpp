#pragma once

#include <wsc/error.hpp>
#include <wsc/json_io.hpp>
#include <wsc/ontology.hpp>
#include <wsc/registry.hpp>
#include <wsc/request.hpp>
#include <wsc/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace wsc {

struct GenParams {
  std::size_t n_services = 20;
  std::size_t n_concepts = 60;
  std::size_t taxonomy_depth = 4; // levels below the virtual root
  std::size_t n_domains = 0;      // top-level concepts; 0 picks n_concepts / 30
  std::size_t max_io_size = 2;
  double rt_min = 10.0, rt_max = 1000.0;
  double cost_min = 0.0, cost_max = 50.0;
  double av_min = 0.8, av_max = 1.0;
  double rel_min = 0.8, rel_max = 1.0;
  double chain_density = 0.3;
  std::size_t n_requests = 10;
  std::uint64_t seed = 1;

  std::size_t domains() const {
    return n_domains != 0 ? n_domains : std::max<std::size_t>(2, n_concepts / 30);
  }

  void validate() const {
    auto fail = [](const std::string &what) {
      throw Error(ErrorCode::invalid_value, "generator: " + what);
    };
    if (n_services == 0) fail("n_services must be positive");
    if (taxonomy_depth == 0) fail("taxonomy_depth must be positive");
    if (max_io_size == 0) fail("max_io_size must be positive");
    if (n_requests == 0) fail("n_requests must be positive");
    if (n_concepts < domains() + taxonomy_depth - 1) {
      fail("n_concepts too small for the domain count and taxonomy depth");
    }
    if (!(rt_min >= 0.0 && rt_max >= rt_min)) fail("bad response time range");
    if (!(cost_min >= 0.0 && cost_max >= cost_min)) fail("bad cost range");
    if (!(av_min > 0.0 && av_max <= 1.0 && av_max >= av_min)) fail("bad availability range");
    if (!(rel_min > 0.0 && rel_max <= 1.0 && rel_max >= rel_min)) {
      fail("bad reliability range");
    }
    if (!(chain_density >= 0.0 && chain_density <= 1.0)) fail("chain_density must lie in [0, 1]");
  }
};

struct Dataset {
  Ontology ontology;
  Registry registry;
  std::vector<Request> requests; // requests[0] is solvable by construction
};

namespace detail {

inline std::string padded(char prefix, std::size_t i, std::size_t total) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::max<std::size_t>(3, std::to_string(total).size());
  return std::string(1, prefix) + std::string(width - std::min(width, digits.size()), '0') +
         digits;
}

inline double rounded(double v, double step) { return std::round(v / step) * step; }

} // namespace detail

// Random taxonomy of the requested depth, services drawn from topic subtrees
// (the concepts below each second-level concept), optional planted links
// between an earlier service's output and a later service's input, and one
// planted three-service chain whose request opens the request list.
inline Dataset generate_dataset(const GenParams &gp) {
  gp.validate();
  Engine eng = make_engine(derive_seed(gp.seed, {0x67656E}));

  // Taxonomy. level[c] counts edges below the root (domains are level 1).
  std::vector<ConceptDecl> decls;
  std::vector<std::size_t> level;
  auto add_concept = [&](std::optional<std::size_t> parent) {
    decls.push_back({detail::padded('c', decls.size() + 1, gp.n_concepts),
                     parent ? std::optional(decls[*parent].id) : std::nullopt});
    level.push_back(parent ? level[*parent] + 1 : 1);
    return decls.size() - 1;
  };
  for (std::size_t d = 0; d < gp.domains(); ++d) add_concept(std::nullopt);
  for (std::size_t p = 0; level[p] < gp.taxonomy_depth;) p = add_concept(p);
  while (decls.size() < gp.n_concepts) {
    std::vector<std::size_t> open;
    for (std::size_t c = 0; c < decls.size(); ++c) {
      if (level[c] < gp.taxonomy_depth) open.push_back(c);
    }
    add_concept(open[uniform_index(eng, open.size())]);
  }
  Dataset ds;
  ds.ontology = Ontology::from_declarations(decls);

  // Topics: top-most concepts at level min(2, depth); each concept belongs
  // to the topic that is its ancestor at that level (or none, if shallower).
  const std::size_t topic_level = std::min<std::size_t>(2, gp.taxonomy_depth);
  std::vector<std::size_t> parent_of(decls.size(), decls.size());
  for (std::size_t c = 0; c < decls.size(); ++c) {
    if (decls[c].parent) parent_of[c] = ds.ontology.index_of(*decls[c].parent) - 1;
  }
  std::vector<std::size_t> topic_ids;
  std::vector<std::vector<std::size_t>> topic_members;
  std::vector<std::size_t> topic_of(decls.size(), decls.size());
  for (std::size_t c = 0; c < decls.size(); ++c) {
    if (level[c] == topic_level) {
      topic_of[c] = topic_ids.size();
      topic_ids.push_back(c);
      topic_members.emplace_back();
    }
  }
  for (std::size_t c = 0; c < decls.size(); ++c) {
    std::size_t a = c;
    while (level[a] > topic_level) a = parent_of[a];
    if (level[a] == topic_level) topic_members[topic_of[a]].push_back(c);
  }

  auto sample = [&](std::size_t topic, std::size_t k) {
    const auto &pool = topic_members[topic];
    std::set<ConceptId> out;
    for (std::size_t tries = 0; out.size() < k && tries < 8 * k; ++tries) {
      out.insert(decls[pool[uniform_index(eng, pool.size())]].id);
    }
    return out;
  };
  auto random_qos = [&]() {
    QosVector q;
    q.response_time_ms = detail::rounded(uniform_real(eng, gp.rt_min, gp.rt_max), 0.1);
    q.cost = detail::rounded(uniform_real(eng, gp.cost_min, gp.cost_max), 0.01);
    q.availability = std::clamp(detail::rounded(uniform_real(eng, gp.av_min, gp.av_max), 1e-4),
                                gp.av_min, gp.av_max);
    q.reliability =
        std::clamp(detail::rounded(uniform_real(eng, gp.rel_min, gp.rel_max), 1e-4),
                   gp.rel_min, gp.rel_max);
    return q;
  };

  // Planted chain: X0 -> X1 -> X2 -> X3 over min(3, n) services. The four
  // concepts come from distinct topics where possible, so no two of them
  // match and the request needs the whole chain or a detour.
  const std::size_t chain_len = std::min<std::size_t>(3, gp.n_services);
  std::vector<std::size_t> topic_order(topic_ids.size());
  for (std::size_t t = 0; t < topic_order.size(); ++t) topic_order[t] = t;
  for (std::size_t i = topic_order.size(); i > 1; --i) {
    std::swap(topic_order[i - 1], topic_order[uniform_index(eng, i)]);
  }
  std::vector<std::size_t> chain_topics;
  std::vector<ConceptId> chain_concepts;
  for (std::size_t i = 0; i <= chain_len; ++i) {
    const std::size_t t = topic_order[i % topic_order.size()];
    const auto &pool = topic_members[t];
    ConceptId pick;
    for (std::size_t tries = 0; tries < 8; ++tries) {
      pick = decls[pool[uniform_index(eng, pool.size())]].id;
      if (std::find(chain_concepts.begin(), chain_concepts.end(), pick) ==
          chain_concepts.end()) {
        break;
      }
    }
    chain_topics.push_back(t);
    chain_concepts.push_back(std::move(pick));
  }
  std::vector<std::size_t> positions(gp.n_services);
  for (std::size_t i = 0; i < gp.n_services; ++i) positions[i] = i;
  for (std::size_t i = positions.size(); i > 1; --i) {
    std::swap(positions[i - 1], positions[uniform_index(eng, i)]);
  }
  positions.resize(chain_len);
  std::sort(positions.begin(), positions.end());

  ds.registry = Registry(ds.ontology.checksum());
  std::vector<std::size_t> service_topic;
  std::size_t next_link = 0;
  for (std::size_t i = 0; i < gp.n_services; ++i) {
    ServiceDescription s;
    s.id = detail::padded('s', i + 1, gp.n_services);
    s.name = "service " + std::to_string(i + 1);
    std::size_t topic;
    if (next_link < chain_len && positions[next_link] == i) {
      topic = chain_topics[next_link];
      s.inputs = {chain_concepts[next_link]};
      s.outputs = {chain_concepts[next_link + 1]};
      ++next_link;
    } else if (i > 0 && bernoulli(eng, gp.chain_density)) {
      const std::size_t p = uniform_index(eng, i);
      const auto &up = ds.registry.services()[p];
      topic = service_topic[p];
      s.inputs = sample(topic, uniform_int(eng, 1, gp.max_io_size));
      auto it = up.outputs.begin();
      std::advance(it, uniform_index(eng, up.outputs.size()));
      if (s.inputs.size() >= gp.max_io_size) s.inputs.erase(std::prev(s.inputs.end()));
      s.inputs.insert(*it);
      s.outputs = sample(topic, uniform_int(eng, 1, gp.max_io_size));
    } else {
      topic = uniform_index(eng, topic_ids.size());
      s.inputs = sample(topic, uniform_int(eng, 1, gp.max_io_size));
      s.outputs = sample(topic, uniform_int(eng, 1, gp.max_io_size));
    }
    s.qos = random_qos();
    service_topic.push_back(topic);
    ds.registry.add(ds.ontology, std::move(s));
  }

  ds.requests.push_back({{chain_concepts.front()}, {chain_concepts.back()}});
  const auto &svcs = ds.registry.services();
  while (ds.requests.size() < gp.n_requests) {
    const std::size_t s = uniform_index(eng, svcs.size());
    Request r;
    r.provided = svcs[s].inputs;
    if (bernoulli(eng, 0.5)) {
      const auto extra = sample(service_topic[s], 1);
      r.provided.insert(extra.begin(), extra.end());
    }
    std::vector<std::size_t> same;
    for (std::size_t t = 0; t < svcs.size(); ++t) {
      if (service_topic[t] == service_topic[s]) same.push_back(t);
    }
    r.required = svcs[same[uniform_index(eng, same.size())]].outputs;
    ds.requests.push_back(std::move(r));
  }
  return ds;
}

inline json gen_params_to_json(const GenParams &gp) {
  return json{{"n_services", gp.n_services},     {"n_concepts", gp.n_concepts},
              {"taxonomy_depth", gp.taxonomy_depth}, {"n_domains", gp.domains()},
              {"max_io_size", gp.max_io_size},   {"rt_range", {gp.rt_min, gp.rt_max}},
              {"cost_range", {gp.cost_min, gp.cost_max}},
              {"availability_range", {gp.av_min, gp.av_max}},
              {"reliability_range", {gp.rel_min, gp.rel_max}},
              {"chain_density", gp.chain_density}, {"n_requests", gp.n_requests},
              {"seed", gp.seed}};
}

} // namespace wsc
