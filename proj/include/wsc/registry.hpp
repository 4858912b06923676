#pragma once

#include <wsc/error.hpp>
#include <wsc/json_io.hpp>
#include <wsc/ontology.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace wsc {

using ServiceId = std::string;

struct QosVector {
  double response_time_ms = 0.0;
  double cost = 0.0;
  double availability = 1.0;
  double reliability = 1.0;

  void validate(const std::string &where) const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(response_time_ms) || response_time_ms < 0.0) {
      throw Error(ErrorCode::invalid_value,
                  where + ": response_time_ms must be finite and >= 0");
    }
    if (!finite(cost) || cost < 0.0) {
      throw Error(ErrorCode::invalid_value,
                  where + ": cost must be finite and >= 0");
    }
    if (!finite(availability) || availability <= 0.0 || availability > 1.0) {
      throw Error(ErrorCode::invalid_value,
                  where + ": availability must lie in (0, 1]");
    }
    if (!finite(reliability) || reliability <= 0.0 || reliability > 1.0) {
      throw Error(ErrorCode::invalid_value,
                  where + ": reliability must lie in (0, 1]");
    }
  }

  friend bool operator==(const QosVector &, const QosVector &) = default;
};

struct ServiceDescription {
  ServiceId id;
  std::string name;
  std::set<ConceptId> inputs; // empty for source services
  std::set<ConceptId> outputs;
  QosVector qos;

  friend bool operator==(const ServiceDescription &,
                         const ServiceDescription &) = default;
};

inline void validate_service(const ServiceDescription &svc,
                             const Ontology &ont) {
  if (svc.id.empty()) {
    throw Error(ErrorCode::schema, "service id must be non-empty");
  }
  const std::string where = "service \"" + svc.id + "\"";
  if (svc.outputs.empty()) {
    throw Error(ErrorCode::invalid_value, where + " has no outputs");
  }
  for (const auto *side : {&svc.inputs, &svc.outputs}) {
    for (const auto &c : *side) {
      if (!ont.contains(c) || c == kRootConcept) {
        throw Error(ErrorCode::unknown_concept,
                    "\"" + c + "\" referenced by " + where);
      }
    }
  }
  svc.qos.validate(where);
}

// Per-attribute extremes over a service population; the normalization
// basis for QoS utility.
struct QosBounds {
  QosVector lo;
  QosVector hi;
};

class Registry {
public:
  Registry() = default;
  explicit Registry(std::string ontology_ref)
      : ontology_ref_(std::move(ontology_ref)) {}

  const std::string &ontology_ref() const noexcept { return ontology_ref_; }
  void set_ontology_ref(std::string ref) { ontology_ref_ = std::move(ref); }

  std::size_t size() const noexcept { return services_.size(); }
  bool empty() const noexcept { return services_.empty(); }
  const std::vector<ServiceDescription> &services() const noexcept {
    return services_;
  }

  bool contains(const ServiceId &id) const { return index_.count(id) != 0; }

  std::size_t position(const ServiceId &id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw Error(ErrorCode::unknown_service, "\"" + id + "\"");
    }
    return it->second;
  }

  const ServiceDescription &at(const ServiceId &id) const {
    return services_[position(id)];
  }

  // Validates then appends; on error the registry is unchanged.
  void add(const Ontology &ont, ServiceDescription svc) {
    validate_service(svc, ont);
    if (contains(svc.id)) {
      throw Error(ErrorCode::duplicate_id, "service \"" + svc.id + "\"");
    }
    index_.emplace(svc.id, services_.size());
    services_.push_back(std::move(svc));
  }

  QosBounds qos_bounds() const {
    if (services_.empty()) {
      throw Error(ErrorCode::invalid_value, "registry is empty");
    }
    QosBounds b{services_.front().qos, services_.front().qos};
    for (const auto &s : services_) {
      b.lo.response_time_ms = std::min(b.lo.response_time_ms, s.qos.response_time_ms);
      b.hi.response_time_ms = std::max(b.hi.response_time_ms, s.qos.response_time_ms);
      b.lo.cost = std::min(b.lo.cost, s.qos.cost);
      b.hi.cost = std::max(b.hi.cost, s.qos.cost);
      b.lo.availability = std::min(b.lo.availability, s.qos.availability);
      b.hi.availability = std::max(b.hi.availability, s.qos.availability);
      b.lo.reliability = std::min(b.lo.reliability, s.qos.reliability);
      b.hi.reliability = std::max(b.hi.reliability, s.qos.reliability);
    }
    return b;
  }

  friend bool operator==(const Registry &a, const Registry &b) {
    return a.ontology_ref_ == b.ontology_ref_ && a.services_ == b.services_;
  }

private:
  std::string ontology_ref_;
  std::vector<ServiceDescription> services_;
  std::unordered_map<ServiceId, std::size_t> index_;
};

inline Registry publish(const Registry &reg, const Ontology &ont,
                        ServiceDescription svc) {
  Registry next = reg;
  next.add(ont, std::move(svc));
  return next;
}

// Equal-weight mean of min-max normalized attributes. Response time and
// cost are inverted. An attribute constant across the population scores 1.
inline double qos_utility(const QosVector &q, const QosBounds &b) {
  auto lower_better = [](double v, double lo, double hi) {
    return hi > lo ? (hi - v) / (hi - lo) : 1.0;
  };
  auto higher_better = [](double v, double lo, double hi) {
    return hi > lo ? (v - lo) / (hi - lo) : 1.0;
  };
  return (lower_better(q.response_time_ms, b.lo.response_time_ms,
                       b.hi.response_time_ms) +
          lower_better(q.cost, b.lo.cost, b.hi.cost) +
          higher_better(q.availability, b.lo.availability, b.hi.availability) +
          higher_better(q.reliability, b.lo.reliability, b.hi.reliability)) /
         4.0;
}

inline double qos_utility(const Registry &reg, const ServiceId &id) {
  const auto &svc = reg.at(id);
  return qos_utility(svc.qos, reg.qos_bounds());
}

// Utility of every service, in registry order.
inline std::vector<double> qos_utilities(const Registry &reg) {
  std::vector<double> out;
  if (reg.empty()) {
    return out;
  }
  const QosBounds b = reg.qos_bounds();
  out.reserve(reg.size());
  for (const auto &s : reg.services()) {
    out.push_back(qos_utility(s.qos, b));
  }
  return out;
}

inline json service_to_json(const ServiceDescription &s) {
  return json{{"id", s.id},
              {"name", s.name},
              {"inputs", s.inputs},
              {"outputs", s.outputs},
              {"qos",
               {{"response_time_ms", s.qos.response_time_ms},
                {"cost", s.qos.cost},
                {"availability", s.qos.availability},
                {"reliability", s.qos.reliability}}}};
}

inline ServiceDescription service_from_json(const json &doc) {
  ServiceDescription s;
  s.id = jsonio::get_string(doc, "id", "service");
  const std::string where = "service \"" + s.id + "\"";
  if (doc.contains("name")) {
    s.name = jsonio::get_string(doc, "name", where);
  }
  s.inputs = jsonio::get_string_set(doc, "inputs", where);
  s.outputs = jsonio::get_string_set(doc, "outputs", where);
  const json &q = jsonio::require(doc, "qos", where);
  const std::string qwhere = where + " qos";
  s.qos.response_time_ms = jsonio::get_number(q, "response_time_ms", qwhere);
  s.qos.cost = jsonio::get_number(q, "cost", qwhere);
  s.qos.availability = jsonio::get_number(q, "availability", qwhere);
  s.qos.reliability = jsonio::get_number(q, "reliability", qwhere);
  return s;
}

// {"ontology": path-or-checksum, "services": [...]}. A checksum reference
// ("fnv1a64:...") must match the supplied ontology.
inline Registry load_registry(const json &doc, const Ontology &ont) {
  const std::string where = "registry document";
  Registry reg(jsonio::get_string(doc, "ontology", where));
  if (reg.ontology_ref().rfind("fnv1a64:", 0) == 0 &&
      reg.ontology_ref() != ont.checksum()) {
    throw Error(ErrorCode::invalid_value,
                "registry was built against ontology " + reg.ontology_ref() +
                    ", loaded ontology is " + ont.checksum());
  }
  for (const auto &s : jsonio::get_array(doc, "services", where)) {
    reg.add(ont, service_from_json(s));
  }
  return reg;
}

inline json save_registry(const Registry &reg) {
  json services = json::array();
  for (const auto &s : reg.services()) {
    services.push_back(service_to_json(s));
  }
  return json{{"ontology", reg.ontology_ref()},
              {"services", std::move(services)}};
}

} // namespace wsc
