#pragma once

#include <wsc/error.hpp>
#include <wsc/json_io.hpp>
#include <wsc/ontology.hpp>

#include <set>
#include <string>
#include <vector>

namespace wsc {

// A client request: concepts the client can supply and concepts it wants.
struct Request {
  std::set<ConceptId> provided;
  std::set<ConceptId> required;

  friend bool operator==(const Request &, const Request &) = default;
};

inline void validate_request(const Request &req, const Ontology &ont) {
  if (req.required.empty()) {
    throw Error(ErrorCode::invalid_value, "request has no required concepts");
  }
  for (const auto *side : {&req.provided, &req.required}) {
    for (const auto &c : *side) {
      if (!ont.contains(c) || c == kRootConcept) {
        throw Error(ErrorCode::unknown_concept,
                    "\"" + c + "\" referenced by request");
      }
    }
  }
}

inline json request_to_json(const Request &req) {
  return json{{"provided", req.provided}, {"required", req.required}};
}

inline Request request_from_json(const json &doc) {
  Request req;
  req.provided = jsonio::get_string_set(doc, "provided", "request");
  req.required = jsonio::get_string_set(doc, "required", "request");
  return req;
}

// Accepts a single request object or {"requests": [...]}.
inline std::vector<Request> requests_from_json(const json &doc) {
  std::vector<Request> out;
  if (doc.is_object() && doc.contains("requests")) {
    for (const auto &r : jsonio::get_array(doc, "requests", "requests document")) {
      out.push_back(request_from_json(r));
    }
  } else {
    out.push_back(request_from_json(doc));
  }
  return out;
}

inline json requests_to_json(const std::vector<Request> &reqs) {
  json arr = json::array();
  for (const auto &r : reqs) arr.push_back(request_to_json(r));
  return json{{"requests", std::move(arr)}};
}

} // namespace wsc
