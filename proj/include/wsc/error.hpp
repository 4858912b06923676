#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsc {

enum class ErrorCode {
  parse,           // document is not well-formed
  schema,          // well-formed but fields missing or mistyped
  duplicate_id,    // concept or service id already present
  unknown_concept, // reference to a concept the ontology does not define
  unknown_service,
  cycle,           // parent relation is not a tree
  invalid_value,   // out-of-range numbers, empty required sets
  guard_limit,     // oracle instance too large
  io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::parse: return "parse error";
  case ErrorCode::schema: return "schema error";
  case ErrorCode::duplicate_id: return "duplicate id";
  case ErrorCode::unknown_concept: return "unknown concept";
  case ErrorCode::unknown_service: return "unknown service";
  case ErrorCode::cycle: return "cycle detected";
  case ErrorCode::invalid_value: return "invalid value";
  case ErrorCode::guard_limit: return "guard limit exceeded";
  case ErrorCode::io: return "i/o error";
  }
  return "error";
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace wsc
