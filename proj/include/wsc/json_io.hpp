#pragma once

#include <wsc/error.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace wsc {

using json = nlohmann::json;

namespace jsonio {

inline const json &require(const json &obj, const char *key,
                           const std::string &where) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::schema, where + " must be an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::schema,
                where + " is missing field \"" + key + "\"");
  }
  return *it;
}

inline std::string get_string(const json &obj, const char *key,
                              const std::string &where) {
  const json &v = require(obj, key, where);
  if (!v.is_string()) {
    throw Error(ErrorCode::schema,
                where + " field \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

inline double get_number(const json &obj, const char *key,
                         const std::string &where) {
  const json &v = require(obj, key, where);
  if (!v.is_number()) {
    throw Error(ErrorCode::schema,
                where + " field \"" + key + "\" must be a number");
  }
  return v.get<double>();
}

inline std::set<std::string> get_string_set(const json &obj, const char *key,
                                            const std::string &where) {
  const json &v = require(obj, key, where);
  if (!v.is_array()) {
    throw Error(ErrorCode::schema,
                where + " field \"" + key + "\" must be an array");
  }
  std::set<std::string> out;
  for (const auto &e : v) {
    if (!e.is_string()) {
      throw Error(ErrorCode::schema,
                  where + " field \"" + key + "\" must hold strings");
    }
    out.insert(e.get<std::string>());
  }
  return out;
}

inline const json &get_array(const json &obj, const char *key,
                             const std::string &where) {
  const json &v = require(obj, key, where);
  if (!v.is_array()) {
    throw Error(ErrorCode::schema,
                where + " field \"" + key + "\" must be an array");
  }
  return v;
}

inline json parse(const std::string &text, const std::string &where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::parse, where + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const std::filesystem::path &path) {
  return parse(read_file(path), path.string());
}

// Canonical text form used for every document this library writes.
inline std::string dump(const json &doc) { return doc.dump(2) + "\n"; }

// Writes next to the target then renames over it.
inline void write_file_atomic(const std::filesystem::path &path,
                              const std::string &content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::io, "cannot write " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      throw Error(ErrorCode::io, "short write on " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::io, "cannot replace " + path.string());
  }
}

// Stages several files, then renames them all; nothing is renamed unless
// every temporary was written.
inline void write_files_atomic(
    const std::vector<std::pair<std::filesystem::path, std::string>> &files) {
  std::vector<std::filesystem::path> staged;
  std::error_code ec;
  try {
    for (const auto &[path, content] : files) {
      auto tmp = path;
      tmp += ".tmp";
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw Error(ErrorCode::io, "cannot write " + tmp.string());
      }
      staged.push_back(tmp);
      out << content;
      out.flush();
      if (!out) {
        throw Error(ErrorCode::io, "short write on " + tmp.string());
      }
    }
  } catch (...) {
    for (const auto &tmp : staged) {
      std::filesystem::remove(tmp, ec);
    }
    throw;
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::filesystem::rename(staged[i], files[i].first, ec);
    if (ec) {
      throw Error(ErrorCode::io, "cannot replace " + files[i].first.string());
    }
  }
}

} // namespace jsonio
} // namespace wsc
