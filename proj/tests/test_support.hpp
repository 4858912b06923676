#pragma once

#include <wsc/wsc.hpp>

#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace wsc::testing {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return fs::path(WSC_FIXTURE_DIR); }
inline fs::path fixture(const std::string &rel) { return fixture_dir() / rel; }

struct Fixture {
  Ontology ontology;
  Registry registry;
};

inline Fixture load_fixture(const std::string &name) {
  Fixture f;
  f.ontology = load_ontology(jsonio::read_json_file(fixture(name + "/ontology.json")));
  f.registry =
      load_registry(jsonio::read_json_file(fixture(name + "/registry.json")), f.ontology);
  return f;
}

inline std::vector<Request> load_requests(const std::string &rel) {
  return requests_from_json(jsonio::read_json_file(fixture(rel)));
}

inline ServiceDescription make_service(const std::string &id, std::set<ConceptId> in,
                                       std::set<ConceptId> out, QosVector q = {100, 10, 0.9, 0.9}) {
  ServiceDescription s;
  s.id = id;
  s.name = id;
  s.inputs = std::move(in);
  s.outputs = std::move(out);
  s.qos = q;
  return s;
}

// Random tree: concept k attaches to a uniformly chosen earlier concept or
// to the root.
inline Ontology random_ontology(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ConceptDecl> decls;
  for (std::size_t k = 0; k < n; ++k) {
    ConceptDecl d{"k" + std::to_string(k), std::nullopt};
    if (k > 0) {
      std::uniform_int_distribution<std::size_t> pick(0, k);
      const std::size_t p = pick(rng);
      if (p < k) d.parent = "k" + std::to_string(p);
    }
    decls.push_back(d);
  }
  return Ontology::from_declarations(decls);
}

inline std::set<ConceptId> random_concepts(const Ontology &ont, std::mt19937_64 &rng,
                                           std::size_t lo, std::size_t hi) {
  std::uniform_int_distribution<std::size_t> count(lo, hi);
  std::uniform_int_distribution<ConceptIndex> pick(1, static_cast<ConceptIndex>(ont.size() - 1));
  std::set<ConceptId> out;
  const std::size_t n = count(rng);
  while (out.size() < n) out.insert(ont.id_of(pick(rng)));
  return out;
}

inline ServiceDescription random_service(const Ontology &ont, std::mt19937_64 &rng,
                                         const std::string &id, std::size_t max_in = 2) {
  std::uniform_real_distribution<double> rt(10, 1000), cost(0, 50), av(0.8, 1.0);
  return make_service(id, random_concepts(ont, rng, 0, max_in), random_concepts(ont, rng, 1, 2),
                      QosVector{rt(rng), cost(rng), av(rng), av(rng)});
}

inline Registry random_registry(const Ontology &ont, std::size_t n, std::uint64_t seed,
                                std::size_t max_in = 2) {
  std::mt19937_64 rng(seed);
  Registry reg;
  for (std::size_t i = 0; i < n; ++i) {
    reg.add(ont, random_service(ont, rng, "s" + std::to_string(100 + i), max_in));
  }
  return reg;
}

class TempDir {
public:
  explicit TempDir(const std::string &tag) {
    static std::size_t counter = 0;
    path_ = fs::temp_directory_path() /
            ("wsc-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const fs::path &path() const { return path_; }
  fs::path operator/(const std::string &rel) const { return path_ / rel; }

private:
  fs::path path_;
};

inline std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string quote(const std::string &s) { return "'" + s + "'"; }

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the built executable as a separate process.
inline CliRun run_cli(const std::vector<std::string> &args, const TempDir &scratch) {
  const fs::path out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  std::string cmd = quote(WSC_CLI_PATH);
  for (const auto &a : args) cmd += " " + quote(a);
  cmd += " >" + quote(out.string()) + " 2>" + quote(err.string());
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

} // namespace wsc::testing
