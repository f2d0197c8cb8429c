#include "migo/corpus.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace migo {

std::string fixture_dir(const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("MIGO_FIXTURES")) return env;
  return "fixtures";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<FixtureInfo> corpus(const std::string& dir) {
  std::string base = fixture_dir(dir);
  nlohmann::json j = nlohmann::json::parse(read_file(base + "/manifest.json"));
  std::vector<FixtureInfo> out;
  for (const auto& item : j.at("fixtures")) {
    FixtureInfo f;
    f.name = item.at("name").get<std::string>();
    f.file = item.at("file").get<std::string>();
    f.fenced = item.at("fenced").get<bool>();
    if (f.fenced) {
      f.live = item.at("live").get<bool>();
      f.safe = item.at("safe").get<bool>();
    }
    f.provenance = item.value("provenance", "");
    out.push_back(std::move(f));
  }
  return out;
}

} // namespace migo
