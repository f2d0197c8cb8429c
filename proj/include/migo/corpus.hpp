#pragma once

#include <string>
#include <vector>

namespace migo {

// A bundled fixture and its expected verdicts.
struct FixtureInfo {
  std::string name;
  std::string file; // relative to the fixture directory
  bool fenced = true;
  bool live = true;
  bool safe = true;
  std::string provenance;
};

// Loads the fixture manifest from `dir` (fixtures/manifest.json). The
// directory defaults to the MIGO_FIXTURES environment variable and then to
// "fixtures".
std::vector<FixtureInfo> corpus(const std::string& dir = "");
std::string fixture_dir(const std::string& override_dir = "");

std::string read_file(const std::string& path);

} // namespace migo
