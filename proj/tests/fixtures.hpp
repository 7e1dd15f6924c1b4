#pragma once

// Stored lab fixtures under tests/data/fixtures/<predicate>/<n>/<seed>.json.

#include "tripcover/io.hpp"

#include <filesystem>
#include <string>

namespace fixtures {

inline std::filesystem::path root() { return std::filesystem::path(TRIPCOVER_DATA) / "fixtures"; }

// The single record stored for a predicate; reading it recomputes and
// checks the recorded flags.
inline tripcover::InstanceRecord load(const std::string& predicate) {
  for (const auto& e : std::filesystem::recursive_directory_iterator(root() / predicate)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      return tripcover::record_from_json(tripcover::parse_json(tripcover::read_file(e.path())));
    }
  }
  throw tripcover::Error("no stored fixture for " + predicate);
}

}  // namespace fixtures
