#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace veroweb {

struct CheckLine {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Machine-readable run report. Identical inputs and seed produce identical
/// JSON apart from the timestamp field.
struct RunReport {
  std::string command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  uint64_t seed = 0;
  std::string digest;
  std::vector<CheckLine> checks;
  std::string timestamp;

  void add(const std::string& name, double max_residual, double tolerance);
  bool all_pass() const;
  nlohmann::ordered_json to_json() const;
};

std::string iso_timestamp_now();

}  // namespace veroweb
