#include "veroweb/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

#include "veroweb/conventions.hpp"

namespace veroweb {

void RunReport::add(const std::string& name, double max_residual, double tolerance) {
  checks.push_back({name, max_residual, tolerance,
                    std::isfinite(max_residual) && std::abs(max_residual) <= tolerance});
}

bool RunReport::all_pass() const {
  for (const CheckLine& c : checks)
    if (!c.pass) return false;
  return true;
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["params"] = params;
  j["seed"] = seed;
  j["conventions_digest"] = digest.empty() ? veroweb::conventions_digest() : digest;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CheckLine& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["max_residual"] = c.max_residual;
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    arr.push_back(e);
  }
  j["checks"] = arr;
  j["timestamp"] = timestamp;
  return j;
}

std::string iso_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace veroweb
