#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

namespace valdetect {

inline constexpr const char* kToolName = "valdetect";
inline constexpr const char* kToolVersion = "0.1.0";

// One verification check inside a report.  `certification` states how far
// the verdict reaches (certified / exact / degree bound), `witness` carries
// whatever makes a failure reproducible.
struct CheckRecord {
  std::string name;
  bool pass = true;
  std::string certification;
  std::string witness;
  double ms = 0;
};

// The envelope every command emits: tool identity, an echo of the field
// spec, an optional query result object, and the check records.  Checks are
// sorted by name at emission so assembly order never shows.
struct RunReport {
  std::string command;
  nlohmann::ordered_json spec_echo;  // null when no spec was given
  nlohmann::ordered_json result;     // null for pure verification runs
  std::vector<CheckRecord> checks;

  bool ok() const {
    for (const CheckRecord& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::vector<CheckRecord> sorted_checks() const {
    std::vector<CheckRecord> out = checks;
    std::sort(out.begin(), out.end(),
              [](const CheckRecord& a, const CheckRecord& b) {
                return a.name < b.name;
              });
    return out;
  }

  nlohmann::ordered_json to_json(bool timings) const {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    j["spec"] = spec_echo;
    if (!result.is_null()) j["result"] = result;
    if (!checks.empty()) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const CheckRecord& c : sorted_checks()) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["status"] = c.pass ? "pass" : "fail";
        e["certification"] = c.certification;
        if (!c.witness.empty()) e["witness"] = c.witness;
        if (timings) e["ms"] = c.ms < 0 ? 0.0 : c.ms;
        arr.push_back(std::move(e));
      }
      j["checks"] = std::move(arr);
      j["status"] = ok() ? "pass" : "fail";
    }
    return j;
  }

  std::string to_text(bool timings) const {
    std::string s;
    s += std::string(kToolName) + " " + kToolVersion + "  " + command + "\n";
    if (!spec_echo.is_null()) s += "spec: " + spec_echo.dump() + "\n";
    if (!result.is_null()) {
      for (const auto& [k, v] : result.items())
        s += "  " + k + ": " +
             (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    }
    if (!checks.empty()) {
      size_t w = 4;
      for (const CheckRecord& c : checks) w = std::max(w, c.name.size());
      for (const CheckRecord& c : sorted_checks()) {
        s += "  " + c.name + std::string(w - c.name.size() + 2, ' ') +
             (c.pass ? "pass" : "FAIL") + "  " + c.certification;
        if (timings) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "  %.1fms", c.ms < 0 ? 0.0 : c.ms);
          s += buf;
        }
        if (!c.witness.empty()) s += "\n" + std::string(w + 4, ' ') + c.witness;
        s += "\n";
      }
      s += ok() ? "status: pass\n" : "status: fail\n";
    }
    return s;
  }
};

// Query commands print their bare result object; verification runs print
// the whole envelope.  Machine and human forms carry the same verdicts.
inline std::string emit_report(const RunReport& rep, const std::string& format,
                               bool timings) {
  if (format == "text") return rep.to_text(timings);
  if (rep.checks.empty() && !rep.result.is_null())
    return rep.result.dump(2) + "\n";
  return rep.to_json(timings).dump(2) + "\n";
}

}  // namespace valdetect
