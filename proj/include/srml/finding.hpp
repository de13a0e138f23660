#pragma once

#include <string>

namespace srml {

enum class Severity { error, corrected, structural };

inline const char* to_string(Severity s) noexcept {
  switch (s) {
    case Severity::error: return "error";
    case Severity::corrected: return "corrected";
    case Severity::structural: return "structural";
  }
  return "error";
}

// One validation outcome. `instance_index` is the 1-based rule-instance that
// produced it, or 0 for structural findings.
struct Finding {
  Severity severity = Severity::error;
  std::string message;
  std::string location;
  std::string found;
  std::string expected;
  int instance_index = 0;

  friend bool operator==(const Finding&, const Finding&) = default;
};

}  // namespace srml
