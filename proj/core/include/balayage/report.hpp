#pragma once

// Named pass/fail rows shared by the verification routines.

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace balayage {

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string note;
};

struct Report {
  std::string title;
  std::vector<Check> checks;

  /// Adds a row that passes when value <= threshold (NaN fails).
  Check& expect_at_most(std::string name, double value, double threshold, std::string note = {});
  /// Adds a row that passes when `ok` holds; value is recorded as given.
  Check& expect(std::string name, bool ok, double value = 0.0, std::string note = {});
  void merge(const Report& other);
  bool passed() const;
  const Check* find(const std::string& name) const;
};

nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const Report& r);

}  // namespace balayage
