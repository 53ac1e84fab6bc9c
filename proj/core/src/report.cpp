#include "balayage/report.hpp"

#include <nlohmann/json.hpp>

#include "detail/json_num.hpp"

namespace balayage {

Check& Report::expect_at_most(std::string name, double value, double threshold, std::string note) {
  checks.push_back({std::move(name), value, threshold, value <= threshold, std::move(note)});
  return checks.back();
}

Check& Report::expect(std::string name, bool ok, double value, std::string note) {
  checks.push_back({std::move(name), value, 0.0, ok, std::move(note)});
  return checks.back();
}

void Report::merge(const Report& other) {
  for (const auto& c : other.checks) {
    checks.push_back(c);
    if (!other.title.empty()) checks.back().name = other.title + "." + c.name;
  }
}

bool Report::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json to_json(const Check& c) {
  nlohmann::json j{{"name", c.name},
                   {"value", detail::json_number(c.value)},
                   {"threshold", detail::json_number(c.threshold)},
                   {"passed", c.passed}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : r.checks) rows.push_back(to_json(c));
  return {{"title", r.title}, {"passed", r.passed()}, {"checks", rows}};
}

}  // namespace balayage
