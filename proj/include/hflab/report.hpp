#pragma once

#include <json.hpp>

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace hflab {

/// One verified property: a name, a verdict and a short witness string
/// (the first counterexample found, or a summary of what was checked).
struct CheckEntry {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Structured pass/fail list. Verifiers return failures as data; only
/// malformed inputs and violated theorems are raised as exceptions.
class CheckReport {
public:
  CheckReport() = default;
  explicit CheckReport(std::string title) : title_(std::move(title)) {}

  void add(std::string name, bool passed, std::string detail = {}) {
    entries_.push_back({std::move(name), passed, std::move(detail)});
  }

  /// Appends the entries of `other`, prefixing their names.
  void merge(const CheckReport &other, const std::string &prefix = {}) {
    for (const auto &e : other.entries_)
      entries_.push_back({prefix + e.name, e.passed, e.detail});
    for (auto &[k, v] : other.evidence_.items())
      evidence_[prefix + k] = v;
  }

  bool passed() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const CheckEntry &e) { return e.passed; });
  }

  const CheckEntry *find(const std::string &name) const {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const CheckEntry &e) { return e.name == name; });
    return it == entries_.end() ? nullptr : &*it;
  }

  bool passed(const std::string &name) const {
    const auto *e = find(name);
    return e != nullptr && e->passed;
  }

  const std::vector<CheckEntry> &entries() const noexcept { return entries_; }
  const std::string &title() const noexcept { return title_; }

  nlohmann::json &evidence() noexcept { return evidence_; }
  const nlohmann::json &evidence() const noexcept { return evidence_; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["name"] = title_;
    j["status"] = passed() ? "pass" : "fail";
    auto &items = j["entries"] = nlohmann::json::array();
    for (const auto &e : entries_)
      items.push_back({{"name", e.name},
                       {"status", e.passed ? "pass" : "fail"},
                       {"detail", e.detail}});
    j["evidence"] = evidence_.is_null() ? nlohmann::json::object() : evidence_;
    return j;
  }

private:
  std::string title_;
  std::vector<CheckEntry> entries_;
  nlohmann::json evidence_ = nlohmann::json::object();
};

} // namespace hflab
