#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace transq {

// Outcome of one invariant check; suites are plain vectors of these.
struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

using CheckList = std::vector<Check>;

inline bool all_passed(const CheckList& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

inline nlohmann::json to_json(const CheckList& checks) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : checks) {
        out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    return out;
}

}  // namespace transq
