#pragma once

#include <coresched/bundle.hpp>
#include <coresched/engine.hpp>
#include <coresched/error.hpp>
#include <coresched/learnability.hpp>
#include <coresched/scheduler.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coresched {

inline constexpr std::string_view kScenarioSchema = "core-scenario/1";

struct ScenarioDoc {
    std::string name;
    std::string description;
    TaskBundle bundle;
    StrategyConfig strategy;
    SimParams params;
    std::optional<VerifyParams> verify;

    bool operator==(const ScenarioDoc&) const = default;
};

/// Scenario parse failure. `path()` points at the field (JSON-pointer-like,
/// e.g. "bundle.threads[2].curve.rate"); line/column are set for syntax
/// errors.
class ScenarioError : public Error {
public:
    enum class Kind { syntax, schema, semantic };

    ScenarioError(Kind kind, std::string path, const std::string& message, int line = 0, int column = 0);

    Kind kind() const noexcept { return kind_; }
    const std::string& path() const noexcept { return path_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    Kind kind_;
    std::string path_;
    int line_;
    int column_;
};

/// Strict parse: unknown fields are rejected, and the bundle, strategy and
/// params are validated.
ScenarioDoc parse_scenario(std::string_view text);
std::string serialize_scenario(const ScenarioDoc& doc);

std::vector<std::string> builtin_scenario_names();
/// Throws UsageError listing the valid names for an unknown name.
ScenarioDoc builtin_scenario(std::string_view name);

/// FNV-1a 64 of the canonical bundle serialization, as 16 hex digits.
std::string bundle_content_hash(const TaskBundle& bundle);

} // namespace coresched
