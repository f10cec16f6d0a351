#pragma once

// Flat `key = value` scenario files. `#` starts a comment, vectors are
// comma-separated. Missing keys keep their defaults; unknown keys are errors.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "uwsim/scenario.hpp"

namespace uwsim {

struct FieldInfo {
    std::string_view key;
    bool scalar;  // single value, usable as a sweep axis
};

const std::vector<FieldInfo>& scenario_fields();
bool is_scenario_field(std::string_view key);

/// Sets one field from its textual value. `line` only decorates errors.
void apply_field(Scenario& scenario, std::string_view key, std::string_view value, int line = 0);
std::string field_value(const Scenario& scenario, std::string_view key);

/// Parses `text` onto the defaults and validates the result.
Scenario parse_scenario_text(std::string_view text);
Scenario parse_scenario(const std::filesystem::path& path);

/// Every field, one per line, in registry order. Parsing it back yields an equal scenario.
std::string serialize_scenario(const Scenario& scenario);

/// Shortest round-trip decimal form.
std::string format_double(double value);

struct KeyValueLine {
    int line = 0;
    std::string key;
    std::string value;
};

/// Splits a `key = value` document into entries, dropping blanks and comments.
std::vector<KeyValueLine> split_key_values(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace uwsim
