#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "omgsim/cli.hpp"

namespace omgsim::cli {

enum class ParamType { number, integer, boolean, string, number_list, integer_list };

struct ParamSpec {
    std::string key;
    ParamType type = ParamType::number;
    nlohmann::json fallback;          // default; null means unset
    std::optional<double> min;
    std::optional<double> max;
    bool min_exclusive = false;
    std::vector<std::string> choices;  // strings only
    std::string help;
};

struct CommandOutput {
    nlohmann::json result = nlohmann::json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
    std::vector<std::string> warnings;
    std::string text;  // fixed-width rendering, budget only
};

struct CommandSpec {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> params;
    // Cross-field checks on the fully resolved document.
    std::function<std::vector<Diagnostic>(const nlohmann::json&)> check;
    std::function<CommandOutput(const nlohmann::json&)> execute;
};

// Keys accepted by every command besides its own.
std::vector<ParamSpec> global_params();

const std::vector<CommandSpec>& commands();
const CommandSpec* find_command(const std::string& name);
const ParamSpec* find_param(const CommandSpec& spec, const std::string& key);

nlohmann::json defaults(const CommandSpec& spec);

// Type and range checks of every key in `doc`; unknown keys are reported.
// `text` is the raw source, used only to locate keys for line numbers.
std::vector<Diagnostic> check_document(const CommandSpec& spec, const nlohmann::json& doc,
                                       const std::string& source, const std::string& text = "");

// Parses a flag value: JSON if it parses, else a bare string; lists also
// accept "1,2,3".
nlohmann::json parse_flag_value(const ParamSpec& param, const std::string& text);

std::string data_dir();

}  // namespace omgsim::cli
