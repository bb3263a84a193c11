#pragma once

// Command-line front end. Every command reads a JSON parameter document
// (defaults < preset < --config file < flags), validates it, runs one
// workflow and writes a JSON or CSV result atomically.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace omgsim::cli {

inline constexpr const char* kVersion = "1.0.0";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;  // validation or runtime error
inline constexpr int kExitStrict = 2;   // warnings promoted by --strict

struct Diagnostic {
    std::string key;      // offending key, empty for document-level problems
    std::string kind;     // parse, type, range, choice, unknown_key, command, value
    std::string message;
    std::string source;   // file path, preset name or "flag"
    int line = 0;         // 1-based line in source, 0 when unknown
};

nlohmann::json to_json(const Diagnostic& d);

struct Preset {
    std::string name;
    std::string command;
    std::string description;
    nlohmann::json config;
};

const std::vector<Preset>& presets();

std::vector<std::string> command_names();

// Validates a config document or an emitted result document given as text.
// `command` may be empty when the document names its command.
std::vector<Diagnostic> validate_text(const std::string& text, const std::string& source,
                                      const std::string& command = "");

// Pretty-printed JSON with every float as %.17g and sorted keys, so equal
// documents give identical bytes.
std::string format_json(const nlohmann::json& doc);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace omgsim::cli
