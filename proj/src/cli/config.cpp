#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "cli_internal.hpp"

namespace omgsim::cli {

using nlohmann::json;

json to_json(const Diagnostic& d) {
    json j{{"kind", d.kind}, {"message", d.message}};
    j["key"] = d.key.empty() ? json(nullptr) : json(d.key);
    j["source"] = d.source;
    j["line"] = d.line;
    return j;
}

std::vector<ParamSpec> global_params() {
    return {
        {.key = "rng_seed", .type = ParamType::integer, .fallback = 1, .min = 0.0,
         .help = "root seed; substreams are derived from it"},
        {.key = "output", .type = ParamType::string, .fallback = "-",
         .help = "result path, - for standard output"},
        {.key = "format", .type = ParamType::string, .fallback = "json", .choices = {"json", "csv", "text"},
         .help = "json, csv, or text (budget only)"},
    };
}

const CommandSpec* find_command(const std::string& name) {
    for (const auto& c : commands())
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<std::string> command_names() {
    std::vector<std::string> out;
    for (const auto& c : commands()) out.push_back(c.name);
    return out;
}

const ParamSpec* find_param(const CommandSpec& spec, const std::string& key) {
    for (const auto& p : spec.params)
        if (p.key == key) return &p;
    static const std::vector<ParamSpec> globals = global_params();
    for (const auto& p : globals)
        if (p.key == key) return &p;
    return nullptr;
}

json defaults(const CommandSpec& spec) {
    json doc = json::object();
    for (const auto& p : global_params()) doc[p.key] = p.fallback;
    for (const auto& p : spec.params) doc[p.key] = p.fallback;
    return doc;
}

namespace {

int line_of_key(const std::string& text, const std::string& key) {
    if (text.empty()) return 0;
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

std::string type_name(ParamType t) {
    switch (t) {
        case ParamType::number: return "a number";
        case ParamType::integer: return "an integer";
        case ParamType::boolean: return "true or false";
        case ParamType::string: return "a string";
        case ParamType::number_list: return "a non-empty list of numbers";
        case ParamType::integer_list: return "a non-empty list of integers";
    }
    return "?";
}

bool scalar_type_ok(ParamType t, const json& v) {
    switch (t) {
        case ParamType::number: case ParamType::number_list: return v.is_number();
        case ParamType::integer: case ParamType::integer_list: return v.is_number_integer();
        case ParamType::boolean: return v.is_boolean();
        case ParamType::string: return v.is_string();
    }
    return false;
}

std::string range_text(const ParamSpec& p) {
    std::ostringstream os;
    if (p.min) os << (p.min_exclusive ? "> " : ">= ") << *p.min;
    if (p.min && p.max) os << " and ";
    if (p.max) os << "<= " << *p.max;
    return os.str();
}

// Returns an empty string when v satisfies p.
std::string check_value(const ParamSpec& p, const json& v) {
    if (v.is_null()) {
        if (p.fallback.is_null()) return "";
        return "'" + p.key + "' cannot be null";
    }
    const bool list = p.type == ParamType::number_list || p.type == ParamType::integer_list;
    std::vector<json> items;
    if (list) {
        if (!v.is_array() || v.empty()) return "'" + p.key + "' must be " + type_name(p.type);
        items.assign(v.begin(), v.end());
    } else {
        items.push_back(v);
    }
    for (const auto& item : items) {
        if (!scalar_type_ok(p.type, item)) return "'" + p.key + "' must be " + type_name(p.type);
        if (item.is_number()) {
            const double x = item.get<double>();
            const bool low = p.min && (p.min_exclusive ? !(x > *p.min) : !(x >= *p.min));
            const bool high = p.max && !(x <= *p.max);
            if (low || high) return "range:'" + p.key + "' must be " + range_text(p) + ", got " + item.dump();
        }
        if (item.is_string() && !p.choices.empty() &&
            std::find(p.choices.begin(), p.choices.end(), item.get<std::string>()) == p.choices.end()) {
            std::string allowed;
            for (const auto& c : p.choices) allowed += (allowed.empty() ? "" : ", ") + c;
            return "choice:'" + p.key + "' must be one of " + allowed + ", got " + item.dump();
        }
    }
    return "";
}

}  // namespace

std::vector<Diagnostic> check_document(const CommandSpec& spec, const json& doc, const std::string& source,
                                       const std::string& text) {
    std::vector<Diagnostic> out;
    if (!doc.is_object()) {
        out.push_back({"", "type", "configuration must be a JSON object", source, 0});
        return out;
    }
    for (const auto& [key, value] : doc.items()) {
        const ParamSpec* p = find_param(spec, key);
        if (!p) {
            out.push_back({key, "unknown_key", "unknown key '" + key + "' for command " + spec.name, source,
                           line_of_key(text, key)});
            continue;
        }
        std::string msg = check_value(*p, value);
        if (msg.empty()) continue;
        std::string kind = "type";
        for (const char* prefix : {"range", "choice"}) {
            const std::string tag = std::string(prefix) + ":";
            if (msg.rfind(tag, 0) == 0) {
                kind = prefix;
                msg = msg.substr(tag.size());
            }
        }
        out.push_back({key, kind, msg, source, line_of_key(text, key)});
    }
    return out;
}

json parse_flag_value(const ParamSpec& param, const std::string& text) {
    if (param.type == ParamType::string) {
        if (text == "null") return nullptr;
        return text;
    }
    json v = json::parse(text, nullptr, false);
    if (!v.is_discarded()) {
        const bool list = param.type == ParamType::number_list || param.type == ParamType::integer_list;
        if (list && v.is_number()) return json::array({v});
        return v;
    }
    if (param.type == ParamType::number_list || param.type == ParamType::integer_list) {
        json arr = json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            json x = json::parse(item, nullptr, false);
            arr.push_back(x.is_discarded() ? json(item) : x);
        }
        return arr;
    }
    return text;
}

std::string data_dir() {
    if (const char* env = std::getenv("OMGSIM_DATA_DIR"); env && *env) return env;
    return OMGSIM_DATA_DIR;
}

// ---- JSON formatting -------------------------------------------------------

namespace {

void emit(std::ostringstream& os, const json& v, int depth) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) os << ",\n";
                first = false;
                os << pad << json(key).dump() << ": ";
                emit(os, item, depth + 1);
            }
            os << '\n' << close << '}';
            return;
        }
        case json::value_t::array: {
            if (v.empty()) {
                os << "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(v.begin(), v.end(), [](const json& x) { return x.is_structured(); });
            os << '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) os << (flat ? ", " : ",");
                first = false;
                if (!flat) os << '\n' << pad;
                emit(os, item, depth + 1);
            }
            if (!flat) os << '\n' << close;
            os << ']';
            return;
        }
        case json::value_t::number_float: {
            const double x = v.get<double>();
            if (!std::isfinite(x)) {
                os << "null";
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            os << buf;
            return;
        }
        default:
            os << v.dump();
    }
}

}  // namespace

std::string format_json(const json& doc) {
    std::ostringstream os;
    emit(os, doc, 0);
    os << '\n';
    return os.str();
}

// ---- validate --------------------------------------------------------------

std::vector<Diagnostic> validate_text(const std::string& text, const std::string& source,
                                      const std::string& command) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        return {{"", "parse", e.what(), source, line}};
    }
    if (!doc.is_object()) return {{"", "type", "document must be a JSON object", source, 0}};

    std::vector<Diagnostic> out;
    json config;
    std::string name = command;
    if (doc.contains("omgsim_result")) {
        // An emitted result: {omgsim_result, command, config, result, warnings}.
        for (const auto& [key, value] : doc.items())
            if (key != "omgsim_result" && key != "command" && key != "config" && key != "result" && key != "warnings")
                out.push_back({key, "unknown_key", "unknown top-level key '" + key + "' in result document", source, 0});
        if (!doc["omgsim_result"].is_string())
            out.push_back({"omgsim_result", "type", "'omgsim_result' must be a version string", source, 0});
        if (!doc.contains("config") || !doc["config"].is_object())
            out.push_back({"config", "type", "result document needs a 'config' object", source, 0});
        else
            config = doc["config"];
    } else {
        config = doc;
    }
    if (config.contains("command")) {
        if (!config["command"].is_string()) {
            out.push_back({"command", "type", "'command' must be a string", source, 0});
            return out;
        }
        const std::string named = config["command"].get<std::string>();
        if (!name.empty() && named != name)
            out.push_back({"command", "command", "document is for '" + named + "', not '" + name + "'", source, 0});
        name = named;
        config.erase("command");
    }
    if (doc.contains("omgsim_result")) {
        if (!doc.contains("command") || !doc["command"].is_string()) {
            out.push_back({"command", "type", "result document needs a 'command' string", source, 0});
            return out;
        }
        name = doc["command"].get<std::string>();
    }
    if (name.empty()) {
        out.push_back({"command", "command", "no command given; add a \"command\" key or pass --command", source, 0});
        return out;
    }
    const CommandSpec* spec = find_command(name);
    if (!spec) {
        out.push_back({"command", "command", "unknown command '" + name + "'", source, 0});
        return out;
    }
    if (config.is_null()) return out;
    auto diags = check_document(*spec, config, source, text);
    out.insert(out.end(), diags.begin(), diags.end());
    if (diags.empty() && spec->check) {
        json resolved = defaults(*spec);
        resolved.update(config);
        auto cross = spec->check(resolved);
        for (auto& d : cross) {
            d.source = source;
            out.push_back(d);
        }
    }
    return out;
}

}  // namespace omgsim::cli
