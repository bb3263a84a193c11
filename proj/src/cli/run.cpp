#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "cli_internal.hpp"
#include "omgsim/errors.hpp"

namespace omgsim::cli {

using nlohmann::json;

namespace {

std::string flag_name(const std::string& key) {
    std::string s = key;
    std::replace(s.begin(), s.end(), '_', '-');
    return "--" + s;
}

// Extra spellings kept short for the common cases.
std::string flag_names(const std::string& key) {
    std::string names = flag_name(key);
    if (key == "trap_freq_khz") names += ",--trap-khz";
    if (key == "rng_seed") names += ",--seed";
    if (key == "output") names = "-o," + names;
    return names;
}

struct Bound {
    const CommandSpec* spec = nullptr;
    CLI::App* app = nullptr;
    std::string config, preset;
    bool strict = false;
    std::vector<std::string> sets;
    std::deque<std::string> values;
    std::vector<std::pair<const ParamSpec*, CLI::Option*>> options;
};

bool read_file(const std::string& path, std::string& text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
    return true;
}

void atomic_write(const std::string& path, const std::string& payload) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write " + tmp.string());
        f << payload;
        f.flush();
        if (!f) throw ConfigError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ConfigError("cannot rename result into place: " + path);
    }
}

std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    return v.dump();
}

std::string to_csv(const CommandOutput& res) {
    std::ostringstream os;
    for (std::size_t i = 0; i < res.columns.size(); ++i) os << (i ? "," : "") << res.columns[i];
    os << '\n';
    for (const auto& row : res.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
    return os.str();
}

int report(const std::vector<Diagnostic>& diags, std::ostream& err) {
    json arr = json::array();
    for (const auto& d : diags) arr.push_back(to_json(d));
    err << format_json({{"diagnostics", arr}});
    return kExitInvalid;
}

int execute(Bound& b, std::ostream& out, std::ostream& err) {
    const CommandSpec& spec = *b.spec;
    std::vector<Diagnostic> diags;
    json doc = defaults(spec);
    auto merge = [&](const json& layer, const std::string& source, const std::string& text) {
        auto d = check_document(spec, layer, source, text);
        if (d.empty())
            doc.update(layer);
        else
            diags.insert(diags.end(), d.begin(), d.end());
    };

    if (!b.preset.empty()) {
        const auto& all = presets();
        auto it = std::find_if(all.begin(), all.end(), [&](const Preset& p) { return p.name == b.preset; });
        if (it == all.end())
            diags.push_back({"preset", "value", "unknown preset '" + b.preset + "'; see --list-presets", "flag", 0});
        else if (it->command != spec.name)
            diags.push_back({"preset", "command", "preset '" + b.preset + "' is for " + it->command, "flag", 0});
        else
            merge(it->config, "preset:" + b.preset, "");
    }

    if (!b.config.empty()) {
        std::string text;
        if (!read_file(b.config, text)) {
            diags.push_back({"", "io", "cannot read config file", b.config, 0});
        } else {
            // Structural problems first; validate_text knows both config and result documents.
            auto d = validate_text(text, b.config, spec.name);
            if (!d.empty()) {
                diags.insert(diags.end(), d.begin(), d.end());
            } else {
                json layer = json::parse(text);
                if (layer.contains("omgsim_result")) layer = layer["config"];
                layer.erase("command");
                merge(layer, b.config, text);
            }
        }
    }

    json layer = json::object();
    for (auto& [param, opt] : b.options)
        if (opt->count() > 0) layer[param->key] = parse_flag_value(*param, opt->as<std::string>());
    for (const auto& s : b.sets) {
        const auto eq = s.find('=');
        const std::string key = s.substr(0, eq);
        const ParamSpec* p = find_param(spec, key);
        if (eq == std::string::npos || !p) {
            diags.push_back({key, eq == std::string::npos ? "value" : "unknown_key",
                             eq == std::string::npos ? "--set expects key=value" : "unknown key '" + key + "' for command " + spec.name,
                             "flag", 0});
            continue;
        }
        layer[key] = parse_flag_value(*p, s.substr(eq + 1));
    }
    merge(layer, "flag", "");

    if (diags.empty() && spec.check) {
        for (auto d : spec.check(doc)) {
            d.source = "resolved";
            diags.push_back(d);
        }
    }
    if (diags.empty() && doc["format"] == "text" && spec.name != "budget")
        diags.push_back({"format", "choice", "format text is only available for budget", "resolved", 0});
    if (!diags.empty()) return report(diags, err);

    CommandOutput res;
    try {
        res = spec.execute(doc);
    } catch (const std::exception& e) {
        err << format_json({{"error", e.what()}, {"command", spec.name}});
        return kExitInvalid;
    }

    const std::string format = doc["format"].get<std::string>();
    std::string payload;
    if (format == "csv") {
        payload = to_csv(res);
    } else if (format == "text") {
        payload = res.text;
    } else {
        json echo = doc;
        echo.erase("output");
        echo.erase("format");
        payload = format_json({{"omgsim_result", kVersion},
                               {"command", spec.name},
                               {"config", echo},
                               {"result", res.result},
                               {"warnings", res.warnings}});
    }
    const std::string output = doc["output"].get<std::string>();
    try {
        if (output == "-")
            out << payload;
        else
            atomic_write(output, payload);
    } catch (const std::exception& e) {
        err << format_json({{"error", e.what()}, {"command", spec.name}});
        return kExitInvalid;
    }
    for (const auto& w : res.warnings) err << "warning: " << w << '\n';
    return b.strict && !res.warnings.empty() ? kExitStrict : kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"omgsim: spin-motion clock dynamics, benchmarking, tomography, readout and error budgets"};
    app.name("omgsim");
    app.set_version_flag("--version", kVersion);
    bool list_presets = false;
    app.add_flag("--list-presets", list_presets, "list bundled presets and what they reproduce");
    app.require_subcommand(0, 1);

    std::vector<std::unique_ptr<Bound>> bound;
    for (const auto& spec : commands()) {
        auto b = std::make_unique<Bound>();
        b->spec = &spec;
        b->app = app.add_subcommand(spec.name, spec.summary);
        b->app->add_option("--config,-c", b->config, "JSON parameter file");
        b->app->add_option("--preset", b->preset, "start from a bundled preset");
        b->app->add_flag("--strict", b->strict, "exit 2 when the run produced warnings");
        b->app->add_option("--set", b->sets, "key=value override (repeatable)");
        std::vector<ParamSpec> all = spec.params;
        for (const auto& g : global_params()) all.push_back(g);
        for (const auto& p : all) {
            const ParamSpec* stable = find_param(spec, p.key);
            auto& slot = b->values.emplace_back();
            CLI::Option* opt = b->app->add_option(flag_names(p.key), slot, p.help);
            b->options.emplace_back(stable, opt);
        }
        bound.push_back(std::move(b));
    }

    std::string validate_path, validate_command;
    CLI::App* validate = app.add_subcommand("validate", "check a config or result document without running it");
    validate->add_option("path", validate_path, "JSON document")->required();
    validate->add_option("--command", validate_command, "command the document is for, when it does not say");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    if (list_presets) {
        for (const auto& p : presets())
            out << std::left << std::setw(22) << p.name << std::setw(18) << p.command << p.description << '\n';
        return kExitOk;
    }
    if (validate->parsed()) {
        std::string text;
        std::vector<Diagnostic> diags;
        if (!read_file(validate_path, text))
            diags.push_back({"", "io", "cannot read file", validate_path, 0});
        else
            diags = validate_text(text, validate_path, validate_command);
        json arr = json::array();
        for (const auto& d : diags) arr.push_back(to_json(d));
        out << format_json(arr);
        return diags.empty() ? kExitOk : kExitInvalid;
    }
    for (auto& b : bound)
        if (b->app->parsed()) return execute(*b, out, err);

    out << app.help();
    return kExitInvalid;
}

}  // namespace omgsim::cli
