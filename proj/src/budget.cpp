#include "omgsim/budget.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "omgsim/csv.hpp"
#include "omgsim/errors.hpp"

namespace omgsim {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::measured: return "m";
        case Provenance::calculated: return "c";
        case Provenance::both: return "m+c";
    }
    return "?";
}

std::string to_string(Category c) {
    switch (c) {
        case Category::spam: return "SPAM";
        case Category::procedure: return "procedure";
        case Category::loss: return "loss";
        case Category::residual_m: return "residual_m";
    }
    return "?";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "m") return Provenance::measured;
    if (s == "c") return Provenance::calculated;
    if (s == "m+c") return Provenance::both;
    throw ConfigError("provenance must be m, c or m+c, got '" + s + "'");
}

Category category_from_string(const std::string& s) {
    if (s == "SPAM") return Category::spam;
    if (s == "procedure") return Category::procedure;
    if (s == "loss") return Category::loss;
    if (s == "residual_m") return Category::residual_m;
    throw ConfigError("category must be SPAM, procedure, loss or residual_m, got '" + s + "'");
}

void ErrorEntry::validate() const {
    if (name.empty()) throw DomainError("error entry needs a name");
    if (!(value >= 0.0) || !std::isfinite(value)) throw DomainError("error entry '" + name + "' must be >= 0");
    if (sigma && (!(*sigma >= 0.0) || !std::isfinite(*sigma)))
        throw DomainError("sigma of '" + name + "' must be >= 0");
}

void ErrorBudget::validate() const {
    if (entries.empty()) throw EmptyDataError("budget '" + label + "' has no entries");
    for (const auto& e : entries) e.validate();
    if (measured && (!std::isfinite(measured->value) || !(measured->sigma >= 0.0)))
        throw DomainError("measured value of '" + label + "' is invalid");
}

ValueSigma total(const ErrorBudget& budget, std::optional<Category> filter, TotalMode mode) {
    budget.validate();
    double sum = 0.0, keep = 1.0, var = 0.0;
    int n = 0;
    for (const auto& e : budget.entries) {
        if (filter && e.category != *filter) continue;
        ++n;
        sum += e.value;
        keep *= 1.0 - e.value / 100.0;
        if (e.sigma) var += *e.sigma * *e.sigma;
    }
    if (n == 0)
        throw EmptyCategoryError("budget '" + budget.label + "' has no " + (filter ? to_string(*filter) : "") +
                                 " entries");
    return {mode == TotalMode::linear ? sum : 100.0 * (1.0 - keep), std::sqrt(var)};
}

std::vector<Category> categories(const ErrorBudget& budget) {
    std::vector<Category> out;
    for (const auto& e : budget.entries)
        if (std::find(out.begin(), out.end(), e.category) == out.end()) out.push_back(e.category);
    return out;
}

Comparison compare(const ErrorBudget& budget, TotalMode mode) {
    if (!budget.measured) throw DomainError("budget '" + budget.label + "' has no measured value");
    const ValueSigma est = total(budget, std::nullopt, mode);
    const ValueSigma& m = *budget.measured;
    const double diff = m.value - est.value;
    const double s = std::hypot(m.sigma, est.sigma);
    double z;
    if (s > 0.0)
        z = diff / s;
    else
        z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    return {m, est, z};
}

double mechanism_error(const MechanismModel& model, const Exposure& exposure) {
    using Kind = MechanismModel::Kind;
    switch (model.kind) {
        case Kind::constant:
            if (!(model.value >= 0.0)) throw DomainError("constant error must be >= 0");
            return model.value;
        case Kind::exp_decay:
        case Kind::linear_in_depth: {
            if (!exposure.time) throw MissingExposureError("mechanism needs an exposure time");
            double rate = model.rate;
            if (model.kind == Kind::linear_in_depth) {
                if (!exposure.depth) throw MissingExposureError("linear_in_depth mechanism needs a trap depth");
                if (!(model.alpha >= 0.0) || !(*exposure.depth >= 0.0))
                    throw DomainError("alpha and trap depth must be >= 0");
                rate = model.alpha * *exposure.depth;
            }
            if (!(rate >= 0.0)) throw DomainError("rate must be >= 0");
            if (!(*exposure.time >= 0.0)) throw DomainError("exposure time must be >= 0");
            return -100.0 * std::expm1(-rate * *exposure.time);
        }
    }
    return 0.0;
}

// ---- CSV -------------------------------------------------------------------

std::vector<ErrorBudget> parse_budget_csv(std::istream& in) {
    const std::string what = "budget CSV";
    const auto rows = csv::read_rows(in);
    if (rows.empty()) throw ConfigError("budget CSV is empty");
    const std::vector<std::string> header{"case", "name", "value_pct", "sigma_pct", "provenance", "category", "role"};
    if (rows[0].cells != header)
        csv::fail(what, rows[0].line, "expected header case,name,value_pct,sigma_pct,provenance,category,role");
    std::vector<ErrorBudget> out;
    std::map<std::string, std::size_t> index;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [line, c] = rows[r];
        if (c.size() != header.size()) csv::fail(what, line, "expected 7 columns");
        ErrorEntry e;
        e.name = c[1];
        e.value = csv::parse_double(c[2], what, line);
        if (!c[3].empty()) e.sigma = csv::parse_double(c[3], what, line);
        try {
            e.provenance = provenance_from_string(c[4]);
            e.category = category_from_string(c[5]);
        } catch (const ConfigError& err) {
            csv::fail(what, line, err.what());
        }
        e.role = c[6];
        try {
            e.validate();
        } catch (const Error& err) {
            csv::fail(what, line, err.what());
        }
        auto [it, fresh] = index.try_emplace(c[0], out.size());
        if (fresh) out.push_back({c[0], {}, std::nullopt});
        out[it->second].entries.push_back(std::move(e));
    }
    return out;
}

std::vector<ErrorBudget> read_budget_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open budget CSV: " + path);
    return parse_budget_csv(in);
}

std::vector<PrintedRow> parse_printed_csv(std::istream& in) {
    const std::string what = "printed-totals CSV";
    const auto rows = csv::read_rows(in);
    if (rows.empty()) throw ConfigError("printed-totals CSV is empty");
    if (rows[0].cells != std::vector<std::string>{"case", "row", "value_pct", "sigma_pct"})
        csv::fail(what, rows[0].line, "expected header case,row,value_pct,sigma_pct");
    std::vector<PrintedRow> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [line, c] = rows[r];
        if (c.size() != 4) csv::fail(what, line, "expected 4 columns");
        PrintedRow p{c[0], c[1], csv::parse_double(c[2], what, line), std::nullopt};
        if (!c[3].empty()) p.sigma = csv::parse_double(c[3], what, line);
        if (p.row != "total" && p.row != "measured") {
            try {
                category_from_string(p.row);
            } catch (const ConfigError&) {
                csv::fail(what, line, "row must be a category name, total or measured");
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<PrintedRow> read_printed_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open printed-totals CSV: " + path);
    return parse_printed_csv(in);
}

const ErrorBudget& find_budget(const std::vector<ErrorBudget>& budgets, const std::string& label) {
    for (const auto& b : budgets)
        if (b.label == label) return b;
    std::string known;
    for (const auto& b : budgets) known += (known.empty() ? "" : ", ") + b.label;
    throw ConfigError("unknown budget case '" + label + "' (known: " + known + ")");
}

void attach_measured(std::vector<ErrorBudget>& budgets, const std::vector<PrintedRow>& printed) {
    for (const auto& p : printed) {
        if (p.row != "measured") continue;
        for (auto& b : budgets)
            if (b.label == p.case_label) b.measured = ValueSigma{p.value, p.sigma.value_or(0.0)};
    }
}

std::vector<RegressionRow> regression(const std::vector<ErrorBudget>& budgets, const std::vector<PrintedRow>& printed) {
    std::vector<RegressionRow> out;
    for (const auto& p : printed) {
        if (p.row == "measured") continue;
        const auto& b = find_budget(budgets, p.case_label);
        const double computed =
            p.row == "total" ? total(b).value : total(b, category_from_string(p.row)).value;
        const double diff = computed - p.value;
        out.push_back({p.case_label, p.row, p.value, computed, diff, std::abs(diff) > kPrintedRoundingSlack});
    }
    return out;
}

// ---- rendering -------------------------------------------------------------

std::string format_value_sigma(double value, std::optional<double> sigma) {
    char buf[64];
    if (!sigma || *sigma <= 0.0) {
        std::snprintf(buf, sizeof buf, "%g", value);
        return buf;
    }
    int decimals = std::max(0, -static_cast<int>(std::floor(std::log10(*sigma))));
    long digits = std::lround(*sigma * std::pow(10.0, decimals));
    if (digits >= 10 && decimals > 0) {
        --decimals;
        digits = std::lround(*sigma * std::pow(10.0, decimals));
    }
    std::snprintf(buf, sizeof buf, "%.*f(%ld)", decimals, value, digits);
    return buf;
}

std::string render_text_table(const std::vector<ErrorBudget>& budgets) {
    if (budgets.empty()) throw EmptyDataError("no budgets to render");
    constexpr int kName = 34, kCol = 22;
    std::ostringstream os;
    auto cell = [&](const std::string& s, int w) { os << std::left << std::setw(w) << s; };
    auto rule = [&] { os << std::string(kName + kCol * budgets.size(), '-') << '\n'; };

    cell("(%)", kName);
    for (const auto& b : budgets) cell(b.label, kCol);
    os << '\n';
    rule();
    if (std::any_of(budgets.begin(), budgets.end(), [](const auto& b) { return b.measured.has_value(); })) {
        cell("Measured error", kName);
        for (const auto& b : budgets)
            cell(b.measured ? format_value_sigma(b.measured->value, b.measured->sigma) : "--", kCol);
        os << '\n';
        rule();
    }

    std::vector<Category> cats;
    for (const auto& b : budgets)
        for (auto c : categories(b))
            if (std::find(cats.begin(), cats.end(), c) == cats.end()) cats.push_back(c);

    for (auto cat : cats) {
        os << to_string(cat) << '\n';
        std::vector<std::string> names;
        for (const auto& b : budgets)
            for (const auto& e : b.entries)
                if (e.category == cat && std::find(names.begin(), names.end(), e.name) == names.end())
                    names.push_back(e.name);
        for (const auto& name : names) {
            std::string prov;
            for (const auto& b : budgets)
                for (const auto& e : b.entries)
                    if (e.category == cat && e.name == name) prov = to_string(e.provenance);
            cell("  " + name + " (" + prov + ")", kName);
            for (const auto& b : budgets) {
                std::string text = "--";
                for (const auto& e : b.entries)
                    if (e.category == cat && e.name == name) text = format_value_sigma(e.value, e.sigma);
                cell(text, kCol);
            }
            os << '\n';
        }
        cell(to_string(cat) + " error", kName);
        for (const auto& b : budgets) {
            const auto present = categories(b);
            if (std::find(present.begin(), present.end(), cat) == present.end()) {
                cell("--", kCol);
                continue;
            }
            const auto t = total(b, cat);
            cell(format_value_sigma(t.value, t.sigma), kCol);
        }
        os << '\n';
        rule();
    }
    cell("Total estimate", kName);
    for (const auto& b : budgets) {
        const auto t = total(b);
        cell(format_value_sigma(t.value, t.sigma), kCol);
    }
    os << '\n';
    return os.str();
}

nlohmann::json to_json(const ErrorBudget& budget, TotalMode mode) {
    nlohmann::json doc;
    doc["case"] = budget.label;
    auto entries = nlohmann::json::array();
    for (const auto& e : budget.entries) {
        nlohmann::json j{{"name", e.name},
                         {"value_pct", e.value},
                         {"provenance", to_string(e.provenance)},
                         {"category", to_string(e.category)},
                         {"role", e.role}};
        j["sigma_pct"] = e.sigma ? nlohmann::json(*e.sigma) : nlohmann::json(nullptr);
        entries.push_back(j);
    }
    doc["entries"] = entries;
    auto subtotals = nlohmann::json::object();
    for (auto c : categories(budget)) {
        const auto t = total(budget, c, mode);
        subtotals[to_string(c)] = {{"value_pct", t.value}, {"sigma_pct", t.sigma}};
    }
    doc["subtotals"] = subtotals;
    const auto t = total(budget, std::nullopt, mode);
    doc["total_estimate_pct"] = t.value;
    doc["total_estimate_sigma_pct"] = t.sigma;
    doc["total_mode"] = mode == TotalMode::linear ? "linear" : "product";
    if (budget.measured) {
        const auto cmp = compare(budget, mode);
        doc["measured_error_pct"] = cmp.measured.value;
        doc["measured_error_sigma_pct"] = cmp.measured.sigma;
        doc["discrepancy_sigma"] = cmp.discrepancy_sigma;
    }
    return doc;
}

}  // namespace omgsim
