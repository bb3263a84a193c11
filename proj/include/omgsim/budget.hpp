#pragma once

// Error-budget ledger: tagged error mechanisms summed into SPAM, procedure
// and total estimates and compared against measured fidelity or contrast loss.
// All values are in percent.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace omgsim {

enum class Provenance { measured, calculated, both };  // m, c, m+c
enum class Category { spam, procedure, loss, residual_m };

std::string to_string(Provenance p);
std::string to_string(Category c);
Provenance provenance_from_string(const std::string& s);
Category category_from_string(const std::string& s);

struct ErrorEntry {
    std::string name;
    double value = 0.0;             // percent
    std::optional<double> sigma;    // percent
    Provenance provenance = Provenance::measured;
    Category category = Category::spam;
    std::string role;               // ancilla, data, g0 or g1

    void validate() const;
};

struct ValueSigma {
    double value = 0.0;
    double sigma = 0.0;
};

struct ErrorBudget {
    std::string label;
    std::vector<ErrorEntry> entries;
    std::optional<ValueSigma> measured;  // measured error, percent

    void validate() const;
};

enum class TotalMode { linear, product };

// Linear: sum of values. Product: 1 - prod(1 - e_i), in percent. Sigma is
// the quadrature sum of the entries that carry one.
ValueSigma total(const ErrorBudget& budget, std::optional<Category> filter = std::nullopt,
                 TotalMode mode = TotalMode::linear);

// Categories present in the budget, in first-appearance order.
std::vector<Category> categories(const ErrorBudget& budget);

struct Comparison {
    ValueSigma measured;
    ValueSigma estimated;
    double discrepancy_sigma;  // (measured - estimated) / sqrt(s_m^2 + s_e^2)
};

Comparison compare(const ErrorBudget& budget, TotalMode mode = TotalMode::linear);

// Mechanism formulas. exp_decay: 1 - exp(-rate t). linear_in_depth: rate =
// alpha U, then exp_decay. constant: the stored value.
struct MechanismModel {
    enum class Kind { exp_decay, linear_in_depth, constant } kind = Kind::exp_decay;
    double rate = 0.0;    // 1/s
    double alpha = 0.0;   // 1/s per unit of trap depth
    double value = 0.0;   // percent, for constant
};

struct Exposure {
    std::optional<double> time;   // s
    std::optional<double> depth;  // trap depth, same unit alpha is quoted per
};

double mechanism_error(const MechanismModel& model, const Exposure& exposure);  // percent

// Ledger CSV: case,name,value_pct,sigma_pct,provenance,category,role; an
// empty sigma_pct means none was printed. Budgets keep file order.
std::vector<ErrorBudget> parse_budget_csv(std::istream& in);
std::vector<ErrorBudget> read_budget_csv(const std::string& path);

// Printed totals CSV: case,row,value_pct,sigma_pct with row one of the
// category names, "total" or "measured". Measured rows fill
// ErrorBudget::measured when merged.
struct PrintedRow {
    std::string case_label;
    std::string row;
    double value = 0.0;
    std::optional<double> sigma;
};

std::vector<PrintedRow> parse_printed_csv(std::istream& in);
std::vector<PrintedRow> read_printed_csv(const std::string& path);
void attach_measured(std::vector<ErrorBudget>& budgets, const std::vector<PrintedRow>& printed);

struct RegressionRow {
    std::string case_label;
    std::string row;
    double printed;
    double computed;
    double difference;  // computed - printed
    bool flagged;       // |difference| beyond rounding slack
};

inline constexpr double kPrintedRoundingSlack = 0.1;  // percent

std::vector<RegressionRow> regression(const std::vector<ErrorBudget>& budgets, const std::vector<PrintedRow>& printed);

const ErrorBudget& find_budget(const std::vector<ErrorBudget>& budgets, const std::string& label);

// "0.4(2)" style, uncertainty in units of the last digit.
std::string format_value_sigma(double value, std::optional<double> sigma);

// Fixed-width table: one column per budget, entries grouped by category,
// subtotal per category and a total estimate row.
std::string render_text_table(const std::vector<ErrorBudget>& budgets);

nlohmann::json to_json(const ErrorBudget& budget, TotalMode mode = TotalMode::linear);

}  // namespace omgsim
