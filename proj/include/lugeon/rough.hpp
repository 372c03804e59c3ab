#pragma once

// Rough set engine over symbolic decision tables: indiscernibility classes,
// approximations, discernibility matrix/function, reducts, rule induction and
// rule-based classification with an explicit "unknown" outcome.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lugeon/kernels.hpp"
#include "lugeon/tabular.hpp"

namespace lugeon::rough {

/// Sorted object indices.
using ObjectSet = std::vector<std::size_t>;
using AttrMask = kernels::AttrMask;

inline constexpr std::size_t kDefaultReductCap = 20;

/// Equivalence classes of I_B, ordered by their smallest member.
struct Partition {
    std::vector<ObjectSet> blocks;
    std::vector<std::size_t> block_of;  // object -> block index
};

Partition indiscernibility_partition(const DecisionTable& table, std::span<const std::size_t> attributes);

ObjectSet lower_approximation(const Partition& p, const ObjectSet& x);
ObjectSet upper_approximation(const Partition& p, const ObjectSet& x);
ObjectSet lower_approximation(const DecisionTable& table, std::span<const std::size_t> attributes,
                              const ObjectSet& x);
ObjectSet upper_approximation(const DecisionTable& table, std::span<const std::size_t> attributes,
                              const ObjectSet& x);

/// c_ij for j < i over a fixed list of attribute columns; bit b of a cell
/// stands for column `attributes()[b]`.
class DiscernMatrix {
public:
    DiscernMatrix(std::size_t objects, std::vector<std::size_t> attributes, std::vector<AttrMask> cells);

    std::size_t objects() const noexcept { return n_; }
    const std::vector<std::size_t>& attributes() const noexcept { return attributes_; }
    const std::vector<AttrMask>& cells() const noexcept { return cells_; }

    AttrMask cell(std::size_t i, std::size_t j) const;
    std::vector<std::size_t> cell_attributes(std::size_t i, std::size_t j) const;

private:
    std::size_t n_;
    std::vector<std::size_t> attributes_;
    std::vector<AttrMask> cells_;
};

/// Discernibility over the condition attributes. Every attribute of the table
/// must be symbolic.
DiscernMatrix discernibility_matrix(const DecisionTable& table, kernels::Exec exec = kernels::Exec::parallel);

/// Prime implicants of the monotone CNF formed by `clauses` (each a
/// disjunction of set bits), sorted by size then lexicographically. Zero
/// clauses are ignored; an empty formula yields the single empty term.
std::vector<AttrMask> prime_implicants(std::vector<AttrMask> clauses);

struct Reduct {
    std::vector<std::size_t> attributes;  // table columns, ascending
    friend bool operator==(const Reduct&, const Reduct&) = default;
};

/// All reducts: prime implicants of the discernibility function.
std::vector<Reduct> reducts(const DiscernMatrix& matrix, std::size_t cap = kDefaultReductCap);

struct Condition {
    std::size_t attribute;
    int category;
    friend auto operator<=>(const Condition&, const Condition&) = default;
};

struct DecisionRule {
    std::vector<Condition> conditions;
    int decision = 0;
    std::size_t support = 0;
    double strength = 0.0;

    bool matches(std::span<const int> row) const;
};

struct RuleSet {
    std::vector<std::string> attribute_names;  // schema of the inducing table
    std::size_t decision_attribute = 0;
    int categories = 0;    // decision categories k
    int unknown_code = 1;  // k + 1
    std::vector<DecisionRule> rules;
};

/// Certain rules from object-relative discernibility. Rules with
/// support / n below `strength_threshold` are dropped.
RuleSet induce_rules(const DecisionTable& table, double strength_threshold = 0.0,
                     kernels::Exec exec = kernels::Exec::parallel);

/// Unanimous matches return their decision, conflicting matches the lowest
/// one, and no match returns `unknown_code`.
int classify(const RuleSet& rules, std::span<const int> row);

std::vector<int> symbolic_row(const DecisionTable& table, std::size_t i);

/// `IF a=1 AND b=2 THEN d=3 [support=4, strength=0.0400]`, one rule per line.
void write_rules(const RuleSet& rules, std::ostream& out);
std::string format_rule(const RuleSet& rules, const DecisionRule& rule);
RuleSet read_rules(std::istream& in, std::vector<std::string> attribute_names, std::size_t decision_attribute,
                   int categories);

/// Rule set plus the ordinal scales that map raw inputs onto categories.
struct RoughModel {
    RuleSet rules;
    std::vector<OrdinalScale> scales;  // one per attribute of the rule schema

    /// Category for a raw row holding the condition attributes in schema order.
    int predict(std::span<const double> conditions) const;
    std::size_t inputs() const noexcept { return scales.empty() ? 0 : scales.size() - 1; }
};

/// Discretizes every attribute of a numeric table to k categories with 1-D
/// SOMs and returns the symbolic table together with the scales used.
struct Discretized {
    DecisionTable table;
    std::vector<OrdinalScale> scales;
};
Discretized discretize_table(const DecisionTable& table, std::size_t k, std::uint64_t seed, int epochs = 100);
DecisionTable apply_scales(const DecisionTable& table, std::span<const OrdinalScale> scales);

nlohmann::json to_json(const RoughModel& model);
RoughModel rough_model_from_json(const nlohmann::json& j);

}  // namespace lugeon::rough
