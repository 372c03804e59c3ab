#include "lugeon/rough.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lugeon/random.hpp"
#include "lugeon/som.hpp"

namespace lugeon::rough {

namespace {

void require_symbolic(const DecisionTable& table, std::span<const std::size_t> attributes, const char* who) {
    for (auto a : attributes) {
        if (a >= table.width()) throw std::out_of_range(std::string(who) + ": attribute index out of range");
        if (!table.attribute(a).symbolic())
            throw std::invalid_argument(std::string(who) + ": attribute '" + table.attribute(a).name +
                                        "' is numeric; discretize it first");
    }
}

std::vector<std::size_t> bits_of(AttrMask m) {
    std::vector<std::size_t> out;
    while (m) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
        m &= m - 1;
    }
    return out;
}

bool implicant_less(AttrMask a, AttrMask b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return bits_of(a) < bits_of(b);
}

// Keeps only masks that have no proper subset in the list (absorption).
void absorb(std::vector<AttrMask>& terms) {
    std::sort(terms.begin(), terms.end(), [](AttrMask a, AttrMask b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    std::vector<AttrMask> kept;
    kept.reserve(terms.size());
    for (AttrMask t : terms) {
        const bool covered = std::any_of(kept.begin(), kept.end(), [t](AttrMask k) { return (k & t) == k; });
        if (!covered) kept.push_back(t);
    }
    terms = std::move(kept);
}

kernels::CodeMatrix codes_of(const DecisionTable& table) {
    kernels::CodeMatrix m{table.objects(), table.width(), std::vector<int>(table.objects() * table.width())};
    for (std::size_t i = 0; i < table.objects(); ++i)
        for (std::size_t j = 0; j < table.width(); ++j) m.codes[i * m.cols + j] = static_cast<int>(table.at(i, j));
    return m;
}

}  // namespace

Partition indiscernibility_partition(const DecisionTable& table, std::span<const std::size_t> attributes) {
    require_symbolic(table, attributes, "indiscernibility_partition");
    Partition p;
    p.block_of.assign(table.objects(), 0);
    std::map<std::vector<double>, std::size_t> index;
    std::vector<double> key(attributes.size());
    for (std::size_t i = 0; i < table.objects(); ++i) {
        for (std::size_t b = 0; b < attributes.size(); ++b) key[b] = table.at(i, attributes[b]);
        auto [it, fresh] = index.try_emplace(key, p.blocks.size());
        if (fresh) p.blocks.emplace_back();
        p.blocks[it->second].push_back(i);
        p.block_of[i] = it->second;
    }
    return p;
}

ObjectSet lower_approximation(const Partition& p, const ObjectSet& x) {
    ObjectSet sorted(x);
    std::sort(sorted.begin(), sorted.end());
    ObjectSet out;
    for (const auto& block : p.blocks)
        if (std::includes(sorted.begin(), sorted.end(), block.begin(), block.end()))
            out.insert(out.end(), block.begin(), block.end());
    std::sort(out.begin(), out.end());
    return out;
}

ObjectSet upper_approximation(const Partition& p, const ObjectSet& x) {
    std::vector<bool> touched(p.blocks.size(), false);
    for (auto i : x) {
        if (i >= p.block_of.size()) throw std::out_of_range("approximation: object index outside the universe");
        touched[p.block_of[i]] = true;
    }
    ObjectSet out;
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        if (touched[b]) out.insert(out.end(), p.blocks[b].begin(), p.blocks[b].end());
    std::sort(out.begin(), out.end());
    return out;
}

ObjectSet lower_approximation(const DecisionTable& table, std::span<const std::size_t> attributes,
                              const ObjectSet& x) {
    return lower_approximation(indiscernibility_partition(table, attributes), x);
}

ObjectSet upper_approximation(const DecisionTable& table, std::span<const std::size_t> attributes,
                              const ObjectSet& x) {
    return upper_approximation(indiscernibility_partition(table, attributes), x);
}

DiscernMatrix::DiscernMatrix(std::size_t objects, std::vector<std::size_t> attributes, std::vector<AttrMask> cells)
    : n_(objects), attributes_(std::move(attributes)), cells_(std::move(cells)) {
    if (attributes_.size() > 64) throw std::length_error("DiscernMatrix: at most 64 attributes supported");
    if (cells_.size() != (n_ ? n_ * (n_ - 1) / 2 : 0))
        throw std::invalid_argument("DiscernMatrix: cell count does not match object count");
}

AttrMask DiscernMatrix::cell(std::size_t i, std::size_t j) const {
    if (!(j < i && i < n_)) throw std::out_of_range("DiscernMatrix: only cells with j < i < n exist");
    return cells_[kernels::cell_index(i, j)];
}

std::vector<std::size_t> DiscernMatrix::cell_attributes(std::size_t i, std::size_t j) const {
    std::vector<std::size_t> out;
    for (auto b : bits_of(cell(i, j))) out.push_back(attributes_[b]);
    return out;
}

DiscernMatrix discernibility_matrix(const DecisionTable& table, kernels::Exec exec) {
    std::vector<std::size_t> all(table.width());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    require_symbolic(table, all, "discernibility_matrix");
    auto cond = table.condition_indices();
    if (cond.size() > 64) throw std::length_error("discernibility_matrix: more than 64 condition attributes");
    auto cells = kernels::discern_cells(codes_of(table), cond, exec);
    return DiscernMatrix(table.objects(), std::move(cond), std::move(cells));
}

std::vector<AttrMask> prime_implicants(std::vector<AttrMask> clauses) {
    std::erase(clauses, AttrMask{0});
    absorb(clauses);
    std::vector<AttrMask> terms{0};
    std::vector<AttrMask> next;
    for (AttrMask clause : clauses) {
        next.clear();
        for (AttrMask t : terms) {
            if (t & clause) {
                next.push_back(t);
                continue;
            }
            for (AttrMask rest = clause; rest; rest &= rest - 1) next.push_back(t | (rest & (~rest + 1)));
        }
        absorb(next);
        terms.swap(next);
    }
    std::sort(terms.begin(), terms.end(), implicant_less);
    return terms;
}

std::vector<Reduct> reducts(const DiscernMatrix& matrix, std::size_t cap) {
    if (matrix.attributes().size() > cap)
        throw std::length_error("reducts: " + std::to_string(matrix.attributes().size()) +
                                " attributes exceed the cap of " + std::to_string(cap));
    std::vector<Reduct> out;
    for (AttrMask t : prime_implicants(matrix.cells())) {
        Reduct r;
        for (auto b : bits_of(t)) r.attributes.push_back(matrix.attributes()[b]);
        out.push_back(std::move(r));
    }
    return out;
}

bool DecisionRule::matches(std::span<const int> row) const {
    for (const auto& c : conditions) {
        if (c.attribute >= row.size())
            throw std::invalid_argument("classify: object lacks attribute #" + std::to_string(c.attribute));
        if (row[c.attribute] != c.category) return false;
    }
    return true;
}

std::vector<int> symbolic_row(const DecisionTable& table, std::size_t i) {
    std::vector<int> out(table.width());
    for (std::size_t j = 0; j < table.width(); ++j) out[j] = static_cast<int>(table.at(i, j));
    return out;
}

RuleSet induce_rules(const DecisionTable& table, double strength_threshold, kernels::Exec exec) {
    if (!table.fully_symbolic()) throw std::invalid_argument("induce_rules: table must be fully symbolic");
    if (!(strength_threshold >= 0.0 && strength_threshold <= 1.0))
        throw std::invalid_argument("induce_rules: strength threshold must lie in [0, 1]");
    const auto cond = table.condition_indices();
    if (cond.size() > kDefaultReductCap)
        throw std::length_error("induce_rules: " + std::to_string(cond.size()) + " condition attributes exceed the cap");

    const auto codes = codes_of(table);
    const std::size_t n = table.objects();
    const std::size_t d = table.decision_index();

    // Per-object relative discernibility function and its prime implicants.
    std::vector<std::vector<AttrMask>> implicants(n);
    kernels::for_each_index(
        n,
        [&](std::size_t i) {
            std::vector<AttrMask> clauses;
            for (std::size_t j = 0; j < n; ++j) {
                if (codes(i, d) == codes(j, d)) continue;
                AttrMask m = 0;
                for (std::size_t b = 0; b < cond.size(); ++b)
                    if (codes(i, cond[b]) != codes(j, cond[b])) m |= AttrMask{1} << b;
                if (m == 0) return;  // inconsistent object: no certain rule
                clauses.push_back(m);
            }
            implicants[i] = prime_implicants(std::move(clauses));
        },
        exec);

    std::map<std::pair<std::vector<Condition>, int>, DecisionRule> unique;
    for (std::size_t i = 0; i < n; ++i) {
        for (AttrMask t : implicants[i]) {
            DecisionRule r;
            for (auto b : bits_of(t)) r.conditions.push_back({cond[b], codes(i, cond[b])});
            r.decision = codes(i, d);
            unique.try_emplace({r.conditions, r.decision}, std::move(r));
        }
    }

    RuleSet rs;
    for (const auto& a : table.attributes()) rs.attribute_names.push_back(a.name);
    rs.decision_attribute = d;
    rs.categories = table.attribute(d).categories;
    rs.unknown_code = rs.categories + 1;

    for (auto& [key, rule] : unique) {
        for (std::size_t i = 0; i < n; ++i) {
            bool hit = true;
            for (const auto& c : rule.conditions) hit = hit && codes(i, c.attribute) == c.category;
            rule.support += hit;
        }
        rule.strength = static_cast<double>(rule.support) / static_cast<double>(n);
        if (rule.strength >= strength_threshold) rs.rules.push_back(std::move(rule));
    }
    std::sort(rs.rules.begin(), rs.rules.end(), [](const DecisionRule& a, const DecisionRule& b) {
        if (a.conditions.size() != b.conditions.size()) return a.conditions.size() < b.conditions.size();
        if (a.conditions != b.conditions) return a.conditions < b.conditions;
        return a.decision < b.decision;
    });
    return rs;
}

int classify(const RuleSet& rules, std::span<const int> row) {
    int best = rules.unknown_code;
    for (const auto& r : rules.rules)
        if (r.matches(row)) best = std::min(best, r.decision);
    return best;
}

std::string format_rule(const RuleSet& rules, const DecisionRule& rule) {
    std::ostringstream os;
    os << "IF ";
    if (rule.conditions.empty()) os << "TRUE";
    for (std::size_t c = 0; c < rule.conditions.size(); ++c)
        os << (c ? " AND " : "") << rules.attribute_names.at(rule.conditions[c].attribute) << '='
           << rule.conditions[c].category;
    char strength[32];
    std::snprintf(strength, sizeof strength, "%.4f", rule.strength);
    os << " THEN " << rules.attribute_names.at(rules.decision_attribute) << '=' << rule.decision
       << " [support=" << rule.support << ", strength=" << strength << ']';
    return os.str();
}

void write_rules(const RuleSet& rules, std::ostream& out) {
    for (const auto& r : rules.rules) out << format_rule(rules, r) << '\n';
}

namespace {

[[noreturn]] void bad_rule(std::size_t line, const std::string& why) {
    throw ParseError("rule line " + std::to_string(line) + ": " + why, line);
}

std::pair<std::string, int> parse_assignment(std::string_view s, std::size_t line) {
    const auto eq = s.find('=');
    if (eq == std::string_view::npos || eq == 0) bad_rule(line, "expected <attr>=<cat>, got '" + std::string(s) + "'");
    const std::string value(s.substr(eq + 1));
    std::size_t used = 0;
    int cat = 0;
    try {
        cat = std::stoi(value, &used);
    } catch (const std::exception&) {
        bad_rule(line, "category '" + value + "' is not an integer");
    }
    if (used != value.size()) bad_rule(line, "category '" + value + "' is not an integer");
    return {std::string(s.substr(0, eq)), cat};
}

}  // namespace

RuleSet read_rules(std::istream& in, std::vector<std::string> attribute_names, std::size_t decision_attribute,
                   int categories) {
    RuleSet rs;
    rs.attribute_names = std::move(attribute_names);
    rs.decision_attribute = decision_attribute;
    rs.categories = categories;
    rs.unknown_code = categories + 1;
    auto index_of = [&](const std::string& name, std::size_t line) {
        const auto it = std::find(rs.attribute_names.begin(), rs.attribute_names.end(), name);
        if (it == rs.attribute_names.end()) bad_rule(line, "unknown attribute '" + name + "'");
        return static_cast<std::size_t>(it - rs.attribute_names.begin());
    };

    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string_view s(text);
        if (s.substr(0, 3) != "IF ") bad_rule(line, "missing 'IF '");
        const auto then = s.find(" THEN ");
        const auto open = s.find(" [support=");
        if (then == std::string_view::npos || open == std::string_view::npos || open < then)
            bad_rule(line, "expected 'IF ... THEN ... [support=..., strength=...]'");

        DecisionRule r;
        std::string_view lhs = s.substr(3, then - 3);
        if (lhs != "TRUE") {
            for (;;) {
                const auto sep = lhs.find(" AND ");
                auto [name, cat] = parse_assignment(lhs.substr(0, sep), line);
                const auto a = index_of(name, line);
                if (a == rs.decision_attribute) bad_rule(line, "decision attribute used as a condition");
                r.conditions.push_back({a, cat});
                if (sep == std::string_view::npos) break;
                lhs.remove_prefix(sep + 5);
            }
        }
        auto [dname, dcat] = parse_assignment(s.substr(then + 6, open - then - 6), line);
        if (index_of(dname, line) != rs.decision_attribute) bad_rule(line, "THEN clause must name the decision");
        if (dcat < 1 || dcat > categories) bad_rule(line, "decision category out of range");
        r.decision = dcat;

        unsigned long support = 0;
        double strength = 0.0;
        char tail = 0;
        const std::string bracket(s.substr(open + 1));
        if (std::sscanf(bracket.c_str(), "[support=%lu, strength=%lf%c", &support, &strength, &tail) != 3 ||
            tail != ']')
            bad_rule(line, "malformed support/strength block");
        r.support = support;
        r.strength = strength;
        rs.rules.push_back(std::move(r));
    }
    return rs;
}

int RoughModel::predict(std::span<const double> conditions) const {
    const std::size_t width = rules.attribute_names.size();
    if (conditions.size() + 1 != width)
        throw std::invalid_argument("RoughModel: expected " + std::to_string(width - 1) + " condition values, got " +
                                    std::to_string(conditions.size()));
    std::vector<int> row(width, 0);
    std::size_t k = 0;
    for (std::size_t j = 0; j < width; ++j) {
        if (j == rules.decision_attribute) continue;
        row[j] = scales.at(j).categorize(conditions[k++]);
    }
    return classify(rules, row);
}

Discretized discretize_table(const DecisionTable& table, std::size_t k, std::uint64_t seed, int epochs) {
    std::vector<OrdinalScale> scales;
    for (std::size_t j = 0; j < table.width(); ++j) {
        const auto col = table.values().column(j);
        scales.push_back(som::fit_ordinal_scale(col, k, derive_seed(seed, "discretize", j), epochs));
    }
    auto symbolic = apply_scales(table, scales);
    return {std::move(symbolic), std::move(scales)};
}

DecisionTable apply_scales(const DecisionTable& table, std::span<const OrdinalScale> scales) {
    if (scales.size() != table.width()) throw std::invalid_argument("apply_scales: one scale per attribute required");
    Schema schema;
    for (std::size_t j = 0; j < table.width(); ++j) {
        const auto& a = table.attribute(j);
        schema.push_back(AttributeMeta::symbolic(a.name, scales[j].categories(), a.kind));
    }
    Matrix m(table.objects(), table.width());
    for (std::size_t i = 0; i < table.objects(); ++i)
        for (std::size_t j = 0; j < table.width(); ++j) m(i, j) = scales[j].categorize(table.at(i, j));
    return DecisionTable(std::move(schema), std::move(m));
}

nlohmann::json to_json(const RoughModel& model) {
    using nlohmann::json;
    json rules = json::array();
    for (const auto& r : model.rules.rules) {
        json conds = json::array();
        for (const auto& c : r.conditions) conds.push_back({c.attribute, c.category});
        rules.push_back({{"conditions", conds}, {"decision", r.decision}, {"support", r.support},
                         {"strength", r.strength}});
    }
    json scales = json::array();
    for (const auto& s : model.scales) scales.push_back(s.levels);
    return {{"type", "rough"},
            {"attributes", model.rules.attribute_names},
            {"decision", model.rules.decision_attribute},
            {"categories", model.rules.categories},
            {"unknown_code", model.rules.unknown_code},
            {"scales", scales},
            {"rules", rules}};
}

RoughModel rough_model_from_json(const nlohmann::json& j) {
    if (j.at("type").get<std::string>() != "rough") throw std::invalid_argument("model file is not a rough model");
    RoughModel m;
    m.rules.attribute_names = j.at("attributes").get<std::vector<std::string>>();
    m.rules.decision_attribute = j.at("decision").get<std::size_t>();
    m.rules.categories = j.at("categories").get<int>();
    m.rules.unknown_code = j.at("unknown_code").get<int>();
    for (const auto& s : j.at("scales")) m.scales.push_back({s.get<std::vector<double>>()});
    for (const auto& r : j.at("rules")) {
        DecisionRule rule;
        for (const auto& c : r.at("conditions")) rule.conditions.push_back({c.at(0).get<std::size_t>(), c.at(1).get<int>()});
        rule.decision = r.at("decision").get<int>();
        rule.support = r.at("support").get<std::size_t>();
        rule.strength = r.at("strength").get<double>();
        m.rules.rules.push_back(std::move(rule));
    }
    if (m.scales.size() != m.rules.attribute_names.size())
        throw std::invalid_argument("rough model: one scale per attribute required");
    return m;
}

}  // namespace lugeon::rough
