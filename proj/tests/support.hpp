#pragma once

// Brute-force oracles and random generators shared by the unit tests and the
// acceptance binary. Nothing here calls into the rough-set engine.

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "lugeon/tabular.hpp"

namespace lugeon::testsupport {

using Objects = std::vector<std::size_t>;

/// Symbolic table with `attrs` condition attributes of `k` categories and a
/// decision of `dk` categories.
inline DecisionTable random_symbolic_table(std::mt19937_64& rng, std::size_t objects, std::size_t attrs, int k = 2,
                                           int dk = 2) {
    Schema schema;
    for (std::size_t a = 0; a < attrs; ++a) schema.push_back(AttributeMeta::symbolic("a" + std::to_string(a), k));
    schema.push_back(AttributeMeta::symbolic("d", dk, AttrKind::decision));
    std::uniform_int_distribution<int> cond(1, k), dec(1, dk);
    Matrix m(objects, attrs + 1);
    for (std::size_t i = 0; i < objects; ++i) {
        for (std::size_t a = 0; a < attrs; ++a) m(i, a) = cond(rng);
        m(i, attrs) = dec(rng);
    }
    return DecisionTable(std::move(schema), std::move(m));
}

/// Every subset of `items`, as sorted vectors, in bitmask order.
inline std::vector<std::vector<std::size_t>> subsets(const std::vector<std::size_t>& items) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << items.size()); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t b = 0; b < items.size(); ++b)
            if (mask >> b & 1) s.push_back(items[b]);
        out.push_back(std::move(s));
    }
    return out;
}

inline bool same_on(const DecisionTable& t, std::size_t x, std::size_t y, const std::vector<std::size_t>& attrs) {
    for (auto a : attrs)
        if (t.at(x, a) != t.at(y, a)) return false;
    return true;
}

inline bool contains(const Objects& set, std::size_t x) { return std::find(set.begin(), set.end(), x) != set.end(); }

/// { x : every y indiscernible from x lies in X }
inline Objects brute_lower(const DecisionTable& t, const std::vector<std::size_t>& attrs, const Objects& x_set) {
    Objects out;
    for (std::size_t x = 0; x < t.objects(); ++x) {
        bool inside = true;
        for (std::size_t y = 0; y < t.objects(); ++y)
            if (same_on(t, x, y, attrs) && !contains(x_set, y)) inside = false;
        if (inside) out.push_back(x);
    }
    return out;
}

/// { x : some y indiscernible from x lies in X }
inline Objects brute_upper(const DecisionTable& t, const std::vector<std::size_t>& attrs, const Objects& x_set) {
    Objects out;
    for (std::size_t x = 0; x < t.objects(); ++x) {
        bool touches = false;
        for (std::size_t y = 0; y < t.objects(); ++y)
            if (same_on(t, x, y, attrs) && contains(x_set, y)) touches = true;
        if (touches) out.push_back(x);
    }
    return out;
}

inline Objects decision_class(const DecisionTable& t, double d) {
    Objects out;
    for (std::size_t i = 0; i < t.objects(); ++i)
        if (t.at(i, t.decision_index()) == d) out.push_back(i);
    return out;
}

inline Objects complement(std::size_t n, const Objects& x_set) {
    Objects out;
    for (std::size_t i = 0; i < n; ++i)
        if (!contains(x_set, i)) out.push_back(i);
    return out;
}

inline bool is_subset(const Objects& a, const Objects& b) {
    return std::all_of(a.begin(), a.end(), [&](std::size_t x) { return contains(b, x); });
}

/// R keeps every pair apart that the full condition set keeps apart.
inline bool preserves_discernibility(const DecisionTable& t, const std::vector<std::size_t>& r) {
    const auto all = t.condition_indices();
    for (std::size_t i = 0; i < t.objects(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (!same_on(t, i, j, all) && same_on(t, i, j, r)) return false;
    return true;
}

/// Minimal discernibility-preserving subsets, by exhaustive search over all
/// subsets and all their proper subsets. Sorted by (size, lexicographic).
inline std::vector<std::vector<std::size_t>> brute_reducts(const DecisionTable& t) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& r : subsets(t.condition_indices())) {
        if (!preserves_discernibility(t, r)) continue;
        bool minimal = true;
        for (const auto& s : subsets(r))
            if (s.size() < r.size() && preserves_discernibility(t, s)) minimal = false;
        if (minimal) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return out;
}

}  // namespace lugeon::testsupport
