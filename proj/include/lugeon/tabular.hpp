#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lugeon/matrix.hpp"

namespace lugeon {

enum class AttrKind { condition, decision };

/// Column description. `categories == 0` marks a numeric attribute; otherwise
/// the attribute is symbolic with labels 1..categories.
struct AttributeMeta {
    std::string name;
    AttrKind kind = AttrKind::condition;
    int categories = 0;

    bool symbolic() const noexcept { return categories > 0; }

    static AttributeMeta numeric(std::string name, AttrKind kind = AttrKind::condition) {
        return {std::move(name), kind, 0};
    }
    static AttributeMeta symbolic(std::string name, int k, AttrKind kind = AttrKind::condition) {
        return {std::move(name), kind, k};
    }

    friend bool operator==(const AttributeMeta&, const AttributeMeta&) = default;
};

using Schema = std::vector<AttributeMeta>;

/// The canonical borehole schema `x,y,z,l,rqd,twr,lu` with `lu` as decision.
Schema site_schema();

/// Thrown by CSV ingestion. Row numbers count data rows from 1.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::string column = {})
        : std::runtime_error(what), row_(row), column_(std::move(column)) {}
    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

/// Objects x attributes with exactly one decision attribute. Immutable once
/// built; symbolic cells hold integral category labels.
class DecisionTable {
public:
    DecisionTable(Schema attributes, Matrix values);

    const Schema& attributes() const noexcept { return attributes_; }
    const AttributeMeta& attribute(std::size_t j) const { return attributes_.at(j); }
    const Matrix& values() const noexcept { return values_; }

    std::size_t objects() const noexcept { return values_.rows(); }
    std::size_t width() const noexcept { return values_.cols(); }
    double at(std::size_t i, std::size_t j) const { return values_(i, j); }
    std::span<const double> row(std::size_t i) const { return values_.row(i); }

    std::size_t decision_index() const noexcept { return decision_; }
    std::vector<std::size_t> condition_indices() const;
    std::size_t index_of(std::string_view name) const;

    bool fully_symbolic() const noexcept;

    /// Row subset in the given order.
    DecisionTable select(std::span<const std::size_t> rows) const;
    /// Condition columns only, as a plain matrix.
    Matrix condition_matrix() const;
    std::vector<double> decision_column() const { return values_.column(decision_); }

    friend bool operator==(const DecisionTable&, const DecisionTable&) = default;

private:
    Schema attributes_;
    Matrix values_;
    std::size_t decision_ = 0;
};

DecisionTable load_table(const std::filesystem::path& path, const Schema& schema);
DecisionTable read_table(std::istream& in, const Schema& schema);
/// Writes with round-trip precision so a reload is bit-identical.
void save_table(const DecisionTable& table, const std::filesystem::path& path);
void write_table(const DecisionTable& table, std::ostream& out);

// Weathering classes and their numeric TWR codes.
double encode_twr(std::string_view label);
std::vector<std::string> twr_labels();
std::vector<double> twr_codes();

inline constexpr double kLugeonCap = 100.0;

double clamp_lugeon(double lu);
/// Water take in liters/meter/min normalized to a 10 bar test, then capped.
double compute_lugeon(double water_take, double pressure_bars);

struct Split {
    DecisionTable train;
    DecisionTable test;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

/// Seeded uniform split; rows beyond n_train + n_test are discarded.
Split split(const DecisionTable& table, std::size_t n_train, std::size_t n_test, std::uint64_t seed);

struct Prediction {
    double predicted;
    double actual;
};

double rmse(std::span<const Prediction> preds);
void write_predictions(std::span<const Prediction> preds, std::ostream& out);

/// Ordinal scale built from sorted 1-D prototype levels. Category c (1-based)
/// is the nearest level; ties go to the lower category.
struct OrdinalScale {
    std::vector<double> levels;

    int categories() const noexcept { return static_cast<int>(levels.size()); }
    int categorize(double v) const;
    double representative(int category) const { return levels.at(static_cast<std::size_t>(category - 1)); }
    /// Decision boundaries between adjacent categories (size k-1).
    std::vector<double> cuts() const;

    friend bool operator==(const OrdinalScale&, const OrdinalScale&) = default;
};

}  // namespace lugeon
