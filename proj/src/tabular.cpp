#include "lugeon/tabular.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace lugeon {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

struct TwrEntry {
    std::string_view label;
    double code;
};

constexpr std::array<TwrEntry, 9> kTwr{{
    {"Fresh-MW", 1.5},
    {"SW-MW", 2.0},
    {"Fresh-SW", 0.5},
    {"Fresh", 0.0},
    {"MW", 3.0},
    {"CW", 2.5},
    {"SW", 1.0},
    {"HW-MW", 3.5},
    {"HW", 4.0},
}};

std::string normalize_label(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

MinMax MinMax::fit(const Matrix& data) {
    MinMax mm;
    mm.lo.assign(data.cols(), 0.0);
    mm.hi.assign(data.cols(), 0.0);
    for (std::size_t j = 0; j < data.cols(); ++j) {
        double lo = data.rows() ? data(0, j) : 0.0;
        double hi = lo;
        for (std::size_t i = 1; i < data.rows(); ++i) {
            lo = std::min(lo, data(i, j));
            hi = std::max(hi, data(i, j));
        }
        mm.lo[j] = lo;
        mm.hi[j] = hi;
    }
    return mm;
}

Matrix MinMax::forward(const Matrix& data) const {
    Matrix out(data.rows(), data.cols());
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (std::size_t j = 0; j < data.cols(); ++j) out(i, j) = forward(j, data(i, j));
    return out;
}

std::vector<double> MinMax::forward(std::span<const double> v) const {
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = forward(j, v[j]);
    return out;
}

Schema site_schema() {
    return {
        AttributeMeta::numeric("x"),   AttributeMeta::numeric("y"),   AttributeMeta::numeric("z"),
        AttributeMeta::numeric("l"),   AttributeMeta::numeric("rqd"), AttributeMeta::numeric("twr"),
        AttributeMeta::numeric("lu", AttrKind::decision),
    };
}

DecisionTable::DecisionTable(Schema attributes, Matrix values)
    : attributes_(std::move(attributes)), values_(std::move(values)) {
    if (attributes_.empty()) throw std::invalid_argument("DecisionTable: no attributes");
    if (values_.rows() == 0) throw std::invalid_argument("DecisionTable: no objects");
    if (values_.cols() != attributes_.size())
        throw std::invalid_argument("DecisionTable: row width does not match attribute count");
    std::size_t decisions = 0;
    for (std::size_t j = 0; j < attributes_.size(); ++j) {
        if (attributes_[j].kind == AttrKind::decision) {
            decision_ = j;
            ++decisions;
        }
    }
    if (decisions != 1)
        throw std::invalid_argument("DecisionTable: exactly one decision attribute required, found " +
                                    std::to_string(decisions));
    for (std::size_t i = 0; i < values_.rows(); ++i) {
        for (std::size_t j = 0; j < values_.cols(); ++j) {
            const double v = values_(i, j);
            if (!std::isfinite(v))
                throw std::invalid_argument("DecisionTable: non-finite value in column " + attributes_[j].name);
            const auto& a = attributes_[j];
            if (a.symbolic() && (v != std::floor(v) || v < 1 || v > a.categories))
                throw std::invalid_argument("DecisionTable: column " + a.name + " holds " + format_double(v) +
                                            ", outside categories 1.." + std::to_string(a.categories));
        }
    }
}

std::vector<std::size_t> DecisionTable::condition_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < attributes_.size(); ++j)
        if (j != decision_) out.push_back(j);
    return out;
}

std::size_t DecisionTable::index_of(std::string_view name) const {
    for (std::size_t j = 0; j < attributes_.size(); ++j)
        if (attributes_[j].name == name) return j;
    throw std::invalid_argument("DecisionTable: no attribute named '" + std::string(name) + "'");
}

bool DecisionTable::fully_symbolic() const noexcept {
    return std::all_of(attributes_.begin(), attributes_.end(), [](const auto& a) { return a.symbolic(); });
}

DecisionTable DecisionTable::select(std::span<const std::size_t> rows) const {
    Matrix m(rows.size(), width());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = row(rows[r]);
        std::copy(src.begin(), src.end(), m.row(r).begin());
    }
    return DecisionTable(attributes_, std::move(m));
}

Matrix DecisionTable::condition_matrix() const {
    const auto cond = condition_indices();
    Matrix m(objects(), cond.size());
    for (std::size_t i = 0; i < objects(); ++i)
        for (std::size_t c = 0; c < cond.size(); ++c) m(i, c) = at(i, cond[c]);
    return m;
}

DecisionTable read_table(std::istream& in, const Schema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: missing header");
    const auto header = split_csv(line);
    bool header_ok = header.size() == schema.size();
    for (std::size_t j = 0; header_ok && j < header.size(); ++j) header_ok = header[j] == schema[j].name;
    if (!header_ok) {
        std::string expected;
        for (const auto& a : schema) expected += (expected.empty() ? "" : ",") + a.name;
        throw ParseError("header mismatch: expected '" + expected + "', got '" + std::string(trim(line)) + "'");
    }

    Matrix values(0, schema.size());
    std::vector<double> row(schema.size());
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row_no;
        const auto cells = split_csv(line);
        if (cells.size() != schema.size())
            throw ParseError("row " + std::to_string(row_no) + ": expected " + std::to_string(schema.size()) +
                                 " cells, got " + std::to_string(cells.size()),
                             row_no);
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const auto& name = schema[j].name;
            double v = 0.0;
            if (!parse_double(cells[j], v)) {
                if (name == "twr") {
                    try {
                        v = encode_twr(cells[j]);
                    } catch (const std::invalid_argument& e) {
                        throw ParseError("row " + std::to_string(row_no) + ", column " + name + ": " + e.what(),
                                         row_no, name);
                    }
                } else {
                    throw ParseError("row " + std::to_string(row_no) + ", column " + name + ": cannot parse '" +
                                         std::string(cells[j]) + "' as a number",
                                     row_no, name);
                }
            }
            if (!std::isfinite(v))
                throw ParseError("row " + std::to_string(row_no) + ", column " + name + ": non-finite value", row_no,
                                 name);
            if (name == "lu") {
                try {
                    v = clamp_lugeon(v);
                } catch (const std::domain_error& e) {
                    throw ParseError("row " + std::to_string(row_no) + ", column lu: " + e.what(), row_no, name);
                }
            }
            row[j] = v;
        }
        values.append_row(row);
    }
    if (row_no == 0) throw ParseError("empty body: header only");
    try {
        return DecisionTable(schema, std::move(values));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

DecisionTable load_table(const std::filesystem::path& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_table(in, schema);
}

void write_table(const DecisionTable& table, std::ostream& out) {
    for (std::size_t j = 0; j < table.width(); ++j) out << (j ? "," : "") << table.attribute(j).name;
    out << '\n';
    for (std::size_t i = 0; i < table.objects(); ++i) {
        for (std::size_t j = 0; j < table.width(); ++j) out << (j ? "," : "") << format_double(table.at(i, j));
        out << '\n';
    }
}

void save_table(const DecisionTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_table(table, out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

double encode_twr(std::string_view label) {
    const auto key = normalize_label(label);
    for (const auto& e : kTwr)
        if (normalize_label(e.label) == key) return e.code;
    std::string valid;
    for (const auto& e : kTwr) valid += (valid.empty() ? "" : ", ") + std::string(e.label);
    throw std::invalid_argument("unknown weathering label '" + std::string(label) + "' (valid: " + valid + ")");
}

std::vector<std::string> twr_labels() {
    std::vector<std::string> out;
    for (const auto& e : kTwr) out.emplace_back(e.label);
    return out;
}

std::vector<double> twr_codes() {
    std::vector<double> out;
    for (const auto& e : kTwr) out.push_back(e.code);
    std::sort(out.begin(), out.end());
    return out;
}

double clamp_lugeon(double lu) {
    if (!(lu >= 0.0)) throw std::domain_error("lugeon value must be non-negative");
    return std::min(lu, kLugeonCap);
}

double compute_lugeon(double water_take, double pressure_bars) {
    if (!(pressure_bars > 0.0)) throw std::domain_error("test pressure must be positive");
    if (!(water_take >= 0.0)) throw std::domain_error("water take must be non-negative");
    return clamp_lugeon(water_take * (10.0 / pressure_bars));
}

Split split(const DecisionTable& table, std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
    if (n_train == 0 || n_test == 0) throw std::invalid_argument("split: counts must be at least 1");
    if (n_train + n_test > table.objects())
        throw std::out_of_range("split: " + std::to_string(n_train) + " + " + std::to_string(n_test) +
                                " rows requested from a table of " + std::to_string(table.objects()));
    std::vector<std::size_t> idx(table.objects());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::size_t> tr(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> te(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                                idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
    auto train = table.select(tr);
    auto test = table.select(te);
    return {std::move(train), std::move(test), std::move(tr), std::move(te)};
}

double rmse(std::span<const Prediction> preds) {
    if (preds.empty()) throw std::invalid_argument("rmse: empty prediction list");
    double sse = 0.0;
    for (const auto& p : preds) sse += (p.predicted - p.actual) * (p.predicted - p.actual);
    return std::sqrt(sse / static_cast<double>(preds.size()));
}

void write_predictions(std::span<const Prediction> preds, std::ostream& out) {
    out << "index,actual,predicted\n";
    for (std::size_t i = 0; i < preds.size(); ++i)
        out << i << ',' << format_double(preds[i].actual) << ',' << format_double(preds[i].predicted) << '\n';
}

int OrdinalScale::categorize(double v) const {
    if (levels.empty()) throw std::logic_error("OrdinalScale: no levels");
    int best = 0;
    double best_d = std::abs(v - levels[0]);
    for (std::size_t c = 1; c < levels.size(); ++c) {
        const double d = std::abs(v - levels[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best + 1;
}

std::vector<double> OrdinalScale::cuts() const {
    std::vector<double> out;
    for (std::size_t c = 1; c < levels.size(); ++c) out.push_back(0.5 * (levels[c - 1] + levels[c]));
    return out;
}

}  // namespace lugeon
