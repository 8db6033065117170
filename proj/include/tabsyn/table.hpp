#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tabsyn/errors.hpp"
#include "tabsyn/rng.hpp"

namespace tabsyn {

enum class ColumnKind { Continuous, Discrete };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    std::vector<std::string> categories;  // Discrete only, ordered
};

// Typed column layout for a mixed continuous/discrete table. Validated once
// at construction; immutable afterwards.
class TableSchema {
public:
    explicit TableSchema(std::vector<Column> columns) : columns_(std::move(columns)) {
        std::set<std::string> names;
        for (const auto& col : columns_) {
            if (col.name.empty()) throw Error("schema: empty column name");
            if (!names.insert(col.name).second)
                throw Error("schema: duplicate column name '" + col.name + "'");
            if (col.kind == ColumnKind::Discrete) {
                if (col.categories.empty())
                    throw Error("schema: discrete column '" + col.name + "' has no categories");
                std::set<std::string> cats(col.categories.begin(), col.categories.end());
                if (cats.size() != col.categories.size())
                    throw Error("schema: duplicate category in column '" + col.name + "'");
            } else if (!col.categories.empty()) {
                throw Error("schema: continuous column '" + col.name + "' lists categories");
            }
        }
        if (n_discrete() == 0)
            throw Error("schema: at least one discrete column required (the class label)");
    }

    std::size_t size() const { return columns_.size(); }
    const Column& column(std::size_t i) const { return columns_.at(i); }
    const std::vector<Column>& columns() const { return columns_; }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i].name == name) return i;
        throw UnknownColumn("no column named '" + name + "'");
    }

    std::size_t n_continuous() const {
        return static_cast<std::size_t>(std::count_if(
            columns_.begin(), columns_.end(),
            [](const Column& c) { return c.kind == ColumnKind::Continuous; }));
    }
    std::size_t n_discrete() const { return columns_.size() - n_continuous(); }

    std::size_t category_index(std::size_t col, const std::string& category) const {
        const Column& c = columns_.at(col);
        if (c.kind != ColumnKind::Discrete)
            throw NotDiscrete("column '" + c.name + "' is not discrete");
        for (std::size_t k = 0; k < c.categories.size(); ++k)
            if (c.categories[k] == category) return k;
        throw UnknownCategory("column '" + c.name + "' has no category '" + category + "'");
    }

    bool operator==(const TableSchema& other) const {
        if (columns_.size() != other.columns_.size()) return false;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            const Column& a = columns_[i];
            const Column& b = other.columns_[i];
            if (a.name != b.name || a.kind != b.kind || a.categories != b.categories)
                return false;
        }
        return true;
    }

private:
    std::vector<Column> columns_;
};

// One row of cell values: a real number for continuous columns, a category
// index (stored as an exact small integer) for discrete columns.
using Row = std::vector<double>;

class DataTable {
public:
    explicit DataTable(TableSchema schema) : schema_(std::move(schema)) {}

    DataTable(TableSchema schema, std::vector<Row> rows)
        : schema_(std::move(schema)), rows_(std::move(rows)) {
        for (const Row& r : rows_) validate_row(r);
    }

    const TableSchema& schema() const { return schema_; }
    std::size_t n_rows() const { return rows_.size(); }
    const std::vector<Row>& rows() const { return rows_; }
    const Row& row(std::size_t i) const { return rows_.at(i); }

    void append_row(Row r) {
        validate_row(r);
        rows_.push_back(std::move(r));
    }

    int category_at(std::size_t row, std::size_t col) const {
        return static_cast<int>(rows_.at(row).at(col));
    }

    // All values of one continuous column, in row order.
    std::vector<double> column_values(std::size_t col) const {
        if (schema_.column(col).kind != ColumnKind::Continuous)
            throw NotDiscrete("column_values: column '" + schema_.column(col).name +
                              "' is not continuous");
        std::vector<double> out;
        out.reserve(rows_.size());
        for (const Row& r : rows_) out.push_back(r[col]);
        return out;
    }

private:
    void validate_row(const Row& r) const {
        if (r.size() != schema_.size())
            throw RaggedRow("row has " + std::to_string(r.size()) + " cells, schema has " +
                            std::to_string(schema_.size()));
        for (std::size_t j = 0; j < r.size(); ++j) {
            const Column& col = schema_.column(j);
            if (col.kind == ColumnKind::Continuous) {
                if (!std::isfinite(r[j]))
                    throw BadCell("non-finite value in continuous column '" + col.name + "'");
            } else {
                const double v = r[j];
                if (v != std::floor(v) || v < 0.0 ||
                    v >= static_cast<double>(col.categories.size()))
                    throw BadCell("category index out of range in column '" + col.name + "'");
            }
        }
    }

    TableSchema schema_;
    std::vector<Row> rows_;
};

struct SplitSpec {
    double train_fraction = 0.7;  // strictly inside (0,1)
    std::uint64_t seed = 0;
};

namespace detail {

// Splits a CSV line into fields. Quoted fields follow RFC 4180: surrounding
// double quotes, "" for an embedded quote, commas allowed inside.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

inline std::string quote_csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string format_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Reads a comma-separated table whose first line is a header matching the
// schema's column names in order. Discrete cells are resolved to category
// indices; continuous cells must parse as finite numbers.
inline DataTable parse_csv(std::istream& in, const TableSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw UnknownColumn("csv: missing header line");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = detail::split_csv_line(line);
    if (header.size() != schema.size())
        throw UnknownColumn("csv: header has " + std::to_string(header.size()) +
                            " columns, schema has " + std::to_string(schema.size()));
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] != schema.column(j).name)
            throw UnknownColumn("csv: header column '" + header[j] + "' does not match schema '" +
                                schema.column(j).name + "'");

    DataTable table(schema);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() != schema.size())
            throw RaggedRow("csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(schema.size()) + " cells, got " +
                            std::to_string(fields.size()));
        Row row(schema.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const Column& col = schema.column(j);
            if (col.kind == ColumnKind::Continuous) {
                try {
                    std::size_t pos = 0;
                    row[j] = std::stod(fields[j], &pos);
                    if (pos != fields[j].size()) throw std::invalid_argument("trailing junk");
                } catch (const std::exception&) {
                    throw BadCell("csv line " + std::to_string(line_no) + ": bad numeric cell '" +
                                  fields[j] + "' in column '" + col.name + "'");
                }
                if (!std::isfinite(row[j]))
                    throw BadCell("csv line " + std::to_string(line_no) +
                                  ": non-finite value in column '" + col.name + "'");
            } else {
                bool found = false;
                for (std::size_t k = 0; k < col.categories.size(); ++k) {
                    if (col.categories[k] == fields[j]) {
                        row[j] = static_cast<double>(k);
                        found = true;
                        break;
                    }
                }
                if (!found)
                    throw BadCell("csv line " + std::to_string(line_no) + ": unknown category '" +
                                  fields[j] + "' in column '" + col.name + "'");
            }
        }
        table.append_row(std::move(row));
    }
    return table;
}

inline void serialize_csv(const DataTable& table, std::ostream& out) {
    const TableSchema& schema = table.schema();
    for (std::size_t j = 0; j < schema.size(); ++j) {
        if (j) out << ',';
        out << detail::quote_csv_field(schema.column(j).name);
    }
    out << '\n';
    for (const Row& row : table.rows()) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            const Column& col = schema.column(j);
            if (col.kind == ColumnKind::Continuous)
                out << detail::format_cell(row[j]);
            else
                out << detail::quote_csv_field(col.categories[static_cast<std::size_t>(row[j])]);
        }
        out << '\n';
    }
}

// Deterministic train/test partition: Fisher-Yates shuffle of row indices
// under the seed, then the first floor(fraction * n) rows become the train
// side. A side whose allotted fraction comes to less than one full row
// rejects the split. Union of the two sides equals the input as a multiset.
inline std::pair<DataTable, DataTable> split_train_test(const DataTable& table,
                                                        const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
        throw Error("split: train_fraction must be strictly between 0 and 1");
    const std::size_t n = table.n_rows();
    if (n < 2) throw TooFewRows("split: need at least 2 rows");

    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n)));
    const std::size_t n_test_allotted = static_cast<std::size_t>(
        std::floor((1.0 - spec.train_fraction) * static_cast<double>(n)));
    if (n_train == 0 || n_train == n || n_test_allotted == 0)
        throw TooFewRows("split: one side would be empty (" + std::to_string(n_train) + "/" +
                         std::to_string(n - n_train) + ")");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(spec.seed);
    fisher_yates_shuffle(order, rng);

    DataTable train(table.schema());
    DataTable test(table.schema());
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train)
            train.append_row(table.row(order[i]));
        else
            test.append_row(table.row(order[i]));
    }
    return {std::move(train), std::move(test)};
}

// Category counts of one discrete column, including zero-count categories.
inline std::map<std::string, std::size_t> class_counts(const DataTable& table,
                                                       const std::string& column) {
    const std::size_t j = table.schema().index_of(column);
    const Column& col = table.schema().column(j);
    if (col.kind != ColumnKind::Discrete)
        throw NotDiscrete("class_counts: column '" + column + "' is not discrete");
    std::map<std::string, std::size_t> counts;
    for (const std::string& cat : col.categories) counts[cat] = 0;
    for (const Row& row : table.rows())
        ++counts[col.categories[static_cast<std::size_t>(row[j])]];
    return counts;
}

// Same counts keyed by category index; used by the samplers.
inline std::vector<std::size_t> category_counts(const DataTable& table, std::size_t col) {
    const Column& c = table.schema().column(col);
    if (c.kind != ColumnKind::Discrete)
        throw NotDiscrete("category_counts: column '" + c.name + "' is not discrete");
    std::vector<std::size_t> counts(c.categories.size(), 0);
    for (const Row& row : table.rows()) ++counts[static_cast<std::size_t>(row[col])];
    return counts;
}

}  // namespace tabsyn
