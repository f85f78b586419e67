#include "nn2rules/dataset.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "nn2rules/error.hpp"
#include "nn2rules/random.hpp"
#include "text.hpp"

namespace nn2rules {

namespace {

std::vector<std::string> parse_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back(detail::trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    if (quoted) throw Error("csv: unterminated quote");
    cells.emplace_back(detail::trim(cell));
    return cells;
}

std::string quote_cell(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

} // namespace

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw Error("csv: missing column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    bool have_header = false;
    std::size_t line_no = 0;
    for (auto raw : detail::lines(text)) {
        ++line_no;
        if (detail::trim(raw).empty()) continue;
        auto cells = parse_csv_line(raw);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size())
            throw Error("csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " cells, got " +
                        std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) throw Error("csv: missing header row");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    try {
        return parse_csv(detail::read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << quote_cell(cells[i]);
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
    detail::write_file(path, out.str());
}

Dataset dataset_from_table(const CsvTable& table, const FeatureSchema& schema,
                           const CsvOptions& options) {
    std::vector<std::size_t> columns;
    for (const auto& f : schema.features()) columns.push_back(table.column(f.name));
    const std::size_t label_col = table.column(options.label_column);

    Dataset data;
    data.schema = schema;
    data.instances.reserve(table.rows.size());
    data.labels.reserve(table.rows.size());

    std::vector<std::string> problems;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        // Row numbers are 1-based data rows; the header is row 0.
        const auto where = "row " + std::to_string(r + 1);
        Instance inst;
        inst.values.reserve(columns.size());
        bool ok = true;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const auto& cell = row[columns[i]];
            const auto j = schema.find_value(i, cell);
            if (j == schema.value_count(i)) {
                problems.push_back(where + ", column '" + schema.feature(i).name +
                                   "': unknown value '" + cell + "'");
                ok = false;
                break;
            }
            inst.values.push_back(static_cast<ValueIndex>(j));
        }
        const auto& label = row[label_col];
        Label y = 0;
        if (options.positive_label) {
            y = label == *options.positive_label ? 1 : 0;
        } else if (label == "1") {
            y = 1;
        } else if (label != "0") {
            problems.push_back(where + ", column '" + options.label_column +
                               "': unparseable label '" + label + "'");
            ok = false;
        }
        if (!ok) continue;
        data.instances.push_back(std::move(inst));
        data.labels.push_back(y);
    }
    if (!problems.empty()) {
        std::string msg = "csv: " + std::to_string(problems.size()) + " rejected row(s)";
        for (std::size_t i = 0; i < problems.size() && i < 20; ++i) msg += "\n  " + problems[i];
        if (problems.size() > 20) msg += "\n  ...";
        throw Error(msg);
    }
    if (data.empty()) warn("dataset has no rows");
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                 const CsvOptions& options) {
    const auto table = read_csv(path);
    try {
        return dataset_from_table(table, schema, options);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void save_csv(const std::filesystem::path& path, const Dataset& data,
              const std::string& label_column) {
    CsvTable table;
    for (const auto& f : data.schema.features()) table.header.push_back(f.name);
    table.header.push_back(label_column);
    for (std::size_t r = 0; r < data.size(); ++r) {
        std::vector<std::string> row;
        for (std::size_t i = 0; i < data.schema.feature_count(); ++i)
            row.push_back(data.schema.feature(i).values[data.instances[r].values[i]]);
        row.push_back(data.labels[r] ? "1" : "0");
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t rows, double train_ratio, std::uint64_t seed) {
    if (!(train_ratio > 0.0 && train_ratio <= 1.0))
        throw Error("split ratio must be in (0, 1]");
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    const auto n_train = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(rows)));
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_ratio,
                                          std::uint64_t seed) {
    auto [train_idx, test_idx] = split_indices(data.size(), train_ratio, seed);
    auto take = [&](const std::vector<std::size_t>& idx, Split tag) {
        Dataset out;
        out.schema = data.schema;
        out.split = tag;
        for (auto i : idx) {
            out.instances.push_back(data.instances[i]);
            out.labels.push_back(data.labels[i]);
        }
        return out;
    };
    return {take(train_idx, Split::train), take(test_idx, Split::test)};
}

} // namespace nn2rules
