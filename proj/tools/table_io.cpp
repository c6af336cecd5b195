#include "table_io.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace bpcross::cli
{

namespace
{

bool is_integer_column(const std::string& name)
{
    return name != "t";
}

std::string format_index(const std::string& column, double x)
{
    if (is_integer_column(column))
        return std::to_string(static_cast<long long>(x));
    return format_double(x);
}

double parse_number(const std::string& cell)
{
    double x = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last)
        throw std::invalid_argument("cannot parse number '" + cell + "'");
    return x;
}

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, '\t'))
        cells.push_back(cell);
    return cells;
}

} // namespace

std::string format_double(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc())
        throw std::runtime_error("cannot format number");
    std::string s(buf, ptr);
    if (s.find_first_of(".eEn") == std::string::npos)
        s += ".0";
    return s;
}

std::vector<std::string> crossing_columns(const CrossingSet& set)
{
    std::vector<std::string> out;
    for (int m : set.members())
        out.push_back("k" + std::to_string(m));
    return out;
}

RecordTable records_from_table(const CoeffTable& table, const CrossingSet& set, bool raw, double t)
{
    RecordTable out;
    if (t >= 0.0)
        out.index_columns.push_back("t");
    if (table.form() == TableForm::joint)
        out.index_columns.push_back("j");
    for (auto& c : crossing_columns(set))
        out.index_columns.push_back(std::move(c));
    for (const auto& [key, value] : table.entries())
    {
        RecordTable::Row row;
        if (t >= 0.0)
            row.index.push_back(t);
        for (int c : key.counts())
            row.index.push_back(c);
        row.value = raw ? value : std::clamp(value, 0.0, 1.0);
        out.rows.push_back(std::move(row));
    }
    return out;
}

RecordTable records_from_counts(const EmpiricalTable& empirical, const CrossingSet& set)
{
    RecordTable out;
    out.index_columns.push_back("j");
    for (auto& c : crossing_columns(set))
        out.index_columns.push_back(std::move(c));
    out.value_column = "count";
    for (const auto& [key, count] : empirical.counts)
    {
        RecordTable::Row row;
        for (int c : key.counts())
            row.index.push_back(c);
        row.value = static_cast<double>(count);
        out.rows.push_back(std::move(row));
    }
    return out;
}

CoeffTable table_from_records(const RecordTable& records)
{
    const auto& cols = records.index_columns;
    if (std::find(cols.begin(), cols.end(), "t") != cols.end())
        throw std::invalid_argument("time-indexed records do not form a single table");
    const bool joint = !cols.empty() && cols.front() == "j";
    const std::size_t dims = cols.size() - (joint ? 1 : 0);

    int max_order = 0;
    int max_pop = 0;
    std::vector<MultiIndex> keys;
    for (const auto& row : records.rows)
    {
        if (row.index.size() != cols.size())
            throw std::invalid_argument("record has wrong number of index cells");
        std::vector<int> key;
        for (double x : row.index)
            key.push_back(static_cast<int>(x));
        MultiIndex k(std::move(key));
        const int pop = joint ? k[0] : 0;
        max_pop = std::max(max_pop, pop);
        max_order = std::max(max_order, k.order() - pop);
        keys.push_back(std::move(k));
    }
    Truncation trunc{joint ? std::optional<int>(max_pop) : std::nullopt, max_order};
    CoeffTable table(joint ? TableForm::joint : TableForm::marginal, dims, trunc, 1.0);
    for (std::size_t i = 0; i < keys.size(); ++i)
        table.set(keys[i], records.rows[i].value);
    return table;
}

std::string to_tsv(const RecordTable& table)
{
    std::ostringstream os;
    for (const auto& c : table.index_columns)
        os << c << '\t';
    os << table.value_column << '\n';
    const bool counts = table.value_column == "count";
    for (const auto& row : table.rows)
    {
        for (std::size_t i = 0; i < row.index.size(); ++i)
            os << format_index(table.index_columns[i], row.index[i]) << '\t';
        if (counts)
            os << static_cast<unsigned long long>(row.value) << '\n';
        else
            os << format_double(row.value) << '\n';
    }
    return os.str();
}

RecordTable parse_tsv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("empty table");
    auto header = split_tabs(line);
    if (header.empty())
        throw std::invalid_argument("table header is empty");
    RecordTable table;
    table.value_column = header.back();
    header.pop_back();
    table.index_columns = std::move(header);
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        auto cells = split_tabs(line);
        if (cells.size() != table.index_columns.size() + 1)
            throw std::invalid_argument("row has " + std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(table.index_columns.size() + 1));
        RecordTable::Row row;
        for (std::size_t i = 0; i + 1 < cells.size(); ++i)
            row.index.push_back(parse_number(cells[i]));
        row.value = parse_number(cells.back());
        table.rows.push_back(std::move(row));
    }
    return table;
}

nlohmann::json to_json(const RecordTable& table)
{
    nlohmann::json columns = table.index_columns;
    columns.push_back(table.value_column);
    nlohmann::json records = nlohmann::json::array();
    const bool counts = table.value_column == "count";
    for (const auto& row : table.rows)
    {
        nlohmann::json rec = nlohmann::json::object();
        for (std::size_t i = 0; i < row.index.size(); ++i)
        {
            const auto& name = table.index_columns[i];
            if (is_integer_column(name))
                rec[name] = static_cast<long long>(row.index[i]);
            else
                rec[name] = row.index[i];
        }
        if (counts)
            rec[table.value_column] = static_cast<unsigned long long>(row.value);
        else
            rec[table.value_column] = row.value;
        records.push_back(std::move(rec));
    }
    return {{"columns", std::move(columns)}, {"records", std::move(records)}};
}

RecordTable parse_json(const nlohmann::json& doc)
{
    RecordTable table;
    const auto& columns = doc.at("columns");
    if (!columns.is_array() || columns.empty())
        throw std::invalid_argument("json table needs a non-empty columns array");
    for (const auto& c : columns)
        table.index_columns.push_back(c.get<std::string>());
    table.value_column = table.index_columns.back();
    table.index_columns.pop_back();
    for (const auto& rec : doc.at("records"))
    {
        RecordTable::Row row;
        for (const auto& name : table.index_columns)
            row.index.push_back(rec.at(name).get<double>());
        row.value = rec.at(table.value_column).get<double>();
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace bpcross::cli
