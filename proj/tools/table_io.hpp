#pragma once

#include <bpcross/law.hpp>
#include <bpcross/sim.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace bpcross::cli
{

/// Plot-ready rows: index columns (`t`, `j`, then `k<member>` per tracked
/// size) followed by one value column (`value` or `count`).
struct RecordTable
{
    struct Row
    {
        std::vector<double> index;
        double value = 0.0;

        friend bool operator==(const Row&, const Row&) = default;
    };

    std::vector<std::string> index_columns;
    std::string value_column = "value";
    std::vector<Row> rows;

    friend bool operator==(const RecordTable&, const RecordTable&) = default;
};

/// Shortest decimal that parses back to the same double; integral values keep a trailing ".0".
std::string format_double(double x);

std::vector<std::string> crossing_columns(const CrossingSet& set);

/// Records for a coefficient table. Values are clamped to [0, 1] unless raw.
/// A non-negative time adds a leading `t` column.
RecordTable records_from_table(const CoeffTable& table, const CrossingSet& set, bool raw, double t = -1.0);
RecordTable records_from_counts(const EmpiricalTable& empirical, const CrossingSet& set);

/// Rebuilds a coefficient table from records without a `t` column. The form
/// follows the presence of a `j` column and the truncation is the smallest
/// one holding every row.
CoeffTable table_from_records(const RecordTable& records);

std::string to_tsv(const RecordTable& table);
RecordTable parse_tsv(const std::string& text);

nlohmann::json to_json(const RecordTable& table);
RecordTable parse_json(const nlohmann::json& doc);

} // namespace bpcross::cli
