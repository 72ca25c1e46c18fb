#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ssflab
{

struct McPlan;

/// Column-labelled numeric report; one row per bin, per epsilon or per size.
struct Table
{
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
};

/// Header row, then rows in order; numbers in shortest round-trip form.
void write_csv(std::ostream& os, const Table& table);

/// {experiment, model_hash, plan, columns, rows} as pretty JSON text.
std::string json_summary(const Table& table,
                         const std::string& experiment,
                         std::uint64_t model_hash,
                         const McPlan* plan);

} // namespace ssflab
