#include "ssflab/table.hpp"

#include "ssflab/format.hpp"
#include "ssflab/mc.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ssflab
{

void Table::add_row(std::vector<double> row)
{
    if (row.size() != columns.size())
        throw std::invalid_argument("table '" + name + "' expects " +
                                    std::to_string(columns.size()) + " columns, got " +
                                    std::to_string(row.size()));
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& os, const Table& table)
{
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows)
    {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << format_number(row[c]);
        os << '\n';
    }
}

std::string json_summary(const Table& table,
                         const std::string& experiment,
                         std::uint64_t model_hash,
                         const McPlan* plan)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["experiment"] = experiment;
    j["model_hash"] = model_hash;
    if (plan)
    {
        j["plan"] = {{"realizations", plan->realizations},
                     {"seed", plan->seed},
                     {"bins", {{"lo", plan->bins.lo}, {"hi", plan->bins.hi}, {"count", plan->bins.count}}}};
    }
    else
    {
        j["plan"] = nullptr;
    }
    j["columns"] = table.columns;
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows)
    {
        ordered_json r = ordered_json::array();
        for (double v : row)
        {
            if (std::isfinite(v))
                r.push_back(v);
            else
                r.push_back(format_number(v));
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

} // namespace ssflab
