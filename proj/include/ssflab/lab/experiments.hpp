#pragma once

#include "ssflab/lab/cache.hpp"
#include "ssflab/lab/config.hpp"
#include "ssflab/table.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ssflab::lab
{

struct CheckResult
{
    std::string name;
    bool pass = true;
    std::string detail;
};

struct ExperimentResult
{
    Table table;
    std::vector<Table> extra_tables; ///< written as <name>.csv
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, std::uint64_t>> seeds; ///< stream label -> seed
};

/// Runs the configured experiment without touching the output directory.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const EigenvalueProvider& provider,
                                std::ostream& log);

/// `ssf-lab run`: parse, apply overrides, run, write artifacts. Returns the
/// process exit status (0 ok, 2 failed check, 1 error).
int run_command(const std::string& config_path,
                const std::vector<std::string>& overrides,
                std::ostream& out,
                std::ostream& err);

/// Exact version strings recorded in manifests.
std::string library_version();

} // namespace ssflab::lab
