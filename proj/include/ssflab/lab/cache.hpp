#pragma once

#include "ssflab/disorder.hpp"
#include "ssflab/mc.hpp"
#include "ssflab/models.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ssflab::lab
{

/// FNV-1a over the canonical model text and the sample provenance.
struct CacheKey
{
    std::uint64_t value = 0;

    static CacheKey of(const ModelSpec& model, const Provenance& provenance);
    std::string hex() const;

    bool operator==(const CacheKey&) const = default;
};

/// "SSFLAB01", u64 count, count doubles; all little-endian.
void write_eigenvalue_file(const std::filesystem::path& path, const std::vector<double>& values);

/// nullopt on a missing file; throws std::runtime_error on bad magic or length.
std::optional<std::vector<double>> read_eigenvalue_file(const std::filesystem::path& path);

/// SSF_LAB_CACHE_DIR, else the configured directory, else $HOME/.cache/ssf-lab.
std::filesystem::path resolve_cache_dir(const std::string& configured);

/// Eigenvalue-only cache. Safe for concurrent use within and across processes:
/// files are written to a unique temporary name and renamed into place.
class SpectrumCache
{
public:
    using Warn = std::function<void(const std::string&)>;

    SpectrumCache(std::filesystem::path directory, bool enabled, Warn warn = {});

    const std::filesystem::path& directory() const { return dir_; }
    bool enabled() const { return enabled_; }
    std::filesystem::path file_for(const CacheKey& key) const;

    std::vector<double> get_or_compute(const CacheKey& key,
                                       const std::function<std::vector<double>()>& producer);

    /// Provider for the Monte Carlo drivers, keyed on (model, provenance).
    EigenvalueProvider provider();

    std::uint64_t hits() const { return hits_; }
    std::uint64_t misses() const { return misses_; }
    std::uint64_t corrupt() const { return corrupt_; }

    struct DirectoryStats
    {
        std::uint64_t files = 0;
        std::uint64_t bytes = 0;
    };
    DirectoryStats directory_stats() const;

    /// Removes every cache file; returns the count.
    std::uint64_t clear();

private:
    std::filesystem::path dir_;
    bool enabled_;
    Warn warn_;
    std::atomic<std::uint64_t> hits_{0};
    std::atomic<std::uint64_t> misses_{0};
    std::atomic<std::uint64_t> corrupt_{0};
    std::atomic<std::uint64_t> temp_counter_{0};
};

} // namespace ssflab::lab
