#include "ssflab/lab/cache.hpp"

#include "ssflab/format.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace ssflab::lab
{

namespace
{

constexpr char magic[8] = {'S', 'S', 'F', 'L', 'A', 'B', '0', '1'};
constexpr const char* extension = ".ssfc";

void put_u64(std::string& out, std::uint64_t v)
{
    for (int k = 0; k < 8; ++k)
        out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint64_t get_u64(const char* p)
{
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[k])) << (8 * k);
    return v;
}

} // namespace

CacheKey CacheKey::of(const ModelSpec& model, const Provenance& provenance)
{
    return {fnv1a64(model.canonical() + "|" + provenance.canonical())};
}

std::string CacheKey::hex() const
{
    static const char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int k = 0; k < 16; ++k)
        s[15 - k] = digits[(value >> (4 * k)) & 0xf];
    return s;
}

void write_eigenvalue_file(const std::filesystem::path& path, const std::vector<double>& values)
{
    std::string buf(magic, sizeof magic);
    buf.reserve(16 + 8 * values.size());
    put_u64(buf, values.size());
    for (double v : values)
        put_u64(buf, std::bit_cast<std::uint64_t>(v));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write cache file " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw std::runtime_error("short write to cache file " + path.string());
}

std::optional<std::vector<double>> read_eigenvalue_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 16 || std::memcmp(buf.data(), magic, sizeof magic) != 0)
        throw std::runtime_error("bad magic");
    const std::uint64_t count = get_u64(buf.data() + 8);
    if (count > (buf.size() - 16) / 8 || buf.size() != 16 + 8 * count)
        throw std::runtime_error("length mismatch (header says " + std::to_string(count) +
                                 " values, file has " + std::to_string(buf.size()) + " bytes)");
    std::vector<double> values(count);
    for (std::uint64_t k = 0; k < count; ++k)
        values[k] = std::bit_cast<double>(get_u64(buf.data() + 16 + 8 * k));
    for (std::uint64_t k = 1; k < count; ++k)
        if (!(values[k - 1] <= values[k]))
            throw std::runtime_error("values not ascending");
    return values;
}

std::filesystem::path resolve_cache_dir(const std::string& configured)
{
    if (const char* env = std::getenv("SSF_LAB_CACHE_DIR"); env && *env)
        return env;
    if (!configured.empty())
        return configured;
    if (const char* home = std::getenv("HOME"); home && *home)
        return std::filesystem::path(home) / ".cache" / "ssf-lab";
    return std::filesystem::temp_directory_path() / "ssf-lab-cache";
}

//---------------------------------------------------------------------------//

SpectrumCache::SpectrumCache(std::filesystem::path directory, bool enabled, Warn warn)
    : dir_(std::move(directory)), enabled_(enabled), warn_(std::move(warn))
{
    if (!warn_)
        warn_ = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    if (enabled_)
        std::filesystem::create_directories(dir_);
}

std::filesystem::path SpectrumCache::file_for(const CacheKey& key) const
{
    return dir_ / (key.hex() + extension);
}

std::vector<double> SpectrumCache::get_or_compute(const CacheKey& key,
                                                  const std::function<std::vector<double>()>& producer)
{
    if (!enabled_)
    {
        ++misses_;
        return producer();
    }
    const auto path = file_for(key);
    try
    {
        if (auto values = read_eigenvalue_file(path))
        {
            ++hits_;
            return std::move(*values);
        }
    }
    catch (const std::runtime_error& e)
    {
        ++corrupt_;
        warn_("corrupt cache file " + path.string() + " (" + e.what() + "); recomputing");
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }

    ++misses_;
    std::vector<double> values = producer();
    const auto temp = dir_ / (key.hex() + ".tmp." + std::to_string(::getpid()) + "." +
                              std::to_string(temp_counter_++));
    try
    {
        write_eigenvalue_file(temp, values);
        std::filesystem::rename(temp, path);
    }
    catch (const std::exception& e)
    {
        std::error_code ec;
        std::filesystem::remove(temp, ec);
        warn_(std::string("could not store cache entry: ") + e.what());
    }
    return values;
}

EigenvalueProvider SpectrumCache::provider()
{
    return [this](const ModelSpec& model, const DisorderSample& sample) {
        const CacheKey key = CacheKey::of(model, sample.provenance());
        std::vector<double> values = get_or_compute(key, [&] {
            const Spectrumd s = direct_eigenvalues(model, sample);
            return std::vector<double>(s.values.data(), s.values.data() + s.values.size());
        });
        Spectrumd out;
        out.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
        out.tag = key.value;
        return out;
    };
}

SpectrumCache::DirectoryStats SpectrumCache::directory_stats() const
{
    DirectoryStats s;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir_, ec))
        return s;
    for (const auto& entry : std::filesystem::directory_iterator(dir_))
    {
        if (entry.is_regular_file() && entry.path().extension() == extension)
        {
            ++s.files;
            s.bytes += entry.file_size();
        }
    }
    return s;
}

std::uint64_t SpectrumCache::clear()
{
    std::uint64_t removed = 0;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir_, ec))
        return 0;
    std::vector<std::filesystem::path> doomed;
    for (const auto& entry : std::filesystem::directory_iterator(dir_))
    {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() == extension || name.find(".tmp.") != std::string::npos)
            doomed.push_back(entry.path());
    }
    for (const auto& p : doomed)
        if (std::filesystem::remove(p, ec))
            ++removed;
    return removed;
}

} // namespace ssflab::lab
