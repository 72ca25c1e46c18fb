#pragma once

#include "ssflab/mc.hpp"
#include "ssflab/models.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssflab::lab
{

/// Parse or validation failure. line/column are 1-based; 0 when the error
/// does not come from a config file position.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(const std::string& what, int line = 0, int column = 0);
    int line;
    int column;
};

struct Value
{
    enum class Kind
    {
        Bool,
        Integer,
        Float,
        String,
        Array
    };

    Kind kind = Kind::Integer;
    bool boolean = false;
    std::int64_t integer = 0;
    double real = 0.0;
    std::string text;
    std::vector<Value> items;

    static Value of(bool b);
    static Value of(std::int64_t i);
    static Value of(double d);
    static Value of(std::string s);
    static Value array(std::vector<Value> items);

    std::string to_toml() const;
};

struct Position
{
    int line = 0;
    int column = 0;
};

/// Flat view of a TOML-style document: "section.key" -> value.
struct ConfigDocument
{
    std::map<std::string, Value> values;
    std::map<std::string, Position> positions;
};

/// Sections, `key = value` pairs, `#` comments; values are booleans, integers,
/// floats, basic strings and single-line arrays. Duplicate keys are errors.
ConfigDocument parse_config(const std::string& text);
ConfigDocument parse_config_file(const std::string& path);

/// `section.key=value`; the value uses config syntax, falling back to a bare string.
void apply_override(ConfigDocument& doc, const std::string& assignment);

struct WegnerParams
{
    double e0 = 2.0;
    std::vector<double> eps{0.02, 0.05, 0.1, 0.2};
    double max_relative_residual = 0.1;
};

struct ThermoParams
{
    std::vector<Index> sizes{16, 32, 64};
    Index outer_factor = 4;
    double window_lo = 1.5;
    double window_hi = 2.5;
    std::vector<double> times{1.0};
};

struct SsdParams
{
    std::vector<Index> sizes{32, 64, 128};
    Index outer = 512;
};

struct BirmanSolomyakParams
{
    Index instances = 50;
    double window_lo = 1.75;
    double window_hi = 2.25;
    double tol = 1e-4;
    Index max_nodes = Index(1) << 14;
};

struct RankBoundParams
{
    Index instances = 500;
    Index max_rank = 5;
    double weight_lo = 1e-2;
    double weight_hi = 10.0;
};

struct SpectralAveragingParams
{
    Index instances = 100;
    Index max_rank = 3;
    double tol = 1e-4;
    Index max_nodes = Index(1) << 14;
};

struct ExperimentConfig
{
    std::string kind;
    std::string output_dir = "ssf-lab-out";
    bool cache = true;
    std::string cache_dir;
    bool check = false;

    ModelSpec model;
    McPlan plan;

    WegnerParams wegner;
    ThermoParams thermo;
    SsdParams ssd;
    BirmanSolomyakParams birman_solomyak;
    RankBoundParams rank_bound;
    SpectralAveragingParams spectral_averaging;

    /// Every known key with its effective value, as config text.
    std::string resolved_toml;
};

const std::vector<std::string>& experiment_kinds();

/// Strict: unknown sections or keys and out-of-range values are ConfigErrors
/// that name the offending parameter.
ExperimentConfig build_config(const ConfigDocument& doc);

} // namespace ssflab::lab
