#include "ssflab/lab/config.hpp"

#include "ssflab/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace ssflab::lab
{

ConfigError::ConfigError(const std::string& what, int line_, int column_)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ", column " +
                                         std::to_string(column_) + ": " + what
                                   : what),
      line(line_), column(column_)
{
}

Value Value::of(bool b)
{
    Value v;
    v.kind = Kind::Bool;
    v.boolean = b;
    return v;
}

Value Value::of(std::int64_t i)
{
    Value v;
    v.kind = Kind::Integer;
    v.integer = i;
    return v;
}

Value Value::of(double d)
{
    Value v;
    v.kind = Kind::Float;
    v.real = d;
    return v;
}

Value Value::of(std::string s)
{
    Value v;
    v.kind = Kind::String;
    v.text = std::move(s);
    return v;
}

Value Value::array(std::vector<Value> items)
{
    Value v;
    v.kind = Kind::Array;
    v.items = std::move(items);
    return v;
}

std::string Value::to_toml() const
{
    switch (kind)
    {
    case Kind::Bool:
        return boolean ? "true" : "false";
    case Kind::Integer:
        return std::to_string(integer);
    case Kind::Float: {
        std::string s = format_number(real);
        if (s.find_first_of(".eEn") == std::string::npos)
            s += ".0";
        return s;
    }
    case Kind::String: {
        std::string s = "\"";
        for (char c : text)
        {
            if (c == '"' || c == '\\')
                s += '\\';
            s += c;
        }
        return s + "\"";
    }
    case Kind::Array: {
        std::string s = "[";
        for (std::size_t k = 0; k < items.size(); ++k)
            s += (k ? ", " : "") + items[k].to_toml();
        return s + "]";
    }
    }
    return {};
}

//---------------------------------------------------------------------------//

namespace
{

bool is_bare_key_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class LineParser
{
public:
    LineParser(std::string_view text, int line) : text_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError(msg, line_, static_cast<int>(pos_) + 1);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    bool at_end_or_comment()
    {
        skip_ws();
        return pos_ >= text_.size() || text_[pos_] == '#';
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    std::size_t pos() const { return pos_; }

    void expect(char c)
    {
        skip_ws();
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string bare_key()
    {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_bare_key_char(text_[pos_]))
            ++pos_;
        if (pos_ == start)
            fail("expected a key");
        return std::string(text_.substr(start, pos_ - start));
    }

    Value value()
    {
        skip_ws();
        const char c = peek();
        if (c == '"')
            return Value::of(string_literal());
        if (c == '[')
        {
            ++pos_;
            std::vector<Value> items;
            skip_ws();
            if (peek() == ']')
            {
                ++pos_;
                return Value::array(std::move(items));
            }
            while (true)
            {
                items.push_back(value());
                skip_ws();
                if (peek() == ',')
                {
                    ++pos_;
                    skip_ws();
                    if (peek() == ']')
                    {
                        ++pos_;
                        break;
                    }
                    continue;
                }
                if (peek() == ']')
                {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ']' in array");
            }
            return Value::array(std::move(items));
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
               text_[pos_] != '#' && text_[pos_] != ' ' && text_[pos_] != '\t')
            ++pos_;
        std::string token(text_.substr(start, pos_ - start));
        if (token.empty())
            fail("expected a value");
        if (token == "true")
            return Value::of(true);
        if (token == "false")
            return Value::of(false);
        std::string digits;
        for (char ch : token)
            if (ch != '_')
                digits += ch;
        const char* first = digits.data();
        const char* last = first + digits.size();
        if (*first == '+')
            ++first;
        if (digits.find_first_of(".eE") == std::string::npos)
        {
            std::int64_t i = 0;
            auto [p, ec] = std::from_chars(first, last, i);
            if (ec == std::errc() && p == last)
                return Value::of(i);
        }
        double d = 0.0;
        auto [p, ec] = std::from_chars(first, last, d);
        if (ec == std::errc() && p == last && std::isfinite(d))
            return Value::of(d);
        pos_ = start;
        fail("invalid value '" + token + "'");
    }

private:
    std::string string_literal()
    {
        ++pos_; // opening quote
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"')
        {
            char c = text_[pos_++];
            if (c == '\\')
            {
                if (pos_ >= text_.size())
                    fail("unterminated escape");
                const char e = text_[pos_++];
                switch (e)
                {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape '\\") + e + "'");
                }
            }
            else
            {
                out += c;
            }
        }
        if (pos_ >= text_.size())
            fail("unterminated string");
        ++pos_;
        return out;
    }

    std::string_view text_;
    int line_;
    std::size_t pos_ = 0;
};

} // namespace

ConfigDocument parse_config(const std::string& text)
{
    ConfigDocument doc;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw))
    {
        ++line;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        LineParser p(raw, line);
        if (p.at_end_or_comment())
            continue;
        if (p.peek() == '[')
        {
            p.expect('[');
            section = p.bare_key();
            p.expect(']');
            if (!p.at_end_or_comment())
                p.fail("unexpected text after section header");
            continue;
        }
        const int column = static_cast<int>(p.pos()) + 1;
        std::string key = p.bare_key();
        while (p.peek() == '.')
        {
            p.expect('.');
            key += "." + p.bare_key();
        }
        p.expect('=');
        Value v = p.value();
        if (!p.at_end_or_comment())
            p.fail("unexpected text after value");
        const std::string full = section.empty() ? key : section + "." + key;
        if (doc.values.count(full))
            throw ConfigError("duplicate key '" + full + "'", line, column);
        doc.values[full] = std::move(v);
        doc.positions[full] = Position{line, column};
    }
    return doc;
}

ConfigDocument parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_override(ConfigDocument& doc, const std::string& assignment)
{
    std::string a = assignment;
    while (!a.empty() && a.front() == '-')
        a.erase(a.begin());
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' must have the form --section.key=value");
    const std::string key = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    Value v;
    try
    {
        LineParser p(text, 1);
        v = p.value();
        if (!p.at_end_or_comment())
            v = Value::of(text);
    }
    catch (const ConfigError&)
    {
        v = Value::of(text);
    }
    doc.values[key] = std::move(v);
    doc.positions[key] = Position{};
}

//---------------------------------------------------------------------------//

namespace
{

enum class Type
{
    Bool,
    Int,
    Float,
    String,
    IntArray,
    FloatArray
};

struct KeySpec
{
    std::string key;
    Type type;
    Value fallback;
};

Value ints(std::vector<std::int64_t> xs)
{
    std::vector<Value> items;
    for (auto x : xs)
        items.push_back(Value::of(x));
    return Value::array(std::move(items));
}

Value floats(std::vector<double> xs)
{
    std::vector<Value> items;
    for (auto x : xs)
        items.push_back(Value::of(x));
    return Value::array(std::move(items));
}

const std::vector<KeySpec>& schema()
{
    static const std::vector<KeySpec> keys = {
        {"experiment.kind", Type::String, Value::of(std::string())},
        {"experiment.output", Type::String, Value::of(std::string("ssf-lab-out"))},
        {"experiment.cache", Type::Bool, Value::of(true)},
        {"experiment.cache_dir", Type::String, Value::of(std::string())},
        {"experiment.check", Type::Bool, Value::of(false)},

        {"model.d", Type::Int, Value::of(std::int64_t{1})},
        {"model.L", Type::Int, Value::of(std::int64_t{64})},
        {"model.coupling", Type::Float, Value::of(1.0)},
        {"model.profile", Type::String, Value::of(std::string("delta"))},
        {"model.profile_offsets", Type::IntArray, ints({0})},
        {"model.profile_values", Type::FloatArray, floats({1.0})},
        {"model.disorder", Type::String, Value::of(std::string("uniform01"))},
        {"model.disorder_edges", Type::FloatArray, floats({0.0, 1.0})},
        {"model.disorder_masses", Type::FloatArray, floats({1.0})},
        {"model.v0_period", Type::Int, Value::of(std::int64_t{1})},
        {"model.v0_values", Type::FloatArray, floats({0.0})},

        {"plan.M", Type::Int, Value::of(std::int64_t{100})},
        {"plan.seed", Type::Int, Value::of(std::int64_t{1})},
        {"plan.workers", Type::Int, Value::of(std::int64_t{0})},
        {"plan.e_min", Type::Float, Value::of(0.0)},
        {"plan.e_max", Type::Float, Value::of(5.0)},
        {"plan.bins", Type::Int, Value::of(std::int64_t{20})},
        {"plan.offset_edges", Type::Bool, Value::of(true)},

        {"wegner.e0", Type::Float, Value::of(2.0)},
        {"wegner.eps", Type::FloatArray, floats({0.02, 0.05, 0.1, 0.2})},
        {"wegner.max_relative_residual", Type::Float, Value::of(0.1)},

        {"thermo.sizes", Type::IntArray, ints({16, 32, 64})},
        {"thermo.outer_factor", Type::Int, Value::of(std::int64_t{4})},
        {"thermo.window_lo", Type::Float, Value::of(1.5)},
        {"thermo.window_hi", Type::Float, Value::of(2.5)},
        {"thermo.times", Type::FloatArray, floats({1.0})},

        {"ssd.sizes", Type::IntArray, ints({32, 64, 128})},
        {"ssd.outer_L", Type::Int, Value::of(std::int64_t{512})},

        {"birman-solomyak.instances", Type::Int, Value::of(std::int64_t{50})},
        {"birman-solomyak.window_lo", Type::Float, Value::of(1.75)},
        {"birman-solomyak.window_hi", Type::Float, Value::of(2.25)},
        {"birman-solomyak.tol", Type::Float, Value::of(1e-4)},
        {"birman-solomyak.max_nodes", Type::Int, Value::of(std::int64_t{1} << 14)},

        {"rank-bound.instances", Type::Int, Value::of(std::int64_t{500})},
        {"rank-bound.max_rank", Type::Int, Value::of(std::int64_t{5})},
        {"rank-bound.weight_lo", Type::Float, Value::of(1e-2)},
        {"rank-bound.weight_hi", Type::Float, Value::of(10.0)},

        {"spectral-averaging.instances", Type::Int, Value::of(std::int64_t{100})},
        {"spectral-averaging.max_rank", Type::Int, Value::of(std::int64_t{3})},
        {"spectral-averaging.tol", Type::Float, Value::of(1e-4)},
        {"spectral-averaging.max_nodes", Type::Int, Value::of(std::int64_t{1} << 14)},
    };
    return keys;
}

const char* type_name(Type t)
{
    switch (t)
    {
    case Type::Bool: return "a boolean";
    case Type::Int: return "an integer";
    case Type::Float: return "a number";
    case Type::String: return "a string";
    case Type::IntArray: return "an array of integers";
    case Type::FloatArray: return "an array of numbers";
    }
    return "";
}

/// Coerces integers to floats where a float is expected; rejects the rest.
Value coerce(const Value& v, Type t, const std::string& key, Position at)
{
    auto bad = [&]() -> ConfigError {
        return ConfigError(key + ": expected " + type_name(t), at.line, at.column);
    };
    switch (t)
    {
    case Type::Bool:
        if (v.kind != Value::Kind::Bool)
            throw bad();
        return v;
    case Type::Int:
        if (v.kind != Value::Kind::Integer)
            throw bad();
        return v;
    case Type::Float:
        if (v.kind == Value::Kind::Integer)
            return Value::of(static_cast<double>(v.integer));
        if (v.kind != Value::Kind::Float)
            throw bad();
        return v;
    case Type::String:
        if (v.kind != Value::Kind::String)
            throw bad();
        return v;
    case Type::IntArray:
    case Type::FloatArray: {
        if (v.kind != Value::Kind::Array)
            throw bad();
        std::vector<Value> items;
        for (const auto& item : v.items)
            items.push_back(coerce(item, t == Type::IntArray ? Type::Int : Type::Float, key, at));
        return Value::array(std::move(items));
    }
    }
    throw bad();
}

class Resolved
{
public:
    explicit Resolved(const ConfigDocument& doc)
    {
        std::map<std::string, const KeySpec*> known;
        for (const auto& k : schema())
            known[k.key] = &k;
        for (const auto& [key, value] : doc.values)
        {
            const Position at = doc.positions.count(key) ? doc.positions.at(key) : Position{};
            auto it = known.find(key);
            if (it == known.end())
                throw ConfigError("unknown key '" + key + "'", at.line, at.column);
            values_[key] = coerce(value, it->second->type, key, at);
            positions_[key] = at;
        }
        for (const auto& k : schema())
            if (!values_.count(k.key))
                values_[k.key] = k.fallback;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        const Position at = positions_.count(key) ? positions_.at(key) : Position{};
        throw ConfigError(key + ": " + msg, at.line, at.column);
    }

    const Value& get(const std::string& key) const { return values_.at(key); }
    bool boolean(const std::string& key) const { return get(key).boolean; }
    std::int64_t integer(const std::string& key) const { return get(key).integer; }
    double real(const std::string& key) const { return get(key).real; }
    const std::string& text(const std::string& key) const { return get(key).text; }

    std::vector<std::int64_t> integers(const std::string& key) const
    {
        std::vector<std::int64_t> out;
        for (const auto& v : get(key).items)
            out.push_back(v.integer);
        return out;
    }

    std::vector<double> reals(const std::string& key) const
    {
        std::vector<double> out;
        for (const auto& v : get(key).items)
            out.push_back(v.real);
        return out;
    }

    std::int64_t at_least(const std::string& key, std::int64_t lo) const
    {
        const auto v = integer(key);
        if (v < lo)
            fail(key, "must be >= " + std::to_string(lo) + " (got " + std::to_string(v) + ")");
        return v;
    }

    double positive(const std::string& key) const
    {
        const double v = real(key);
        if (!(v > 0))
            fail(key, "must be positive (got " + format_number(v) + ")");
        return v;
    }

    std::string toml() const
    {
        std::string out;
        std::string section;
        for (const auto& k : schema())
        {
            const auto dot = k.key.find('.');
            const std::string s = k.key.substr(0, dot);
            if (s != section)
            {
                out += (out.empty() ? "[" : "\n[") + s + "]\n";
                section = s;
            }
            out += k.key.substr(dot + 1) + " = " + get(k.key).to_toml() + "\n";
        }
        return out;
    }

private:
    std::map<std::string, Value> values_;
    std::map<std::string, Position> positions_;
};

template <typename F>
auto named(const Resolved& r, const std::string& key, F&& f) -> decltype(f())
{
    try
    {
        return f();
    }
    catch (const ConfigError&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        r.fail(key, e.what());
    }
}

} // namespace

const std::vector<std::string>& experiment_kinds()
{
    static const std::vector<std::string> kinds = {
        "wegner", "ssf-bound", "dos-vs-ssf", "birman-solomyak",
        "rank-bound", "thermo-limit", "ssd", "spectral-averaging"};
    return kinds;
}

ExperimentConfig build_config(const ConfigDocument& doc)
{
    const Resolved r(doc);
    ExperimentConfig c;

    c.kind = r.text("experiment.kind");
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
        r.fail("experiment.kind", "unknown experiment '" + c.kind + "'");
    c.output_dir = r.text("experiment.output");
    c.cache = r.boolean("experiment.cache");
    c.cache_dir = r.text("experiment.cache_dir");
    c.check = r.boolean("experiment.check");

    // model
    const auto d = r.integer("model.d");
    if (d < 1 || d > 3)
        r.fail("model.d", "dimension must be 1, 2 or 3 (got " + std::to_string(d) + ")");
    const auto side = r.integer("model.L");
    if (side < 3)
        r.fail("model.L", "side length must satisfy L >= 3 (got " + std::to_string(side) + ")");
    c.model.geometry = BoxGeometry(static_cast<int>(d), side);
    c.model.coupling = r.real("model.coupling");
    if (!(c.model.coupling >= 0))
        r.fail("model.coupling", "must be nonnegative");

    const std::string profile = r.text("model.profile");
    if (profile == "delta")
    {
        c.model.profile = SiteProfile::delta();
    }
    else if (profile == "custom")
    {
        const auto offs = r.integers("model.profile_offsets");
        const auto vals = r.reals("model.profile_values");
        if (offs.size() != vals.size() * static_cast<std::size_t>(d))
            r.fail("model.profile_offsets", "needs d integers per profile value");
        std::vector<MultiIndex> offsets;
        for (std::size_t k = 0; k < vals.size(); ++k)
        {
            MultiIndex e{0, 0, 0};
            for (std::int64_t a = 0; a < d; ++a)
                e[a] = offs[k * d + a];
            offsets.push_back(e);
        }
        c.model.profile = named(r, "model.profile_values",
                                [&] { return SiteProfile(std::move(offsets), vals); });
    }
    else
    {
        r.fail("model.profile", "must be \"delta\" or \"custom\" (got \"" + profile + "\")");
    }

    const std::string disorder = r.text("model.disorder");
    if (disorder == "uniform01")
        c.model.disorder = DisorderDistribution::uniform01();
    else if (disorder == "piecewise")
        c.model.disorder = named(r, "model.disorder_masses", [&] {
            return DisorderDistribution::piecewise(r.reals("model.disorder_edges"),
                                                   r.reals("model.disorder_masses"));
        });
    else
        r.fail("model.disorder", "must be \"uniform01\" or \"piecewise\"");

    c.model.background.period = r.at_least("model.v0_period", 1);
    c.model.background.values = r.reals("model.v0_values");
    named(r, "model.v0_period", [&] { c.model.background.check_fits(c.model.geometry); return 0; });
    named(r, "model.profile_offsets", [&] { c.model.profile.check_fits(c.model.geometry); return 0; });

    // plan
    c.plan.realizations = r.at_least("plan.M", 1);
    c.plan.seed = static_cast<std::uint64_t>(r.integer("plan.seed"));
    c.plan.workers = static_cast<unsigned>(r.at_least("plan.workers", 0));
    const double lo = r.real("plan.e_min");
    const double hi = r.real("plan.e_max");
    const auto bins = r.at_least("plan.bins", 1);
    if (!(lo < hi))
        r.fail("plan.e_max", "must exceed plan.e_min");
    c.plan.bins = r.boolean("plan.offset_edges") ? BinGrid::offset(lo, hi, bins) : BinGrid{lo, hi, bins};

    // experiment blocks
    c.wegner.e0 = r.real("wegner.e0");
    c.wegner.eps = r.reals("wegner.eps");
    if (c.wegner.eps.empty())
        r.fail("wegner.eps", "needs at least one value");
    for (double e : c.wegner.eps)
        if (!(e > 0 && e <= 1))
            r.fail("wegner.eps", "values must lie in (0, 1] (got " + format_number(e) + ")");
    c.wegner.max_relative_residual = r.positive("wegner.max_relative_residual");

    c.thermo.sizes.clear();
    for (auto s : r.integers("thermo.sizes"))
    {
        if (s < 3)
            r.fail("thermo.sizes", "sizes must be >= 3 (got " + std::to_string(s) + ")");
        c.thermo.sizes.push_back(s);
    }
    c.thermo.outer_factor = r.at_least("thermo.outer_factor", 1);
    c.thermo.window_lo = r.real("thermo.window_lo");
    c.thermo.window_hi = r.real("thermo.window_hi");
    if (!(c.thermo.window_lo < c.thermo.window_hi))
        r.fail("thermo.window_hi", "must exceed thermo.window_lo");
    c.thermo.times = r.reals("thermo.times");
    for (double t : c.thermo.times)
        if (!(t > 0))
            r.fail("thermo.times", "times must be positive");

    c.ssd.sizes.clear();
    c.ssd.outer = r.at_least("ssd.outer_L", 3);
    for (auto s : r.integers("ssd.sizes"))
    {
        if (s < 3 || s > c.ssd.outer)
            r.fail("ssd.sizes", "sizes must lie in [3, ssd.outer_L]");
        c.ssd.sizes.push_back(s);
    }

    c.birman_solomyak.instances = r.at_least("birman-solomyak.instances", 1);
    c.birman_solomyak.window_lo = r.real("birman-solomyak.window_lo");
    c.birman_solomyak.window_hi = r.real("birman-solomyak.window_hi");
    if (!(c.birman_solomyak.window_lo < c.birman_solomyak.window_hi))
        r.fail("birman-solomyak.window_hi", "must exceed birman-solomyak.window_lo");
    c.birman_solomyak.tol = r.positive("birman-solomyak.tol");
    c.birman_solomyak.max_nodes = r.at_least("birman-solomyak.max_nodes", 32);

    c.rank_bound.instances = r.at_least("rank-bound.instances", 1);
    c.rank_bound.max_rank = r.at_least("rank-bound.max_rank", 1);
    c.rank_bound.weight_lo = r.positive("rank-bound.weight_lo");
    c.rank_bound.weight_hi = r.positive("rank-bound.weight_hi");
    if (c.rank_bound.weight_hi < c.rank_bound.weight_lo)
        r.fail("rank-bound.weight_hi", "must be >= rank-bound.weight_lo");
    if (c.rank_bound.max_rank > c.model.geometry.site_count())
        r.fail("rank-bound.max_rank", "exceeds the operator dimension");

    c.spectral_averaging.instances = r.at_least("spectral-averaging.instances", 1);
    c.spectral_averaging.max_rank = r.at_least("spectral-averaging.max_rank", 1);
    c.spectral_averaging.tol = r.positive("spectral-averaging.tol");
    c.spectral_averaging.max_nodes = r.at_least("spectral-averaging.max_nodes", 32);
    if (c.spectral_averaging.max_rank > c.model.geometry.site_count())
        r.fail("spectral-averaging.max_rank", "exceeds the operator dimension");

    c.resolved_toml = r.toml();
    return c;
}

} // namespace ssflab::lab
