#include "ssflab/disorder.hpp"

#include "ssflab/format.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssflab
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index)
{
    return splitmix64(master_seed ^ splitmix64(index));
}

double uniform01(Engine& engine)
{
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

//---------------------------------------------------------------------------//

DisorderDistribution::DisorderDistribution(Kind kind,
                                           std::vector<double> edges,
                                           std::vector<double> masses)
    : kind_(kind), edges_(std::move(edges)), masses_(std::move(masses))
{
    cumulative_.reserve(masses_.size());
    double acc = 0.0;
    for (double m : masses_)
        cumulative_.push_back(acc += m);
}

DisorderDistribution DisorderDistribution::uniform01()
{
    return DisorderDistribution(Kind::Uniform01, {0.0, 1.0}, {1.0});
}

DisorderDistribution DisorderDistribution::piecewise(std::vector<double> edges,
                                                     std::vector<double> masses)
{
    if (edges.size() < 2 || masses.size() + 1 != edges.size())
        throw std::invalid_argument(
            "piecewise density needs k+1 edges for k bin masses");
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    {
        if (!std::isfinite(edges[k]) || !std::isfinite(edges[k + 1]) ||
            !(edges[k] < edges[k + 1]))
            throw std::invalid_argument("piecewise density edges must be finite and "
                                        "strictly increasing");
    }
    double total = 0.0;
    for (double m : masses)
    {
        if (!(m >= 0.0) || !std::isfinite(m))
            throw std::invalid_argument("piecewise density masses must be nonnegative");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("piecewise density must integrate to 1 (got " +
                                    format_number(total) + ")");
    return DisorderDistribution(Kind::PiecewiseConstant, std::move(edges), std::move(masses));
}

double DisorderDistribution::density(double x) const
{
    if (x < lower() || x >= upper())
        return 0.0;
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    auto k = static_cast<std::size_t>(it - edges_.begin()) - 1;
    return masses_[k] / (edges_[k + 1] - edges_[k]);
}

double DisorderDistribution::mean() const
{
    double m = 0.0;
    for (std::size_t k = 0; k < masses_.size(); ++k)
        m += masses_[k] * 0.5 * (edges_[k] + edges_[k + 1]);
    return m;
}

double DisorderDistribution::sample(Engine& engine) const
{
    if (kind_ == Kind::Uniform01)
        return ssflab::uniform01(engine);
    double p = ssflab::uniform01(engine) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), p);
    auto k = std::min(static_cast<std::size_t>(it - cumulative_.begin()), masses_.size() - 1);
    // zero-mass bins are never selected because upper_bound skips them
    double x = edges_[k] + ssflab::uniform01(engine) * (edges_[k + 1] - edges_[k]);
    return std::clamp(x, lower(), upper());
}

std::string DisorderDistribution::canonical() const
{
    if (kind_ == Kind::Uniform01)
        return "uniform01";
    std::string s = "piecewise{edges=[";
    for (std::size_t k = 0; k < edges_.size(); ++k)
        s += (k ? "," : "") + format_number(edges_[k]);
    s += "],masses=[";
    for (std::size_t k = 0; k < masses_.size(); ++k)
        s += (k ? "," : "") + format_number(masses_[k]);
    return s + "]}";
}

//---------------------------------------------------------------------------//

std::string Provenance::canonical() const
{
    return "{seed=" + std::to_string(master_seed) + ",index=" + std::to_string(index) +
           ",derivation=" + derivation + "}";
}

DisorderSample::DisorderSample(BoxGeometry geometry,
                               Eigen::VectorXd couplings,
                               Provenance provenance)
    : geometry_(geometry), couplings_(std::move(couplings)), provenance_(std::move(provenance))
{
    if (couplings_.size() != geometry_.site_count())
        throw std::invalid_argument("coupling count " + std::to_string(couplings_.size()) +
                                    " does not match site count " +
                                    std::to_string(geometry_.site_count()));
}

DisorderSample sample_disorder(const DisorderDistribution& dist,
                               const BoxGeometry& geometry,
                               std::uint64_t master_seed,
                               std::uint64_t index)
{
    Engine engine(derive_seed(master_seed, index));
    Eigen::VectorXd omega(geometry.site_count());
    for (Index j = 0; j < omega.size(); ++j)
        omega[j] = dist.sample(engine);
    return DisorderSample(geometry, std::move(omega), Provenance{master_seed, index, ""});
}

DisorderSample with_site_coupling(const DisorderSample& sample, Index j, double value)
{
    if (j < 0 || j >= sample.geometry().site_count())
        throw std::out_of_range("site " + std::to_string(j) + " outside the box");
    Eigen::VectorXd omega = sample.couplings();
    omega[j] = value;
    Provenance p = sample.provenance();
    p.derivation += "/set(" + std::to_string(j) + "," + format_number(value) + ")";
    return DisorderSample(sample.geometry(), std::move(omega), std::move(p));
}

DisorderSample translate_sample(const DisorderSample& sample, const MultiIndex& shift)
{
    const BoxGeometry& g = sample.geometry();
    Eigen::VectorXd omega(g.site_count());
    for (Index x = 0; x < g.site_count(); ++x)
        omega[g.shifted(x, shift)] = sample.coupling(x);

    MultiIndex reduced{0, 0, 0};
    for (int k = 0; k < g.dimension(); ++k)
        reduced[k] = g.wrap(shift[k]);
    Provenance p = sample.provenance();
    if (reduced != MultiIndex{0, 0, 0})
        p.derivation += "/translate(" + std::to_string(reduced[0]) + "," +
                        std::to_string(reduced[1]) + "," + std::to_string(reduced[2]) + ")";
    return DisorderSample(g, std::move(omega), std::move(p));
}

Index embedding_offset(Index inner, Index outer)
{
    return (outer - inner) / 2;
}

Index embedded_site(const BoxGeometry& inner, const BoxGeometry& outer, Index inner_site)
{
    const Index off = embedding_offset(inner.side_length(), outer.side_length());
    MultiIndex x = inner.coords(inner_site);
    for (int k = 0; k < inner.dimension(); ++k)
        x[k] += off;
    return outer.index(x);
}

DisorderSample embed_sample(const DisorderSample& inner,
                            const BoxGeometry& outer,
                            FillRule fill,
                            const DisorderDistribution& dist)
{
    const BoxGeometry& g = inner.geometry();
    if (outer.dimension() != g.dimension())
        throw std::invalid_argument("embedding requires equal box dimensions");
    if (outer.side_length() < g.side_length())
        throw std::invalid_argument("outer box side " + std::to_string(outer.side_length()) +
                                    " is smaller than inner side " +
                                    std::to_string(g.side_length()));
    if (outer == g)
        return inner;

    const Provenance& src = inner.provenance();
    Provenance p = src;
    p.derivation += "/embed(" + g.canonical() + "->" + std::to_string(outer.side_length()) + "," +
                    (fill == FillRule::Zeros ? "zeros" : "iid") + ")";

    Eigen::VectorXd omega = Eigen::VectorXd::Zero(outer.site_count());
    if (fill == FillRule::FreshIid)
    {
        Engine engine(derive_seed(derive_seed(src.master_seed, src.index), fnv1a64(p.derivation)));
        for (Index x = 0; x < omega.size(); ++x)
            omega[x] = dist.sample(engine);
    }
    for (Index x = 0; x < g.site_count(); ++x)
        omega[embedded_site(g, outer, x)] = inner.coupling(x);
    return DisorderSample(outer, std::move(omega), std::move(p));
}

} // namespace ssflab
