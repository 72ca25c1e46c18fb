#pragma once

#include "ssflab/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ssflab
{

/// SplitMix64 finalizer (Steele, Lea, Flood).
std::uint64_t splitmix64(std::uint64_t x);

/// Stream seed for realization `index` under `master_seed`. Depends only on
/// the pair, never on the order in which realizations are drawn.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

using Engine = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
double uniform01(Engine& engine);

/// Single-site coupling law: U[0,1] or a piecewise-constant density on [a, b].
class DisorderDistribution
{
public:
    enum class Kind
    {
        Uniform01,
        PiecewiseConstant
    };

    static DisorderDistribution uniform01();

    /// `edges` strictly increasing (k+1 values), `masses` the probability of
    /// each of the k bins; masses must be nonnegative and sum to one.
    static DisorderDistribution piecewise(std::vector<double> edges,
                                          std::vector<double> masses);

    Kind kind() const { return kind_; }
    double lower() const { return edges_.front(); }
    double upper() const { return edges_.back(); }
    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& masses() const { return masses_; }

    double density(double x) const;
    double mean() const;
    double sample(Engine& engine) const;
    bool in_support(double x) const { return x >= lower() && x <= upper(); }

    std::string canonical() const;

private:
    DisorderDistribution(Kind kind, std::vector<double> edges, std::vector<double> masses);

    Kind kind_;
    std::vector<double> edges_;
    std::vector<double> masses_;
    std::vector<double> cumulative_;
};

/// Where a sample came from. `derivation` accumulates every transformation
/// applied after drawing so that distinct configurations never share a key.
struct Provenance
{
    std::uint64_t master_seed = 0;
    std::uint64_t index = 0;
    std::string derivation;

    std::string canonical() const;
};

/// One disorder realization: a coupling per site of the box.
class DisorderSample
{
public:
    DisorderSample(BoxGeometry geometry, Eigen::VectorXd couplings, Provenance provenance);

    const BoxGeometry& geometry() const { return geometry_; }
    const Eigen::VectorXd& couplings() const { return couplings_; }
    double coupling(Index site) const { return couplings_[site]; }
    const Provenance& provenance() const { return provenance_; }

private:
    BoxGeometry geometry_;
    Eigen::VectorXd couplings_;
    Provenance provenance_;
};

DisorderSample sample_disorder(const DisorderDistribution& dist,
                               const BoxGeometry& geometry,
                               std::uint64_t master_seed,
                               std::uint64_t index);

/// Copy of `sample` with the coupling at site j replaced by `value`.
DisorderSample with_site_coupling(const DisorderSample& sample, Index j, double value);

/// omega'_x = omega_{x - shift}, periodic.
DisorderSample translate_sample(const DisorderSample& sample, const MultiIndex& shift);

enum class FillRule
{
    FreshIid,
    Zeros
};

/// Offset of a centred inner box of side `inner` inside an outer box.
Index embedding_offset(Index inner, Index outer);

/// Outer-box site holding inner-box site `inner_site` under centred embedding.
Index embedded_site(const BoxGeometry& inner, const BoxGeometry& outer, Index inner_site);

/// Places `inner` centred in a larger box; exterior sites are zero or fresh
/// iid draws from a stream derived from the inner sample's provenance.
DisorderSample embed_sample(const DisorderSample& inner,
                            const BoxGeometry& outer,
                            FillRule fill,
                            const DisorderDistribution& dist);

} // namespace ssflab
