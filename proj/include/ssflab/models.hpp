#pragma once

#include "ssflab/disorder.hpp"
#include "ssflab/geometry.hpp"
#include "ssflab/symmetric_operator.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace ssflab
{

/// Single-site potential u: positive values on a finite set of offsets
/// relative to the anchor site. u_j(x) = u(x - j).
class SiteProfile
{
public:
    static constexpr double max_value = 1e6;

    SiteProfile(std::vector<MultiIndex> offsets, std::vector<double> values);

    /// u = delta_0, the lattice single-site potential (rank one).
    static SiteProfile delta();

    const std::vector<MultiIndex>& offsets() const { return offsets_; }
    const std::vector<double>& values() const { return values_; }
    Index rank() const { return static_cast<Index>(values_.size()); }
    double sup() const;

    /// Largest per-axis extent of the support (0 for a single site).
    Index diameter() const;

    /// Throws if the support wraps onto itself in a box of this geometry.
    void check_fits(const BoxGeometry& geometry) const;

    std::string canonical() const;

private:
    std::vector<MultiIndex> offsets_;
    std::vector<double> values_;
};

/// Background potential V0, periodic with period p along every axis. Values
/// cover one p^d unit cell in row-major order.
struct PeriodicPotential
{
    Index period = 1;
    std::vector<double> values{0.0};

    static PeriodicPotential constant(double c) { return {1, {c}}; }

    /// Throws unless p divides L and the value count is p^d.
    void check_fits(const BoxGeometry& geometry) const;
    double at(const BoxGeometry& geometry, Index site) const;
    std::string canonical() const;
};

/// Everything needed to assemble H = H0 + lambda * sum_j omega_j u_j on a box.
struct ModelSpec
{
    BoxGeometry geometry{1, 3};
    PeriodicPotential background;
    SiteProfile profile = SiteProfile::delta();
    double coupling = 1.0;
    DisorderDistribution disorder = DisorderDistribution::uniform01();

    void validate() const;

    /// Same model on a box of a different side length.
    ModelSpec resized(Index side_length) const;

    /// Sorted-key, shortest-float text form; stable across runs and hosts.
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// (H0 psi)(x) = sum_{|e|=1} (psi(x) - psi(x+e)) + V0(x) psi(x), periodic.
SymmetricOperatord build_free_hamiltonian(const BoxGeometry& geometry,
                                          const PeriodicPotential& background);

/// lambda * u_j as a site weight.
Eigen::VectorXd site_profile_weight(const BoxGeometry& geometry,
                                    const SiteProfile& profile,
                                    double coupling,
                                    Index j);

/// sum_j a_j u_j for per-anchor weights a_j.
Eigen::VectorXd anchored_potential(const BoxGeometry& geometry,
                                   const SiteProfile& profile,
                                   const Eigen::VectorXd& anchor_weights);

/// sum over all anchors j of lambda * u_j. Its maximum is the constant C in
/// 0 <= sum_j u_j <= C.
Eigen::VectorXd sum_profile_potential(const BoxGeometry& geometry,
                                      const SiteProfile& profile,
                                      double coupling);

/// lambda * sum_j omega_j u_j for one sample.
Eigen::VectorXd random_potential(const ModelSpec& model, const DisorderSample& sample);

SymmetricOperatord assemble_hamiltonian(const ModelSpec& model, const DisorderSample& sample);

} // namespace ssflab
