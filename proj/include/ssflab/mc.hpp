#pragma once

#include "ssflab/disorder.hpp"
#include "ssflab/eig.hpp"
#include "ssflab/models.hpp"
#include "ssflab/ssf.hpp"
#include "ssflab/table.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssflab
{

/// Shift applied to bin edges so that rational points of the free spectrum
/// rarely sit on an edge.
inline constexpr double bin_edge_offset = 1e-4 * std::numbers::sqrt2;

/// Uniform half-open bins [lo + k h, lo + (k+1) h), k = 0..count-1.
struct BinGrid
{
    double lo = 0.0;
    double hi = 1.0;
    Index count = 1;

    /// The grid on [lo, hi) with both ends moved up by bin_edge_offset.
    static BinGrid offset(double lo, double hi, Index count);

    double width() const { return (hi - lo) / static_cast<double>(count); }
    double edge(Index k) const { return lo + static_cast<double>(k) * width(); }
    EnergyInterval bin(Index k) const { return {edge(k), edge(k + 1)}; }
    void validate() const;

    bool operator==(const BinGrid&) const = default;
};

/// Monte Carlo plan. Results never depend on `workers`.
struct McPlan
{
    Index realizations = 1;
    std::uint64_t seed = 0;
    unsigned workers = 0; ///< 0 selects std::thread::hardware_concurrency
    BinGrid bins;

    void validate() const;
    std::string canonical() const;

    /// Same plan with the seed replaced by a stream tagged with `label`.
    McPlan tagged(const std::string& label) const;
};

struct McAggregate
{
    Eigen::VectorXd mean;
    Eigen::VectorXd stderr_; ///< sample standard deviation / sqrt(M)
    Eigen::VectorXd min;
    Eigen::VectorXd max;
    Index realizations = 0;
};

class RealizationError : public std::runtime_error
{
public:
    RealizationError(const std::string& what, std::uint64_t index, std::uint64_t seed)
        : std::runtime_error(what), index(index), seed(seed)
    {
    }
    std::uint64_t index;
    std::uint64_t seed;
};

/// Per-realization observable; must return the same length for every sample.
using RealizationKernel = std::function<Eigen::VectorXd(const DisorderSample&)>;

/// Draws realizations 0..M-1 on model.geometry, evaluates the kernel
/// concurrently and aggregates sequentially in realization order with
/// pairwise summation.
McAggregate run_realizations(const ModelSpec& model, const McPlan& plan, const RealizationKernel& kernel);

/// Eigenvalues of the operator assembled from (model, sample). The lab CLI
/// substitutes a caching implementation.
using EigenvalueProvider = std::function<Spectrumd(const ModelSpec&, const DisorderSample&)>;

Spectrumd direct_eigenvalues(const ModelSpec& model, const DisorderSample& sample);

/// xi(E; H_{j perp} + u_j, H_{j perp}): coupling at `site` set to 0 versus 1.
SSFCurve single_site_ssf(const ModelSpec& model,
                         const DisorderSample& sample,
                         Index site,
                         const EigenvalueProvider& provider = direct_eigenvalues);

//---------------------------------------------------------------------------//

enum class Normalization
{
    PerSite,
    Raw
};

/// Per-bin density estimate: mean[k] estimates (measure of bin k) / h.
struct MeasureEstimate
{
    McPlan plan;
    Eigen::VectorXd mean;
    Eigen::VectorXd stderr_;
    Normalization normalization = Normalization::PerSite;

    Table to_table(const std::string& name) const;
};

struct WegnerReport
{
    double e0 = 0.0;
    std::vector<double> eps;
    Index sites = 0;
    Index realizations = 0;
    Eigen::VectorXd count_per_site;      ///< E{Tr E([e0-eps, e0+eps))} / |Lambda|
    Eigen::VectorXd count_stderr;
    Eigen::VectorXd density;             ///< count_per_site / (2 eps)
    Eigen::VectorXd density_stderr;
    Eigen::VectorXd probability;         ///< P{dist(sigma(H), e0) < eps}
    Eigen::VectorXd probability_stderr;
    double slope = 0.0;                  ///< through-origin fit of count_per_site against eps
    double max_relative_residual = 0.0;  ///< max_i |y_i - slope eps_i| / y_i
    double r_squared = 0.0;              ///< uncentred
    bool indicator_bounded = true;       ///< indicator <= count held in every realization
    bool monotone = true;                ///< counts nondecreasing in eps in every realization

    Table to_table() const;
};

/// Requires every eps in (0, 1].
WegnerReport wegner_scan(const ModelSpec& model,
                         double e0,
                         const std::vector<double>& eps,
                         const McPlan& plan,
                         const EigenvalueProvider& provider = direct_eigenvalues);

/// E{ int_bin xi(E; H_{j perp} + u_j, H_{j perp}) dE } / h with j the box centre.
MeasureEstimate expected_ssf_bins(const ModelSpec& model,
                                  const McPlan& plan,
                                  const EigenvalueProvider& provider = direct_eigenvalues);

/// E{ count_in(bin) } / (|Lambda| h).
MeasureEstimate dos_bins(const ModelSpec& model,
                         const McPlan& plan,
                         const EigenvalueProvider& provider = direct_eigenvalues);

struct KappaEstimate
{
    MeasureEstimate kappa;
    double c0 = 0.0;          ///< max over sites of sum_j u_j
    double worst_excess = 0.0; ///< max over realizations and bins of sum_j Tr u_j E u_j - c0 Tr E
    double slack = 0.0;        ///< rounding allowance used for `bounded`
    bool bounded = true;
};

/// kappa_Lambda(bin) / h with kappa_Lambda(D) = E{ sum_j Tr u_j^{1/2} E(D) u_j^{1/2} } / |Lambda|,
/// plus the per-realization check against c0 Tr E(D).
KappaEstimate kappa_bins(const ModelSpec& model, const McPlan& plan);

/// Per-bin masses of three estimators of the same finite-volume measure.
struct IdentityReport
{
    McPlan plan;
    Eigen::VectorXd ssf_mass;   ///< int_bin E{xi_j} dE
    Eigen::VectorXd kappa_mass; ///< kappa_Lambda(bin)
    Eigen::VectorXd dos_mass;   ///< nu_Lambda(bin)
    Eigen::VectorXd ssf_stderr;
    Eigen::VectorXd kappa_stderr;
    Eigen::VectorXd combined_stderr; ///< stderr of ssf_mass - kappa_mass
    double max_kappa_dos_gap = 0.0;  ///< max over realizations and bins of |kappa - nu| (per realization)
    double max_krein_error = 0.0;    ///< max over realizations of |int xi - Tr u_j|
    bool paired = false;             ///< combined_stderr from paired differences

    /// Fraction of bins with |ssf - kappa| <= k * combined_stderr.
    double fraction_within(double k) const;
    Table to_table() const;
};

/// Joint estimate on shared realizations; combined stderr is that of the
/// per-realization difference.
IdentityReport dos_ssf_identity_report(const ModelSpec& model, const McPlan& plan);

/// Combines independently produced estimates; plans must agree exactly.
IdentityReport dos_ssf_identity_report(const MeasureEstimate& ssf,
                                       const MeasureEstimate& kappa,
                                       const MeasureEstimate& dos);

struct ThermoReport
{
    std::vector<Index> sizes;
    Index outer_factor = 1;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<double> times;
    Eigen::VectorXd error;          ///< per-site error term per inner size
    Eigen::VectorXd error_stderr;
    Eigen::MatrixXd laplace;        ///< sizes x times
    Eigen::MatrixXd laplace_stderr;

    Table to_table() const;
};

/// Finite-volume error term against an outer box of side outer_factor * L
/// sharing the inner couplings (exterior fresh iid).
ThermoReport thermo_error_scan(const ModelSpec& model,
                               const std::vector<Index>& sizes,
                               Index outer_factor,
                               const EnergyInterval& window,
                               const std::vector<double>& times,
                               const McPlan& plan);

struct SsdReport
{
    Eigen::VectorXd energies;
    std::vector<Index> sizes;
    Index outer = 0;
    Eigen::MatrixXd curves;         ///< energies x sizes: E{xi(E; H0 + chi V, H0)} / |Lambda|
    Eigen::MatrixXd curve_stderr;
    Eigen::VectorXd reference;      ///< N0(E) - N(E), per site of the outer box
    Eigen::VectorXd reference_stderr;
    Eigen::VectorXd sup_gap;
    Eigen::VectorXd sup_gap_stderr;
    std::vector<Index> sup_gap_at;

    Table to_table() const;
    Table curves_table() const;
};

/// Energies are the plan's bin edges.
SsdReport ssd_scan(const ModelSpec& model,
                   const std::vector<Index>& inner_sizes,
                   Index outer_size,
                   const McPlan& plan,
                   const EigenvalueProvider& provider = direct_eigenvalues);

} // namespace ssflab
