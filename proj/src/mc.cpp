#include "ssflab/mc.hpp"

#include "ssflab/format.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace ssflab
{

BinGrid BinGrid::offset(double lo, double hi, Index count)
{
    return BinGrid{lo + bin_edge_offset, hi + bin_edge_offset, count};
}

void BinGrid::validate() const
{
    if (count < 1)
        throw std::invalid_argument("bin count must be >= 1");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw std::invalid_argument("bin grid needs finite lo < hi");
}

void McPlan::validate() const
{
    if (realizations < 1)
        throw std::invalid_argument("realization count M must be >= 1");
    bins.validate();
}

std::string McPlan::canonical() const
{
    return "{bins={count=" + std::to_string(bins.count) + ",hi=" + format_number(bins.hi) +
           ",lo=" + format_number(bins.lo) + "},realizations=" + std::to_string(realizations) +
           ",seed=" + std::to_string(seed) + "}";
}

McPlan McPlan::tagged(const std::string& label) const
{
    McPlan p = *this;
    p.seed = derive_seed(seed, fnv1a64(label));
    return p;
}

namespace
{

template <typename F>
Eigen::VectorXd pairwise_sum(Index lo, Index hi, const F& term)
{
    if (hi - lo <= 8)
    {
        Eigen::VectorXd acc = term(lo);
        for (Index i = lo + 1; i < hi; ++i)
            acc += term(i);
        return acc;
    }
    const Index mid = lo + (hi - lo) / 2;
    return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

} // namespace

McAggregate run_realizations(const ModelSpec& model, const McPlan& plan, const RealizationKernel& kernel)
{
    plan.validate();
    model.validate();
    const Index m = plan.realizations;

    std::vector<Eigen::VectorXd> results(static_cast<std::size_t>(m));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(m));
    std::atomic<Index> next{0};
    auto work = [&] {
        for (Index i = next++; i < m; i = next++)
        {
            try
            {
                const DisorderSample sample = sample_disorder(
                    model.disorder, model.geometry, plan.seed, static_cast<std::uint64_t>(i));
                results[i] = kernel(sample);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };

    unsigned workers = plan.workers ? plan.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<Index>(workers, m));
    if (workers <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }

    for (Index i = 0; i < m; ++i)
    {
        if (!errors[i])
            continue;
        const auto seed = derive_seed(plan.seed, static_cast<std::uint64_t>(i));
        std::string msg;
        try
        {
            std::rethrow_exception(errors[i]);
        }
        catch (const std::exception& e)
        {
            msg = e.what();
        }
        catch (...)
        {
            msg = "unknown error";
        }
        throw RealizationError("realization " + std::to_string(i) + " (stream seed " +
                                   std::to_string(seed) + ") failed: " + msg,
                               static_cast<std::uint64_t>(i), seed);
    }

    const Index k = results.front().size();
    for (Index i = 0; i < m; ++i)
        if (results[i].size() != k)
            throw RealizationError("realization " + std::to_string(i) +
                                       " returned a different observable length",
                                   static_cast<std::uint64_t>(i),
                                   derive_seed(plan.seed, static_cast<std::uint64_t>(i)));

    McAggregate agg;
    agg.realizations = m;
    agg.mean = pairwise_sum(0, m, [&](Index i) { return results[i]; }) / static_cast<double>(m);
    if (m > 1)
    {
        const Eigen::VectorXd ss = pairwise_sum(0, m, [&](Index i) -> Eigen::VectorXd {
            return (results[i] - agg.mean).array().square().matrix();
        });
        agg.stderr_ = (ss / static_cast<double>(m - 1) / static_cast<double>(m)).cwiseSqrt();
    }
    else
    {
        agg.stderr_ = Eigen::VectorXd::Zero(k);
    }
    agg.min = results.front();
    agg.max = results.front();
    for (Index i = 1; i < m; ++i)
    {
        agg.min = agg.min.cwiseMin(results[i]);
        agg.max = agg.max.cwiseMax(results[i]);
    }
    return agg;
}

Spectrumd direct_eigenvalues(const ModelSpec& model, const DisorderSample& sample)
{
    return eigen_decompose(assemble_hamiltonian(model, sample), false);
}

//---------------------------------------------------------------------------//

Table MeasureEstimate::to_table(const std::string& name) const
{
    Table t{name, {"bin_lo", "bin_hi", "mean", "stderr"}, {}};
    for (Index b = 0; b < plan.bins.count; ++b)
        t.add_row({plan.bins.edge(b), plan.bins.edge(b + 1), mean[b], stderr_[b]});
    return t;
}

WegnerReport wegner_scan(const ModelSpec& model,
                         double e0,
                         const std::vector<double>& eps,
                         const McPlan& plan,
                         const EigenvalueProvider& provider)
{
    if (eps.empty())
        throw std::invalid_argument("Wegner scan needs at least one epsilon");
    for (double e : eps)
        if (!(e > 0.0 && e <= 1.0))
            throw std::invalid_argument("Wegner epsilon must lie in (0, 1] (got " +
                                        format_number(e) + ")");
    std::vector<double> sorted = eps;
    std::sort(sorted.begin(), sorted.end());

    const Index k = static_cast<Index>(eps.size());
    const double n = static_cast<double>(model.geometry.site_count());

    auto kernel = [&](const DisorderSample& sample) {
        const Spectrumd spec = provider(model, sample);
        const double* begin = spec.values.data();
        const double* end = begin + spec.size();
        double dist = std::numeric_limits<double>::infinity();
        const double* it = std::lower_bound(begin, end, e0);
        if (it != end)
            dist = std::min(dist, std::abs(*it - e0));
        if (it != begin)
            dist = std::min(dist, std::abs(*(it - 1) - e0));

        Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * k + 2);
        for (Index i = 0; i < k; ++i)
        {
            const auto count = count_in(spec, EnergyInterval(e0 - eps[i], e0 + eps[i]));
            const double indicator = dist < eps[i] ? 1.0 : 0.0;
            out[i] = static_cast<double>(count) / n;
            out[k + i] = indicator;
            if (indicator > static_cast<double>(count))
                out[2 * k] = 1.0;
        }
        Eigen::Index previous = 0;
        for (double e : sorted)
        {
            const auto count = count_in(spec, EnergyInterval(e0 - e, e0 + e));
            if (count < previous)
                out[2 * k + 1] = 1.0;
            previous = count;
        }
        return out;
    };
    const McAggregate agg = run_realizations(model, plan, kernel);

    WegnerReport r;
    r.e0 = e0;
    r.eps = eps;
    r.sites = model.geometry.site_count();
    r.realizations = plan.realizations;
    r.count_per_site = agg.mean.head(k);
    r.count_stderr = agg.stderr_.head(k);
    r.probability = agg.mean.segment(k, k);
    r.probability_stderr = agg.stderr_.segment(k, k);
    r.density.resize(k);
    r.density_stderr.resize(k);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (Index i = 0; i < k; ++i)
    {
        r.density[i] = r.count_per_site[i] / (2.0 * eps[i]);
        r.density_stderr[i] = r.count_stderr[i] / (2.0 * eps[i]);
        sxy += eps[i] * r.count_per_site[i];
        sxx += eps[i] * eps[i];
        syy += r.count_per_site[i] * r.count_per_site[i];
    }
    r.slope = sxy / sxx;
    double sse = 0.0;
    for (Index i = 0; i < k; ++i)
    {
        const double resid = r.count_per_site[i] - r.slope * eps[i];
        sse += resid * resid;
        const double rel = r.count_per_site[i] > 0
                               ? std::abs(resid) / r.count_per_site[i]
                               : (resid == 0 ? 0.0 : std::numeric_limits<double>::infinity());
        r.max_relative_residual = std::max(r.max_relative_residual, rel);
    }
    r.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
    r.indicator_bounded = agg.max[2 * k] == 0.0;
    r.monotone = agg.max[2 * k + 1] == 0.0;
    return r;
}

Table WegnerReport::to_table() const
{
    Table t{"wegner",
            {"eps", "count_per_site", "count_stderr", "density", "density_stderr", "probability",
             "probability_stderr", "fitted", "relative_residual"},
            {}};
    for (std::size_t i = 0; i < eps.size(); ++i)
    {
        const double fitted = slope * eps[i];
        const double y = count_per_site[static_cast<Index>(i)];
        t.add_row({eps[i], y, count_stderr[static_cast<Index>(i)], density[static_cast<Index>(i)],
                   density_stderr[static_cast<Index>(i)], probability[static_cast<Index>(i)],
                   probability_stderr[static_cast<Index>(i)], fitted,
                   y > 0 ? std::abs(y - fitted) / y : 0.0});
    }
    return t;
}

//---------------------------------------------------------------------------//

SSFCurve single_site_ssf(const ModelSpec& model,
                         const DisorderSample& sample,
                         Index site,
                         const EigenvalueProvider& provider)
{
    const Spectrumd perp = provider(model, with_site_coupling(sample, site, 0.0));
    const Spectrumd one = provider(model, with_site_coupling(sample, site, 1.0));
    return ssf_from_spectra(perp, one);
}

namespace
{

Eigen::VectorXd bin_counts(const Spectrumd& spec, const BinGrid& bins)
{
    Eigen::VectorXd out(bins.count);
    for (Index b = 0; b < bins.count; ++b)
        out[b] = static_cast<double>(count_in(spec, bins.bin(b)));
    return out;
}

Eigen::VectorXd bin_weight_sums(const Spectrumd& spec, const Eigen::VectorXd& weights, const BinGrid& bins)
{
    Eigen::VectorXd out(bins.count);
    for (Index b = 0; b < bins.count; ++b)
    {
        auto [first, last] = window_range(spec, bins.bin(b));
        out[b] = last > first ? weights.segment(first, last - first).sum() : 0.0;
    }
    return out;
}

} // namespace

MeasureEstimate expected_ssf_bins(const ModelSpec& model,
                                  const McPlan& plan,
                                  const EigenvalueProvider& provider)
{
    plan.validate();
    const Index site = model.geometry.center();
    auto kernel = [&](const DisorderSample& sample) -> Eigen::VectorXd {
        const SSFCurve xi = single_site_ssf(model, sample, site, provider);
        return bin_averages(xi, plan.bins.lo, plan.bins.width(), plan.bins.count);
    };
    const McAggregate agg = run_realizations(model, plan, kernel);
    return MeasureEstimate{plan, agg.mean, agg.stderr_, Normalization::Raw};
}

MeasureEstimate dos_bins(const ModelSpec& model, const McPlan& plan, const EigenvalueProvider& provider)
{
    plan.validate();
    const double scale = 1.0 / (static_cast<double>(model.geometry.site_count()) * plan.bins.width());
    auto kernel = [&](const DisorderSample& sample) -> Eigen::VectorXd {
        return bin_counts(provider(model, sample), plan.bins) * scale;
    };
    const McAggregate agg = run_realizations(model, plan, kernel);
    return MeasureEstimate{plan, agg.mean, agg.stderr_, Normalization::PerSite};
}

KappaEstimate kappa_bins(const ModelSpec& model, const McPlan& plan)
{
    plan.validate();
    model.validate();
    const Index n = model.geometry.site_count();
    const Index bins = plan.bins.count;
    const Eigen::VectorXd w = sum_profile_potential(model.geometry, model.profile, model.coupling);
    const double c0 = w.maxCoeff();
    const double scale = 1.0 / (static_cast<double>(n) * plan.bins.width());

    auto kernel = [&](const DisorderSample& sample) -> Eigen::VectorXd {
        const Spectrumd spec = eigen_decompose(assemble_hamiltonian(model, sample), true);
        const Eigen::VectorXd weights = eigenvector_weights(spec, w);
        const Eigen::VectorXd mass = bin_weight_sums(spec, weights, plan.bins);
        const Eigen::VectorXd counts = bin_counts(spec, plan.bins);
        Eigen::VectorXd out(bins + 1);
        out.head(bins) = mass * scale;
        out[bins] = (mass - c0 * counts).maxCoeff();
        return out;
    };
    const McAggregate agg = run_realizations(model, plan, kernel);

    KappaEstimate r;
    r.kappa = MeasureEstimate{plan, agg.mean.head(bins), agg.stderr_.head(bins), Normalization::PerSite};
    r.c0 = c0;
    r.worst_excess = agg.max[bins];
    // <v, W v> <= c0 |v|^2 holds exactly; the slack only absorbs rounding in |v|^2 = 1.
    r.slack = 64.0 * std::numeric_limits<double>::epsilon() * c0 * static_cast<double>(n);
    r.bounded = r.worst_excess <= r.slack;
    return r;
}

//---------------------------------------------------------------------------//

double IdentityReport::fraction_within(double k) const
{
    const Index bins = ssf_mass.size();
    Index ok = 0;
    for (Index b = 0; b < bins; ++b)
        if (std::abs(ssf_mass[b] - kappa_mass[b]) <= k * combined_stderr[b])
            ++ok;
    return bins ? static_cast<double>(ok) / static_cast<double>(bins) : 1.0;
}

Table IdentityReport::to_table() const
{
    Table t{"dos_vs_ssf",
            {"bin_lo", "bin_hi", "ssf_mass", "ssf_stderr", "kappa_mass", "kappa_stderr", "dos_mass",
             "combined_stderr", "z"},
            {}};
    for (Index b = 0; b < ssf_mass.size(); ++b)
    {
        const double diff = ssf_mass[b] - kappa_mass[b];
        const double z = combined_stderr[b] > 0 ? diff / combined_stderr[b] : 0.0;
        t.add_row({plan.bins.edge(b), plan.bins.edge(b + 1), ssf_mass[b], ssf_stderr[b],
                   kappa_mass[b], kappa_stderr[b], dos_mass[b], combined_stderr[b], z});
    }
    return t;
}

IdentityReport dos_ssf_identity_report(const ModelSpec& model, const McPlan& plan)
{
    plan.validate();
    model.validate();
    const Index n = model.geometry.site_count();
    const Index bins = plan.bins.count;
    const Index site = model.geometry.center();
    const Eigen::VectorXd w = sum_profile_potential(model.geometry, model.profile, model.coupling);
    const double profile_trace = site_profile_weight(model.geometry, model.profile, model.coupling, site).sum();
    const double h = plan.bins.width();

    auto kernel = [&](const DisorderSample& sample) -> Eigen::VectorXd {
        const Spectrumd spec = eigen_decompose(assemble_hamiltonian(model, sample), true);
        const Eigen::VectorXd kappa = bin_weight_sums(spec, eigenvector_weights(spec, w), plan.bins) /
                                      static_cast<double>(n);
        const Eigen::VectorXd dos = bin_counts(spec, plan.bins) / static_cast<double>(n);
        const SSFCurve xi = single_site_ssf(model, sample, site, direct_eigenvalues);
        const Eigen::VectorXd ssf = bin_averages(xi, plan.bins.lo, h, bins) * h;

        Eigen::VectorXd out(4 * bins + 2);
        out << ssf, kappa, dos, ssf - kappa, (kappa - dos).cwiseAbs().maxCoeff(),
            std::abs(xi.integral() - profile_trace);
        return out;
    };
    const McAggregate agg = run_realizations(model, plan, kernel);

    IdentityReport r;
    r.plan = plan;
    r.ssf_mass = agg.mean.segment(0, bins);
    r.kappa_mass = agg.mean.segment(bins, bins);
    r.dos_mass = agg.mean.segment(2 * bins, bins);
    r.ssf_stderr = agg.stderr_.segment(0, bins);
    r.kappa_stderr = agg.stderr_.segment(bins, bins);
    r.combined_stderr = agg.stderr_.segment(3 * bins, bins);
    r.max_kappa_dos_gap = agg.max[4 * bins];
    r.max_krein_error = agg.max[4 * bins + 1];
    r.paired = true;
    return r;
}

IdentityReport dos_ssf_identity_report(const MeasureEstimate& ssf,
                                       const MeasureEstimate& kappa,
                                       const MeasureEstimate& dos)
{
    auto same = [](const McPlan& a, const McPlan& b) {
        return a.realizations == b.realizations && a.seed == b.seed && a.bins == b.bins;
    };
    if (!same(ssf.plan, kappa.plan) || !same(ssf.plan, dos.plan))
        throw std::invalid_argument("identity report needs estimates from one plan (shared "
                                    "realizations)");
    const double h = ssf.plan.bins.width();
    IdentityReport r;
    r.plan = ssf.plan;
    r.ssf_mass = ssf.mean * h;
    r.kappa_mass = kappa.mean * h;
    r.dos_mass = dos.mean * h;
    r.ssf_stderr = ssf.stderr_ * h;
    r.kappa_stderr = kappa.stderr_ * h;
    r.combined_stderr = (r.ssf_stderr.array().square() + r.kappa_stderr.array().square()).sqrt().matrix();
    r.max_kappa_dos_gap = (r.kappa_mass - r.dos_mass).cwiseAbs().maxCoeff();
    r.max_krein_error = 0.0;
    r.paired = false;
    return r;
}

//---------------------------------------------------------------------------//

ThermoReport thermo_error_scan(const ModelSpec& model,
                               const std::vector<Index>& sizes,
                               Index outer_factor,
                               const EnergyInterval& window,
                               const std::vector<double>& times,
                               const McPlan& plan)
{
    if (outer_factor < 1)
        throw std::invalid_argument("outer factor must be >= 1");
    for (double t : times)
        if (!(t > 0))
            throw std::invalid_argument("Laplace times must be positive");

    const Index nt = static_cast<Index>(times.size());
    ThermoReport r;
    r.sizes = sizes;
    r.outer_factor = outer_factor;
    r.window_lo = window.a;
    r.window_hi = window.b;
    r.times = times;
    r.error.resize(static_cast<Index>(sizes.size()));
    r.error_stderr.resize(static_cast<Index>(sizes.size()));
    r.laplace.resize(static_cast<Index>(sizes.size()), nt);
    r.laplace_stderr.resize(static_cast<Index>(sizes.size()), nt);

    for (std::size_t s = 0; s < sizes.size(); ++s)
    {
        const ModelSpec inner = model.resized(sizes[s]);
        const ModelSpec outer = model.resized(outer_factor * sizes[s]);
        inner.validate();
        outer.validate();
        const Index n = inner.geometry.site_count();

        const Eigen::VectorXd w_inner = sum_profile_potential(inner.geometry, model.profile, model.coupling);
        Eigen::VectorXd anchors = Eigen::VectorXd::Zero(outer.geometry.site_count());
        for (Index x = 0; x < n; ++x)
            anchors[embedded_site(inner.geometry, outer.geometry, x)] = model.coupling;
        const Eigen::VectorXd w_outer = anchored_potential(outer.geometry, model.profile, anchors);

        auto kernel = [&](const DisorderSample& sample) -> Eigen::VectorXd {
            const DisorderSample big = embed_sample(sample, outer.geometry, FillRule::FreshIid, model.disorder);
            const Spectrumd spec_in = eigen_decompose(assemble_hamiltonian(inner, sample), true);
            const Spectrumd spec_out = eigen_decompose(assemble_hamiltonian(outer, big), true);
            Eigen::VectorXd out(1 + nt);
            out[0] = (weighted_projector_trace(spec_in, w_inner, window) -
                      weighted_projector_trace(spec_out, w_outer, window)) /
                     static_cast<double>(n);
            for (Index t = 0; t < nt; ++t)
                out[1 + t] = (weighted_heat_trace(spec_out, w_outer, times[t]) -
                              weighted_heat_trace(spec_in, w_inner, times[t])) /
                             static_cast<double>(n);
            return out;
        };
        const McAggregate agg = run_realizations(inner, plan, kernel);
        r.error[s] = agg.mean[0];
        r.error_stderr[s] = agg.stderr_[0];
        r.laplace.row(s) = agg.mean.tail(nt).transpose();
        r.laplace_stderr.row(s) = agg.stderr_.tail(nt).transpose();
    }
    return r;
}

Table ThermoReport::to_table() const
{
    Table t{"thermo_limit", {"L", "outer_L", "error", "error_stderr"}, {}};
    for (double time : times)
    {
        t.columns.push_back("laplace_t" + format_number(time));
        t.columns.push_back("laplace_t" + format_number(time) + "_stderr");
    }
    for (std::size_t s = 0; s < sizes.size(); ++s)
    {
        const auto row = static_cast<Index>(s);
        std::vector<double> values{static_cast<double>(sizes[s]),
                                   static_cast<double>(sizes[s] * outer_factor), error[row],
                                   error_stderr[row]};
        for (Index k = 0; k < laplace.cols(); ++k)
        {
            values.push_back(laplace(row, k));
            values.push_back(laplace_stderr(row, k));
        }
        t.add_row(std::move(values));
    }
    return t;
}

//---------------------------------------------------------------------------//

SsdReport ssd_scan(const ModelSpec& model,
                   const std::vector<Index>& inner_sizes,
                   Index outer_size,
                   const McPlan& plan,
                   const EigenvalueProvider& provider)
{
    plan.validate();
    const ModelSpec outer = model.resized(outer_size);
    outer.validate();
    for (Index l : inner_sizes)
        if (l > outer_size)
            throw std::invalid_argument("inner box side " + std::to_string(l) +
                                        " exceeds outer side " + std::to_string(outer_size));

    const Index ne = plan.bins.count + 1;
    SsdReport r;
    r.energies.resize(ne);
    for (Index e = 0; e < ne; ++e)
        r.energies[e] = plan.bins.edge(e);
    r.sizes = inner_sizes;
    r.outer = outer_size;

    const double n_outer = static_cast<double>(outer.geometry.site_count());
    const Spectrumd free_spec =
        eigen_decompose(build_free_hamiltonian(outer.geometry, model.background), false);

    auto counting_curve = [&](const Spectrumd& spec) {
        Eigen::VectorXd c(ne);
        for (Index e = 0; e < ne; ++e)
            c[e] = static_cast<double>(counting(spec, r.energies[e]));
        return c;
    };

    const McAggregate ref = run_realizations(outer, plan.tagged("ssd-reference"),
                                             [&](const DisorderSample& sample) -> Eigen::VectorXd {
                                                 return counting_curve(provider(outer, sample)) / n_outer;
                                             });
    r.reference = counting_curve(free_spec) / n_outer - ref.mean;
    r.reference_stderr = ref.stderr_;

    const auto ns = static_cast<Index>(inner_sizes.size());
    r.curves.resize(ne, ns);
    r.curve_stderr.resize(ne, ns);
    r.sup_gap.resize(ns);
    r.sup_gap_stderr.resize(ns);
    for (Index s = 0; s < ns; ++s)
    {
        const ModelSpec inner = model.resized(inner_sizes[static_cast<std::size_t>(s)]);
        inner.validate();
        const double n_inner = static_cast<double>(inner.geometry.site_count());
        auto kernel = [&](const DisorderSample& sample) -> Eigen::VectorXd {
            const DisorderSample big = embed_sample(sample, outer.geometry, FillRule::Zeros, model.disorder);
            const SSFCurve xi = ssf_from_spectra(free_spec, provider(outer, big));
            Eigen::VectorXd out(ne);
            for (Index e = 0; e < ne; ++e)
                out[e] = static_cast<double>(xi(r.energies[e])) / n_inner;
            return out;
        };
        const McAggregate agg = run_realizations(inner, plan, kernel);
        r.curves.col(s) = agg.mean;
        r.curve_stderr.col(s) = agg.stderr_;

        Index at = 0;
        const Eigen::VectorXd gap = (agg.mean - r.reference).cwiseAbs();
        r.sup_gap[s] = gap.maxCoeff(&at);
        r.sup_gap_stderr[s] = std::hypot(agg.stderr_[at], r.reference_stderr[at]);
        r.sup_gap_at.push_back(at);
    }
    return r;
}

Table SsdReport::to_table() const
{
    Table t{"ssd", {"L", "outer_L", "sup_gap", "sup_gap_stderr", "sup_gap_energy"}, {}};
    for (std::size_t s = 0; s < sizes.size(); ++s)
        t.add_row({static_cast<double>(sizes[s]), static_cast<double>(outer),
                   sup_gap[static_cast<Index>(s)], sup_gap_stderr[static_cast<Index>(s)],
                   energies[sup_gap_at[s]]});
    return t;
}

Table SsdReport::curves_table() const
{
    Table t{"ssd_curves", {"energy", "reference", "reference_stderr"}, {}};
    for (Index l : sizes)
    {
        t.columns.push_back("xi_L" + std::to_string(l));
        t.columns.push_back("xi_L" + std::to_string(l) + "_stderr");
    }
    for (Index e = 0; e < energies.size(); ++e)
    {
        std::vector<double> row{energies[e], reference[e], reference_stderr[e]};
        for (Index s = 0; s < curves.cols(); ++s)
        {
            row.push_back(curves(e, s));
            row.push_back(curve_stderr(e, s));
        }
        t.add_row(std::move(row));
    }
    return t;
}

} // namespace ssflab
