// Acceptance suite: one PASS/FAIL line per criterion, with wall-time limits.
// Exit status 0 only if every criterion passes within its limit.

#include "ssflab/format.hpp"
#include "ssflab/lab/cache.hpp"
#include "ssflab/mc.hpp"
#include "ssflab/ssf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

using namespace ssflab;

namespace
{

struct Outcome
{
    bool pass = true;
    std::string detail;
};

constexpr std::uint64_t master_seed = 20240601;

std::uint64_t stream(const std::string& label)
{
    McPlan p;
    p.seed = master_seed;
    return p.tagged(label).seed;
}

McPlan plan(Index m, const std::string& label, double lo = 0, double hi = 5, Index bins = 20)
{
    McPlan p;
    p.realizations = m;
    p.seed = master_seed;
    p.bins = BinGrid::offset(lo, hi, bins);
    return p.tagged(label);
}

ModelSpec anderson(int d, Index side)
{
    ModelSpec m;
    m.geometry = BoxGeometry(d, side);
    return m;
}

SymmetricOperatord gaussian_operator(Index n, Engine& engine, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    SymmetricOperatord op(n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j)
            op.coeff_ref(i, j) = g(engine);
    return op;
}

Index uniform_index(Engine& engine, Index lo, Index hi)
{
    return lo + std::min<Index>(hi - lo, static_cast<Index>(uniform01(engine) * static_cast<double>(hi - lo + 1)));
}

/// |v[k+1]| <= |v[k]| + 2 hypot(se[k], se[k+1]).
Outcome trend(const std::string& what, const std::vector<Index>& sizes, const Eigen::VectorXd& v,
              const Eigen::VectorXd& se)
{
    Outcome o;
    o.detail = what + " ";
    for (Index k = 0; k < v.size(); ++k)
    {
        o.detail += "L=" + std::to_string(sizes[static_cast<std::size_t>(k)]) + ":" +
                    format_number(std::abs(v[k])) + "+-" + format_number(se[k]) + " ";
        if (k > 0 && std::abs(v[k]) > std::abs(v[k - 1]) + 2.0 * std::hypot(se[k - 1], se[k]))
            o.pass = false;
    }
    return o;
}

lab::SpectrumCache& cache()
{
    static lab::SpectrumCache c(lab::resolve_cache_dir(""), true,
                                [](const std::string& w) { std::cerr << "warning: " << w << '\n'; });
    return c;
}

//---------------------------------------------------------------------------//

Outcome rank_one_bound()
{
    Outcome o;
    long lo = 0, hi = 0;
    Index hit_one = 0, total = 0;
    const struct
    {
        int d;
        Index side;
    } boxes[] = {{1, 64}, {2, 12}};
    for (const auto& box : boxes)
    {
        const ModelSpec m = anderson(box.d, box.side);
        const std::uint64_t seed = stream("rank-one-" + std::to_string(box.d));
        for (Index i = 0; i < 500; ++i)
        {
            const DisorderSample s = sample_disorder(m.disorder, m.geometry, seed, static_cast<std::uint64_t>(i));
            Engine engine(derive_seed(seed ^ 0x5a5a, static_cast<std::uint64_t>(i)));
            const Index j = uniform_index(engine, 0, m.geometry.site_count() - 1);
            const SSFCurve xi = single_site_ssf(m, s, j);
            lo = std::min(lo, xi.min_value());
            hi = std::max(hi, xi.max_value());
            hit_one += xi.max_value() == 1;
            ++total;
        }
    }
    o.pass = lo >= 0 && hi <= 1;
    o.detail = std::to_string(total) + " curves, min " + std::to_string(lo) + ", max " + std::to_string(hi) +
               ", " + std::to_string(hit_one) + " reach 1";
    return o;
}

Outcome finite_rank_bound()
{
    Outcome o;
    Engine engine(stream("finite-rank"));
    Index failed = 0, at_rank = 0;
    for (int i = 0; i < 500; ++i)
    {
        const Index n = uniform_index(engine, 6, 64);
        const Index rank = uniform_index(engine, 1, 5);
        const SymmetricOperatord h0 = gaussian_operator(n, engine);
        const auto b = RankNPerturbation::random(n, rank, engine, 1e-2, 10.0);
        const RankBoundReport r = rank_bound_report(h0, b);
        failed += r.pass ? 0 : 1;
        at_rank += r.sup == r.rank;
    }
    o.pass = failed == 0;
    o.detail = std::to_string(failed) + " of 500 failed; sup equals rank in " + std::to_string(at_rank);
    return o;
}

Outcome krein_trace_formula()
{
    Outcome o;
    Engine engine(stream("krein"));
    double worst_residual = 0, worst_normalization = 0;
    for (Index i = 0; i < 200; ++i)
    {
        const Index n = 1 + i;
        const SymmetricOperatord h0 = gaussian_operator(n, engine);
        const SymmetricOperatord v = gaussian_operator(n, engine, 0.5);
        const SymmetricOperatord h1 = h0 + v;
        const Spectrumd s0 = eigen_decompose(h0, false);
        const Spectrumd s1 = eigen_decompose(h1, false);
        const double scale = std::max({1.0, s0.values.cwiseAbs().maxCoeff(), s1.values.cwiseAbs().maxCoeff()});
        const double lo = std::min(s0.values[0], s1.values[0]);
        const double hi = std::max(s0.values[n - 1], s1.values[n - 1]);
        const TestFunction f = TestFunction::for_range(lo - 0.5, hi + 0.5);
        const double r = trace_formula_residual(s0, s1, f) / (static_cast<double>(n) * scale);
        // xi = N0 - N1 integrates to Tr(H1 - H0)
        const double k = std::abs(ssf_from_spectra(s0, s1).integral() - v.trace()) / (static_cast<double>(n) * scale);
        worst_residual = std::max(worst_residual, r);
        worst_normalization = std::max(worst_normalization, k);
    }
    o.pass = worst_residual <= 1e-10 && worst_normalization <= 1e-9;
    o.detail = "worst residual / (n scale) " + format_number(worst_residual) + ", normalization " +
               format_number(worst_normalization);
    return o;
}

Outcome birman_solomyak()
{
    Outcome o;
    const ModelSpec m = anderson(1, 40);
    const Index j = m.geometry.center();
    const Eigen::VectorXd v = site_profile_weight(m.geometry, m.profile, m.coupling, j);
    const EnergyInterval window{1.75, 2.25};
    const double tol = 1e-4, limit = std::max(1e-6, tol);
    const std::uint64_t seed = stream("birman-solomyak");
    double worst = 0;
    Index failed = 0, nonzero = 0;
    for (Index i = 0; i < 50; ++i)
    {
        const DisorderSample s =
            with_site_coupling(sample_disorder(m.disorder, m.geometry, seed, static_cast<std::uint64_t>(i)), j, 0.0);
        try
        {
            const auto r = birman_solomyak_residual(assemble_hamiltonian(m, s), v, window, tol);
            worst = std::max(worst, r.residual);
            failed += r.residual <= limit ? 0 : 1;
            nonzero += r.rhs != 0.0;
        }
        catch (const QuadratureError& e)
        {
            ++failed;
        }
    }
    o.pass = failed == 0;
    o.detail = "worst residual " + format_number(worst) + ", " + std::to_string(failed) + " failed, " +
               std::to_string(nonzero) + " with nonzero SSF mass in the window";
    return o;
}

Outcome wegner_linearity()
{
    Outcome o;
    const std::vector<double> eps{0.02, 0.05, 0.1, 0.2};
    double slope[2];
    const Index sides[2] = {200, 400};
    for (int k = 0; k < 2; ++k)
    {
        const auto r = wegner_scan(anderson(1, sides[k]), 2.0, eps, plan(500, "wegner-" + std::to_string(sides[k])),
                                   cache().provider());
        slope[k] = r.slope;
        o.pass = o.pass && r.max_relative_residual <= 0.1;
        o.detail += "L=" + std::to_string(sides[k]) + ": C_W " + format_number(r.slope) + ", residual " +
                    format_number(r.max_relative_residual) + "; ";
    }
    const double ratio = slope[0] / slope[1];
    o.pass = o.pass && ratio >= 0.5 && ratio <= 2.0;
    o.detail += "ratio " + format_number(ratio);
    return o;
}

Outcome averaged_ssf_bound()
{
    Outcome o;
    const auto a = expected_ssf_bins(anderson(1, 128), plan(300, "ssf-128", 0, 5, 10), cache().provider());
    const auto b = expected_ssf_bins(anderson(1, 256), plan(300, "ssf-256", 0, 5, 10), cache().provider());
    const double lo = std::min(a.mean.minCoeff(), b.mean.minCoeff());
    const double hi = std::max(a.mean.maxCoeff(), b.mean.maxCoeff());
    double worst = 0;
    for (Index k = 0; k < a.mean.size(); ++k)
    {
        const double band = 3.0 * std::hypot(a.stderr_[k], b.stderr_[k]);
        const double gap = std::abs(a.mean[k] - b.mean[k]);
        worst = std::max(worst, band > 0 ? gap / band : (gap > 0 ? INFINITY : 0.0));
    }
    o.pass = lo >= 0 && hi <= 1 && worst <= 1.0;
    o.detail = "means in [" + format_number(lo) + ", " + format_number(hi) + "], worst L=128/256 gap " +
               format_number(worst) + " of the 3 stderr band";
    return o;
}

Outcome dos_ssf_identity()
{
    Outcome o;
    const ModelSpec m = anderson(1, 256);
    const auto r = dos_ssf_identity_report(m, plan(200, "identity", 0, 5, 20));
    const double fraction = r.fraction_within(3.0);
    const double n = static_cast<double>(m.geometry.site_count());
    o.pass = r.paired && fraction >= 0.9 && r.max_kappa_dos_gap <= 1e-10 * n;
    o.detail = "fraction within 3 stderr " + format_number(fraction) + ", max |kappa - nu| " +
               format_number(r.max_kappa_dos_gap) + ", Krein error " + format_number(r.max_krein_error);
    return o;
}

Outcome measure_comparison()
{
    Outcome o;
    ModelSpec m = anderson(1, 128);
    m.profile = SiteProfile({{0, 0, 0}, {1, 0, 0}}, {1.0, 0.5});
    const auto k = kappa_bins(m, plan(100, "plateau", 0, 6, 24));
    o.pass = k.c0 == 1.5 && k.bounded;
    o.detail = "c0 " + format_number(k.c0) + ", worst excess " + format_number(k.worst_excess) +
               " (rounding allowance " + format_number(k.slack) + ")";
    return o;
}

Outcome thermodynamic_error()
{
    const std::vector<Index> sizes{16, 32, 64};
    const auto r = thermo_error_scan(anderson(1, 16), sizes, 4, {1.5, 2.5}, {1.0}, plan(300, "thermo"));
    Outcome e = trend("error", sizes, r.error, r.error_stderr);
    const Outcome l = trend("laplace t=1", sizes, r.laplace.col(0), r.laplace_stderr.col(0));
    return {e.pass && l.pass, e.detail + "; " + l.detail};
}

Outcome ssd_limit()
{
    const std::vector<Index> sizes{32, 64, 128};
    const auto r = ssd_scan(anderson(1, 32), sizes, 512, plan(100, "ssd", -0.5, 5.5, 200), cache().provider());
    return trend("sup gap", sizes, r.sup_gap, r.sup_gap_stderr);
}

Outcome translation_covariance()
{
    Outcome o;
    Engine engine(stream("translation"));
    Index failed = 0;
    double worst = 0;
    for (Index i = 0; i < 100; ++i)
    {
        const bool planar = i % 2 == 1;
        ModelSpec m = planar ? anderson(2, uniform_index(engine, 4, 8)) : anderson(1, uniform_index(engine, 8, 48));
        if (!planar)
            m.profile = SiteProfile({{0, 0, 0}, {1, 0, 0}, {3, 0, 0}}, {1.0, 0.5, 0.25});
        const Index side = m.geometry.side_length();
        const DisorderSample s = sample_disorder(m.disorder, m.geometry, stream("translation-samples"),
                                                 static_cast<std::uint64_t>(i));
        const Index j = uniform_index(engine, 0, m.geometry.site_count() - 1);
        const MultiIndex shift{uniform_index(engine, -side, side), planar ? uniform_index(engine, -side, side) : 0, 0};

        const SSFCurve a = single_site_ssf(m, s, j);
        const SSFCurve b = single_site_ssf(m, translate_sample(s, shift), m.geometry.shifted(j, shift));
        bool same = a.values() == b.values() && a.breakpoints().size() == b.breakpoints().size();
        for (std::size_t k = 0; same && k < a.breakpoints().size(); ++k)
        {
            const double gap = std::abs(a.breakpoints()[k] - b.breakpoints()[k]);
            worst = std::max(worst, gap);
            same = gap <= 1e-9;
        }
        failed += same ? 0 : 1;
    }
    o.pass = failed == 0;
    o.detail = std::to_string(failed) + " of 100 differ, worst breakpoint gap " + format_number(worst);
    return o;
}

Outcome spectral_averaging()
{
    Outcome o;
    Engine engine(stream("spectral-averaging"));
    const double tol = 1e-4;
    Index failed = 0;
    double worst = -INFINITY, largest_norm = 0;
    for (int i = 0; i < 100; ++i)
    {
        const Index n = uniform_index(engine, 12, 20);
        const SymmetricOperatord h0 = gaussian_operator(n, engine);
        const auto b = RankNPerturbation::random(n, uniform_index(engine, 1, 3), engine, 1e-2, 1.0);
        largest_norm = std::max(largest_norm, b.norm());
        Eigen::VectorXd phi(n);
        for (Index k = 0; k < n; ++k)
            phi[k] = 2.0 * uniform01(engine) - 1.0;
        phi.normalize();
        const Spectrumd spec = eigen_decompose(h0, false);
        const double width = 0.02 + 0.98 * uniform01(engine);
        const double centre = spec.values[0] + (spec.values[n - 1] + 1.0 - spec.values[0]) * uniform01(engine);
        const EnergyInterval window{centre - width / 2, centre + width / 2};
        const double bound = std::min((b.sqrt_matrix() * phi).squaredNorm(), window.length());
        try
        {
            const double value = spectral_averaging_value(h0, b, phi, window, tol);
            worst = std::max(worst, value - bound);
            failed += value <= bound + tol ? 0 : 1;
        }
        catch (const QuadratureError&)
        {
            ++failed;
        }
    }
    o.pass = failed == 0 && largest_norm <= 1.0;
    o.detail = std::to_string(failed) + " of 100 failed, worst value - bound " + format_number(worst) +
               ", largest |B| " + format_number(largest_norm);
    return o;
}

} // namespace

int main()
{
    struct Criterion
    {
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"C1 rank-one SSF bound", 120, rank_one_bound},
        {"C2 finite-rank SSF bound", 120, finite_rank_bound},
        {"C3 Krein trace formula", 60, krein_trace_formula},
        {"C4 Birman-Solomyak identity", 300, birman_solomyak},
        {"C5 Wegner linearity", 600, wegner_linearity},
        {"C6 averaged SSF bound", 600, averaged_ssf_bound},
        {"C7 DOS-SSF identity", 900, dos_ssf_identity},
        {"C8 deterministic measure comparison", 120, measure_comparison},
        {"C9 thermodynamic error decay", 900, thermodynamic_error},
        {"C10 spectral shift density limit", 1200, ssd_limit},
        {"C11 translation covariance", 60, translation_covariance},
        {"C12 spectral averaging bound", 180, spectral_averaging},
    };

    int failures = 0;
    for (const auto& c : criteria)
    {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::cout << (pass ? "PASS " : "FAIL ") << c.name << " [" << format_number(std::round(seconds * 100) / 100)
                  << " s of " << c.limit_seconds << " s" << (in_time ? "" : ", over limit") << "] " << o.detail
                  << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
