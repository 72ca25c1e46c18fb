#include "ssflab/lab/experiments.hpp"

#include "ssflab/format.hpp"
#include "ssflab/ssf.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef SSFLAB_VERSION
#define SSFLAB_VERSION "0.0.0"
#endif

namespace ssflab::lab
{

namespace
{

namespace fs = std::filesystem;

/// Evaluates body(i) for i in [0, count) on `workers` threads; results by index.
template <typename T, typename F>
std::vector<T> parallel_map(Index count, unsigned workers, F&& body)
{
    std::vector<T> out(static_cast<std::size_t>(count));
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<Index>(workers, std::max<Index>(count, 1)));
    std::atomic<Index> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto loop = [&] {
        for (Index i = next++; i < count; i = next++)
        {
            try
            {
                out[static_cast<std::size_t>(i)] = body(i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back(loop);
    loop();
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

/// |v[k+1]| <= |v[k]| + k_sigma * hypot(se[k], se[k+1]) for consecutive entries.
CheckResult nonincreasing_check(const std::string& name,
                                const std::vector<Index>& sizes,
                                const Eigen::VectorXd& v,
                                const Eigen::VectorXd& se,
                                double k_sigma)
{
    CheckResult c{name, true, ""};
    for (Index k = 0; k + 1 < v.size(); ++k)
    {
        const double allowed = std::abs(v[k]) + k_sigma * std::hypot(se[k], se[k + 1]);
        if (std::abs(v[k + 1]) > allowed)
        {
            c.pass = false;
            c.detail += "L=" + std::to_string(sizes[k + 1]) + ": " + format_number(std::abs(v[k + 1])) +
                        " > " + format_number(allowed) + "; ";
        }
    }
    if (c.pass)
        c.detail = "trend holds across " + std::to_string(v.size()) + " sizes";
    return c;
}

Index centre_site(const ModelSpec& model)
{
    return model.geometry.center();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

//---------------------------------------------------------------------------//

ExperimentResult wegner(const ExperimentConfig& c, const EigenvalueProvider& provider)
{
    const WegnerReport r = wegner_scan(c.model, c.wegner.e0, c.wegner.eps, c.plan, provider);
    ExperimentResult out{r.to_table(), {}, {}, {{"realizations", c.plan.seed}}};
    out.checks.push_back({"linear fit residual", r.max_relative_residual <= c.wegner.max_relative_residual,
                          "max relative residual " + format_number(r.max_relative_residual) +
                              " (limit " + format_number(c.wegner.max_relative_residual) +
                              "), slope " + format_number(r.slope)});
    out.checks.push_back({"indicator bounded by count", r.indicator_bounded, ""});
    out.checks.push_back({"counts monotone in eps", r.monotone, ""});
    return out;
}

ExperimentResult ssf_bound(const ExperimentConfig& c, const EigenvalueProvider& provider)
{
    const MeasureEstimate e = expected_ssf_bins(c.model, c.plan, provider);
    ExperimentResult out{e.to_table("ssf-bound"), {}, {}, {{"realizations", c.plan.seed}}};

    const double rank = static_cast<double>(c.model.profile.rank());
    const double tiny = 1e-12 * std::max(1.0, rank);
    const double lo = e.mean.minCoeff();
    const double hi = e.mean.maxCoeff();
    out.checks.push_back({"averaged ssf within [0, rank u]", lo >= -tiny && hi <= rank + tiny,
                          "bin means in [" + format_number(lo) + ", " + format_number(hi) +
                              "], rank " + format_number(rank)});

    // one plot-ready exact curve: realization 0 at the centre site
    const DisorderSample s0 = sample_disorder(c.model.disorder, c.model.geometry, c.plan.seed, 0);
    const SSFCurve xi = single_site_ssf(c.model, s0, centre_site(c.model), provider);
    Table curve{"ssf_curve", {"breakpoint_energy", "value_right_of_breakpoint"}, {}};
    for (std::size_t k = 0; k < xi.breakpoints().size(); ++k)
        curve.add_row({xi.breakpoints()[k], static_cast<double>(xi.values()[k + 1])});
    out.extra_tables.push_back(std::move(curve));
    return out;
}

ExperimentResult dos_vs_ssf(const ExperimentConfig& c)
{
    const IdentityReport id = dos_ssf_identity_report(c.model, c.plan);
    const KappaEstimate kap = kappa_bins(c.model, c.plan);
    ExperimentResult out{id.to_table(), {}, {}, {{"realizations", c.plan.seed}}};

    const double frac = id.fraction_within(3.0);
    out.checks.push_back({"ssf vs kappa within 3 stderr on >= 90% of bins", frac >= 0.9,
                          "fraction " + format_number(frac)});
    const double n = static_cast<double>(c.model.geometry.site_count());
    if (c.model.profile.rank() == 1)
        out.checks.push_back({"kappa equals dos per realization", id.max_kappa_dos_gap <= 1e-10 * n,
                              "max gap " + format_number(id.max_kappa_dos_gap)});
    out.checks.push_back({"kappa <= c0 * dos per realization", kap.bounded,
                          "c0 " + format_number(kap.c0) + ", worst excess " +
                              format_number(kap.worst_excess) + ", slack " + format_number(kap.slack)});
    out.checks.push_back({"krein normalization per realization",
                          id.max_krein_error <= 1e-9 * n * std::max(1.0, c.model.profile.sup()),
                          "max error " + format_number(id.max_krein_error)});

    Table kt = kap.kappa.to_table("dos-vs-ssf_kappa");
    out.extra_tables.push_back(std::move(kt));
    return out;
}

ExperimentResult birman_solomyak(const ExperimentConfig& c)
{
    const auto& p = c.birman_solomyak;
    const McPlan tagged = c.plan.tagged("birman-solomyak");
    const Index j = centre_site(c.model);
    const EnergyInterval window{p.window_lo, p.window_hi};
    const Eigen::VectorXd v = site_profile_weight(c.model.geometry, c.model.profile, c.model.coupling, j);

    struct Row
    {
        double lhs = NAN, rhs = NAN, residual = NAN;
        Index nodes = 0;
        bool converged = true;
    };
    const auto rows = parallel_map<Row>(p.instances, c.plan.workers, [&](Index i) {
        const DisorderSample s =
            with_site_coupling(sample_disorder(c.model.disorder, c.model.geometry, tagged.seed, i), j, 0.0);
        const SymmetricOperatord h0 = assemble_hamiltonian(c.model, s);
        Row row;
        try
        {
            const auto r = birman_solomyak_residual(h0, v, window, p.tol, p.max_nodes);
            row = {r.lhs, r.rhs, r.residual, r.nodes, true};
        }
        catch (const QuadratureError& e)
        {
            row.lhs = e.last_estimate;
            row.nodes = e.nodes;
            row.converged = false;
        }
        return row;
    });

    ExperimentResult out{{"birman-solomyak", {"instance", "lhs", "rhs", "residual", "nodes"}, {}},
                         {},
                         {},
                         {{"instances", tagged.seed}}};
    const double limit = std::max(1e-6, p.tol);
    double worst = 0.0;
    Index failures = 0, unconverged = 0;
    for (Index i = 0; i < p.instances; ++i)
    {
        const Row& r = rows[static_cast<std::size_t>(i)];
        out.table.add_row({static_cast<double>(i), r.lhs, r.rhs, r.residual, static_cast<double>(r.nodes)});
        if (!r.converged)
            ++unconverged;
        else if (!(r.residual <= limit))
            ++failures;
        if (r.converged)
            worst = std::max(worst, r.residual);
    }
    out.checks.push_back({"residual <= max(1e-6, tol)", failures == 0 && unconverged == 0,
                          "worst residual " + format_number(worst) + ", " + std::to_string(failures) +
                              " over limit, " + std::to_string(unconverged) + " quadratures unconverged"});
    return out;
}

ExperimentResult rank_bound(const ExperimentConfig& c)
{
    const auto& p = c.rank_bound;
    const std::uint64_t h_seed = c.plan.tagged("rank-bound").seed;
    const std::uint64_t b_seed = c.plan.tagged("rank-bound-perturbation").seed;
    const Index n = c.model.geometry.site_count();

    const auto reports = parallel_map<RankBoundReport>(p.instances, c.plan.workers, [&](Index i) {
        const SymmetricOperatord h0 =
            assemble_hamiltonian(c.model, sample_disorder(c.model.disorder, c.model.geometry, h_seed, i));
        Engine engine(derive_seed(b_seed, static_cast<std::uint64_t>(i)));
        const Index rank = 1 + std::min<Index>(p.max_rank - 1,
                                               static_cast<Index>(uniform01(engine) * static_cast<double>(p.max_rank)));
        const auto b = RankNPerturbation::random(n, rank, engine, p.weight_lo, p.weight_hi);
        return rank_bound_report(h0, b);
    });

    ExperimentResult out{{"rank-bound", {"instance", "rank", "min", "sup", "pass"}, {}},
                         {},
                         {},
                         {{"operators", h_seed}, {"perturbations", b_seed}}};
    Index failed = 0;
    for (Index i = 0; i < p.instances; ++i)
    {
        const auto& r = reports[static_cast<std::size_t>(i)];
        out.table.add_row({static_cast<double>(i), static_cast<double>(r.rank), static_cast<double>(r.min),
                           static_cast<double>(r.sup), r.pass ? 1.0 : 0.0});
        failed += r.pass ? 0 : 1;
    }
    out.checks.push_back({"0 <= xi <= rank B", failed == 0,
                          std::to_string(failed) + " of " + std::to_string(p.instances) + " instances failed"});
    return out;
}

ExperimentResult thermo_limit(const ExperimentConfig& c)
{
    const auto& p = c.thermo;
    const ThermoReport r = thermo_error_scan(c.model, p.sizes, p.outer_factor, {p.window_lo, p.window_hi},
                                             p.times, c.plan);
    ExperimentResult out{r.to_table(), {}, {}, {{"realizations", c.plan.seed}}};
    out.checks.push_back(nonincreasing_check("error term nonincreasing within 2 stderr", r.sizes, r.error,
                                             r.error_stderr, 2.0));
    for (std::size_t t = 0; t < r.times.size(); ++t)
        out.checks.push_back(nonincreasing_check("laplace proxy t=" + format_number(r.times[t]) +
                                                     " decreasing within 2 stderr",
                                                 r.sizes, r.laplace.col(static_cast<Index>(t)),
                                                 r.laplace_stderr.col(static_cast<Index>(t)), 2.0));
    return out;
}

ExperimentResult ssd(const ExperimentConfig& c, const EigenvalueProvider& provider)
{
    const SsdReport r = ssd_scan(c.model, c.ssd.sizes, c.ssd.outer, c.plan, provider);
    ExperimentResult out{r.to_table(), {r.curves_table()}, {}, {{"realizations", c.plan.seed},
                                                               {"reference", c.plan.tagged("ssd-reference").seed}}};
    out.checks.push_back(
        nonincreasing_check("sup gap nonincreasing within 2 stderr", r.sizes, r.sup_gap, r.sup_gap_stderr, 2.0));
    return out;
}

ExperimentResult spectral_averaging(const ExperimentConfig& c)
{
    const auto& p = c.spectral_averaging;
    const std::uint64_t h_seed = c.plan.tagged("spectral-averaging").seed;
    const std::uint64_t b_seed = c.plan.tagged("spectral-averaging-perturbation").seed;
    const Index n = c.model.geometry.site_count();

    struct Row
    {
        double rank = 0, lo = 0, hi = 0, value = NAN, psi2 = 0, bound = 0;
        bool converged = true;
    };
    const auto rows = parallel_map<Row>(p.instances, c.plan.workers, [&](Index i) {
        const SymmetricOperatord h0 =
            assemble_hamiltonian(c.model, sample_disorder(c.model.disorder, c.model.geometry, h_seed, i));
        const Spectrumd spec = eigen_decompose(h0, false);
        Engine engine(derive_seed(b_seed, static_cast<std::uint64_t>(i)));
        const Index rank = 1 + std::min<Index>(p.max_rank - 1,
                                               static_cast<Index>(uniform01(engine) * static_cast<double>(p.max_rank)));
        const auto b = RankNPerturbation::random(n, rank, engine, 1e-2, 1.0);

        Eigen::VectorXd phi(n);
        for (Index k = 0; k < n; ++k)
            phi[k] = 2.0 * uniform01(engine) - 1.0;
        phi.normalize();

        const double width = 0.02 + 0.98 * uniform01(engine);
        const double lo_e = spec.values[0], hi_e = spec.values[n - 1] + 1.0;
        const double centre = lo_e + (hi_e - lo_e) * uniform01(engine);
        const EnergyInterval window{centre - width / 2, centre + width / 2};

        Row row;
        row.rank = static_cast<double>(rank);
        row.lo = window.a;
        row.hi = window.b;
        row.psi2 = (b.sqrt_matrix() * phi).squaredNorm();
        row.bound = std::min(row.psi2, window.length());
        try
        {
            row.value = spectral_averaging_value(h0, b, phi, window, p.tol, p.max_nodes);
        }
        catch (const QuadratureError& e)
        {
            row.value = e.last_estimate;
            row.converged = false;
        }
        return row;
    });

    ExperimentResult out{{"spectral-averaging",
                          {"instance", "rank", "window_lo", "window_hi", "value", "psi_norm_sq", "bound"},
                          {}},
                         {},
                         {},
                         {{"operators", h_seed}, {"perturbations", b_seed}}};
    Index failed = 0, unconverged = 0;
    for (Index i = 0; i < p.instances; ++i)
    {
        const Row& r = rows[static_cast<std::size_t>(i)];
        out.table.add_row({static_cast<double>(i), r.rank, r.lo, r.hi, r.value, r.psi2, r.bound});
        if (!r.converged)
            ++unconverged;
        else if (!(r.value <= r.bound + p.tol))
            ++failed;
    }
    out.checks.push_back({"value <= min(|psi|^2, |window|) + tol", failed == 0 && unconverged == 0,
                          std::to_string(failed) + " over bound, " + std::to_string(unconverged) +
                              " quadratures unconverged"});
    return out;
}

std::string hex64(std::uint64_t v)
{
    return CacheKey{v}.hex();
}

} // namespace

std::string library_version()
{
    return SSFLAB_VERSION;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const EigenvalueProvider& provider,
                                std::ostream& log)
{
    log << "running " << config.kind << " on " << config.model.geometry.canonical() << " with M="
        << config.plan.realizations << '\n';
    const std::string& k = config.kind;
    if (k == "wegner")
        return wegner(config, provider);
    if (k == "ssf-bound")
        return ssf_bound(config, provider);
    if (k == "dos-vs-ssf")
        return dos_vs_ssf(config);
    if (k == "birman-solomyak")
        return birman_solomyak(config);
    if (k == "rank-bound")
        return rank_bound(config);
    if (k == "thermo-limit")
        return thermo_limit(config);
    if (k == "ssd")
        return ssd(config, provider);
    if (k == "spectral-averaging")
        return spectral_averaging(config);
    throw ConfigError("experiment.kind: unknown experiment '" + k + "'");
}

int run_command(const std::string& config_path,
                const std::vector<std::string>& overrides,
                std::ostream& out,
                std::ostream& err)
{
    const auto start = std::chrono::steady_clock::now();
    try
    {
        ConfigDocument doc = parse_config_file(config_path);
        for (const auto& o : overrides)
            apply_override(doc, o);
        const ExperimentConfig config = build_config(doc);

        const fs::path dir = config.output_dir;
        fs::create_directories(dir);

        SpectrumCache cache(resolve_cache_dir(config.cache_dir), config.cache,
                            [&err](const std::string& msg) { err << "warning: " << msg << '\n'; });
        const EigenvalueProvider provider =
            config.cache ? cache.provider() : EigenvalueProvider(direct_eigenvalues);

        const ExperimentResult result = run_experiment(config, provider, out);

        std::vector<std::string> artifacts;
        auto emit_table = [&](const Table& t, bool with_json) {
            const std::string base = t.name;
            std::ostringstream csv;
            write_csv(csv, t);
            write_text(dir / (base + ".csv"), csv.str());
            artifacts.push_back(base + ".csv");
            if (with_json)
            {
                write_text(dir / (base + ".json"), json_summary(t, config.kind, config.model.hash(), &config.plan));
                artifacts.push_back(base + ".json");
            }
        };
        Table main = result.table;
        main.name = config.kind;
        emit_table(main, true);
        for (const auto& t : result.extra_tables)
            emit_table(t, false);

        bool all_pass = true;
        nlohmann::ordered_json checks = nlohmann::ordered_json::array();
        for (const auto& c : result.checks)
        {
            all_pass = all_pass && c.pass;
            checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
            out << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
        }

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        nlohmann::ordered_json seeds;
        seeds["master"] = config.plan.seed;
        for (const auto& [label, seed] : result.seeds)
            seeds[label] = seed;

        nlohmann::ordered_json manifest;
        manifest["experiment"] = config.kind;
        manifest["config_path"] = config_path;
        manifest["overrides"] = overrides;
        manifest["config"] = config.resolved_toml;
        manifest["model_canonical"] = config.model.canonical();
        manifest["model_hash"] = hex64(config.model.hash());
        manifest["plan"] = config.plan.canonical();
        manifest["seeds"] = seeds;
        manifest["versions"] = {{"ssf-lab", library_version()},
                                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                              std::to_string(EIGEN_MINOR_VERSION)},
                                {"compiler", __VERSION__},
                                {"cxx_standard", static_cast<long>(__cplusplus)}};
        manifest["cache"] = {{"enabled", config.cache},
                             {"directory", cache.directory().string()},
                             {"hits", cache.hits()},
                             {"misses", cache.misses()},
                             {"corrupt", cache.corrupt()}};
        manifest["checks"] = {{"requested", config.check}, {"all_pass", all_pass}, {"results", checks}};
        manifest["artifacts"] = artifacts;
        manifest["wall_time_seconds"] = wall;
        write_text(dir / "manifest.json", manifest.dump(2) + "\n");

        out << "wrote " << artifacts.size() + 1 << " files to " << dir.string() << " in "
            << format_number(std::round(wall * 1000) / 1000) << " s\n";
        if (config.check && !all_pass)
        {
            err << "error: requested checks failed\n";
            return 2;
        }
        return 0;
    }
    catch (const ConfigError& e)
    {
        err << "config error: " << e.what() << '\n';
        return 1;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace ssflab::lab
