#include "ssflab/lab/selftest.hpp"

#include "ssflab/eig.hpp"
#include "ssflab/format.hpp"
#include "ssflab/lab/cache.hpp"
#include "ssflab/mc.hpp"
#include "ssflab/models.hpp"
#include "ssflab/ssf.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace ssflab::lab
{

namespace
{

using Check = std::function<bool()>;

bool close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol;
}

bool values_close(const Eigen::VectorXd& v, std::vector<double> expected, double tol)
{
    if (v.size() != static_cast<Index>(expected.size()))
        return false;
    for (Index k = 0; k < v.size(); ++k)
        if (!close(v[k], expected[static_cast<std::size_t>(k)], tol))
            return false;
    return true;
}

Spectrumd spectrum_of(std::vector<double> values)
{
    Spectrumd s;
    s.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
    return s;
}

SymmetricOperatord diagonal(std::vector<double> d)
{
    SymmetricOperatord op(static_cast<Index>(d.size()));
    for (std::size_t k = 0; k < d.size(); ++k)
        op.coeff_ref(static_cast<Index>(k), static_cast<Index>(k)) = d[k];
    return op;
}

ModelSpec model_1d(Index side)
{
    ModelSpec m;
    m.geometry = BoxGeometry(1, side);
    return m;
}

SiteProfile plateau()
{
    return SiteProfile({{0, 0, 0}, {1, 0, 0}}, {1.0, 0.5});
}

std::vector<std::pair<std::string, Check>> cases()
{
    std::vector<std::pair<std::string, Check>> c;

    c.emplace_back("free d=1 L=3 spectrum {0,3,3}", [] {
        const auto s = eigen_decompose(build_free_hamiltonian(BoxGeometry(1, 3), {}), false);
        return values_close(s.values, {0, 3, 3}, 1e-12);
    });
    c.emplace_back("free d=1 L=4 spectrum {0,2,2,4}", [] {
        const auto s = eigen_decompose(build_free_hamiltonian(BoxGeometry(1, 4), {}), false);
        return values_close(s.values, {0, 2, 2, 4}, 1e-12);
    });
    c.emplace_back("constant background shifts the spectrum", [] {
        const auto s = eigen_decompose(build_free_hamiltonian(BoxGeometry(1, 3), PeriodicPotential::constant(0.7)), false);
        return values_close(s.values, {0.7, 3.7, 3.7}, 1e-12);
    });
    c.emplace_back("sampling is deterministic", [] {
        const BoxGeometry g(2, 5);
        const auto a = sample_disorder(DisorderDistribution::uniform01(), g, 11, 3);
        const auto b = sample_disorder(DisorderDistribution::uniform01(), g, 11, 3);
        return a.couplings() == b.couplings();
    });
    c.emplace_back("zero disorder gives the free operator", [] {
        const ModelSpec m = model_1d(6);
        const DisorderSample s(m.geometry, Eigen::VectorXd::Zero(6), {});
        return assemble_hamiltonian(m, s).packed() == build_free_hamiltonian(m.geometry, m.background).packed();
    });
    c.emplace_back("plateau placement wraps", [] {
        ModelSpec m = model_1d(3);
        m.profile = plateau();
        Eigen::VectorXd w(3);
        w << 1, 0, 0;
        const Eigen::MatrixXd diff = assemble_hamiltonian(m, DisorderSample(m.geometry, w, {})).dense() -
                          build_free_hamiltonian(m.geometry, {}).dense();
        Eigen::MatrixXd expected = Eigen::Vector3d(1, 0.5, 0).asDiagonal();
        return (diff - expected).cwiseAbs().maxCoeff() == 0.0;
    });
    c.emplace_back("summed plateau profile is 1.5", [] {
        const auto s = sum_profile_potential(BoxGeometry(1, 8), plateau(), 1.0);
        return (s.array() - 1.5).abs().maxCoeff() < 1e-15;
    });
    c.emplace_back("translation by L is the identity", [] {
        const BoxGeometry g(1, 7);
        const auto s = sample_disorder(DisorderDistribution::uniform01(), g, 5, 0);
        return translate_sample(s, {7, 0, 0}).couplings() == s.couplings();
    });
    c.emplace_back("translation preserves the spectrum", [] {
        const ModelSpec m = [] { ModelSpec x; x.geometry = BoxGeometry(2, 5); return x; }();
        const auto s = sample_disorder(m.disorder, m.geometry, 9, 2);
        const auto a = eigen_decompose(assemble_hamiltonian(m, s), false);
        const auto b = eigen_decompose(assemble_hamiltonian(m, translate_sample(s, {2, 3, 0})), false);
        return (a.values - b.values).cwiseAbs().maxCoeff() <= 1e-9;
    });
    c.emplace_back("zero fill leaves the exterior empty", [] {
        const BoxGeometry inner(1, 4), outer(1, 10);
        const auto s = sample_disorder(DisorderDistribution::uniform01(), inner, 3, 1);
        const auto e = embed_sample(s, outer, FillRule::Zeros, DisorderDistribution::uniform01());
        return std::abs(e.couplings().sum() - s.couplings().sum()) < 1e-15;
    });
    c.emplace_back("diag(3,1,2) eigenvalues sorted", [] {
        return values_close(eigen_decompose(diagonal({3, 1, 2}), false).values, {1, 2, 3}, 0);
    });
    c.emplace_back("counting on {0,3,3}", [] {
        const auto s = spectrum_of({0, 3, 3});
        return counting(s, 1.0) == 1 && counting(s, 3.0) == 3 && counting(s, -1.0) == 0 &&
               count_in(s, {2.5, 3.5}) == 2 && count_in(s, {0, 4}) == 3;
    });
    c.emplace_back("heat trace of diag(0,1) at t=1", [] {
        const auto s = eigen_decompose(diagonal({0, 1}), true);
        return close(weighted_heat_trace(s, Eigen::Vector2d(1, 1), 1.0), 1 + std::exp(-1.0), 1e-14);
    });
    c.emplace_back("three-eigenvalue ssf example", [] {
        const auto xi = ssf_from_spectra(spectrum_of({0, 3, 3}), spectrum_of({0.5, 3, 3.5}));
        return xi(0.0) == 1 && xi(0.49) == 1 && xi(0.5) == 0 && xi(3.0) == 1 && xi(3.5) == 0 &&
               close(integrate(xi, {0, 4}), 1.0, 1e-15);
    });
    c.emplace_back("1x1 trace formula residual", [] {
        return trace_formula_residual(spectrum_of({0}), spectrum_of({1}), TestFunction(0.5, 0.3)) <= 1e-12;
    });
    c.emplace_back("1x1 birman-solomyak value 0.5", [] {
        Eigen::VectorXd v(1);
        v << 1.0;
        const auto r = birman_solomyak_residual(diagonal({0}), v, {-0.5, 0.5}, 1e-6);
        return close(r.lhs, 0.5, 1e-4) && close(r.rhs, 0.5, 1e-15);
    });
    c.emplace_back("1x1 spectral averaging value 0.25", [] {
        const RankNPerturbation b(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1));
        const double v = spectral_averaging_value(diagonal({0}), b, Eigen::VectorXd::Ones(1), {0, 0.25}, 1e-6);
        return close(v, 0.25, 1e-4);
    });
    c.emplace_back("zero perturbation passes the rank bound", [] {
        const RankNPerturbation b(Eigen::MatrixXd::Identity(4, 1), Eigen::VectorXd::Zero(1));
        const auto r = rank_bound_report(build_free_hamiltonian(BoxGeometry(1, 4), {}), b);
        return r.sup == 0 && r.min == 0 && r.pass;
    });
    c.emplace_back("constant kernel has zero stderr", [] {
        McPlan plan;
        plan.realizations = 20;
        plan.seed = 1;
        const auto a = run_realizations(model_1d(4), plan, [](const DisorderSample&) {
            return Eigen::VectorXd::Constant(1, 2.5);
        });
        return a.mean[0] == 2.5 && a.stderr_[0] == 0.0;
    });
    c.emplace_back("worker count does not change results", [] {
        McPlan plan;
        plan.realizations = 40;
        plan.seed = 7;
        plan.bins = BinGrid::offset(0, 5, 10);
        const ModelSpec m = model_1d(8);
        plan.workers = 1;
        const auto a = dos_bins(m, plan);
        plan.workers = 4;
        const auto b = dos_bins(m, plan);
        return a.mean == b.mean && a.stderr_ == b.stderr_;
    });
    c.emplace_back("delta profile kappa equals dos", [] {
        McPlan plan;
        plan.realizations = 5;
        plan.seed = 3;
        plan.bins = BinGrid::offset(0, 5, 10);
        const ModelSpec m = model_1d(16);
        return (kappa_bins(m, plan).kappa.mean - dos_bins(m, plan).mean).cwiseAbs().maxCoeff() <= 1e-12;
    });
    c.emplace_back("cache miss then hit is bitwise identical", [] {
        const auto dir = std::filesystem::temp_directory_path() / "ssf-lab-selftest-cache";
        std::filesystem::remove_all(dir);
        SpectrumCache cache(dir, true, [](const std::string&) {});
        const ModelSpec m = model_1d(12);
        const auto s = sample_disorder(m.disorder, m.geometry, 1, 0);
        const auto provider = cache.provider();
        const auto a = provider(m, s);
        const auto b = provider(m, s);
        const bool ok = cache.misses() == 1 && cache.hits() == 1 && a.values == b.values;
        std::filesystem::remove_all(dir);
        return ok;
    });
    c.emplace_back("truncated cache file is recomputed", [] {
        const auto dir = std::filesystem::temp_directory_path() / "ssf-lab-selftest-cache";
        std::filesystem::remove_all(dir);
        SpectrumCache cache(dir, true, [](const std::string&) {});
        const CacheKey key{42};
        cache.get_or_compute(key, [] { return std::vector<double>{1, 2, 3}; });
        std::filesystem::resize_file(cache.file_for(key), 20);
        const auto v = cache.get_or_compute(key, [] { return std::vector<double>{1, 2, 3}; });
        const bool ok = cache.corrupt() == 1 && v == std::vector<double>{1, 2, 3} &&
                        read_eigenvalue_file(cache.file_for(key)).has_value();
        std::filesystem::remove_all(dir);
        return ok;
    });
    return c;
}

} // namespace

int run_selftest(std::ostream& out)
{
    int failed = 0;
    for (const auto& [name, check] : cases())
    {
        bool pass = false;
        std::string note;
        try
        {
            pass = check();
        }
        catch (const std::exception& e)
        {
            note = std::string(" (") + e.what() + ")";
        }
        out << (pass ? "PASS " : "FAIL ") << name << note << '\n';
        failed += pass ? 0 : 1;
    }
    out << (failed == 0 ? "all selftests passed" : std::to_string(failed) + " selftest(s) failed") << '\n';
    return failed == 0 ? 0 : 2;
}

} // namespace ssflab::lab
