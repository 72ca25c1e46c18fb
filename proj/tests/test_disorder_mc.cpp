#include "ssflab/mc.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

using namespace ssflab;

namespace
{

ModelSpec chain(Index side)
{
    ModelSpec m;
    m.geometry = BoxGeometry(1, side);
    return m;
}

McPlan plan(Index m, std::uint64_t seed, double lo = 0, double hi = 5, Index bins = 10)
{
    McPlan p;
    p.realizations = m;
    p.seed = seed;
    p.bins = BinGrid::offset(lo, hi, bins);
    return p;
}

ModelSpec zero_disorder(Index side)
{
    ModelSpec m = chain(side);
    m.disorder = DisorderDistribution::piecewise({0.0, 1e-300}, {1.0});
    return m;
}

} // namespace

TEST_CASE("seed derivation")
{
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    McPlan p = plan(3, 9);
    CHECK(p.tagged("a").seed != p.tagged("b").seed);
    CHECK(p.tagged("a").seed == p.tagged("a").seed);
}

TEST_CASE("bin grid")
{
    const BinGrid g = BinGrid::offset(0, 5, 10);
    CHECK(g.lo == doctest::Approx(bin_edge_offset));
    CHECK(g.width() == doctest::Approx(0.5));
    CHECK(g.edge(10) == doctest::Approx(g.hi));
    CHECK_THROWS(BinGrid({1, 0, 3}).validate());
    CHECK_THROWS(BinGrid({0, 1, 0}).validate());
}

TEST_CASE("realization engine")
{
    SUBCASE("constant kernel")
    {
        const auto a = run_realizations(chain(5), plan(17, 1), [](const DisorderSample&) {
            return Eigen::VectorXd::Constant(2, 3.5);
        });
        CHECK(a.mean[0] == 3.5);
        CHECK(a.stderr_[1] == 0.0);
        CHECK(a.min[0] == 3.5);
        CHECK(a.max[0] == 3.5);
        CHECK(a.realizations == 17);
    }
    SUBCASE("U[0,1] first coupling")
    {
        const auto a = run_realizations(chain(3), plan(100000, 5), [](const DisorderSample& s) {
            return Eigen::VectorXd::Constant(1, s.coupling(0));
        });
        CHECK(std::abs(a.mean[0] - 0.5) <= 3 * a.stderr_[0]);
        CHECK(a.stderr_[0] == doctest::Approx(std::sqrt(1.0 / 12 / 100000)).epsilon(0.02));
        CHECK(a.min[0] >= 0);
        CHECK(a.max[0] < 1);
    }
    SUBCASE("worker count does not change bits")
    {
        McPlan p = plan(64, 3);
        const ModelSpec m = chain(24);
        p.workers = 1;
        const auto a = dos_bins(m, p);
        p.workers = 8;
        const auto b = dos_bins(m, p);
        CHECK(a.mean == b.mean);
        CHECK(a.stderr_ == b.stderr_);
    }
    SUBCASE("kernel failures report the realization")
    {
        try
        {
            run_realizations(chain(3), plan(10, 4), [](const DisorderSample& s) -> Eigen::VectorXd {
                if (s.provenance().index == 6)
                    throw std::runtime_error("boom");
                return Eigen::VectorXd::Zero(1);
            });
            FAIL("expected a RealizationError");
        }
        catch (const RealizationError& e)
        {
            CHECK(e.index == 6);
            CHECK(e.seed == derive_seed(4, 6));
        }
    }
}

TEST_CASE("Wegner scan")
{
    SUBCASE("zero disorder, E0 in a gap")
    {
        // the free L=4 chain has eigenvalues {0, 2, 2, 4}
        const auto r = wegner_scan(zero_disorder(4), 1.0, {0.05, 0.1}, plan(5, 1));
        CHECK(r.count_per_site.isZero());
        CHECK(r.probability.isZero());
    }
    SUBCASE("pointwise inequalities and determinism")
    {
        const auto r = wegner_scan(chain(60), 2.0, {0.02, 0.05, 0.1, 0.2}, plan(50, 7));
        CHECK(r.indicator_bounded);
        CHECK(r.monotone);
        for (Index i = 0; i < 4; ++i)
            CHECK(r.probability[i] <= r.count_per_site[i] * 60 + 1e-12);
        CHECK(r.slope > 0);
        const auto again = wegner_scan(chain(60), 2.0, {0.02, 0.05, 0.1, 0.2}, plan(50, 7));
        CHECK(again.count_per_site == r.count_per_site);
        CHECK(r.to_table().rows.size() == 4);
    }
    CHECK_THROWS_AS(wegner_scan(chain(8), 2.0, {1.5}, plan(2, 1)), std::invalid_argument);
}

TEST_CASE("expected ssf and dos bins")
{
    const ModelSpec m = chain(32);
    SUBCASE("bound and Krein normalization")
    {
        const McPlan p = plan(40, 2, -1, 6, 28);
        const auto e = expected_ssf_bins(m, p);
        CHECK(e.mean.minCoeff() >= 0);
        CHECK(e.mean.maxCoeff() <= 1);
        CHECK(e.mean.sum() * p.bins.width() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("M = 1 matches the exact curve")
    {
        const McPlan p = plan(1, 8);
        const auto e = expected_ssf_bins(m, p);
        const auto s = sample_disorder(m.disorder, m.geometry, 8, 0);
        const SSFCurve xi = single_site_ssf(m, s, m.geometry.center());
        const Eigen::VectorXd exact = bin_averages(xi, p.bins.lo, p.bins.width(), p.bins.count);
        CHECK((e.mean - exact).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("dos of the free chain")
    {
        const McPlan p = plan(3, 1, -0.5, 4.5, 5);
        const auto d = dos_bins(zero_disorder(4), p);
        // eigenvalues {0, 2, 2, 4}; one per site per unit width
        CHECK(d.mean[0] == doctest::Approx(0.25));
        CHECK(d.mean[2] == doctest::Approx(0.5));
        CHECK(d.mean[4] == doctest::Approx(0.25));
        CHECK(d.mean.sum() * p.bins.width() == doctest::Approx(1.0));
    }
}

TEST_CASE("kappa measure")
{
    SUBCASE("delta profile equals dos")
    {
        const McPlan p = plan(10, 4);
        const ModelSpec m = chain(30);
        const auto k = kappa_bins(m, p);
        CHECK((k.kappa.mean - dos_bins(m, p).mean).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(k.c0 == 1.0);
        CHECK(k.bounded);
    }
    SUBCASE("plateau profile is bounded by 1.5 dos")
    {
        ModelSpec m = chain(40);
        m.profile = SiteProfile({{0, 0, 0}, {1, 0, 0}}, {1.0, 0.5});
        const auto k = kappa_bins(m, plan(10, 9, 0, 6, 24));
        CHECK(k.c0 == doctest::Approx(1.5));
        CHECK(k.bounded);
        CHECK(k.worst_excess <= k.slack);
    }
    SUBCASE("full box indicator gives c0 times dos")
    {
        ModelSpec m = chain(5);
        std::vector<MultiIndex> offsets;
        for (Index x = 0; x < 4; ++x)
            offsets.push_back({x, 0, 0});
        m.profile = SiteProfile(offsets, std::vector<double>(4, 1.0));
        const McPlan p = plan(4, 2, 0, 12, 12);
        const auto k = kappa_bins(m, p);
        CHECK((k.kappa.mean - 4.0 * dos_bins(m, p).mean).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("dos-ssf identity report")
{
    const McPlan p = plan(30, 12);
    const ModelSpec m = chain(48);
    const auto id = dos_ssf_identity_report(m, p);
    CHECK(id.paired);
    CHECK(id.max_kappa_dos_gap <= 1e-10 * 48);
    CHECK(id.max_krein_error <= 1e-9 * 48);
    CHECK(id.fraction_within(3.0) >= 0.8);
    CHECK(id.to_table().rows.size() == 10);

    const auto split = dos_ssf_identity_report(expected_ssf_bins(m, p), kappa_bins(m, p).kappa, dos_bins(m, p));
    CHECK(!split.paired);
    CHECK((split.ssf_mass - id.ssf_mass).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS(dos_ssf_identity_report(expected_ssf_bins(m, plan(30, 13)), kappa_bins(m, p).kappa, dos_bins(m, p)));
}

TEST_CASE("thermodynamic error scan")
{
    const ModelSpec m = chain(16);
    const auto same = thermo_error_scan(m, {8, 12}, 1, {1.5, 2.5}, {1.0}, plan(5, 3));
    CHECK(same.error.isZero());
    CHECK(same.laplace.isZero());

    const auto r = thermo_error_scan(m, {8, 16}, 3, {1.5, 2.5}, {0.5, 1.0}, plan(20, 3));
    CHECK(r.laplace.rows() == 2);
    CHECK(r.laplace.cols() == 2);
    CHECK(r.to_table().rows.size() == 2);
    CHECK(std::isfinite(r.error[1]));
    CHECK_THROWS(thermo_error_scan(m, {8}, 0, {1.5, 2.5}, {1.0}, plan(5, 3)));
}

TEST_CASE("spectral shift density scan")
{
    SUBCASE("zero disorder")
    {
        const auto r = ssd_scan(zero_disorder(16), {8}, 16, plan(3, 1, -0.5, 4.5, 20));
        CHECK(r.curves.isZero());
        CHECK(r.reference.isZero());
    }
    SUBCASE("inner = outer is the same-box counting difference")
    {
        McPlan p = plan(8, 4, -0.5, 5.5, 30);
        const ModelSpec m = chain(24);
        const auto r = ssd_scan(m, {24}, 24, p);
        // identical realizations: xi/|box| per realization, averaged, against the reference from its own stream
        const Spectrumd free = eigen_decompose(build_free_hamiltonian(m.geometry, {}), false);
        Eigen::VectorXd expect = Eigen::VectorXd::Zero(r.energies.size());
        for (Index i = 0; i < 8; ++i)
        {
            const Spectrumd s = direct_eigenvalues(m, sample_disorder(m.disorder, m.geometry, 4, i));
            for (Index e = 0; e < r.energies.size(); ++e)
                expect[e] += static_cast<double>(counting(free, r.energies[e]) - counting(s, r.energies[e])) / 24.0 / 8;
        }
        CHECK((r.curves.col(0) - expect).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK_THROWS(ssd_scan(chain(8), {16}, 8, plan(2, 1)));

    SUBCASE("tables")
    {
        const auto r = ssd_scan(chain(8), {4, 8}, 16, plan(4, 2));
        CHECK(r.to_table().rows.size() == 2);
        CHECK(r.curves_table().columns.size() == 7);
    }
}

TEST_CASE("reports")
{
    Table t{"demo", {"x", "y"}, {}};
    t.add_row({0.1, 1e-300});
    t.add_row({1.0 / 3, -2});
    std::ostringstream os;
    write_csv(os, t);
    CHECK(os.str() == "x,y\n0.1,1e-300\n0.3333333333333333,-2\n");
    CHECK_THROWS(t.add_row({1.0}));

    const McPlan p = plan(3, 5);
    const auto j = nlohmann::json::parse(json_summary(t, "demo", 0xabc, &p));
    CHECK(j["experiment"] == "demo");
    CHECK(j["columns"].size() == 2);
    CHECK(j["rows"].size() == 2);
    CHECK(j["plan"]["realizations"] == 3);
    CHECK(j.contains("model_hash"));
}
