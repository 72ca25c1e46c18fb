#include "ssflab/eig.hpp"
#include "ssflab/models.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace ssflab;

namespace
{

template <typename Scalar>
SymmetricOperator<Scalar> diagonal(std::initializer_list<double> d)
{
    SymmetricOperator<Scalar> op(static_cast<Index>(d.size()));
    Index k = 0;
    for (double x : d)
        op.coeff_ref(k, k) = static_cast<Scalar>(x), ++k;
    return op;
}

Spectrumd spectrum(std::vector<double> values)
{
    Spectrumd s;
    s.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
    return s;
}

SymmetricOperatord random_symmetric(Index n, std::uint64_t seed)
{
    Engine engine(seed);
    std::normal_distribution<double> g;
    SymmetricOperatord op(n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j)
            op.coeff_ref(i, j) = g(engine);
    return op;
}

} // namespace

TEST_CASE("packed symmetric storage")
{
    Eigen::Matrix3d m;
    m << 1, 2, 3, 2, 4, 5, 3, 5, 6;
    const auto op = SymmetricOperatord::from_dense(m, 9);
    CHECK(op.dense() == m);
    CHECK(op(0, 2) == op(2, 0));
    CHECK(op.trace() == 11);
    CHECK(op.tag() == 9);
    CHECK(op.max_abs() == 6);
    CHECK(op.packed().size() == 6);

    auto sum = op + op;
    CHECK(sum.dense() == 2 * m);
    sum -= op;
    CHECK(sum == op);
    CHECK(op.cast<long double>().cast<double>() == op);
}

TEST_CASE_TEMPLATE("worked spectra", Scalar, double, long double)
{
    const auto s = eigen_decompose(diagonal<Scalar>({3, 1, 2}), true);
    CHECK(static_cast<double>(s.values[0]) == 1);
    CHECK(static_cast<double>(s.values[1]) == 2);
    CHECK(static_cast<double>(s.values[2]) == 3);

    const auto free = build_free_hamiltonian(BoxGeometry(1, 4), {}).template cast<Scalar>();
    const auto f = eigen_decompose(free, true);
    const double expect[] = {0, 2, 2, 4};
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(static_cast<double>(f.values[k]) - expect[k]) < 1e-12);
    CHECK(static_cast<double>(max_relative_residual(free, f)) < 1e-12);
}

TEST_CASE("trace preservation and residuals on random operators")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        const Index n = 5 + static_cast<Index>(seed) * 9;
        const auto h = random_symmetric(n, seed);
        const auto s = eigen_decompose(h, true);
        const double scale = std::max(1.0, h.max_abs());
        CHECK(std::abs(s.values.sum() - h.trace()) <= 1e-9 * n * scale);
        CHECK(max_relative_residual(h, s) <= 1e-10 * n);
        for (Index k = 1; k < n; ++k)
            CHECK(s.values[k - 1] <= s.values[k]);
        const Eigen::MatrixXd v = s.eigenvectors();
        CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("eigenvectors on request only")
{
    const auto s = eigen_decompose(diagonal<double>({1, 2}), false);
    CHECK_FALSE(s.has_vectors());
    CHECK_THROWS_AS(s.eigenvectors(), std::logic_error);
}

TEST_CASE("non-finite entries are rejected")
{
    auto h = diagonal<double>({1, 2});
    h.coeff_ref(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(eigen_decompose(h, false), EigenError);
}

TEST_CASE("counting")
{
    const auto s = spectrum({0, 3, 3});
    CHECK(counting(s, 1.0) == 1);
    CHECK(counting(s, 3.0) == 3);
    CHECK(counting(s, -0.1) == 0);
    CHECK(count_in(s, {2.5, 3.5}) == 2);
    CHECK(count_in(s, {0, 4}) == 3);
    CHECK(count_in(s, {0, 3}) == 1);
    CHECK(count_in(s, {-1, 1}) + count_in(s, {1, 5}) == count_in(s, {-1, 5}));
    CHECK_THROWS_AS(EnergyInterval(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("weighted projector traces")
{
    const auto h = build_free_hamiltonian(BoxGeometry(2, 4), PeriodicPotential::constant(0.3));
    const auto s = eigen_decompose(h, true);
    const Index n = h.size();
    const EnergyInterval window{1.0, 4.5};

    CHECK(weighted_projector_trace(s, Eigen::VectorXd::Ones(n), window) ==
          doctest::Approx(static_cast<double>(count_in(s, window))));

    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    delta[5] = 1.0;
    CHECK(weighted_projector_trace(s, delta, {-1, 20}) == doctest::Approx(1.0));
    CHECK(weighted_projector_trace(s, delta, {1.0, 2.0}) <= weighted_projector_trace(s, delta, {0.5, 3.0}) + 1e-15);

    Eigen::VectorXd negative = delta;
    negative[0] = -1;
    CHECK_THROWS_AS(weighted_projector_trace(s, negative, window), std::invalid_argument);
}

TEST_CASE("weighted heat traces")
{
    const auto s = eigen_decompose(diagonal<double>({0, 1}), true);
    CHECK(weighted_heat_trace(s, Eigen::Vector2d(1, 1), 1.0) == doctest::Approx(1 + std::exp(-1.0)));

    const auto z = eigen_decompose(SymmetricOperatord(4), true);
    CHECK(weighted_heat_trace(z, Eigen::VectorXd::Ones(4), 2.0) == doctest::Approx(4));

    const auto pd = eigen_decompose(build_free_hamiltonian(BoxGeometry(1, 6), PeriodicPotential::constant(0.5)), true);
    double previous = std::numeric_limits<double>::infinity();
    for (double t : {1.0, 2.0, 4.0, 8.0, 16.0, 64.0})
    {
        const double v = weighted_heat_trace(pd, Eigen::VectorXd::Ones(6), t);
        CHECK(v < previous);
        previous = v;
    }
    CHECK(previous < 1e-12);
    CHECK_THROWS_AS(weighted_heat_trace(pd, Eigen::VectorXd::Ones(6), 0.0), std::invalid_argument);
}
