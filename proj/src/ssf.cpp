#include "ssflab/ssf.hpp"

#include "ssflab/format.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <ostream>
#include <random>

namespace ssflab
{

SSFCurve::SSFCurve(std::vector<double> breakpoints, std::vector<long> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values))
{
    if (values_.size() != breakpoints_.size() + 1)
        throw std::invalid_argument("SSF curve needs one more value than breakpoints");
    if (values_.front() != 0 || values_.back() != 0)
        throw std::invalid_argument("SSF curve must vanish outside its breakpoints");
    for (std::size_t k = 1; k < breakpoints_.size(); ++k)
        if (!(breakpoints_[k - 1] < breakpoints_[k]))
            throw std::invalid_argument("SSF breakpoints must be strictly increasing");
}

long SSFCurve::operator()(double energy) const
{
    auto k = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), energy) -
             breakpoints_.begin();
    return values_[k];
}

long SSFCurve::max_value() const
{
    return *std::max_element(values_.begin(), values_.end());
}

long SSFCurve::min_value() const
{
    return *std::min_element(values_.begin(), values_.end());
}

double SSFCurve::integral() const
{
    double total = 0.0;
    for (std::size_t k = 1; k < breakpoints_.size(); ++k)
        if (values_[k] != 0)
            total += values_[k] * (breakpoints_[k] - breakpoints_[k - 1]);
    return total;
}

SSFCurve operator+(const SSFCurve& a, const SSFCurve& b)
{
    std::vector<double> merged;
    std::set_union(a.breakpoints().begin(), a.breakpoints().end(), b.breakpoints().begin(),
                   b.breakpoints().end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    std::vector<long> values{0};
    values.reserve(merged.size() + 1);
    for (double e : merged)
        values.push_back(a(e) + b(e));
    return SSFCurve(std::move(merged), std::move(values));
}

SSFCurve ssf_from_spectra(const Spectrumd& spec0, const Spectrumd& spec1)
{
    if (spec0.size() != spec1.size())
        throw std::invalid_argument("SSF needs spectra of equal dimension (" +
                                    std::to_string(spec0.size()) + " vs " +
                                    std::to_string(spec1.size()) + ")");
    const Eigen::Index n = spec0.size();
    const double* l0 = spec0.values.data();
    const double* l1 = spec1.values.data();

    std::vector<double> breakpoints;
    std::vector<long> values{0};
    breakpoints.reserve(2 * n);
    values.reserve(2 * n + 1);

    // Merge-walk both sorted spectra; equal eigenvalues share one breakpoint
    // whose jump is the multiplicity difference.
    Eigen::Index i = 0, j = 0;
    long xi = 0;
    while (i < n || j < n)
    {
        double e;
        if (j >= n || (i < n && l0[i] <= l1[j]))
            e = l0[i];
        else
            e = l1[j];
        while (i < n && l0[i] == e)
        {
            ++xi;
            ++i;
        }
        while (j < n && l1[j] == e)
        {
            --xi;
            ++j;
        }
        breakpoints.push_back(e);
        values.push_back(xi);
    }
    return SSFCurve(std::move(breakpoints), std::move(values));
}

double integrate(const SSFCurve& curve, const EnergyInterval& window)
{
    const auto& e = curve.breakpoints();
    const auto& c = curve.values();
    double total = 0.0;
    for (std::size_t k = 1; k < e.size(); ++k)
    {
        if (c[k] == 0)
            continue;
        const double lo = std::max(e[k - 1], window.a);
        const double hi = std::min(e[k], window.b);
        if (hi > lo)
            total += c[k] * (hi - lo);
    }
    return total;
}

Eigen::VectorXd bin_averages(const SSFCurve& curve, double lo, double width, Eigen::Index count)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(count);
    const auto& e = curve.breakpoints();
    const auto& c = curve.values();
    for (std::size_t k = 1; k < e.size(); ++k)
    {
        if (c[k] == 0)
            continue;
        // piece [e_{k-1}, e_k) touches bins first..last
        const auto first = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor((e[k - 1] - lo) / width)));
        const auto last = std::min<Eigen::Index>(count - 1, static_cast<Eigen::Index>(std::floor((e[k] - lo) / width)));
        for (Eigen::Index b = first; b <= last; ++b)
        {
            const double a0 = lo + b * width;
            const double a1 = lo + (b + 1) * width;
            const double overlap = std::min(e[k], a1) - std::max(e[k - 1], a0);
            if (overlap > 0)
                out[b] += c[k] * overlap;
        }
    }
    return out / width;
}

long sup_abs(const SSFCurve& curve)
{
    return std::max(std::abs(curve.max_value()), std::abs(curve.min_value()));
}

void write_ssf_csv(std::ostream& os, const SSFCurve& curve)
{
    os << "breakpoint_energy,value_right_of_breakpoint\n";
    for (std::size_t k = 0; k < curve.breakpoints().size(); ++k)
        os << format_number(curve.breakpoints()[k]) << ',' << curve.values()[k + 1] << '\n';
}

//---------------------------------------------------------------------------//

TestFunction::TestFunction(double c, double s) : center(c), width(s)
{
    if (!(s > 0))
        throw std::invalid_argument("test function width must be positive");
}

TestFunction TestFunction::for_range(double lo, double hi)
{
    return TestFunction(0.5 * (lo + hi), std::max(hi - lo, 1e-3) / 4.0);
}

double TestFunction::operator()(double e) const
{
    const double z = (e - center) / width;
    return std::exp(-0.5 * z * z) / (width * std::sqrt(2.0 * std::numbers::pi));
}

double TestFunction::derivative(double e) const
{
    return -(e - center) / (width * width) * (*this)(e);
}

double TestFunction::sup() const
{
    return 1.0 / (width * std::sqrt(2.0 * std::numbers::pi));
}

double TestFunction::derivative_l1_norm() const
{
    return std::sqrt(2.0 / std::numbers::pi) / width;
}

double trace_formula_residual(const Spectrumd& spec0, const Spectrumd& spec1, const TestFunction& f)
{
    const SSFCurve xi = ssf_from_spectra(spec0, spec1);
    double lhs = 0.0;
    for (Eigen::Index i = 0; i < spec1.size(); ++i)
        lhs += f(spec1.values[i]) - f(spec0.values[i]);

    const auto& e = xi.breakpoints();
    const auto& c = xi.values();
    double rhs = 0.0;
    for (std::size_t k = 1; k < e.size(); ++k)
        if (c[k] != 0)
            rhs += c[k] * (f(e[k]) - f(e[k - 1]));
    return std::abs(lhs - rhs);
}

//---------------------------------------------------------------------------//

RankNPerturbation::RankNPerturbation(Eigen::MatrixXd phi, Eigen::VectorXd b)
    : directions(std::move(phi)), weights(std::move(b))
{
    if (directions.cols() != weights.size())
        throw std::invalid_argument("rank-N perturbation needs one weight per direction");
    if ((weights.array() < 0).any())
        throw std::invalid_argument("rank-N perturbation weights must be nonnegative");
    const Eigen::MatrixXd gram = directions.transpose() * directions;
    if (!gram.isIdentity(1e-10))
        throw std::invalid_argument("rank-N perturbation directions must be orthonormal");
}

RankNPerturbation RankNPerturbation::random(Eigen::Index n, Eigen::Index rank, Engine& engine,
                                            double weight_lo, double weight_hi)
{
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd g(n, rank);
    for (Eigen::Index c = 0; c < rank; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            g(r, c) = gauss(engine);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
    Eigen::VectorXd b(rank);
    for (Eigen::Index c = 0; c < rank; ++c)
        b[c] = weight_lo + (weight_hi - weight_lo) * uniform01(engine);
    return RankNPerturbation(std::move(q), std::move(b));
}

Eigen::Index RankNPerturbation::rank() const
{
    return (weights.array() > 0).count();
}

double RankNPerturbation::norm() const
{
    return weights.size() == 0 ? 0.0 : weights.maxCoeff();
}

Eigen::MatrixXd RankNPerturbation::matrix() const
{
    return directions * weights.asDiagonal() * directions.transpose();
}

Eigen::MatrixXd RankNPerturbation::sqrt_matrix() const
{
    return directions * weights.cwiseSqrt().asDiagonal() * directions.transpose();
}

SymmetricOperatord RankNPerturbation::as_operator() const
{
    return SymmetricOperatord::from_dense(matrix());
}

//---------------------------------------------------------------------------//

QuadratureResult midpoint_doubling(const std::function<double(double)>& integrand,
                                   double tol,
                                   Eigen::Index max_nodes,
                                   Eigen::Index min_nodes)
{
    if (!(tol > 0))
        throw std::invalid_argument("quadrature tolerance must be positive");
    auto rule = [&](Eigen::Index nodes) {
        const double h = 1.0 / static_cast<double>(nodes);
        double sum = 0.0;
        for (Eigen::Index k = 0; k < nodes; ++k)
            sum += integrand((static_cast<double>(k) + 0.5) * h);
        return sum * h;
    };
    Eigen::Index nodes = std::max<Eigen::Index>(1, min_nodes);
    double previous = rule(nodes);
    while (2 * nodes <= max_nodes)
    {
        nodes *= 2;
        const double current = rule(nodes);
        if (std::abs(current - previous) <= tol)
            return {current, nodes};
        previous = current;
    }
    throw QuadratureError("coupling quadrature did not reach tolerance " + format_number(tol) +
                              " within " + std::to_string(max_nodes) + " nodes",
                          previous, nodes);
}

std::vector<double> coupling_crossings(const SymmetricOperatord& h0,
                                       const Eigen::MatrixXd& factor,
                                       const EnergyInterval& window)
{
    if (factor.rows() != h0.size())
        throw std::invalid_argument("perturbation factor does not match operator size");
    std::vector<double> out;
    if (factor.cols() == 0)
        return out;
    const Spectrumd spec = eigen_decompose(h0, true);
    const Eigen::MatrixXd proj = spec.eigenvectors().transpose() * factor;
    for (double edge : {window.a, window.b})
    {
        // a is an eigenvalue of H0 + s F F^T iff -1/s is an eigenvalue of
        // F^T (H0 - a)^{-1} F
        Eigen::VectorXd inv = (spec.values.array() - edge).inverse().matrix();
        for (Eigen::Index i = 0; i < inv.size(); ++i)
            if (!std::isfinite(inv[i]))
                inv[i] = 0.0;
        const Eigen::MatrixXd k = proj.transpose() * inv.asDiagonal() * proj;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        {
            const double mu = es.eigenvalues()[i];
            if (mu < -1.0)
                out.push_back(-1.0 / mu);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

QuadratureResult piecewise_midpoint_doubling(const std::function<double(double)>& integrand,
                                             const std::vector<double>& breaks,
                                             double tol,
                                             Eigen::Index max_nodes,
                                             Eigen::Index min_nodes)
{
    std::vector<double> cuts{0.0};
    for (double t : breaks)
        if (t > cuts.back() && t < 1.0)
            cuts.push_back(t);
    cuts.push_back(1.0);

    double value = 0.0;
    Eigen::Index nodes = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    {
        const double lo = cuts[k];
        const double len = cuts[k + 1] - lo;
        auto piece = [&](double t) { return integrand(lo + len * t); };
        try
        {
            const QuadratureResult r = midpoint_doubling(piece, tol, max_nodes, min_nodes);
            value += len * r.value;
            nodes += r.nodes;
        }
        catch (const QuadratureError& e)
        {
            throw QuadratureError(e.what(), value + len * e.last_estimate, nodes + e.nodes);
        }
    }
    return {value, nodes};
}

BirmanSolomyakResult birman_solomyak_residual(const SymmetricOperatord& h0,
                                              const Eigen::VectorXd& v,
                                              const EnergyInterval& window,
                                              double tol,
                                              Eigen::Index max_nodes)
{
    if (v.size() != h0.size())
        throw std::invalid_argument("perturbation length does not match operator size");
    if ((v.array() < 0).any())
        throw std::invalid_argument("Birman-Solomyak perturbation must be nonnegative");

    auto integrand = [&](double lambda) {
        SymmetricOperatord h = h0;
        h.add_diagonal(lambda * v);
        return weighted_projector_trace(eigen_decompose(h, true), v, window);
    };
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] > 0)
            support.push_back(i);
    Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(v.size(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c)
        factor(support[c], static_cast<Eigen::Index>(c)) = std::sqrt(v[support[c]]);
    const QuadratureResult lhs = piecewise_midpoint_doubling(
        integrand, coupling_crossings(h0, factor, window), tol, max_nodes);

    SymmetricOperatord h1 = h0;
    h1.add_diagonal(v);
    const SSFCurve xi = ssf_from_spectra(eigen_decompose(h0, false), eigen_decompose(h1, false));
    const double rhs = integrate(xi, window);
    return {lhs.value, rhs, std::abs(lhs.value - rhs), lhs.nodes};
}

double spectral_averaging_value(const SymmetricOperatord& h0,
                                const RankNPerturbation& b,
                                const Eigen::VectorXd& phi,
                                const EnergyInterval& window,
                                double tol,
                                Eigen::Index max_nodes)
{
    if (b.dimension() != h0.size() || phi.size() != h0.size())
        throw std::invalid_argument("spectral averaging dimensions do not match");
    if (b.norm() > 1.0)
        throw std::invalid_argument("spectral averaging requires ||B|| <= 1 (got " +
                                    format_number(b.norm()) + ")");
    const Eigen::VectorXd psi = b.sqrt_matrix() * phi;
    const Eigen::MatrixXd bm = b.matrix();

    auto integrand = [&](double s) {
        const SymmetricOperatord h = h0 + SymmetricOperatord::from_dense(s * bm);
        const Spectrumd spec = eigen_decompose(h, true);
        auto [first, last] = window_range(spec, window);
        if (last <= first)
            return 0.0;
        return (spec.eigenvectors().middleCols(first, last - first).transpose() * psi)
            .squaredNorm();
    };
    const Eigen::MatrixXd factor = b.directions * b.weights.cwiseSqrt().asDiagonal();
    return piecewise_midpoint_doubling(integrand, coupling_crossings(h0, factor, window), tol,
                                       max_nodes)
        .value;
}

RankBoundReport rank_bound_report(const SymmetricOperatord& h0, const RankNPerturbation& b)
{
    const SymmetricOperatord h1 = h0 + b.as_operator();
    const SSFCurve xi = ssf_from_spectra(eigen_decompose(h0, false), eigen_decompose(h1, false));
    const long sup = xi.max_value();
    const long min = xi.min_value();
    const Eigen::Index rank = b.rank();
    return {sup, min, rank, min >= 0 && sup <= rank};
}

} // namespace ssflab
