#pragma once

#include "ssflab/disorder.hpp"
#include "ssflab/eig.hpp"
#include "ssflab/symmetric_operator.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace ssflab
{

/// Integer step function xi(E) = N0(E) - N1(E) for a pair of equal-size
/// spectra. values()[0] is the value left of the first breakpoint and
/// values()[k] the value on [e_k, e_{k+1}); both outer values are zero.
class SSFCurve
{
public:
    SSFCurve() : values_{0} {}
    SSFCurve(std::vector<double> breakpoints, std::vector<long> values);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<long>& values() const { return values_; }

    /// Right-continuous evaluation.
    long operator()(double energy) const;

    long max_value() const;
    long min_value() const;

    /// Integral over the whole real line.
    double integral() const;

private:
    std::vector<double> breakpoints_;
    std::vector<long> values_;
};

/// Pointwise sum; breakpoints are merged.
SSFCurve operator+(const SSFCurve& a, const SSFCurve& b);

SSFCurve ssf_from_spectra(const Spectrumd& spec0, const Spectrumd& spec1);

/// Exact integral of the curve over [a, b).
double integrate(const SSFCurve& curve, const EnergyInterval& window);

/// Average of the curve over each bin [lo + k h, lo + (k+1) h).
Eigen::VectorXd bin_averages(const SSFCurve& curve, double lo, double width, Eigen::Index count);

long sup_abs(const SSFCurve& curve);

/// CSV with header `breakpoint_energy,value_right_of_breakpoint`.
void write_ssf_csv(std::ostream& os, const SSFCurve& curve);

/// Normalized Gaussian f(E) = exp(-(E-c)^2 / 2 s^2) / (s sqrt(2 pi)).
struct TestFunction
{
    double center;
    double width;

    TestFunction(double c, double s);

    /// Centre at the middle of [lo, hi] with width a quarter of the range.
    static TestFunction for_range(double lo, double hi);

    double operator()(double e) const;
    double derivative(double e) const;
    double sup() const;
    /// ||f'||_1 = sqrt(2/pi) / s.
    double derivative_l1_norm() const;
};

/// |sum f(mu_i) - sum f(lambda_i) - int f' xi dE|, the integral evaluated
/// exactly piece by piece.
double trace_formula_residual(const Spectrumd& spec0, const Spectrumd& spec1, const TestFunction& f);

/// B = sum_j b_j phi_j phi_j^T with orthonormal phi_j and b_j >= 0.
struct RankNPerturbation
{
    Eigen::MatrixXd directions;
    Eigen::VectorXd weights;

    RankNPerturbation(Eigen::MatrixXd phi, Eigen::VectorXd b);

    /// Orthonormal directions from the QR factorization of a Gaussian matrix.
    static RankNPerturbation random(Eigen::Index n, Eigen::Index rank, Engine& engine,
                                    double weight_lo, double weight_hi);

    Eigen::Index dimension() const { return directions.rows(); }
    Eigen::Index rank() const;
    double norm() const;
    Eigen::MatrixXd matrix() const;
    Eigen::MatrixXd sqrt_matrix() const;
    SymmetricOperatord as_operator() const;
};

class QuadratureError : public std::runtime_error
{
public:
    QuadratureError(const std::string& what, double last_estimate, Eigen::Index nodes)
        : std::runtime_error(what), last_estimate(last_estimate), nodes(nodes)
    {
    }
    double last_estimate;
    Eigen::Index nodes;
};

struct QuadratureResult
{
    double value;
    Eigen::Index nodes;
};

/// Composite midpoint rule on [0, 1], doubling the node count until two
/// successive estimates differ by at most tol.
QuadratureResult midpoint_doubling(const std::function<double(double)>& integrand,
                                   double tol,
                                   Eigen::Index max_nodes,
                                   Eigen::Index min_nodes = 16);

/// Couplings s in (0, 1) at which an eigenvalue of H0 + s F F^T meets an edge
/// of the window, sorted. The coupling integrands below jump only there.
std::vector<double> coupling_crossings(const SymmetricOperatord& h0,
                                       const Eigen::MatrixXd& factor,
                                       const EnergyInterval& window);

/// midpoint_doubling applied separately on each piece of [0, 1] cut at `breaks`;
/// node counts add up.
QuadratureResult piecewise_midpoint_doubling(const std::function<double(double)>& integrand,
                                             const std::vector<double>& breaks,
                                             double tol,
                                             Eigen::Index max_nodes,
                                             Eigen::Index min_nodes = 16);

struct BirmanSolomyakResult
{
    double lhs;
    double rhs;
    double residual;
    Eigen::Index nodes;
};

inline constexpr Eigen::Index default_max_nodes = Eigen::Index(1) << 14;

/// Coupling average of Tr V^{1/2} E_lambda(window) V^{1/2} over lambda in
/// [0,1] against the integral of xi(E; H0 + V, H0) over the window. The
/// lambda integral is split where eigenvalues cross the window edges.
BirmanSolomyakResult birman_solomyak_residual(const SymmetricOperatord& h0,
                                              const Eigen::VectorXd& v,
                                              const EnergyInterval& window,
                                              double tol,
                                              Eigen::Index max_nodes = default_max_nodes);

/// int_0^1 <psi, E_{H0 + sB}(window) psi> ds with psi = B^{1/2} phi. Requires ||B|| <= 1.
double spectral_averaging_value(const SymmetricOperatord& h0,
                                const RankNPerturbation& b,
                                const Eigen::VectorXd& phi,
                                const EnergyInterval& window,
                                double tol,
                                Eigen::Index max_nodes = default_max_nodes);

struct RankBoundReport
{
    long sup;
    long min;
    Eigen::Index rank;
    bool pass;
};

/// 0 <= xi(E; H0 + B, H0) <= rank B for every E, checked on the exact curve.
RankBoundReport rank_bound_report(const SymmetricOperatord& h0, const RankNPerturbation& b);

} // namespace ssflab
