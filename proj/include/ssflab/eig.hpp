#pragma once

#include "ssflab/symmetric_operator.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ssflab
{

class EigenError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Half-open energy window [a, b).
struct EnergyInterval
{
    double a;
    double b;

    EnergyInterval(double lo, double hi) : a(lo), b(hi)
    {
        if (!(lo < hi))
            throw std::invalid_argument("energy interval needs a < b");
    }

    double length() const { return b - a; }
    bool contains(double e) const { return e >= a && e < b; }
};

/// Sorted eigenvalues with multiplicity, optionally with the orthonormal
/// eigenvectors as columns.
template <typename Scalar_>
struct Spectrum
{
    using Scalar = Scalar_;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Vector values;
    std::optional<Matrix> vectors;
    std::uint64_t tag = 0;

    Eigen::Index size() const { return values.size(); }
    bool has_vectors() const { return vectors.has_value(); }

    /// 1e-9 times the spectral diameter; diagnostics only.
    Scalar degeneracy_tolerance() const
    {
        if (values.size() == 0)
            return Scalar(0);
        return Scalar(1e-9) * std::max(Scalar(1), values[values.size() - 1] - values[0]);
    }

    const Matrix& eigenvectors() const
    {
        if (!vectors)
            throw std::logic_error("spectrum was computed without eigenvectors");
        return *vectors;
    }
};

using Spectrumd = Spectrum<double>;

/// Full symmetric eigendecomposition (Householder tridiagonalization followed
/// by implicit symmetric QR).
template <typename Scalar>
Spectrum<Scalar> eigen_decompose(const SymmetricOperator<Scalar>& op, bool need_vectors)
{
    using Matrix = typename SymmetricOperator<Scalar>::Matrix;
    if (!op.all_finite())
        throw EigenError("operator " + std::to_string(op.tag()) + " has non-finite entries");
    Spectrum<Scalar> out;
    out.tag = op.tag();
    if (op.size() == 0)
        return out;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        op.dense(), need_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw EigenError("symmetric eigensolver did not converge for operator " +
                         std::to_string(op.tag()) + " (n = " + std::to_string(op.size()) + ")");
    out.values = solver.eigenvalues();
    if (need_vectors)
        out.vectors = solver.eigenvectors();
    return out;
}

/// N(E) = #{lambda_i <= E}.
template <typename Scalar>
Eigen::Index counting(const Spectrum<Scalar>& spec, double energy)
{
    const Scalar* begin = spec.values.data();
    const Scalar* end = begin + spec.values.size();
    return std::upper_bound(begin, end, static_cast<Scalar>(energy)) - begin;
}

/// #{lambda_i in [a, b)}.
template <typename Scalar>
Eigen::Index count_in(const Spectrum<Scalar>& spec, const EnergyInterval& window)
{
    const Scalar* begin = spec.values.data();
    const Scalar* end = begin + spec.values.size();
    return std::lower_bound(begin, end, static_cast<Scalar>(window.b)) -
           std::lower_bound(begin, end, static_cast<Scalar>(window.a));
}

/// Index range [first, last) of the eigenvalues inside the window.
template <typename Scalar>
std::pair<Eigen::Index, Eigen::Index> window_range(const Spectrum<Scalar>& spec,
                                                   const EnergyInterval& window)
{
    const Scalar* begin = spec.values.data();
    const Scalar* end = begin + spec.values.size();
    return {std::lower_bound(begin, end, static_cast<Scalar>(window.a)) - begin,
            std::lower_bound(begin, end, static_cast<Scalar>(window.b)) - begin};
}

/// <v_i, W v_i> for every eigenvector, W = diag(w).
template <typename Scalar, typename Derived>
typename Spectrum<Scalar>::Vector eigenvector_weights(const Spectrum<Scalar>& spec,
                                                      const Eigen::MatrixBase<Derived>& w)
{
    const auto& v = spec.eigenvectors();
    if (w.size() != v.rows())
        throw std::invalid_argument("weight length does not match spectrum dimension");
    return (v.cwiseAbs2().transpose() * w.template cast<Scalar>()).eval();
}

/// Tr W^{1/2} E(window) W^{1/2} = sum over eigenvalues in the window of <v_i, W v_i>.
template <typename Scalar, typename Derived>
Scalar weighted_projector_trace(const Spectrum<Scalar>& spec,
                                const Eigen::MatrixBase<Derived>& w,
                                const EnergyInterval& window)
{
    if ((w.array() < 0).any())
        throw std::invalid_argument("projector trace weight must be nonnegative");
    const auto& v = spec.eigenvectors();
    if (w.size() != v.rows())
        throw std::invalid_argument("weight length does not match spectrum dimension");
    auto [first, last] = window_range(spec, window);
    if (last <= first)
        return Scalar(0);
    return (v.middleCols(first, last - first).cwiseAbs2().transpose() *
            w.template cast<Scalar>())
        .sum();
}

/// Tr W e^{-tH} = sum_i e^{-t lambda_i} <v_i, W v_i>.
template <typename Scalar, typename Derived>
Scalar weighted_heat_trace(const Spectrum<Scalar>& spec,
                           const Eigen::MatrixBase<Derived>& w,
                           double t)
{
    if (!(t > 0))
        throw std::invalid_argument("heat trace time must be positive");
    const auto weights = eigenvector_weights(spec, w);
    return (weights.array() * (-static_cast<Scalar>(t) * spec.values.array()).exp()).sum();
}

/// max_i ||H v_i - lambda_i v_i|| / (1 + |lambda_i|).
template <typename Scalar>
Scalar max_relative_residual(const SymmetricOperator<Scalar>& op, const Spectrum<Scalar>& spec)
{
    const auto& v = spec.eigenvectors();
    const auto h = op.dense();
    typename Spectrum<Scalar>::Matrix r = h * v - v * spec.values.asDiagonal();
    Scalar worst(0);
    for (Eigen::Index i = 0; i < r.cols(); ++i)
        worst = std::max<Scalar>(worst, r.col(i).norm() / (Scalar(1) + std::abs(spec.values[i])));
    return worst;
}

} // namespace ssflab
