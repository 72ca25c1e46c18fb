#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <utility>

namespace ssflab
{

/// Dense real symmetric matrix stored as its packed lower triangle, so the
/// two triangles cannot disagree.
template <typename Scalar_>
class SymmetricOperator
{
public:
    using Scalar = Scalar_;
    using Index = Eigen::Index;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    SymmetricOperator() = default;

    explicit SymmetricOperator(Index n, std::uint64_t tag = 0)
        : n_(n), packed_(Vector::Zero(n * (n + 1) / 2)), tag_(tag)
    {
    }

    /// Reads the lower triangle of `m`; the upper triangle is ignored.
    template <typename Derived>
    static SymmetricOperator from_dense(const Eigen::MatrixBase<Derived>& m, std::uint64_t tag = 0)
    {
        if (m.rows() != m.cols())
            throw std::invalid_argument("symmetric operator needs a square matrix");
        SymmetricOperator op(m.rows(), tag);
        for (Index i = 0; i < op.n_; ++i)
            for (Index j = 0; j <= i; ++j)
                op.packed_[offset(i, j)] = static_cast<Scalar>(m(i, j));
        return op;
    }

    Index size() const { return n_; }
    std::uint64_t tag() const { return tag_; }
    void set_tag(std::uint64_t tag) { tag_ = tag; }

    Scalar operator()(Index i, Index j) const { return packed_[offset(i, j)]; }
    Scalar& coeff_ref(Index i, Index j) { return packed_[offset(i, j)]; }

    const Vector& packed() const { return packed_; }

    Matrix dense() const
    {
        Matrix m(n_, n_);
        for (Index i = 0; i < n_; ++i)
            for (Index j = 0; j <= i; ++j)
                m(i, j) = m(j, i) = packed_[offset(i, j)];
        return m;
    }

    Vector diagonal() const
    {
        Vector d(n_);
        for (Index i = 0; i < n_; ++i)
            d[i] = packed_[offset(i, i)];
        return d;
    }

    Scalar trace() const { return diagonal().sum(); }

    Scalar max_abs() const { return n_ == 0 ? Scalar(0) : packed_.cwiseAbs().maxCoeff(); }

    bool all_finite() const { return packed_.allFinite(); }

    template <typename Derived>
    SymmetricOperator& add_diagonal(const Eigen::MatrixBase<Derived>& w)
    {
        if (w.size() != n_)
            throw std::invalid_argument("diagonal length does not match operator size");
        for (Index i = 0; i < n_; ++i)
            packed_[offset(i, i)] += static_cast<Scalar>(w[i]);
        return *this;
    }

    SymmetricOperator& operator+=(const SymmetricOperator& other)
    {
        check_same_size(other);
        packed_ += other.packed_;
        return *this;
    }

    SymmetricOperator& operator-=(const SymmetricOperator& other)
    {
        check_same_size(other);
        packed_ -= other.packed_;
        return *this;
    }

    template <typename NewScalar>
    SymmetricOperator<NewScalar> cast() const
    {
        SymmetricOperator<NewScalar> out(n_, tag_);
        for (Index i = 0; i < n_; ++i)
            for (Index j = 0; j <= i; ++j)
                out.coeff_ref(i, j) = static_cast<NewScalar>(packed_[offset(i, j)]);
        return out;
    }

    bool operator==(const SymmetricOperator& other) const
    {
        return n_ == other.n_ && packed_ == other.packed_;
    }

    static Index offset(Index i, Index j)
    {
        if (i < j)
            std::swap(i, j);
        return i * (i + 1) / 2 + j;
    }

private:
    void check_same_size(const SymmetricOperator& other) const
    {
        if (other.n_ != n_)
            throw std::invalid_argument("symmetric operator size mismatch");
    }

    Index n_ = 0;
    Vector packed_;
    std::uint64_t tag_ = 0;
};

template <typename Scalar>
SymmetricOperator<Scalar> operator+(SymmetricOperator<Scalar> a, const SymmetricOperator<Scalar>& b)
{
    return a += b;
}

template <typename Scalar>
SymmetricOperator<Scalar> operator-(SymmetricOperator<Scalar> a, const SymmetricOperator<Scalar>& b)
{
    return a -= b;
}

using SymmetricOperatord = SymmetricOperator<double>;

} // namespace ssflab
