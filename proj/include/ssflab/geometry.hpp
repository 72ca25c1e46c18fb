#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace ssflab
{

using Index = Eigen::Index;

/// Lattice multi-index; components beyond the box dimension are ignored.
using MultiIndex = std::array<Index, 3>;

/// d-dimensional periodic lattice box {0..L-1}^d with row-major site
/// linearization (first coordinate varies slowest).
class BoxGeometry
{
public:
    BoxGeometry(int dimension, Index side_length);

    int dimension() const { return dimension_; }
    Index side_length() const { return side_length_; }
    Index site_count() const { return site_count_; }

    /// Reduces a coordinate into {0..L-1}.
    Index wrap(Index c) const;

    /// Linear index of a multi-index; coordinates are wrapped first.
    Index index(const MultiIndex& x) const;
    MultiIndex coords(Index site) const;

    /// Site reached from `site` by a (possibly negative) lattice shift.
    Index shifted(Index site, const MultiIndex& shift) const;

    /// The 2d periodic nearest neighbours, ordered (-e_0, +e_0, -e_1, ...).
    std::vector<Index> neighbors(Index site) const;

    /// Site with every coordinate equal to L/2.
    Index center() const;

    std::string canonical() const;

    bool operator==(const BoxGeometry&) const = default;

private:
    int dimension_;
    Index side_length_;
    Index site_count_;
};

} // namespace ssflab
