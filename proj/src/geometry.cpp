#include "ssflab/geometry.hpp"

#include <stdexcept>

namespace ssflab
{

BoxGeometry::BoxGeometry(int dimension, Index side_length)
    : dimension_(dimension), side_length_(side_length), site_count_(1)
{
    if (dimension < 1 || dimension > 3)
        throw std::invalid_argument("box dimension must be 1, 2 or 3 (got " +
                                    std::to_string(dimension) + ")");
    // L = 2 would give a double bond between the two sites of each row.
    if (side_length < 3)
        throw std::invalid_argument("box side length L must be >= 3 (got " +
                                    std::to_string(side_length) + ")");
    for (int k = 0; k < dimension; ++k)
        site_count_ *= side_length;
}

Index BoxGeometry::wrap(Index c) const
{
    Index r = c % side_length_;
    return r < 0 ? r + side_length_ : r;
}

Index BoxGeometry::index(const MultiIndex& x) const
{
    Index site = 0;
    for (int k = 0; k < dimension_; ++k)
        site = site * side_length_ + wrap(x[k]);
    return site;
}

MultiIndex BoxGeometry::coords(Index site) const
{
    MultiIndex x{0, 0, 0};
    for (int k = dimension_ - 1; k >= 0; --k)
    {
        x[k] = site % side_length_;
        site /= side_length_;
    }
    return x;
}

Index BoxGeometry::shifted(Index site, const MultiIndex& shift) const
{
    MultiIndex x = coords(site);
    for (int k = 0; k < dimension_; ++k)
        x[k] += shift[k];
    return index(x);
}

std::vector<Index> BoxGeometry::neighbors(Index site) const
{
    std::vector<Index> out;
    out.reserve(2 * dimension_);
    for (int k = 0; k < dimension_; ++k)
    {
        MultiIndex e{0, 0, 0};
        e[k] = -1;
        out.push_back(shifted(site, e));
        e[k] = 1;
        out.push_back(shifted(site, e));
    }
    return out;
}

Index BoxGeometry::center() const
{
    MultiIndex x{0, 0, 0};
    for (int k = 0; k < dimension_; ++k)
        x[k] = side_length_ / 2;
    return index(x);
}

std::string BoxGeometry::canonical() const
{
    return "{d=" + std::to_string(dimension_) + ",L=" + std::to_string(side_length_) + "}";
}

} // namespace ssflab
