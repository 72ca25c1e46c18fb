#include "ssflab/models.hpp"

#include "ssflab/format.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ssflab
{

SiteProfile::SiteProfile(std::vector<MultiIndex> offsets, std::vector<double> values)
    : offsets_(std::move(offsets)), values_(std::move(values))
{
    if (offsets_.empty())
        throw std::invalid_argument("site profile needs a nonempty support");
    if (offsets_.size() != values_.size())
        throw std::invalid_argument("site profile offsets and values differ in length");
    if (std::set<MultiIndex>(offsets_.begin(), offsets_.end()).size() != offsets_.size())
        throw std::invalid_argument("site profile offsets must be distinct");
    for (double v : values_)
    {
        if (!(v > 0.0) || !(v <= max_value))
            throw std::invalid_argument("site profile values must lie in (0, " +
                                        format_number(max_value) + "] (got " +
                                        format_number(v) + ")");
    }
}

SiteProfile SiteProfile::delta()
{
    return SiteProfile({MultiIndex{0, 0, 0}}, {1.0});
}

double SiteProfile::sup() const
{
    return *std::max_element(values_.begin(), values_.end());
}

Index SiteProfile::diameter() const
{
    Index diam = 0;
    for (int k = 0; k < 3; ++k)
    {
        auto [lo, hi] = std::minmax_element(offsets_.begin(), offsets_.end(),
                                            [k](const MultiIndex& a, const MultiIndex& b) {
                                                return a[k] < b[k];
                                            });
        diam = std::max(diam, (*hi)[k] - (*lo)[k]);
    }
    return diam;
}

void SiteProfile::check_fits(const BoxGeometry& geometry) const
{
    for (const auto& e : offsets_)
        for (int k = geometry.dimension(); k < 3; ++k)
            if (e[k] != 0)
                throw std::invalid_argument("site profile offset uses an axis beyond the box "
                                            "dimension");
    if (diameter() >= geometry.side_length())
        throw std::invalid_argument("site profile diameter " + std::to_string(diameter()) +
                                    " must be smaller than the box side " +
                                    std::to_string(geometry.side_length()));
}

std::string SiteProfile::canonical() const
{
    std::vector<std::size_t> order(offsets_.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        order[k] = k;
    std::sort(order.begin(), order.end(),
              [this](std::size_t a, std::size_t b) { return offsets_[a] < offsets_[b]; });
    std::string s = "[";
    for (std::size_t k : order)
    {
        const auto& e = offsets_[k];
        s += "(" + std::to_string(e[0]) + "," + std::to_string(e[1]) + "," +
             std::to_string(e[2]) + "):" + format_number(values_[k]) + ";";
    }
    return s + "]";
}

//---------------------------------------------------------------------------//

void PeriodicPotential::check_fits(const BoxGeometry& geometry) const
{
    if (period < 1)
        throw std::invalid_argument("background period must be >= 1");
    if (geometry.side_length() % period != 0)
        throw std::invalid_argument("background period " + std::to_string(period) +
                                    " does not divide L = " +
                                    std::to_string(geometry.side_length()));
    Index cell = 1;
    for (int k = 0; k < geometry.dimension(); ++k)
        cell *= period;
    if (static_cast<Index>(values.size()) != cell)
        throw std::invalid_argument("background potential needs period^d = " +
                                    std::to_string(cell) + " values (got " +
                                    std::to_string(values.size()) + ")");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("background potential values must be finite");
}

double PeriodicPotential::at(const BoxGeometry& geometry, Index site) const
{
    MultiIndex x = geometry.coords(site);
    Index cell = 0;
    for (int k = 0; k < geometry.dimension(); ++k)
        cell = cell * period + x[k] % period;
    return values[cell];
}

std::string PeriodicPotential::canonical() const
{
    std::string s = "{period=" + std::to_string(period) + ",values=[";
    for (std::size_t k = 0; k < values.size(); ++k)
        s += (k ? "," : "") + format_number(values[k]);
    return s + "]}";
}

//---------------------------------------------------------------------------//

void ModelSpec::validate() const
{
    background.check_fits(geometry);
    profile.check_fits(geometry);
    if (!std::isfinite(coupling) || coupling < 0.0)
        throw std::invalid_argument("coupling scale must be finite and nonnegative");
}

ModelSpec ModelSpec::resized(Index side_length) const
{
    ModelSpec m = *this;
    m.geometry = BoxGeometry(geometry.dimension(), side_length);
    return m;
}

std::string ModelSpec::canonical() const
{
    // keys in lexicographic order
    return "{background=" + background.canonical() + ",coupling=" + format_number(coupling) +
           ",disorder=" + disorder.canonical() + ",geometry=" + geometry.canonical() +
           ",profile=" + profile.canonical() + "}";
}

std::uint64_t ModelSpec::hash() const
{
    return fnv1a64(canonical());
}

//---------------------------------------------------------------------------//

SymmetricOperatord build_free_hamiltonian(const BoxGeometry& geometry,
                                          const PeriodicPotential& background)
{
    background.check_fits(geometry);
    const Index n = geometry.site_count();
    SymmetricOperatord h(n);
    const double coordination = 2.0 * geometry.dimension();
    for (Index x = 0; x < n; ++x)
    {
        h.coeff_ref(x, x) = coordination + background.at(geometry, x);
        for (Index y : geometry.neighbors(x))
            h.coeff_ref(x, y) = -1.0;
    }
    return h;
}

Eigen::VectorXd site_profile_weight(const BoxGeometry& geometry,
                                    const SiteProfile& profile,
                                    double coupling,
                                    Index j)
{
    profile.check_fits(geometry);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(geometry.site_count());
    for (std::size_t k = 0; k < profile.offsets().size(); ++k)
        w[geometry.shifted(j, profile.offsets()[k])] += coupling * profile.values()[k];
    return w;
}

Eigen::VectorXd anchored_potential(const BoxGeometry& geometry,
                                   const SiteProfile& profile,
                                   const Eigen::VectorXd& anchor_weights)
{
    profile.check_fits(geometry);
    if (anchor_weights.size() != geometry.site_count())
        throw std::invalid_argument("anchor weight length does not match site count");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(geometry.site_count());
    for (Index j = 0; j < geometry.site_count(); ++j)
    {
        if (anchor_weights[j] == 0.0)
            continue;
        for (std::size_t k = 0; k < profile.offsets().size(); ++k)
            w[geometry.shifted(j, profile.offsets()[k])] += anchor_weights[j] * profile.values()[k];
    }
    return w;
}

Eigen::VectorXd sum_profile_potential(const BoxGeometry& geometry,
                                      const SiteProfile& profile,
                                      double coupling)
{
    return anchored_potential(geometry, profile,
                               Eigen::VectorXd::Constant(geometry.site_count(), coupling));
}

Eigen::VectorXd random_potential(const ModelSpec& model, const DisorderSample& sample)
{
    if (!(sample.geometry() == model.geometry))
        throw std::invalid_argument("sample geometry " + sample.geometry().canonical() +
                                    " does not match model geometry " +
                                    model.geometry.canonical());
    return anchored_potential(model.geometry, model.profile, model.coupling * sample.couplings());
}

SymmetricOperatord assemble_hamiltonian(const ModelSpec& model, const DisorderSample& sample)
{
    model.validate();
    SymmetricOperatord h = build_free_hamiltonian(model.geometry, model.background);
    h.add_diagonal(random_potential(model, sample));
    h.set_tag(fnv1a64(model.canonical() + sample.provenance().canonical()));
    return h;
}

} // namespace ssflab
