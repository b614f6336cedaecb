#include "qde/partition.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qde/errors.hpp"

namespace qde {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

ComplexMatrix identity_matrix(std::size_t d) { return ComplexMatrix::Identity(idx(d), idx(d)); }

// Principal square root of a PSD matrix (negative round-off clamped).
ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
    const auto s = spectral_decompose(HermitianMatrix::symmetrized(a));
    return apply_function(s, [](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; }).matrix();
}

ComplexMatrix psd_inverse_sqrt(const ComplexMatrix& a) {
    const auto s = spectral_decompose(HermitianMatrix::symmetrized(a));
    const double top = s.eigenvalues.size() ? std::max(s.eigenvalues(0), 0.0) : 0.0;
    if (top <= 0.0 || s.eigenvalues.minCoeff() <= 1e-14 * top)
        throw Error(ErrorKind::validation, "random_partition: singular normalization");
    return apply_function(s, [](double v) { return 1.0 / std::sqrt(v); }).matrix();
}

}  // namespace

// --------------------------- KrausMap ---------------------------------------

KrausMap::KrausMap(std::vector<ComplexMatrix> kraus, std::string label)
    : kraus_(std::move(kraus)), label_(std::move(label)) {
    if (kraus_.empty()) throw Error(ErrorKind::validation, "kraus map: empty Kraus family");
    const auto rows = kraus_.front().rows();
    const auto cols = kraus_.front().cols();
    if (rows == 0 || cols == 0) throw Error(ErrorKind::validation, "kraus map: empty Kraus matrix");
    for (std::size_t k = 0; k < kraus_.size(); ++k) {
        if (kraus_[k].rows() != rows || kraus_[k].cols() != cols) {
            std::ostringstream os;
            os << "kraus map '" << label_ << "': Kraus matrix " << k << " is " << kraus_[k].rows() << "x"
               << kraus_[k].cols() << ", expected " << rows << "x" << cols;
            throw Error(ErrorKind::dimension_mismatch, os.str());
        }
        if (!all_finite(kraus_[k])) throw Error(ErrorKind::validation, "kraus map: non-finite entries");
    }
}

HermitianMatrix KrausMap::unit_image() const {
    ComplexMatrix s = ComplexMatrix::Zero(idx(out_dim()), idx(out_dim()));
    for (const auto& k : kraus_) s.noalias() += k.adjoint() * k;
    return HermitianMatrix::symmetrized(s);
}

HermitianMatrix KrausMap::choi() const {
    const std::size_t din = in_dim();
    const std::size_t dout = out_dim();
    ComplexMatrix c = ComplexMatrix::Zero(idx(din * dout), idx(din * dout));
    // block (a,b) = Σ_k (K_k^† e_a)(K_k^† e_b)^†
    for (const auto& k : kraus_) {
        const ComplexMatrix kd = k.adjoint();  // dout x din, column a = K^† e_a
        Eigen::Map<const ComplexVector> v(kd.data(), kd.size());
        c.noalias() += v * v.adjoint();
    }
    return HermitianMatrix::symmetrized(c);
}

KrausMap KrausMap::relabeled(std::string label) const {
    KrausMap m = *this;
    m.label_ = std::move(label);
    return m;
}

KrausMap KrausMap::compressed(double relative_cutoff) const {
    const std::size_t din = in_dim();
    const std::size_t dout = out_dim();
    if (kraus_.size() <= din * dout) return *this;
    const auto s = spectral_decompose(choi());
    const double top = std::max(s.eigenvalues(0), 0.0);
    std::vector<ComplexMatrix> out;
    for (Eigen::Index a = 0; a < s.eigenvalues.size(); ++a) {
        const double lam = s.eigenvalues(a);
        if (lam <= relative_cutoff * top || lam <= 0.0) continue;
        const ComplexVector w = std::sqrt(lam) * s.eigenvectors.col(a);
        // column-major reshape: column b of K^† is the b-th slice of w
        const ComplexMatrix kd = Eigen::Map<const ComplexMatrix>(w.data(), idx(dout), idx(din));
        out.push_back(kd.adjoint());
    }
    if (out.empty()) out.push_back(ComplexMatrix::Zero(idx(din), idx(dout)));
    return KrausMap(std::move(out), label_);
}

ComplexMatrix apply(const KrausMap& map, const ComplexMatrix& x) {
    if (static_cast<std::size_t>(x.rows()) != map.in_dim() || x.rows() != x.cols()) {
        std::ostringstream os;
        os << "apply: observable is " << x.rows() << "x" << x.cols() << ", map reads dimension " << map.in_dim();
        throw Error(ErrorKind::dimension_mismatch, os.str());
    }
    ComplexMatrix r = ComplexMatrix::Zero(idx(map.out_dim()), idx(map.out_dim()));
    for (const auto& k : map.kraus()) r.noalias() += k.adjoint() * x * k;
    return r;
}

HermitianMatrix apply(const KrausMap& map, const HermitianMatrix& x) {
    return HermitianMatrix::symmetrized(qde::apply(map, x.matrix()));
}

ComplexMatrix predual_density(const KrausMap& map, const ComplexMatrix& rho) {
    if (static_cast<std::size_t>(rho.rows()) != map.out_dim() || rho.rows() != rho.cols()) {
        std::ostringstream os;
        os << "predual: density is " << rho.rows() << "x" << rho.cols() << ", map produces dimension "
           << map.out_dim();
        throw Error(ErrorKind::dimension_mismatch, os.str());
    }
    ComplexMatrix r = ComplexMatrix::Zero(idx(map.in_dim()), idx(map.in_dim()));
    for (const auto& k : map.kraus()) r.noalias() += k * rho * k.adjoint();
    return r;
}

StateFunctional predual_apply(const KrausMap& map, const StateFunctional& omega) {
    return predual_apply(map, omega, BlockAlgebra::full(map.in_dim()));
}

StateFunctional predual_apply(const KrausMap& map, const StateFunctional& omega, const BlockAlgebra& target,
                              const Settings& settings) {
    if (target.dim() != map.in_dim())
        throw Error(ErrorKind::dimension_mismatch, "predual: target algebra does not match the map");
    return StateFunctional::restricted(target, predual_density(map, omega.density().matrix()), settings);
}

// --------------------------- Partition --------------------------------------

Partition::Partition(std::vector<KrausMap> maps, const Settings& settings)
    : Partition(std::move(maps), BlockAlgebra(), settings) {}

Partition::Partition(std::vector<KrausMap> maps, BlockAlgebra algebra, const Settings& settings)
    : maps_(std::move(maps)), algebra_(std::move(algebra)) {
    if (maps_.empty()) throw Error(ErrorKind::validation, "partition: no maps");
    if (algebra_.dim() == 0) algebra_ = BlockAlgebra::full(in_dim());
    if (algebra_.dim() != in_dim())
        throw Error(ErrorKind::dimension_mismatch, "partition: algebra dimension differs from the maps");
    std::set<std::string> seen;
    ComplexMatrix sum = ComplexMatrix::Zero(idx(out_dim()), idx(out_dim()));
    for (std::size_t i = 0; i < maps_.size(); ++i) {
        if (maps_[i].label().empty()) maps_[i] = maps_[i].relabeled(std::to_string(i));
        if (maps_[i].in_dim() != in_dim() || maps_[i].out_dim() != out_dim()) {
            std::ostringstream os;
            os << "partition: map " << i << " is " << maps_[i].in_dim() << "->" << maps_[i].out_dim()
               << ", expected " << in_dim() << "->" << out_dim();
            throw Error(ErrorKind::dimension_mismatch, os.str());
        }
        if (!seen.insert(maps_[i].label()).second)
            throw Error(ErrorKind::validation, "partition: duplicate label '" + maps_[i].label() + "'");
        sum += maps_[i].unit_image().matrix();
    }
    const double residual = (sum - identity_matrix(out_dim())).norm();
    if (residual > settings.unit_sum_tolerance) {
        std::ostringstream os;
        os << "partition: |sum_i zeta_i(I) - I|_F = " << residual << " exceeds " << settings.unit_sum_tolerance;
        throw Error(ErrorKind::validation, os.str());
    }
}

std::vector<std::string> Partition::labels() const {
    std::vector<std::string> out;
    out.reserve(maps_.size());
    for (const auto& m : maps_) out.push_back(m.label());
    return out;
}

KrausMap Partition::total() const {
    std::vector<ComplexMatrix> all;
    for (const auto& m : maps_) all.insert(all.end(), m.kraus().begin(), m.kraus().end());
    return KrausMap(std::move(all), "total").compressed();
}

StateFunctional Partition::branch(std::size_t i, const StateFunctional& omega, const Settings& settings) const {
    return predual_apply(maps_.at(i), omega, algebra_, settings);
}

Partition trivial_partition(std::size_t dim) {
    return Partition({KrausMap({identity_matrix(dim)}, "1")});
}

// --------------------------- Automorphism -----------------------------------

Automorphism::Automorphism(const ComplexMatrix& u, double tol) : u_(u) {
    if (u.rows() != u.cols() || u.rows() == 0) throw Error(ErrorKind::validation, "automorphism: unitary must be square");
    const double defect = (u.adjoint() * u - identity_matrix(dim())).cwiseAbs().maxCoeff();
    if (defect > tol) {
        std::ostringstream os;
        os << "automorphism: |u^dag u - I| = " << defect << " exceeds " << tol;
        throw Error(ErrorKind::validation, os.str());
    }
}

Automorphism Automorphism::identity(std::size_t dim) { return Automorphism(identity_matrix(dim)); }

Automorphism Automorphism::inverse() const { return Automorphism(u_.adjoint(), 1e-8); }

Automorphism Automorphism::power(int k) const {
    ComplexMatrix base = k >= 0 ? u_ : ComplexMatrix(u_.adjoint());
    ComplexMatrix r = identity_matrix(dim());
    for (int e = std::abs(k); e > 0; e >>= 1) {
        if (e & 1) r = r * base;
        base = base * base;
    }
    return Automorphism(r, 1e-8);
}

// --------------------------- constructions ----------------------------------

Partition compose(const Partition& zeta, const Partition& eta, const Settings& settings) {
    if (eta.out_dim() != zeta.in_dim()) {
        std::ostringstream os;
        os << "compose: eta produces dimension " << eta.out_dim() << " but zeta reads dimension " << zeta.in_dim();
        throw Error(ErrorKind::dimension_mismatch, os.str());
    }
    if (zeta.size() * eta.size() > settings.branch_cap) {
        std::ostringstream os;
        os << "compose: " << zeta.size() << "*" << eta.size() << " outcomes exceed the branch cap "
           << settings.branch_cap;
        throw Error(ErrorKind::resource, os.str());
    }
    std::vector<KrausMap> maps;
    maps.reserve(zeta.size() * eta.size());
    for (const auto& zi : zeta.maps())
        for (const auto& ej : eta.maps()) {
            std::vector<ComplexMatrix> ks;
            ks.reserve(zi.kraus().size() * ej.kraus().size());
            for (const auto& k : zi.kraus())
                for (const auto& l : ej.kraus()) ks.push_back(l * k);
            maps.push_back(KrausMap(std::move(ks), zi.label() + "," + ej.label()).compressed());
        }
    return Partition(std::move(maps), eta.algebra(), settings);
}

Partition tensor_partition(const Partition& a, const Partition& b, const Settings& settings) {
    if (a.size() * b.size() > settings.branch_cap)
        throw Error(ErrorKind::resource, "tensor_partition: outcome count exceeds the branch cap");
    std::vector<KrausMap> maps;
    maps.reserve(a.size() * b.size());
    for (const auto& ai : a.maps())
        for (const auto& bj : b.maps()) {
            std::vector<ComplexMatrix> ks;
            for (const auto& k : ai.kraus())
                for (const auto& l : bj.kraus()) ks.push_back(tensor(k, l, settings.dimension_cap));
            maps.push_back(KrausMap(std::move(ks), ai.label() + "*" + bj.label()).compressed());
        }
    return Partition(std::move(maps), tensor(a.algebra(), b.algebra()), settings);
}

Partition conjugate(const Automorphism& theta, const Partition& zeta) {
    if (zeta.in_dim() != theta.dim() || zeta.out_dim() != theta.dim())
        throw Error(ErrorKind::dimension_mismatch, "conjugate: automorphism and partition dimensions differ");
    const ComplexMatrix& u = theta.unitary();
    std::vector<KrausMap> maps;
    maps.reserve(zeta.size());
    for (const auto& m : zeta.maps()) {
        std::vector<ComplexMatrix> ks;
        ks.reserve(m.kraus().size());
        for (const auto& k : m.kraus()) ks.push_back(u * k * u.adjoint());
        maps.emplace_back(std::move(ks), m.label());
    }
    return Partition(std::move(maps), zeta.algebra());
}

// --------------------------- validation -------------------------------------

ValidationReport validate_partition(std::span<const KrausMap> maps, const Settings& settings, std::uint64_t seed,
                                    std::size_t samples) {
    ValidationReport r;
    if (maps.empty()) return r;
    const std::size_t din = maps.front().in_dim();
    const std::size_t dout = maps.front().out_dim();
    for (const auto& m : maps)
        if (m.in_dim() != din || m.out_dim() != dout)
            throw Error(ErrorKind::dimension_mismatch, "validate_partition: maps with different dimensions");

    ComplexMatrix sum = ComplexMatrix::Zero(idx(dout), idx(dout));
    for (const auto& m : maps) {
        const HermitianMatrix unit = m.unit_image();
        sum += unit.matrix();
        r.choi_min_eigenvalue.push_back(min_eigenvalue(m.choi()));
        r.subunital_margin.push_back(min_eigenvalue(HermitianMatrix::identity(dout) - unit));
    }
    r.unit_sum_residual = (sum - identity_matrix(dout)).norm();
    r.unit_sum_ok = r.unit_sum_residual <= settings.unit_sum_tolerance;
    r.completely_positive = std::all_of(r.choi_min_eigenvalue.begin(), r.choi_min_eigenvalue.end(),
                                        [&](double v) { return v >= -settings.subunital_tolerance; });
    r.subunital = std::all_of(r.subunital_margin.begin(), r.subunital_margin.end(),
                              [&](double v) { return v >= -settings.subunital_tolerance; });

    Rng rng(seed);
    r.schwartz_min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        const ComplexMatrix x = ginibre(din, din, rng);
        for (const auto& m : maps) {
            const ComplexMatrix zx = qde::apply(m, x);
            const ComplexMatrix gap = qde::apply(m, ComplexMatrix(x.adjoint() * x)) - zx.adjoint() * zx;
            r.schwartz_min_eigenvalue =
                std::min(r.schwartz_min_eigenvalue, min_eigenvalue(HermitianMatrix::symmetrized(gap)));
        }
        ++r.schwartz_samples;
    }
    if (samples == 0) r.schwartz_min_eigenvalue = 0.0;
    r.schwartz_ok = r.schwartz_min_eigenvalue >= -1e-8;
    return r;
}

ValidationReport validate_partition(const Partition& zeta, const Settings& settings, std::uint64_t seed,
                                    std::size_t samples) {
    return validate_partition(std::span<const KrausMap>(zeta.maps()), settings, seed, samples);
}

// --------------------------- constructors -----------------------------------

namespace {

void check_projector_family(std::span<const HermitianMatrix> projectors, const Settings& settings, const char* who) {
    if (projectors.empty()) throw Error(ErrorKind::validation, std::string(who) + ": no projectors");
    const std::size_t d = projectors.front().dim();
    ComplexMatrix sum = ComplexMatrix::Zero(idx(d), idx(d));
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        const ComplexMatrix& p = projectors[i].matrix();
        if (projectors[i].dim() != d) throw Error(ErrorKind::dimension_mismatch, std::string(who) + ": mixed dimensions");
        const double idem = (p * p - p).norm();
        if (idem > settings.projector_tolerance) {
            std::ostringstream os;
            os << who << ": element " << i << " is not a projector (|P^2 - P|_F = " << idem << ")";
            throw Error(ErrorKind::validation, os.str());
        }
        for (std::size_t j = 0; j < i; ++j) {
            const double overlap = (p * projectors[j].matrix()).norm();
            if (overlap > settings.projector_tolerance) {
                std::ostringstream os;
                os << who << ": projectors " << j << " and " << i << " are not orthogonal (|P_j P_i|_F = " << overlap
                   << ")";
                throw Error(ErrorKind::validation, os.str());
            }
        }
        sum += p;
    }
    const double residual = (sum - identity_matrix(d)).norm();
    if (residual > settings.projector_tolerance) {
        std::ostringstream os;
        os << who << ": projectors do not sum to the identity (|sum - I|_F = " << residual << ")";
        throw Error(ErrorKind::validation, os.str());
    }
}

// Orthonormal basis of the range of a projector.
ComplexMatrix range_basis(const HermitianMatrix& p) {
    const auto s = spectral_decompose(p);
    Eigen::Index rank = 0;
    while (rank < s.eigenvalues.size() && s.eigenvalues(rank) > 0.5) ++rank;
    return s.eigenvectors.leftCols(rank);
}

}  // namespace

Partition vn_partition(std::span<const HermitianMatrix> projectors, const Settings& settings) {
    check_projector_family(projectors, settings, "vn_partition");
    std::vector<KrausMap> maps;
    for (std::size_t i = 0; i < projectors.size(); ++i)
        maps.emplace_back(std::vector<ComplexMatrix>{projectors[i].matrix()}, std::to_string(i));
    return Partition(std::move(maps), settings);
}

Partition basis_partition(const ComplexMatrix& basis) {
    std::vector<KrausMap> maps;
    for (Eigen::Index i = 0; i < basis.cols(); ++i)
        maps.emplace_back(std::vector<ComplexMatrix>{ops::ket_bra(basis.col(i))}, std::to_string(i));
    return Partition(std::move(maps));
}

Partition pinching_invariant_partition(std::span<const HermitianMatrix> projectors, const StateFunctional& phi,
                                       const Settings& settings) {
    check_projector_family(projectors, settings, "pinching_invariant_partition");
    const std::size_t d = projectors.front().dim();
    if (phi.dim() != d) throw Error(ErrorKind::dimension_mismatch, "pinching_invariant_partition: state dimension");
    const ComplexMatrix& rho = phi.density().matrix();
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        const ComplexMatrix& p = projectors[i].matrix();
        const double comm = (rho * p - p * rho).norm();
        if (comm > settings.commutation_tolerance) {
            std::ostringstream os;
            os << "pinching_invariant_partition: projector " << i << " does not commute with the state (|[rho,P]|_F = "
               << comm << "); only commuting conditional expectations are supported";
            throw Error(ErrorKind::unsupported, os.str());
        }
    }
    std::vector<KrausMap> maps;
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        const ComplexMatrix& p = projectors[i].matrix();
        const ComplexMatrix range = range_basis(projectors[i]);
        const double weight = (rho * p).trace().real();
        ComplexMatrix local;
        if (weight > settings.zero_weight) {
            local = p * rho * p / weight;
        } else {
            local = p / static_cast<double>(range.cols());
        }
        const auto s = spectral_decompose(HermitianMatrix::symmetrized(local));
        std::vector<ComplexMatrix> ks;
        for (Eigen::Index a = 0; a < s.eigenvalues.size(); ++a) {
            const double lam = s.eigenvalues(a);
            if (lam <= 1e-15) continue;
            for (Eigen::Index b = 0; b < range.cols(); ++b)
                ks.push_back(std::sqrt(lam) * s.eigenvectors.col(a) * range.col(b).adjoint());
        }
        maps.emplace_back(std::move(ks), std::to_string(i));
    }
    return Partition(std::move(maps), settings);
}

Partition random_partition(std::size_t in_dim, std::size_t out_dim, std::size_t outcomes, std::size_t kraus_per_map,
                           Rng& rng) {
    if (outcomes == 0 || kraus_per_map == 0) throw Error(ErrorKind::validation, "random_partition: empty family");
    std::vector<std::vector<ComplexMatrix>> gs(outcomes);
    ComplexMatrix s = ComplexMatrix::Zero(idx(out_dim), idx(out_dim));
    for (auto& g : gs)
        for (std::size_t k = 0; k < kraus_per_map; ++k) {
            g.push_back(ginibre(in_dim, out_dim, rng));
            s += g.back().adjoint() * g.back();
        }
    const ComplexMatrix norm = psd_inverse_sqrt(s);
    std::vector<KrausMap> maps;
    for (std::size_t i = 0; i < outcomes; ++i) {
        for (auto& k : gs[i]) k = k * norm;
        maps.emplace_back(std::move(gs[i]), std::to_string(i));
    }
    return Partition(std::move(maps));
}

std::vector<KrausMap> complete_with_absorber(std::span<const KrausMap> maps, const Settings& settings) {
    if (maps.empty()) throw Error(ErrorKind::validation, "complete_with_absorber: empty family");
    const std::size_t d = maps.front().out_dim();
    if (maps.front().in_dim() != d)
        throw Error(ErrorKind::dimension_mismatch, "complete_with_absorber: needs a map from M_d to M_d");
    ComplexMatrix rest = identity_matrix(d);
    for (const auto& m : maps) rest -= m.unit_image().matrix();
    const double lowest = min_eigenvalue(HermitianMatrix::symmetrized(rest));
    if (lowest < -settings.subunital_tolerance) {
        std::ostringstream os;
        os << "complete_with_absorber: family is not sub-unital (min eigenvalue of I - sum = " << lowest << ")";
        throw Error(ErrorKind::validation, os.str());
    }
    std::vector<KrausMap> out(maps.begin(), maps.end());
    std::set<std::string> labels;
    for (const auto& m : out) labels.insert(m.label());
    std::string label = "absorber";
    while (labels.count(label)) label += "'";
    out.emplace_back(std::vector<ComplexMatrix>{psd_sqrt(rest)}, label);
    return out;
}

}  // namespace qde
