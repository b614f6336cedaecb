#include "qde/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qde/errors.hpp"

namespace qde {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

// --------------------------- StateFunctional --------------------------------

StateFunctional::StateFunctional(BlockAlgebra algebra, const HermitianMatrix& density, const Settings& settings)
    : algebra_(std::move(algebra)), density_(density) {
    if (algebra_.dim() != density_.dim()) {
        std::ostringstream os;
        os << "state: density dimension " << density_.dim() << " does not match algebra dimension " << algebra_.dim();
        throw Error(ErrorKind::dimension_mismatch, os.str());
    }
    const double defect = algebra_.off_block_defect(density_.matrix());
    if (defect > settings.hermiticity_tolerance) {
        std::ostringstream os;
        os << "state: density has off-block entries up to " << defect << " for the declared block algebra";
        throw Error(ErrorKind::validation, os.str());
    }
    density_ = HermitianMatrix::symmetrized(algebra_.compress(density_.matrix()));
    build_spectrum(settings);
}

StateFunctional::StateFunctional(const HermitianMatrix& density, const Settings& settings)
    : StateFunctional(BlockAlgebra::full(density.dim()), density, settings) {}

StateFunctional StateFunctional::restricted(const BlockAlgebra& algebra, const ComplexMatrix& density,
                                            const Settings& settings) {
    StateFunctional s;
    s.algebra_ = algebra;
    s.density_ = HermitianMatrix::symmetrized(algebra.compress(density));
    s.build_spectrum(settings);
    return s;
}

StateFunctional StateFunctional::maximally_mixed(std::size_t dim) {
    return StateFunctional((1.0 / static_cast<double>(dim)) * HermitianMatrix::identity(dim));
}

void StateFunctional::build_spectrum(const Settings& settings) {
    if (!all_finite(density_.matrix())) throw Error(ErrorKind::validation, "state: non-finite density entries");
    spectrum_.clear();
    spectrum_.reserve(algebra_.block_count());
    bool clamped = false;
    for (std::size_t b = 0; b < algebra_.block_count(); ++b) {
        auto s = spectral_decompose(HermitianMatrix::symmetrized(algebra_.extract_block(density_.matrix(), b)));
        const double lowest = s.eigenvalues.minCoeff();
        if (lowest < -settings.psd_tolerance) {
            std::ostringstream os;
            os << "state: density is not positive semidefinite (eigenvalue " << lowest << " in block " << b << ")";
            throw Error(ErrorKind::not_positive, os.str());
        }
        if (lowest < 0.0) {
            clamped = true;
            s.eigenvalues = s.eigenvalues.cwiseMax(0.0);
        }
        spectrum_.push_back({std::move(s.eigenvalues), std::move(s.eigenvectors)});
    }
    if (clamped) {
        ComplexMatrix rebuilt = ComplexMatrix::Zero(density_.matrix().rows(), density_.matrix().cols());
        for (std::size_t b = 0; b < spectrum_.size(); ++b) {
            const auto& sp = spectrum_[b];
            const ComplexMatrix blk =
                sp.eigenvectors * sp.eigenvalues.cast<Complex>().asDiagonal() * sp.eigenvectors.adjoint();
            const auto& idx = algebra_.indices(b);
            for (std::size_t j = 0; j < idx.size(); ++j)
                for (std::size_t i = 0; i < idx.size(); ++i)
                    rebuilt(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j])) =
                        blk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        density_ = HermitianMatrix::symmetrized(rebuilt);
    }
    weight_ = density_.trace();
}

double StateFunctional::max_eigenvalue() const {
    double top = 0.0;
    for (const auto& sp : spectrum_) top = std::max(top, sp.eigenvalues.maxCoeff());
    return top;
}

StateFunctional StateFunctional::scaled(double s) const {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorKind::validation, "state: scale factor must be finite and >= 0");
    StateFunctional r = *this;
    r.density_ = s * density_;
    r.weight_ = s * weight_;
    for (auto& sp : r.spectrum_) sp.eigenvalues *= s;
    return r;
}

StateFunctional operator+(const StateFunctional& a, const StateFunctional& b) {
    if (!(a.algebra_ == b.algebra_)) throw Error(ErrorKind::dimension_mismatch, "state sum: algebras differ");
    return StateFunctional::restricted(a.algebra_, (a.density_ + b.density_).matrix());
}

// --------------------------- entropies --------------------------------------

double evaluate(const StateFunctional& phi, const HermitianMatrix& x) {
    if (phi.dim() != x.dim()) {
        std::ostringstream os;
        os << "evaluate: state dimension " << phi.dim() << " vs observable dimension " << x.dim();
        throw Error(ErrorKind::dimension_mismatch, os.str());
    }
    return (phi.density().matrix() * x.matrix()).trace().real();
}

double von_neumann_entropy(const StateFunctional& phi, const Settings& settings) {
    if (!phi.is_normalized(settings.normalization_tolerance)) {
        std::ostringstream os;
        os << "von_neumann_entropy: state weight " << phi.weight() << " is not 1";
        throw Error(ErrorKind::not_normalized, os.str());
    }
    double s = 0.0;
    for (const auto& sp : phi.spectrum())
        for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) s -= xlogx(sp.eigenvalues(i));
    return std::max(s, 0.0);
}

DivergenceReport relative_entropy_report(const StateFunctional& omega, const StateFunctional& phi,
                                         const Settings& settings) {
    if (!(omega.algebra() == phi.algebra()))
        throw Error(ErrorKind::dimension_mismatch, "relative_entropy: functionals live on different algebras");

    const double phi_top = phi.max_eigenvalue();
    const double omega_top = omega.max_eigenvalue();
    const double phi_threshold = phi_top > 0.0 ? settings.support_cutoff * phi_top : 0.0;
    const double omega_threshold = omega_top > 0.0 ? settings.support_cutoff * omega_top : 0.0;

    DivergenceReport report;
    report.leakage_threshold = settings.support_cutoff * std::max(phi_top, omega_top);
    report.smallest_retained = std::numeric_limits<double>::infinity();

    double self_term = 0.0;   // tr ρ_ω ln ρ_ω
    double cross_term = 0.0;  // tr ρ_ω ln ρ_φ on supp ρ_φ
    double leakage = 0.0;
    double below_support = 0.0;  // largest eigenvalue of ρ_φ that was dropped

    for (std::size_t b = 0; b < phi.algebra().block_count(); ++b) {
        const auto& sw = omega.spectrum()[b];
        const auto& sp = phi.spectrum()[b];
        for (Eigen::Index i = 0; i < sw.eigenvalues.size(); ++i)
            if (sw.eigenvalues(i) > omega_threshold) self_term += xlogx(sw.eigenvalues(i));

        // ρ_ω expressed in the eigenbasis of ρ_φ: diagonal weights <v|ρ_ω|v>.
        const ComplexMatrix omega_block = omega.algebra().extract_block(omega.density().matrix(), b);
        const ComplexMatrix rotated = sp.eigenvectors.adjoint() * omega_block * sp.eigenvectors;
        for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
            const double mu = sp.eigenvalues(i);
            const double w = rotated(i, i).real();
            if (mu > phi_threshold && mu > 0.0) {
                cross_term += w * std::log(mu);
                ++report.support_rank;
                report.smallest_retained = std::min(report.smallest_retained, mu);
            } else {
                leakage += std::max(w, 0.0);
                below_support = std::max(below_support, mu);
            }
        }
    }
    if (report.support_rank == 0) report.smallest_retained = 0.0;
    report.support_leakage = leakage;

    const double margin_factor = 1e3;
    report.near_cutoff =
        (leakage > report.leakage_threshold / margin_factor && leakage <= report.leakage_threshold * margin_factor) ||
        (report.support_rank > 0 && report.smallest_retained < phi_threshold * margin_factor) ||
        (below_support > 0.0 && below_support > phi_threshold / margin_factor);

    if (leakage > report.leakage_threshold) {
        report.value = ExtendedReal::infinity();
    } else {
        report.value = ExtendedReal(self_term - cross_term);
    }
    return report;
}

ExtendedReal relative_entropy(const StateFunctional& omega, const StateFunctional& phi, const Settings& settings) {
    return relative_entropy_report(omega, phi, settings).value;
}

ExtendedReal donald_residual(std::span<const StateFunctional> parts, const StateFunctional& phi,
                             const Settings& settings) {
    if (parts.empty()) throw Error(ErrorKind::validation, "donald_residual: empty family");
    StateFunctional omega = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) omega = omega + parts[i];

    ExtendedReal lhs = relative_entropy(omega, phi, settings);
    ExtendedReal rhs = 0.0;
    for (const auto& part : parts) {
        lhs += relative_entropy(part, omega, settings);
        rhs += relative_entropy(part, phi, settings);
    }
    if (lhs.is_infinite() || rhs.is_infinite()) return ExtendedReal::infinity();
    return std::abs(lhs.to_double() - rhs.to_double());
}

double decomposition_entropy_gap(std::span<const StateFunctional> parts, const StateFunctional& phi,
                                 const Settings& settings) {
    if (parts.empty()) throw Error(ErrorKind::validation, "decomposition_entropy_gap: empty family");
    if (!phi.is_normalized(settings.normalization_tolerance))
        throw Error(ErrorKind::not_normalized, "decomposition_entropy_gap: state must be normalized");
    ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(phi.dim()), static_cast<Eigen::Index>(phi.dim()));
    for (const auto& part : parts) {
        if (!(part.algebra() == phi.algebra()))
            throw Error(ErrorKind::dimension_mismatch, "decomposition_entropy_gap: parts live on another algebra");
        total += part.density().matrix();
    }
    const double mismatch = (total - phi.density().matrix()).norm();
    if (mismatch > 1e-9) {
        std::ostringstream os;
        os << "decomposition_entropy_gap: parts do not sum to the state (|sum - rho|_F = " << mismatch << ")";
        throw Error(ErrorKind::validation, os.str());
    }
    double average = 0.0;
    for (const auto& part : parts) {
        const double p = part.weight();
        if (p <= settings.zero_weight) continue;
        const auto branch = StateFunctional::restricted(part.algebra(), part.density().matrix() / p, settings);
        average += p * relative_entropy(branch, phi, settings).finite_value();
    }
    return von_neumann_entropy(phi, settings) - average;
}

}  // namespace qde
