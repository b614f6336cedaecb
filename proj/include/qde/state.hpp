// Positive functionals on block algebras and their entropies.
//
// A functional φ on A = ⊕_k M_{d_k} is held as a block-diagonal positive
// density ρ with φ(x) = tr(ρ x). Sub-normalized functionals are first-class:
// the relative entropy uses the trace formula without renormalization, so
// S(λω, φ) = λ ln λ + λ S(ω, φ).

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "qde/extended_real.hpp"
#include "qde/linalg.hpp"
#include "qde/settings.hpp"

namespace qde {

struct BlockSpectrum {
    RealVector eigenvalues;      // descending, clamped at 0
    ComplexMatrix eigenvectors;  // block-local coordinates
};

class StateFunctional {
public:
    // Validates block structure (off-block entries <= hermiticity tolerance)
    // and positivity (eigenvalues >= -psd_tolerance, clamped to 0).
    StateFunctional(BlockAlgebra algebra, const HermitianMatrix& density,
                    const Settings& settings = default_settings());

    // Functional on the full matrix algebra M_d.
    explicit StateFunctional(const HermitianMatrix& density, const Settings& settings = default_settings());

    // Restriction of the functional x -> tr(m x) to `algebra`: off-block
    // entries are discarded instead of rejected.
    static StateFunctional restricted(const BlockAlgebra& algebra, const ComplexMatrix& density,
                                      const Settings& settings = default_settings());

    static StateFunctional maximally_mixed(std::size_t dim);

    const BlockAlgebra& algebra() const { return algebra_; }
    const HermitianMatrix& density() const { return density_; }
    std::size_t dim() const { return density_.dim(); }
    double weight() const { return weight_; }
    const std::vector<BlockSpectrum>& spectrum() const { return spectrum_; }
    double max_eigenvalue() const;

    bool is_normalized(double tol = 1e-10) const { return std::abs(weight_ - 1.0) <= tol; }

    StateFunctional scaled(double s) const;

    friend StateFunctional operator+(const StateFunctional& a, const StateFunctional& b);

private:
    StateFunctional() = default;
    void build_spectrum(const Settings& settings);

    BlockAlgebra algebra_;
    HermitianMatrix density_;
    double weight_ = 0.0;
    std::vector<BlockSpectrum> spectrum_;
};

// φ(x) = tr(ρ x)
double evaluate(const StateFunctional& phi, const HermitianMatrix& x);

// -tr ρ ln ρ; requires a normalized state.
double von_neumann_entropy(const StateFunctional& phi, const Settings& settings = default_settings());

struct DivergenceReport {
    ExtendedReal value;
    double support_leakage = 0.0;    // tr(ρ_ω (I - P_φ))
    double leakage_threshold = 0.0;  // leakage above this means +inf
    double smallest_retained = 0.0;  // smallest eigenvalue of ρ_φ kept in the support
    std::size_t support_rank = 0;
    bool near_cutoff = false;        // decision within three decades of the threshold
};

// S(ω, φ) = tr ρ_ω (ln ρ_ω - ln ρ_φ), +inf when supp ρ_ω ⊄ supp ρ_φ.
DivergenceReport relative_entropy_report(const StateFunctional& omega, const StateFunctional& phi,
                                         const Settings& settings = default_settings());
ExtendedReal relative_entropy(const StateFunctional& omega, const StateFunctional& phi,
                              const Settings& settings = default_settings());

// |S(ω,φ) + Σ S(ω_i,ω) - Σ S(ω_i,φ)| with ω = Σ ω_i; +inf when any term is.
ExtendedReal donald_residual(std::span<const StateFunctional> parts, const StateFunctional& phi,
                             const Settings& settings = default_settings());

// S(φ) - Σ_i p_i S(ω_i/p_i, φ) for a genuine decomposition φ = Σ ω_i.
double decomposition_entropy_gap(std::span<const StateFunctional> parts, const StateFunctional& phi,
                                 const Settings& settings = default_settings());

}  // namespace qde
