// Completely positive maps in Kraus form and partitions of unity.
//
// Heisenberg convention: a map ζ: A -> B acts on observables x of A as
// ζ(x) = Σ_k K_k^† x K_k, so every Kraus matrix is dim(A) x dim(B).
// in_dim() is dim(A) (the algebra the map reads), out_dim() is dim(B).
// The predual sends a density ρ on B to Σ_k K_k ρ K_k^† on A.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qde/linalg.hpp"
#include "qde/random.hpp"
#include "qde/settings.hpp"
#include "qde/state.hpp"

namespace qde {

class KrausMap {
public:
    explicit KrausMap(std::vector<ComplexMatrix> kraus, std::string label = "");

    std::size_t in_dim() const { return static_cast<std::size_t>(kraus_.front().rows()); }
    std::size_t out_dim() const { return static_cast<std::size_t>(kraus_.front().cols()); }
    const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
    const std::string& label() const { return label_; }

    // ζ(I) = Σ K^† K
    HermitianMatrix unit_image() const;

    // Σ_{ab} |a><b| ⊗ ζ(|a><b|), positive iff ζ is completely positive.
    HermitianMatrix choi() const;

    KrausMap relabeled(std::string label) const;

    // Same action with at most in_dim*out_dim Kraus operators.
    KrausMap compressed(double relative_cutoff = 1e-14) const;

private:
    std::vector<ComplexMatrix> kraus_;
    std::string label_;
};

ComplexMatrix apply(const KrausMap& map, const ComplexMatrix& x);
HermitianMatrix apply(const KrausMap& map, const HermitianMatrix& x);

// Σ K ρ K^† (not normalized).
ComplexMatrix predual_density(const KrausMap& map, const ComplexMatrix& rho);

// ω∘ζ as a functional restricted to `target` (defaults to the full algebra).
StateFunctional predual_apply(const KrausMap& map, const StateFunctional& omega);
StateFunctional predual_apply(const KrausMap& map, const StateFunctional& omega, const BlockAlgebra& target,
                              const Settings& settings = default_settings());

// ----------------------------------------------------------------------------

class Partition {
public:
    // Checks common dimensions, distinct labels and the unit sum
    // |Σ ζ_i(I) - I|_F <= unit_sum_tolerance. The algebra is that of the
    // observable side (dim = in_dim), full by default.
    explicit Partition(std::vector<KrausMap> maps, const Settings& settings = default_settings());
    Partition(std::vector<KrausMap> maps, BlockAlgebra algebra, const Settings& settings = default_settings());

    std::size_t size() const { return maps_.size(); }
    std::size_t in_dim() const { return maps_.front().in_dim(); }
    std::size_t out_dim() const { return maps_.front().out_dim(); }
    const std::vector<KrausMap>& maps() const { return maps_; }
    const KrausMap& operator[](std::size_t i) const { return maps_[i]; }
    const BlockAlgebra& algebra() const { return algebra_; }
    std::vector<std::string> labels() const;

    // ζ = Σ_i ζ_i as one Kraus map.
    KrausMap total() const;

    // Predual of ζ_i on ω, restricted to the partition's algebra.
    StateFunctional branch(std::size_t i, const StateFunctional& omega,
                           const Settings& settings = default_settings()) const;

private:
    std::vector<KrausMap> maps_;
    BlockAlgebra algebra_;
};

// Single map {I} on M_d.
Partition trivial_partition(std::size_t dim);

class Automorphism {
public:
    // θ(x) = u x u^†; u must be unitary within 1e-10.
    explicit Automorphism(const ComplexMatrix& u, double tol = 1e-10);

    static Automorphism identity(std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(u_.rows()); }
    const ComplexMatrix& unitary() const { return u_; }
    ComplexMatrix apply(const ComplexMatrix& x) const { return u_ * x * u_.adjoint(); }
    Automorphism inverse() const;
    // θ^k for any integer k.
    Automorphism power(int k) const;

private:
    ComplexMatrix u_;
};

// ζ∘η = {ζ_i η_j}, labels "i,j"; requires η.out_dim == ζ.in_dim.
Partition compose(const Partition& zeta, const Partition& eta, const Settings& settings = default_settings());

// ζ1 ⊗ ζ2, labels "i*j".
Partition tensor_partition(const Partition& a, const Partition& b, const Settings& settings = default_settings());

// θ(ζ) = θ ζ θ^{-1}: Kraus K -> u K u^†.
Partition conjugate(const Automorphism& theta, const Partition& zeta);

struct ValidationReport {
    double unit_sum_residual = 0.0;
    std::vector<double> choi_min_eigenvalue;
    std::vector<double> subunital_margin;  // min eigenvalue of I - ζ_i(I)
    double schwartz_min_eigenvalue = 0.0;  // min over samples of λ_min(ζ(x^†x) - ζ(x)^†ζ(x))
    std::size_t schwartz_samples = 0;
    bool unit_sum_ok = false;
    bool completely_positive = false;
    bool subunital = false;
    bool schwartz_ok = false;

    bool ok() const { return unit_sum_ok && completely_positive && subunital && schwartz_ok; }
};

ValidationReport validate_partition(std::span<const KrausMap> maps, const Settings& settings = default_settings(),
                                    std::uint64_t seed = 7, std::size_t samples = 50);
ValidationReport validate_partition(const Partition& zeta, const Settings& settings = default_settings(),
                                    std::uint64_t seed = 7, std::size_t samples = 50);

// Single-Kraus maps x -> P_i x P_i.
Partition vn_partition(std::span<const HermitianMatrix> projectors, const Settings& settings = default_settings());

// Rank-1 projective measurement in the columns of a unitary.
Partition basis_partition(const ComplexMatrix& basis);

// ζ_i(x) = φ(P_i x P_i)/φ(P_i) P_i; needs [ρ_φ, P_i] = 0.
Partition pinching_invariant_partition(std::span<const HermitianMatrix> projectors, const StateFunctional& phi,
                                       const Settings& settings = default_settings());

// Random CP partition: Kraus G_ik S^{-1/2} with S = Σ G^†G.
Partition random_partition(std::size_t in_dim, std::size_t out_dim, std::size_t outcomes, std::size_t kraus_per_map,
                           Rng& rng);

// Adds the map with Kraus sqrt(I - Σ ζ_i(I)); requires in_dim == out_dim.
std::vector<KrausMap> complete_with_absorber(std::span<const KrausMap> maps, const Settings& settings = default_settings());

}  // namespace qde
