// Information of a partition, conditional information and the
// dynamical-entropy sequence a_n = H(ζ | ζ^-_n).

#pragma once

#include <string>
#include <vector>

#include "qde/extended_real.hpp"
#include "qde/partition.hpp"
#include "qde/settings.hpp"
#include "qde/state.hpp"

namespace qde {

struct InformationReport {
    ExtendedReal total_H;      // Σ p_i S(σ_i/p_i, σ)
    double classical_Hc = 0;   // -Σ p_i ln p_i
    ExtendedReal quantum_Hq;   // Σ S(σ_i, σ), unnormalized σ_i
    std::vector<std::string> labels;
    std::vector<double> weights;
    std::vector<ExtendedReal> per_outcome_divergence;  // S(σ_i/p_i, σ); 0 for skipped outcomes
    bool infinite_flag = false;
    double identity_residual = 0;  // |H - (Hc + Hq)|, 0 when infinite
};

// σ_i = φ∘ζ_i and σ = φ∘ζ on the partition's algebra, p_i = σ_i(I).
InformationReport information(const StateFunctional& phi, const Partition& zeta,
                              const Settings& settings = default_settings());

// One relative entropy S(⊕σ_i, ⊕ p_i σ) on the direct sum of |ζ| copies.
ExtendedReal information_via_direct_sum(const StateFunctional& phi, const Partition& zeta,
                                        const Settings& settings = default_settings());

// φ∘ζ for the total map ζ = Σ ζ_i (a state when ζ is a partition).
StateFunctional precompose(const StateFunctional& phi, const Partition& zeta,
                           const Settings& settings = default_settings());

// H_φ(ζ∘η) - H_{φ∘ζ}(η). Throws Error(infinite) if either term is +inf.
double conditional_information(const StateFunctional& phi, const Partition& zeta, const Partition& eta,
                               const Settings& settings = default_settings());

// θ^{-1}(ζ)∘θ^{-2}(ζ)∘...∘θ^{-n}(ζ), outcomes labelled by words "i1,...,in".
Partition refinement(const Automorphism& theta, const Partition& zeta, int n,
                     const Settings& settings = default_settings());

struct EntropySequence {
    std::vector<double> values;  // a_1..a_N
    double h_estimate = 0;       // a_N
    bool converged = false;      // |a_N - a_{N-1}| <= convergence tolerance
    double monotonicity_residual = 0;  // max_n max(a_{n+1} - a_n, 0)
    double upper_bound = 0;            // H_φ(ζ)
    double bound_residual = 0;         // max_n max(a_n - H_φ(ζ), 0)
    double invariance_residual = 0;    // |ρ∘θ - ρ|_F
    bool invariant_state = false;
    std::vector<double> alternate;     // H(θ^n ζ | θ^{n-1}ζ∘...∘ζ); empty when not computed
    double alternate_deviation = 0;    // max |a_n - alternate_n| (only meaningful when invariant)
    std::vector<std::string> warnings;
};

// Errors: Error(infinite) if H_φ(ζ) = +inf, Error(resource) past the branch
// cap, Error(property_violation) if the invariant-state identity fails.
EntropySequence an_sequence(const StateFunctional& phi, const Automorphism& theta, const Partition& zeta, int N,
                            const Settings& settings = default_settings());

struct AdmissibilityReport {
    bool admissible = false;
    double tolerance = 0;
    EntropySequence sequence;
};

// a_N under θ = identity compared with the admissibility tolerance.
AdmissibilityReport admissibility_check(const StateFunctional& phi, const Partition& zeta, int N,
                                        const Settings& settings = default_settings());

// |Σ_i ζ_i^*(ρ) - ρ|_F
double invariance_check(const StateFunctional& phi, const Partition& zeta);

struct ConvexityReport {
    std::vector<double> lambdas;
    std::vector<double> values;      // h estimate at λφ_1 + (1-λ)φ_0
    std::vector<double> deviations;  // value - chord
    double max_deviation = 0;        // max positive deviation above the chord
    bool convex = false;             // max_deviation <= 1e-6
};

ConvexityReport convexity_probe(const StateFunctional& phi0, const StateFunctional& phi1, const Partition& zeta,
                                const Automorphism& theta, int N, const std::vector<double>& grid,
                                const Settings& settings = default_settings());

}  // namespace qde
