// Randomized property suites. Each family reports the largest
// residual lhs - rhs (or |lhs - rhs| for identities) over its trials.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qde/classical.hpp"
#include "qde/random.hpp"

namespace qde {

struct SuiteConfig {
    std::vector<std::size_t> dims{2, 3, 4};
    int trials = 200;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct FamilyResult {
    std::string name;
    int trials = 0;
    int violations = 0;
    double max_residual = 0;  // -inf style minimum is clamped to the first residual
    double tolerance = 0;
    int skipped = 0;  // trials with an infinite quantity

    bool ok() const { return violations == 0; }
};

// Relative-entropy properties.
FamilyResult check_pinsker_bound(const SuiteConfig& c);       // ‖ρ_ω - ρ_φ‖²_tr / 2 <= S(ω,φ)
FamilyResult check_joint_convexity(const SuiteConfig& c);
FamilyResult check_monotonicity(const SuiteConfig& c);        // random unital CP maps
FamilyResult check_donald_identity(const SuiteConfig& c);
FamilyResult check_decomposition_gap(const SuiteConfig& c);   // gap >= 0
FamilyResult check_scaling_identity(const SuiteConfig& c);

// Information of partitions.
FamilyResult check_direct_sum_identity(const SuiteConfig& c); // H via Σ p_i S vs one direct-sum divergence
FamilyResult check_decomposition_identity(const SuiteConfig& c); // H = Hc + Hq
FamilyResult check_subadditivity(const SuiteConfig& c);
FamilyResult check_conditional_monotonicity(const SuiteConfig& c);
FamilyResult check_classical_term(const SuiteConfig& c);
FamilyResult check_quantum_term(const SuiteConfig& c);
FamilyResult check_automorphism_invariance(const SuiteConfig& c);
FamilyResult check_an_certificate(const SuiteConfig& c, int N = 5);

// Function partitions.
FamilyResult check_refinement_growth(const SuiteConfig& c);        // H(ζ∘η) >= H(ζ)
FamilyResult check_classical_conditioning(const SuiteConfig& c);   // H(ζ|η∘β) <= H(ζ|η)
FamilyResult check_permutation_invariance(const SuiteConfig& c);  // H(θζ|θβ) = H(ζ|β)
FamilyResult check_comparison_bound(const SuiteConfig& c, int n_max = 4);
FamilyResult check_embedding_agreement(const SuiteConfig& c);

std::vector<FamilyResult> run_property_suite(const SuiteConfig& c);

// Random function partition with the given number of outcomes.
FunctionPartition random_function_partition(std::size_t points, std::size_t outcomes, Rng& rng);

// Random permutation and a measure constant on its cycles (so it is preserved).
struct PreservedPermutation {
    FiniteSpace space;
    std::vector<std::size_t> perm;
};
PreservedPermutation random_preserved_permutation(std::size_t points, Rng& rng);

}  // namespace qde
