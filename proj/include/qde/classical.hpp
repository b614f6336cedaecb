// Function partitions on finite probability spaces,
// permutation dynamics, exact Markov cylinder entropies and the diagonal
// embedding into the quantum modules.

#pragma once

#include <cstddef>
#include <vector>

#include "qde/info.hpp"
#include "qde/partition.hpp"
#include "qde/state.hpp"

namespace qde {

class FiniteSpace {
public:
    // μ_x >= 0 with Σ μ_x = 1 within 1e-12.
    explicit FiniteSpace(std::vector<double> measure);

    std::size_t size() const { return mu_.size(); }
    const std::vector<double>& measure() const { return mu_; }
    static FiniteSpace uniform(std::size_t points);

private:
    std::vector<double> mu_;
};

// Family of nonnegative functions with Σ_i ζ_i(x)² = 1 at every point; the
// maps act as ψ -> ζ_i ψ ζ_i. Negative entries are replaced by their modulus.
class FunctionPartition {
public:
    explicit FunctionPartition(std::vector<std::vector<double>> functions, double tol = 1e-10);

    // 0/1 partition: point x belongs to outcome block_of[x].
    static FunctionPartition indicator(const std::vector<std::size_t>& block_of, std::size_t outcomes);
    static FunctionPartition trivial(std::size_t points);

    std::size_t size() const { return f_.size(); }
    std::size_t points() const { return f_.front().size(); }
    const std::vector<std::vector<double>>& functions() const { return f_; }
    const std::vector<double>& operator[](std::size_t i) const { return f_[i]; }

private:
    FunctionPartition() = default;
    std::vector<std::vector<double>> f_;
    friend FunctionPartition compose(const FunctionPartition&, const FunctionPartition&);
    friend FunctionPartition permute(const FunctionPartition&, const std::vector<std::size_t>&, int);
};

// -Σ μ(ζ_i²) ln μ(ζ_i²) + Σ μ(ζ_i² ln ζ_i²)
double classical_information(const FiniteSpace& mu, const FunctionPartition& zeta);

// Pointwise products ζ_i η_j, outcomes ordered i-major.
FunctionPartition compose(const FunctionPartition& zeta, const FunctionPartition& eta);

// H(ζ∘η) - H(η); μ∘ζ = μ for every function partition.
double classical_conditional(const FiniteSpace& mu, const FunctionPartition& zeta, const FunctionPartition& eta);

// Same quantity through the conditional expectation onto an indicator η:
// -Σ_i μ(E[ζ_i²] ln E[ζ_i²]) + Σ_i μ(ζ_i² ln ζ_i²). Error(validation) if η is not 0/1.
double classical_conditional_by_expectation(const FiniteSpace& mu, const FunctionPartition& zeta,
                                            const FunctionPartition& eta);

// Point map x -> perm[x]; θ(f) = f∘perm^{-1}, so permute(ζ, perm, k) = θ^k(ζ)
// and permute(ζ, perm, -k)_i = ζ_i∘perm^k.
FunctionPartition permute(const FunctionPartition& zeta, const std::vector<std::size_t>& perm, int k);

// Checks perm is a bijection; returns max_x |μ(perm[x]) - μ(x)|.
double permutation_invariance_residual(const FiniteSpace& mu, const std::vector<std::size_t>& perm);

// a_n = H(ζ∘ζ^-_n) - H(ζ^-_n), ζ^-_n = θ^{-1}ζ∘...∘θ^{-n}ζ.
// Error(validation) if the permutation does not preserve μ.
EntropySequence permutation_entropy_sequence(const FiniteSpace& mu, const std::vector<std::size_t>& perm,
                                             const FunctionPartition& zeta, int N,
                                             const Settings& settings = default_settings());

class SymbolicShift {
public:
    // Row-stochastic P (rows within 1e-10); π solved from πP = π.
    explicit SymbolicShift(std::vector<std::vector<double>> P);
    // Given π is checked against πP = π within 1e-10.
    SymbolicShift(std::vector<std::vector<double>> P, std::vector<double> pi);

    static SymbolicShift bernoulli(const std::vector<double>& p);

    std::size_t alphabet() const { return P_.size(); }
    const std::vector<std::vector<double>>& transition() const { return P_; }
    const std::vector<double>& stationary() const { return pi_; }

    // ln μ[x_0..x_n] = ln π_{x_0} + Σ ln P_{x_k x_{k+1}}; -inf for null cylinders.
    double log_cylinder(const std::vector<std::size_t>& word) const;

    // -Σ π_i P_ij ln P_ij
    double entropy_rate() const;

    // Largest number of windows (s^L) enumerated.
    static constexpr std::size_t window_cap = 8192;

private:
    void validate();
    std::vector<std::vector<double>> P_;
    std::vector<double> pi_;
};

// a_n = H(Y_0..Y_n) - H(Y_1..Y_n) with Y_k = label[X_k] (identity labels by default).
EntropySequence markov_entropy_sequence(const SymbolicShift& shift, int N,
                                        const std::vector<std::size_t>& labels = {});

// Cylinder measure on windows of length L with the cyclic rotation
// (x_0, ..., x_{L-1}) -> (x_1, ..., x_{L-1}, x_0) and the partition by x_0.
// Window index: x_0 is the most significant digit.
struct WindowEmbedding {
    FiniteSpace space;
    FunctionPartition coordinate;
    std::vector<std::size_t> perm;
};
WindowEmbedding markov_window_embedding(const SymbolicShift& shift, int L);

// φ = diag(μ) on the diagonal algebra and Kraus elements diag(ζ_i).
struct DiagonalEmbedding {
    StateFunctional phi;
    Partition zeta;
};
DiagonalEmbedding embed_diagonal(const FiniteSpace& mu, const FunctionPartition& zeta);
Partition embed_partition(const FunctionPartition& zeta);

// u|x> = |perm[x]>
Automorphism permutation_automorphism(const std::vector<std::size_t>& perm);

struct ComparisonReport {
    int n = 0;
    double H_zeta_n = 0;       // H(θ^{n-1}ζ∘...∘ζ)
    double H_eta_n = 0;
    double conditional = 0;    // H(ζ|η)
    double residual = 0;       // H(ζ_n) - H(η_n) - n H(ζ|η); <= tolerance means the bound holds
    bool holds = false;
};

ComparisonReport partition_comparison_bound(const FiniteSpace& mu, const std::vector<std::size_t>& perm,
                                            const FunctionPartition& zeta, const FunctionPartition& eta, int n,
                                            double tol = 1e-8, const Settings& settings = default_settings());

// Piecewise-linear partition of unity on grid points in [0,1]: the squared
// functions ramp linearly across a band of the given width around each cut.
FunctionPartition ramp_partition(const std::vector<double>& grid, const std::vector<double>& cuts, double width);

struct IndicatorApproximation {
    FunctionPartition eta;
    double width = 0;
    double conditional = 0;  // H(ζ|η)
};

// Halves the ramp width until H(ζ|η) <= eps for the indicator ζ of the same cuts.
IndicatorApproximation approximate_indicator(const FiniteSpace& mu, const std::vector<double>& grid,
                                             const std::vector<double>& cuts, double eps);

}  // namespace qde
