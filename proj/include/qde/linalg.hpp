// Dense hermitian kernel: spectra, functional calculus,
// support projections, Kronecker products and block (direct-sum) algebras.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qde/settings.hpp"

namespace qde {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

bool all_finite(const ComplexMatrix& m);

// Max |A_ij - conj(A_ji)|.
double hermiticity_defect(const ComplexMatrix& m);

// ----------------------------------------------------------------------------
// HermitianMatrix: stored symmetrized, A = (A + A^†)/2.

class HermitianMatrix {
public:
    HermitianMatrix() = default;

    // Checks squareness, finiteness and |A - A^†| <= tol, then symmetrizes.
    explicit HermitianMatrix(const ComplexMatrix& m, double tol = 1e-10);

    // For products that are hermitian by construction; no tolerance check.
    static HermitianMatrix symmetrized(const ComplexMatrix& m);

    static HermitianMatrix identity(std::size_t dim);
    static HermitianMatrix zero(std::size_t dim);
    static HermitianMatrix diagonal(const RealVector& d);

    const ComplexMatrix& matrix() const { return m_; }
    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    double trace() const { return m_.trace().real(); }

    friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
    friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b);
    friend HermitianMatrix operator*(double s, const HermitianMatrix& a);

private:
    ComplexMatrix m_;
};

// ----------------------------------------------------------------------------
// BlockAlgebra: direct sum of full matrix algebras M_{d_1} + ... + M_{d_m},
// realized on C^{d} with each basis index assigned to one block. Blocks need
// not be contiguous, which keeps the type closed under tensor products.

class BlockAlgebra {
public:
    BlockAlgebra() = default;

    // Contiguous blocks of the given sizes.
    explicit BlockAlgebra(const std::vector<std::size_t>& block_dims);

    static BlockAlgebra full(std::size_t dim);
    static BlockAlgebra diagonal(std::size_t dim);
    static BlockAlgebra from_labels(const std::vector<std::size_t>& block_of_index);

    std::size_t dim() const { return block_of_.size(); }
    std::size_t block_count() const { return indices_.size(); }
    std::size_t block_of(std::size_t index) const { return block_of_[index]; }
    const std::vector<std::size_t>& indices(std::size_t block) const { return indices_[block]; }
    std::vector<std::size_t> block_dims() const;
    bool is_full() const { return indices_.size() == 1; }

    // Restriction of a density to the algebra (zero every off-block entry).
    ComplexMatrix compress(const ComplexMatrix& m) const;
    // Max modulus of an off-block entry.
    double off_block_defect(const ComplexMatrix& m) const;
    ComplexMatrix extract_block(const ComplexMatrix& m, std::size_t block) const;

    friend bool operator==(const BlockAlgebra& a, const BlockAlgebra& b) {
        return a.block_of_ == b.block_of_;
    }

private:
    void index_blocks();

    std::vector<std::size_t> block_of_;
    std::vector<std::vector<std::size_t>> indices_;
};

BlockAlgebra tensor(const BlockAlgebra& a, const BlockAlgebra& b);
BlockAlgebra direct_sum(std::span<const BlockAlgebra> parts);

// ----------------------------------------------------------------------------
// Spectral calculus.

struct SpectralDecomposition {
    RealVector eigenvalues;      // descending
    ComplexMatrix eigenvectors;  // orthonormal columns
};

// Throws Error(convergence) carrying the Frobenius norm on solver failure.
SpectralDecomposition spectral_decompose(const HermitianMatrix& a);

// V f(Λ) V^†
HermitianMatrix apply_function(const SpectralDecomposition& s,
                               const std::function<double(double)>& f);

double min_eigenvalue(const HermitianMatrix& a);
double max_eigenvalue(const HermitianMatrix& a);

// Absolute threshold below which an eigenvalue is outside the support:
// cutoff * largest eigenvalue (0 when the matrix vanishes).
double support_threshold(const RealVector& eigenvalues, double relative_cutoff);

struct SupportLog {
    HermitianMatrix log;      // V ln(Λ_+) V^† on the support, 0 elsewhere
    HermitianMatrix support;  // projector onto the support
    std::size_t rank = 0;
    double smallest_retained = 0.0;
};

// Eigenvalues in [-psd_tolerance, 0) are clamped to 0; more negative ones
// raise Error(not_positive). `relative_cutoff` defaults to settings.support_cutoff.
SupportLog matrix_log_on_support(const HermitianMatrix& a, const Settings& settings = default_settings());
SupportLog matrix_log_on_support(const HermitianMatrix& a, double relative_cutoff,
                                 const Settings& settings = default_settings());

HermitianMatrix support_projection(const HermitianMatrix& a, const Settings& settings = default_settings());

// exp(iH) for hermitian H.
ComplexMatrix unitary_exp(const HermitianMatrix& h);

// Kronecker product; Error(resource) when the product dimension exceeds `cap`.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t cap = 4096);

// Sum of singular values of a hermitian matrix (sum of |eigenvalues|).
double trace_norm(const HermitianMatrix& a);

// Block-diagonal matrix from the given blocks.
ComplexMatrix block_diagonal(std::span<const ComplexMatrix> blocks);

// Small named operators.
namespace ops {
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();
// |v><v|
ComplexMatrix ket_bra(const ComplexVector& v);
ComplexMatrix basis_projector(std::size_t dim, std::size_t i);
}  // namespace ops

}  // namespace qde
