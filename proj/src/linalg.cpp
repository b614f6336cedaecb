#include "qde/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qde/errors.hpp"

namespace qde {

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

double hermiticity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// --------------------------- HermitianMatrix --------------------------------

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        std::ostringstream os;
        os << "hermitian matrix must be square and non-empty, got " << m.rows() << "x" << m.cols();
        throw Error(ErrorKind::validation, os.str());
    }
    if (!all_finite(m)) throw Error(ErrorKind::validation, "hermitian matrix has non-finite entries");
    const double defect = hermiticity_defect(m);
    if (defect > tol) {
        std::ostringstream os;
        os << "matrix is not hermitian: max |A - A^dag| = " << defect << " > " << tol;
        throw Error(ErrorKind::validation, os.str());
    }
    m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix& m) {
    HermitianMatrix h;
    h.m_ = 0.5 * (m + m.adjoint());
    return h;
}

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
    return symmetrized(ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

HermitianMatrix HermitianMatrix::zero(std::size_t dim) {
    return symmetrized(ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
    ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) m(i, i) = d(i);
    return symmetrized(m);
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::dimension_mismatch, "hermitian sum: dimension mismatch");
    HermitianMatrix r;
    r.m_ = a.m_ + b.m_;
    return r;
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::dimension_mismatch, "hermitian difference: dimension mismatch");
    HermitianMatrix r;
    r.m_ = a.m_ - b.m_;
    return r;
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
    HermitianMatrix r;
    r.m_ = s * a.m_;
    return r;
}

// --------------------------- BlockAlgebra -----------------------------------

BlockAlgebra::BlockAlgebra(const std::vector<std::size_t>& block_dims) {
    if (block_dims.empty()) throw Error(ErrorKind::validation, "block algebra needs at least one block");
    for (std::size_t b = 0; b < block_dims.size(); ++b) {
        if (block_dims[b] == 0) throw Error(ErrorKind::validation, "block dimensions must be >= 1");
        block_of_.insert(block_of_.end(), block_dims[b], b);
    }
    index_blocks();
}

BlockAlgebra BlockAlgebra::full(std::size_t dim) { return BlockAlgebra(std::vector<std::size_t>{dim}); }

BlockAlgebra BlockAlgebra::diagonal(std::size_t dim) {
    if (dim == 0) throw Error(ErrorKind::validation, "block algebra dimension must be >= 1");
    return BlockAlgebra(std::vector<std::size_t>(dim, 1));
}

BlockAlgebra BlockAlgebra::from_labels(const std::vector<std::size_t>& block_of_index) {
    if (block_of_index.empty()) throw Error(ErrorKind::validation, "block algebra dimension must be >= 1");
    // Relabel in order of first appearance so equal algebras compare equal.
    std::vector<std::size_t> seen;
    BlockAlgebra a;
    a.block_of_.reserve(block_of_index.size());
    for (std::size_t label : block_of_index) {
        auto it = std::find(seen.begin(), seen.end(), label);
        if (it == seen.end()) {
            seen.push_back(label);
            a.block_of_.push_back(seen.size() - 1);
        } else {
            a.block_of_.push_back(static_cast<std::size_t>(it - seen.begin()));
        }
    }
    a.index_blocks();
    return a;
}

void BlockAlgebra::index_blocks() {
    std::size_t count = 0;
    for (std::size_t b : block_of_) count = std::max(count, b + 1);
    indices_.assign(count, {});
    for (std::size_t i = 0; i < block_of_.size(); ++i) indices_[block_of_[i]].push_back(i);
}

std::vector<std::size_t> BlockAlgebra::block_dims() const {
    std::vector<std::size_t> dims;
    dims.reserve(indices_.size());
    for (const auto& idx : indices_) dims.push_back(idx.size());
    return dims;
}

ComplexMatrix BlockAlgebra::compress(const ComplexMatrix& m) const {
    if (static_cast<std::size_t>(m.rows()) != dim() || m.rows() != m.cols())
        throw Error(ErrorKind::dimension_mismatch, "block algebra: matrix dimension mismatch");
    if (is_full()) return m;
    ComplexMatrix r = m;
    for (Eigen::Index j = 0; j < r.cols(); ++j)
        for (Eigen::Index i = 0; i < r.rows(); ++i)
            if (block_of_[static_cast<std::size_t>(i)] != block_of_[static_cast<std::size_t>(j)]) r(i, j) = 0.0;
    return r;
}

double BlockAlgebra::off_block_defect(const ComplexMatrix& m) const {
    if (static_cast<std::size_t>(m.rows()) != dim() || m.rows() != m.cols())
        throw Error(ErrorKind::dimension_mismatch, "block algebra: matrix dimension mismatch");
    double worst = 0.0;
    if (is_full()) return worst;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (block_of_[static_cast<std::size_t>(i)] != block_of_[static_cast<std::size_t>(j)])
                worst = std::max(worst, std::abs(m(i, j)));
    return worst;
}

ComplexMatrix BlockAlgebra::extract_block(const ComplexMatrix& m, std::size_t block) const {
    const auto& idx = indices_.at(block);
    const auto n = static_cast<Eigen::Index>(idx.size());
    ComplexMatrix r(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            r(i, j) = m(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                        static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    return r;
}

BlockAlgebra tensor(const BlockAlgebra& a, const BlockAlgebra& b) {
    std::vector<std::size_t> labels;
    labels.reserve(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j)
            labels.push_back(a.block_of(i) * b.block_count() + b.block_of(j));
    return BlockAlgebra::from_labels(labels);
}

BlockAlgebra direct_sum(std::span<const BlockAlgebra> parts) {
    if (parts.empty()) throw Error(ErrorKind::validation, "direct sum of zero algebras");
    std::vector<std::size_t> labels;
    std::size_t offset = 0;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < p.dim(); ++i) labels.push_back(offset + p.block_of(i));
        offset += p.block_count();
    }
    return BlockAlgebra::from_labels(labels);
}

// --------------------------- spectral calculus ------------------------------

SpectralDecomposition spectral_decompose(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix());
    if (solver.info() != Eigen::Success || !solver.eigenvalues().allFinite()) {
        std::ostringstream os;
        os << "eigensolver did not converge (dim " << a.dim() << ", |A|_F = " << a.matrix().norm() << ")";
        throw Error(ErrorKind::convergence, os.str());
    }
    // Eigen returns ascending order; reverse to descending.
    SpectralDecomposition s;
    s.eigenvalues = solver.eigenvalues().reverse();
    s.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return s;
}

HermitianMatrix apply_function(const SpectralDecomposition& s, const std::function<double(double)>& f) {
    RealVector fv(s.eigenvalues.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(s.eigenvalues(i));
    return HermitianMatrix::symmetrized(s.eigenvectors * fv.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint());
}

double min_eigenvalue(const HermitianMatrix& a) {
    return spectral_decompose(a).eigenvalues.minCoeff();
}

double max_eigenvalue(const HermitianMatrix& a) {
    return spectral_decompose(a).eigenvalues.maxCoeff();
}

double support_threshold(const RealVector& eigenvalues, double relative_cutoff) {
    if (eigenvalues.size() == 0) return 0.0;
    const double top = eigenvalues.maxCoeff();
    return top > 0.0 ? relative_cutoff * top : 0.0;
}

namespace {

void require_psd(const RealVector& ev, const Settings& settings, const char* who) {
    if (ev.size() > 0 && ev.minCoeff() < -settings.psd_tolerance) {
        std::ostringstream os;
        os << who << ": matrix is not positive semidefinite (min eigenvalue " << ev.minCoeff() << ")";
        throw Error(ErrorKind::not_positive, os.str());
    }
}

}  // namespace

SupportLog matrix_log_on_support(const HermitianMatrix& a, const Settings& settings) {
    return matrix_log_on_support(a, settings.support_cutoff, settings);
}

SupportLog matrix_log_on_support(const HermitianMatrix& a, double relative_cutoff, const Settings& settings) {
    if (!(relative_cutoff > 0.0)) throw Error(ErrorKind::validation, "support cutoff must be > 0");
    const auto s = spectral_decompose(a);
    require_psd(s.eigenvalues, settings, "matrix_log_on_support");
    const double threshold = support_threshold(s.eigenvalues, relative_cutoff);

    SupportLog out;
    out.smallest_retained = 0.0;
    RealVector logs = RealVector::Zero(s.eigenvalues.size());
    RealVector mask = RealVector::Zero(s.eigenvalues.size());
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        const double lambda = s.eigenvalues(i);
        if (lambda > threshold && lambda > 0.0) {
            logs(i) = std::log(lambda);
            mask(i) = 1.0;
            ++out.rank;
            out.smallest_retained = lambda;  // descending order
        }
    }
    out.log = HermitianMatrix::symmetrized(s.eigenvectors * logs.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint());
    out.support = HermitianMatrix::symmetrized(s.eigenvectors * mask.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint());
    return out;
}

HermitianMatrix support_projection(const HermitianMatrix& a, const Settings& settings) {
    const auto s = spectral_decompose(a);
    require_psd(s.eigenvalues, settings, "support_projection");
    const double threshold = support_threshold(s.eigenvalues, settings.support_cutoff);
    return apply_function(s, [threshold](double x) { return (x > threshold && x > 0.0) ? 1.0 : 0.0; });
}

ComplexMatrix unitary_exp(const HermitianMatrix& h) {
    const auto s = spectral_decompose(h);
    ComplexVector phases(s.eigenvalues.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, s.eigenvalues(i));
    return s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t cap) {
    const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
    const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
    if (rows > cap || cols > cap) {
        std::ostringstream os;
        os << "tensor product dimension " << rows << "x" << cols << " exceeds cap " << cap;
        throw Error(ErrorKind::resource, os.str());
    }
    return Eigen::kroneckerProduct(a, b).eval();
}

double trace_norm(const HermitianMatrix& a) {
    return spectral_decompose(a).eigenvalues.cwiseAbs().sum();
}

ComplexMatrix block_diagonal(std::span<const ComplexMatrix> blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        m.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return m;
}

namespace ops {

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

ComplexMatrix hadamard() {
    ComplexMatrix m(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, r, -r;
    return m;
}

ComplexMatrix ket_bra(const ComplexVector& v) { return v * v.adjoint(); }

ComplexMatrix basis_projector(std::size_t dim, std::size_t i) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return m;
}

}  // namespace ops

}  // namespace qde
