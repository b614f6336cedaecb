#include "qde/random.hpp"

#include <cmath>

namespace qde {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 over the pair
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double re = n(rng);
            const double im = n(rng);
            g(i, j) = Complex(re, im);
        }
    return g;
}

HermitianMatrix random_hermitian(std::size_t dim, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const double re = u(rng);
            const double im = u(rng);
            a(i, j) = Complex(re, im);
        }
    return HermitianMatrix::symmetrized(a);
}

HermitianMatrix random_density(std::size_t dim, Rng& rng, std::size_t rank) {
    if (rank == 0 || rank > dim) rank = dim;
    const ComplexMatrix g = ginibre(dim, rank, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return HermitianMatrix::symmetrized(rho);
}

ComplexMatrix haar_unitary(std::size_t dim, Rng& rng) {
    const ComplexMatrix z = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(z.rows(), z.cols());
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const double mag = std::abs(r(i, i));
        if (mag > 0.0) q.col(i) *= r(i, i) / mag;
    }
    return q;
}

ComplexVector random_unit_vector(std::size_t dim, Rng& rng) {
    ComplexVector v = ginibre(dim, 1, rng).col(0);
    return v / v.norm();
}

}  // namespace qde
