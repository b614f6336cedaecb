#include <doctest.h>

#include "oracles.hpp"
#include "qde/errors.hpp"
#include "qde/linalg.hpp"
#include "qde/random.hpp"

using namespace qde;

namespace {

HermitianMatrix diag(std::initializer_list<double> d) {
    RealVector v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) v(i++) = x;
    return HermitianMatrix::diagonal(v);
}

double frob(const ComplexMatrix& m) { return m.norm(); }

}  // namespace

TEST_CASE("hermitian matrices reject asymmetric input and are stored symmetrized") {
    ComplexMatrix m(2, 2);
    m << 1, Complex(0, 1), Complex(0, 1), 2;
    CHECK_THROWS_AS((void)HermitianMatrix{m}, Error);
    ComplexMatrix n(2, 2);
    n << 1, Complex(0.5, 1e-12), Complex(0.5, 0), 2;
    const HermitianMatrix h(n);
    CHECK(hermiticity_defect(h.matrix()) == 0.0);
    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)HermitianMatrix{bad}, Error);
}

TEST_CASE("spectral decomposition examples") {
    SUBCASE("identity") {
        const auto s = spectral_decompose(HermitianMatrix::identity(3));
        for (int i = 0; i < 3; ++i) CHECK(s.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("diag(2,-1) gives descending values and basis vectors") {
        const auto s = spectral_decompose(diag({2, -1}));
        CHECK(s.eigenvalues(0) == doctest::Approx(2.0));
        CHECK(s.eigenvalues(1) == doctest::Approx(-1.0));
        CHECK(std::abs(s.eigenvectors(0, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(s.eigenvectors(1, 1)) == doctest::Approx(1.0));
    }
    SUBCASE("pauli x") {
        const auto s = spectral_decompose(HermitianMatrix(ops::pauli_x()));
        CHECK(s.eigenvalues(0) == doctest::Approx(1.0));
        CHECK(s.eigenvalues(1) == doctest::Approx(-1.0));
        const ComplexVector v = s.eigenvectors.col(0);
        CHECK(std::abs(v(0)) == doctest::Approx(1 / std::sqrt(2.0)));
        CHECK(std::abs(v(0) - v(1)) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("spectral reconstruction on random hermitian matrices") {
    Rng rng(derive_seed(3, 0));
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 2 + static_cast<std::size_t>(t % 7);
        const HermitianMatrix a = random_hermitian(d, rng);
        const auto s = spectral_decompose(a);
        const ComplexMatrix V = s.eigenvectors;
        const ComplexMatrix rec = V * s.eigenvalues.cast<Complex>().asDiagonal() * V.adjoint();
        CHECK(frob(rec - a.matrix()) <= 1e-9 * std::max(1.0, frob(a.matrix())));
        CHECK(frob(V.adjoint() * V - ComplexMatrix::Identity(d, d)) <= 1e-10);
        for (Eigen::Index i = 1; i < s.eigenvalues.size(); ++i) CHECK(s.eigenvalues(i - 1) >= s.eigenvalues(i));
        // Independent solver on the same input.
        const Eigen::VectorXd ref = oracle::eigenvalues(a.matrix());
        CHECK(std::abs(ref.maxCoeff() - s.eigenvalues(0)) <= 1e-10);
    }
}

TEST_CASE("matrix log on the support") {
    SUBCASE("identity gives zero") {
        const auto l = matrix_log_on_support(HermitianMatrix::identity(2));
        CHECK(frob(l.log.matrix()) <= 1e-15);
        CHECK(l.rank == 2);
    }
    SUBCASE("half identity") {
        const auto l = matrix_log_on_support(diag({0.5, 0.5}));
        CHECK(l.log.matrix()(0, 0).real() == doctest::Approx(std::log(0.5)));
        CHECK(l.log.matrix()(1, 1).real() == doctest::Approx(std::log(0.5)));
    }
    SUBCASE("rank-deficient diag(0.9, 0.1, 0)") {
        const auto l = matrix_log_on_support(diag({0.9, 0.1, 0.0}));
        CHECK(l.rank == 2);
        CHECK(l.log.matrix()(0, 0).real() == doctest::Approx(std::log(0.9)));
        CHECK(l.log.matrix()(1, 1).real() == doctest::Approx(std::log(0.1)));
        CHECK(std::abs(l.log.matrix()(2, 2)) == 0.0);
        CHECK(l.support.matrix()(2, 2).real() == doctest::Approx(0.0));
        CHECK(l.smallest_retained == doctest::Approx(0.1));
    }
    SUBCASE("tiny negative eigenvalues are clamped, larger ones rejected") {
        CHECK_NOTHROW(matrix_log_on_support(diag({1.0, -5e-11})));
        try {
            matrix_log_on_support(diag({1.0, -1e-6}));
            FAIL("expected not_positive");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::not_positive);
        }
    }
    SUBCASE("log of exp recovers the exponent") {
        Rng rng(11);
        for (int t = 0; t < 50; ++t) {
            const std::size_t d = 2 + static_cast<std::size_t>(t % 5);
            const HermitianMatrix h = random_hermitian(d, rng);
            const auto s = spectral_decompose(h);
            const HermitianMatrix e = apply_function(s, [](double x) { return std::exp(x); });
            CHECK(frob(matrix_log_on_support(e).log.matrix() - h.matrix()) <= 1e-8);
        }
    }
}

TEST_CASE("support projection") {
    CHECK(frob(support_projection(diag({0.3, 0.7})).matrix() - ComplexMatrix::Identity(2, 2)) <= 1e-12);
    CHECK(frob(support_projection(diag({1.0, 0.0})).matrix() - diag({1.0, 0.0}).matrix()) <= 1e-12);
    const ComplexVector plus = ComplexVector::Constant(2, 1 / std::sqrt(2.0));
    const HermitianMatrix p(ops::ket_bra(plus));
    const ComplexMatrix P = support_projection(p).matrix();
    CHECK(frob(P - p.matrix()) <= 1e-12);
    CHECK(frob(P * P - P) <= 1e-12);

    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = 2 + static_cast<std::size_t>(t % 5);
        const HermitianMatrix a = random_density(d, rng, 1 + static_cast<std::size_t>(t) % d);
        const ComplexMatrix Q = support_projection(a).matrix();
        CHECK(frob(Q * Q - Q) <= 1e-9);
        CHECK(frob(Q * a.matrix() - a.matrix()) <= 1e-9);
        CHECK(frob(Q * a.matrix() - a.matrix() * Q) <= 1e-9);
    }
}

TEST_CASE("kronecker products") {
    CHECK(frob(tensor(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) - ComplexMatrix::Identity(4, 4)) ==
          0.0);
    const ComplexMatrix d = tensor(diag({1, 0}).matrix(), diag({1, 0}).matrix());
    CHECK(frob(d - diag({1, 0, 0, 0}).matrix()) == 0.0);
    const ComplexMatrix xx = tensor(ops::pauli_x(), ops::pauli_x());
    ComplexVector e11 = ComplexVector::Zero(4);
    e11(0) = 1;
    ComplexVector e22 = ComplexVector::Zero(4);
    e22(3) = 1;
    CHECK((xx * e11 - e22).norm() == 0.0);

    Rng rng(9);
    const ComplexMatrix A = ginibre(2, 3, rng), B = ginibre(3, 2, rng), C = ginibre(3, 2, rng), D = ginibre(2, 3, rng);
    CHECK(frob(tensor(A, B) * tensor(C, D) - tensor(A * C, B * D)) <= 1e-12);
    CHECK(frob(tensor(A + A, B) - 2.0 * tensor(A, B)) <= 1e-12);

    CHECK_THROWS_AS(tensor(ComplexMatrix::Identity(64, 64), ComplexMatrix::Identity(65, 65)), Error);
}

TEST_CASE("block algebras") {
    const BlockAlgebra a({2, 1});
    CHECK(a.dim() == 3);
    CHECK(a.block_count() == 2);
    ComplexMatrix m = ComplexMatrix::Ones(3, 3);
    const ComplexMatrix c = a.compress(m);
    CHECK(std::abs(c(0, 2)) == 0.0);
    CHECK(std::abs(c(0, 1)) == 1.0);
    CHECK(a.off_block_defect(m) == 1.0);
    CHECK(BlockAlgebra::diagonal(3).block_count() == 3);
    CHECK(BlockAlgebra::full(3).is_full());
    const BlockAlgebra parts[] = {BlockAlgebra::full(2), BlockAlgebra::full(2)};
    CHECK(direct_sum(parts).block_dims() == std::vector<std::size_t>{2, 2});
    CHECK(tensor(BlockAlgebra::diagonal(2), BlockAlgebra::full(2)).block_dims() == std::vector<std::size_t>{2, 2});
}

TEST_CASE("unitary exponential and trace norm") {
    Rng rng(13);
    const HermitianMatrix h = random_hermitian(3, rng);
    const ComplexMatrix u = unitary_exp(h);
    CHECK(frob(u.adjoint() * u - ComplexMatrix::Identity(3, 3)) <= 1e-12);
    CHECK(trace_norm(diag({0.5, -0.25})) == doctest::Approx(0.75));
}
