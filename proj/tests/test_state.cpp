#include <doctest.h>

#include "oracles.hpp"
#include "qde/errors.hpp"
#include "qde/partition.hpp"
#include "qde/random.hpp"
#include "qde/state.hpp"

using namespace qde;

namespace {

StateFunctional diag_state(std::initializer_list<double> d) {
    RealVector v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) v(i++) = x;
    return StateFunctional(HermitianMatrix::diagonal(v));
}

HermitianMatrix plus_projector() {
    return HermitianMatrix(ops::ket_bra(ComplexVector::Constant(2, 1 / std::sqrt(2.0))));
}

}  // namespace

TEST_CASE("evaluate") {
    CHECK(evaluate(StateFunctional::maximally_mixed(2), HermitianMatrix(ops::pauli_z())) == doctest::Approx(0.0));
    RealVector d(2);
    d << 3, 7;
    CHECK(evaluate(diag_state({1, 0}), HermitianMatrix::diagonal(d)) == doctest::Approx(3.0));
    CHECK(evaluate(StateFunctional(plus_projector()), HermitianMatrix(ops::pauli_x())) == doctest::Approx(1.0));
    CHECK(evaluate(diag_state({0.25, 0.5}), HermitianMatrix::identity(2)) == doctest::Approx(0.75));
    CHECK_THROWS_AS(evaluate(diag_state({1, 0}), HermitianMatrix::identity(3)), Error);
}

TEST_CASE("state construction invariants") {
    RealVector bad(2);
    bad << 1.1, -0.1;
    try {
        StateFunctional s{HermitianMatrix::diagonal(bad)};
        FAIL("negative eigenvalue accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::not_positive);
    }
    // Off-block entries are rejected on a commutative algebra.
    try {
        StateFunctional s(BlockAlgebra::diagonal(2), plus_projector());
        FAIL("off-block density accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
    }
    const auto sub = diag_state({0.2, 0.1});
    CHECK(sub.weight() == doctest::Approx(0.3));
    CHECK_FALSE(sub.is_normalized());
}

TEST_CASE("von Neumann entropy") {
    CHECK(von_neumann_entropy(diag_state({1, 0})) == doctest::Approx(0.0));
    CHECK(von_neumann_entropy(StateFunctional::maximally_mixed(2)) == doctest::Approx(std::log(2.0)));
    CHECK(von_neumann_entropy(diag_state({0.9, 0.1})) == doctest::Approx(oracle::binary_entropy(0.9)).epsilon(1e-14));
    CHECK(von_neumann_entropy(diag_state({0.9, 0.1})) == doctest::Approx(0.325083).epsilon(1e-6));
    CHECK_THROWS_AS(von_neumann_entropy(diag_state({0.5, 0.1})), Error);

    Rng rng(21);
    for (int t = 0; t < 30; ++t) {
        const std::size_t d = 2 + static_cast<std::size_t>(t % 4);
        const HermitianMatrix rho = random_density(d, rng);
        const double s = von_neumann_entropy(StateFunctional(rho));
        CHECK(std::abs(s - oracle::vn_entropy(rho.matrix())) <= 1e-10);
        CHECK(s <= std::log(static_cast<double>(d)) + 1e-12);
        CHECK(s >= 0.0);
    }
}

TEST_CASE("relative entropy examples") {
    const auto phi = diag_state({0.7, 0.3});
    CHECK(relative_entropy(phi, phi).finite_value() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(relative_entropy(diag_state({1, 0}), StateFunctional::maximally_mixed(2)).finite_value() ==
          doctest::Approx(std::log(2.0)));
    CHECK(relative_entropy(StateFunctional::maximally_mixed(2), diag_state({1, 0})).is_infinite());
    for (double lam : {0.1, 0.37, 0.5, 1.0}) {
        const double s = relative_entropy(phi.scaled(lam), phi).finite_value();
        CHECK(s == doctest::Approx(lam * std::log(lam)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(relative_entropy(phi, StateFunctional::maximally_mixed(3)), Error);
}

TEST_CASE("relative entropy agrees with the trace formula") {
    Rng rng(22);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 2 + static_cast<std::size_t>(t % 5);
        const HermitianMatrix w = random_density(d, rng, 1 + static_cast<std::size_t>(t % 3));
        const HermitianMatrix p = random_density(d, rng);
        const double s = relative_entropy(StateFunctional(w), StateFunctional(p)).finite_value();
        CHECK(std::abs(s - oracle::umegaki(w.matrix(), p.matrix())) <= 1e-9);
        CHECK(s >= -1e-12);
    }
}

TEST_CASE("support decisions come with a margin report") {
    RealVector d(2);
    d << 1.0, 1e-13;
    const StateFunctional thin{HermitianMatrix::diagonal(d / d.sum())};
    const auto rep = relative_entropy_report(StateFunctional::maximally_mixed(2), thin);
    CHECK(rep.value.is_infinite());
    CHECK(rep.support_rank == 1);
    CHECK(rep.near_cutoff);
    const auto ok = relative_entropy_report(thin, StateFunctional::maximally_mixed(2));
    CHECK_FALSE(ok.value.is_infinite());
}

TEST_CASE("lower semicontinuity along full-rank sequences") {
    // ρ_n -> diag(1,0), σ = diag(1/2,1/2): S(ρ_n, σ) -> ln 2 from below.
    const auto sigma = StateFunctional::maximally_mixed(2);
    double prev = -1.0;
    for (int n = 1; n <= 8; ++n) {
        const double e = std::pow(10.0, -n);
        const double s = relative_entropy(diag_state({1 - e, e}), sigma).finite_value();
        CHECK(s > prev);
        CHECK(s <= std::log(2.0) + 1e-12);
        prev = s;
    }
    CHECK(prev == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("donald identity examples") {
    const auto phi = diag_state({0.6, 0.4});
    const StateFunctional halves[] = {phi.scaled(0.5), phi.scaled(0.5)};
    CHECK(donald_residual(halves, phi).to_double() <= 1e-12);
    const StateFunctional split[] = {diag_state({0.5, 0}), diag_state({0, 0.5})};
    CHECK(donald_residual(split, StateFunctional::maximally_mixed(2)).to_double() <= 1e-10);

    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        const HermitianMatrix rho = random_density(3, rng);
        const Partition povm = random_partition(3, 3, 3, 1, rng);
        const auto s = spectral_decompose(rho);
        const ComplexMatrix root = apply_function(s, [](double v) { return std::sqrt(std::max(v, 0.0)); }).matrix();
        std::vector<StateFunctional> parts;
        for (const auto& m : povm.maps())
            parts.push_back(StateFunctional(HermitianMatrix(root * m.unit_image().matrix() * root, 1e-9)));
        const StateFunctional psi(random_density(3, rng));
        CHECK(donald_residual(parts, psi).to_double() <= 1e-8);
    }
    CHECK_THROWS_AS(donald_residual(std::span<const StateFunctional>{}, phi), Error);
}

TEST_CASE("decomposition entropy gap") {
    for (double p : {0.1, 0.3, 0.5}) {
        const auto rho = diag_state({p, 1 - p});
        const StateFunctional eig[] = {diag_state({p, 0}), diag_state({0, 1 - p})};
        CHECK(std::abs(decomposition_entropy_gap(eig, rho)) <= 1e-12);
        const StateFunctional whole[] = {rho};
        CHECK(decomposition_entropy_gap(whole, rho) == doctest::Approx(oracle::binary_entropy(p)));
    }
    const auto rho = diag_state({0.5, 0.5});
    const StateFunctional wrong[] = {diag_state({0.5, 0})};
    CHECK_THROWS_AS(decomposition_entropy_gap(wrong, rho), Error);
}
