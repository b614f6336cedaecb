#include <doctest.h>

#include "oracles.hpp"
#include "qde/errors.hpp"
#include "qde/info.hpp"
#include "qde/partition.hpp"
#include "qde/random.hpp"

using namespace qde;

namespace {

double frob(const ComplexMatrix& m) { return m.norm(); }

Partition z_projective() {
    const HermitianMatrix p[] = {HermitianMatrix(ops::basis_projector(2, 0)),
                                 HermitianMatrix(ops::basis_projector(2, 1))};
    return vn_partition(p);
}

Partition x_projective() { return basis_partition(ops::hadamard()); }

StateFunctional diag_state(double a, double b) {
    RealVector v(2);
    v << a, b;
    return StateFunctional(HermitianMatrix::diagonal(v));
}

}  // namespace

TEST_CASE("heisenberg action") {
    const KrausMap p0({ops::basis_projector(2, 0)}, "0");
    CHECK(frob(qde::apply(p0, HermitianMatrix::identity(2)).matrix() - ops::basis_projector(2, 0)) == 0.0);
    const KrausMap half({std::sqrt(0.5) * ComplexMatrix::Identity(2, 2)});
    CHECK(frob(qde::apply(half, HermitianMatrix(ops::pauli_z())).matrix() - 0.5 * ops::pauli_z()) <= 1e-15);
    CHECK(frob(qde::apply(p0, HermitianMatrix(ops::pauli_x())).matrix()) == 0.0);
    CHECK_THROWS_AS(qde::apply(p0, HermitianMatrix::identity(3)), Error);

    Rng rng(1);
    const Partition z = random_partition(3, 2, 2, 2, rng);
    for (int t = 0; t < 20; ++t) {
        const HermitianMatrix rho = random_density(3, rng);
        const HermitianMatrix x = qde::apply(z[0], rho);
        CHECK(min_eigenvalue(x) >= -1e-12);
    }
}

TEST_CASE("predual action") {
    Rng rng(2);
    const StateFunctional w(random_density(2, rng));
    const KrausMap id({ComplexMatrix::Identity(2, 2)});
    CHECK(frob(predual_apply(id, w).density().matrix() - w.density().matrix()) <= 1e-15);

    const KrausMap p0({ops::basis_projector(2, 0)});
    const auto out = predual_apply(p0, StateFunctional::maximally_mixed(2));
    CHECK(frob(out.density().matrix() - 0.5 * ops::basis_projector(2, 0)) <= 1e-15);

    const Partition z = random_partition(3, 2, 3, 2, rng);
    for (int t = 0; t < 100; ++t) {
        const StateFunctional rho(random_density(2, rng));
        const HermitianMatrix x = random_hermitian(3, rng);
        const auto& m = z[static_cast<std::size_t>(t) % 3];
        const ComplexMatrix sigma = predual_density(m, rho.density().matrix());
        const double lhs = (sigma * x.matrix()).trace().real();
        const double rhs = (rho.density().matrix() * qde::apply(m, x).matrix()).trace().real();
        CHECK(std::abs(lhs - rhs) <= 1e-9);
        CHECK(std::abs(sigma.trace().real() - evaluate(rho, m.unit_image())) <= 1e-10);
    }
}

TEST_CASE("composition") {
    Rng rng(3);
    SUBCASE("with the trivial partition") {
        const Partition z = random_partition(2, 3, 2, 1, rng);
        const Partition c = compose(z, trivial_partition(2));
        REQUIRE(c.size() == z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            const HermitianMatrix x = random_hermitian(2, rng);
            CHECK(frob(qde::apply(c[i], x).matrix() - qde::apply(z[i], x).matrix()) <= 1e-12);
        }
    }
    SUBCASE("Z after Z keeps the diagonal pairs") {
        const Partition c = compose(z_projective(), z_projective());
        REQUIRE(c.size() == 4);
        CHECK(c.labels() == std::vector<std::string>{"0,0", "0,1", "1,0", "1,1"});
        CHECK(frob(c[1].unit_image().matrix()) <= 1e-15);
        CHECK(frob(c[2].unit_image().matrix()) <= 1e-15);
        CHECK(frob(c[0].unit_image().matrix() - ops::basis_projector(2, 0)) <= 1e-15);
    }
    SUBCASE("Z then X weights under I/2") {
        const auto r = information(StateFunctional::maximally_mixed(2), compose(z_projective(), x_projective()));
        for (double w : r.weights) CHECK(w == doctest::Approx(0.25));
    }
    SUBCASE("action matches nested application") {
        const Partition z = random_partition(3, 2, 2, 2, rng);  // A=3 -> B=2
        const Partition e = random_partition(2, 3, 3, 1, rng);  // C=2 -> A=3
        const Partition c = compose(z, e);
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::size_t j = 0; j < e.size(); ++j) {
                const HermitianMatrix x = random_hermitian(2, rng);
                const ComplexMatrix nested = qde::apply(z[i], qde::apply(e[j], x).matrix());
                CHECK(frob(qde::apply(c[i * e.size() + j], x).matrix() - nested) <= 1e-10);
            }
        CHECK_THROWS_AS(compose(e, e), Error);
    }
    SUBCASE("associative up to labels, predual reverses order") {
        const Partition a = random_partition(2, 2, 2, 1, rng);
        const Partition b = random_partition(2, 2, 2, 1, rng);
        const Partition c = random_partition(2, 2, 2, 1, rng);
        const Partition l = compose(compose(a, b), c);
        const Partition r = compose(a, compose(b, c));
        REQUIRE(l.size() == r.size());
        const HermitianMatrix x = random_hermitian(2, rng);
        const StateFunctional rho(random_density(2, rng));
        for (std::size_t i = 0; i < l.size(); ++i) {
            CHECK(frob(qde::apply(l[i], x).matrix() - qde::apply(r[i], x).matrix()) <= 1e-9);
            const std::size_t ia = i / 4, ib = (i / 2) % 2, ic = i % 2;
            const ComplexMatrix chain = predual_density(c[ic], predual_density(b[ib], predual_density(a[ia], rho.density().matrix())));
            CHECK(frob(predual_density(l[i], rho.density().matrix()) - chain) <= 1e-9);
        }
    }
}

TEST_CASE("tensor products of partitions") {
    const Partition zz = tensor_partition(z_projective(), z_projective());
    const auto r = information(StateFunctional::maximally_mixed(4), zz);
    for (double w : r.weights) CHECK(w == doctest::Approx(0.25));
    CHECK(zz.labels()[1] == "0*1");
    CHECK(validate_partition(zz).ok());

    Rng rng(4);
    const Partition a = random_partition(2, 2, 2, 1, rng);
    const Partition b = random_partition(2, 2, 3, 1, rng);
    const HermitianMatrix ra = random_density(2, rng), rb = random_density(2, rng);
    const StateFunctional prod(HermitianMatrix(tensor(ra.matrix(), rb.matrix()), 1e-9));
    const auto ab = information(prod, tensor_partition(a, b));
    const double sum = information(StateFunctional(ra), a).total_H.to_double() +
                       information(StateFunctional(rb), b).total_H.to_double();
    CHECK(std::abs(ab.total_H.to_double() - sum) <= 1e-9);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(ab.weights[i * 3 + j] - evaluate(StateFunctional(ra), a[i].unit_image()) *
                                                       evaluate(StateFunctional(rb), b[j].unit_image())) <= 1e-12);

    const Partition with_id = tensor_partition(a, trivial_partition(1));
    const HermitianMatrix x = random_hermitian(2, rng);
    CHECK(frob(qde::apply(with_id[0], x).matrix() - qde::apply(a[0], x).matrix()) <= 1e-12);
}

TEST_CASE("validation reports") {
    CHECK(validate_partition(z_projective()).ok());
    const Partition z = z_projective();
    std::vector<KrausMap> scaled;
    for (const auto& m : z.maps()) scaled.emplace_back(std::vector<ComplexMatrix>{1.1 * m.kraus()[0]});
    const auto bad = validate_partition(scaled);
    CHECK_FALSE(bad.unit_sum_ok);
    CHECK_FALSE(bad.subunital);
    CHECK(bad.unit_sum_residual > 0.1);
    CHECK_THROWS_AS((void)Partition{scaled}, Error);

    Rng rng(5);
    std::vector<KrausMap> sub;
    for (int i = 0; i < 2; ++i) sub.emplace_back(std::vector<ComplexMatrix>{0.4 * ginibre(3, 3, rng) / 3.0});
    const auto full = complete_with_absorber(sub);
    CHECK(full.size() == 3);
    const auto rep = validate_partition(full);
    CHECK(rep.ok());
    CHECK(rep.schwartz_samples >= 50);
    CHECK(rep.schwartz_min_eigenvalue >= -1e-8);

    for (int t = 0; t < 20; ++t) CHECK(validate_partition(random_partition(3, 2, 2, 2, rng)).ok());
}

TEST_CASE("conjugation by automorphisms") {
    const Partition z = z_projective();
    const Partition same = conjugate(Automorphism::identity(2), z);
    CHECK(frob(same[0].unit_image().matrix() - z[0].unit_image().matrix()) == 0.0);
    const Partition flipped = conjugate(Automorphism(ops::pauli_x()), z);
    CHECK(frob(flipped[0].unit_image().matrix() - ops::basis_projector(2, 1)) <= 1e-15);
    CHECK(frob(flipped[1].unit_image().matrix() - ops::basis_projector(2, 0)) <= 1e-15);

    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        const Automorphism th(haar_unitary(3, rng));
        const Partition p = random_partition(3, 3, 2, 2, rng);
        const Partition q = conjugate(th, p);
        const Partition back = conjugate(th.inverse(), q);
        const HermitianMatrix x = random_hermitian(3, rng);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const ComplexMatrix expect = th.apply(qde::apply(p[i], th.inverse().apply(x.matrix())));
            CHECK(frob(qde::apply(q[i], x).matrix() - expect) <= 1e-10);
            CHECK(frob(qde::apply(back[i], x).matrix() - qde::apply(p[i], x).matrix()) <= 1e-10);
        }
        CHECK(validate_partition(q).ok());
        CHECK(frob(th.power(3).unitary() - th.unitary() * th.unitary() * th.unitary()) <= 1e-10);
        CHECK(frob(th.power(-2).unitary() * th.power(2).unitary() - ComplexMatrix::Identity(3, 3)) <= 1e-10);
    }
    ComplexMatrix not_unitary = ComplexMatrix::Identity(2, 2);
    not_unitary(0, 0) = 1.1;
    CHECK_THROWS_AS(Automorphism{not_unitary}, Error);
}

TEST_CASE("von Neumann partitions") {
    const HermitianMatrix id[] = {HermitianMatrix::identity(2)};
    CHECK(vn_partition(id).size() == 1);
    CHECK(z_projective().size() == 2);

    ComplexMatrix p2 = ComplexMatrix::Zero(3, 3);
    p2(0, 0) = p2(1, 1) = 1;
    const HermitianMatrix split[] = {HermitianMatrix(p2), HermitianMatrix(ops::basis_projector(3, 2))};
    const Partition s = vn_partition(split);
    CHECK(frob(s[0].unit_image().matrix() + s[1].unit_image().matrix() - ComplexMatrix::Identity(3, 3)) <= 1e-15);

    const HermitianMatrix not_proj[] = {HermitianMatrix(0.5 * ComplexMatrix::Identity(2, 2)),
                                        HermitianMatrix(0.5 * ComplexMatrix::Identity(2, 2))};
    CHECK_THROWS_AS(vn_partition(not_proj), Error);
    const HermitianMatrix overlap[] = {HermitianMatrix(ops::basis_projector(2, 0)),
                                       HermitianMatrix(ops::ket_bra(ComplexVector::Constant(2, 1 / std::sqrt(2.0))))};
    CHECK_THROWS_AS(vn_partition(overlap), Error);
}

TEST_CASE("pinching-invariant partitions") {
    const HermitianMatrix z[] = {HermitianMatrix(ops::basis_projector(2, 0)),
                                 HermitianMatrix(ops::basis_projector(2, 1))};
    const Partition a = pinching_invariant_partition(z, StateFunctional::maximally_mixed(2));
    CHECK(invariance_check(StateFunctional::maximally_mixed(2), a) <= 1e-15);
    CHECK(validate_partition(a).ok());

    const auto phi = diag_state(0.9, 0.1);
    const Partition b = pinching_invariant_partition(z, phi);
    CHECK(invariance_check(phi, b) <= 1e-9);
    const auto r = information(phi, b);
    CHECK(r.weights[0] == doctest::Approx(0.9));
    CHECK(r.weights[1] == doctest::Approx(0.1));

    // ζ_i(x) = φ(P_i x P_i)/φ(P_i) P_i on a block projector in M_3.
    RealVector d(3);
    d << 0.5, 0.3, 0.2;
    const StateFunctional psi(HermitianMatrix::diagonal(d));
    ComplexMatrix p01 = ComplexMatrix::Zero(3, 3);
    p01(0, 0) = p01(1, 1) = 1;
    const HermitianMatrix blocks[] = {HermitianMatrix(p01), HermitianMatrix(ops::basis_projector(3, 2))};
    const Partition c = pinching_invariant_partition(blocks, psi);
    Rng rng(8);
    const HermitianMatrix x = random_hermitian(3, rng);
    const double expect = (d.cast<Complex>().asDiagonal() * p01 * x.matrix() * p01).trace().real() / 0.8;
    CHECK(frob(qde::apply(c[0], x).matrix() - expect * p01) <= 1e-12);
    CHECK(invariance_check(psi, c) <= 1e-9);

    const StateFunctional plus(HermitianMatrix(ops::ket_bra(ComplexVector::Constant(2, 1 / std::sqrt(2.0)))));
    try {
        pinching_invariant_partition(z, plus);
        FAIL("non-commuting projectors accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::unsupported);
    }
}

TEST_CASE("choi matrices and compression") {
    Rng rng(10);
    const Partition p = random_partition(2, 2, 1, 6, rng);
    const KrausMap& m = p[0];
    CHECK(min_eigenvalue(m.choi()) >= -1e-12);
    const KrausMap c = m.compressed();
    CHECK(c.kraus().size() <= 4);
    const HermitianMatrix x = random_hermitian(2, rng);
    CHECK(frob(qde::apply(c, x).matrix() - qde::apply(m, x).matrix()) <= 1e-10);
}
