#include <doctest.h>

#include "oracles.hpp"
#include "qde/classical.hpp"
#include "qde/errors.hpp"
#include "qde/random.hpp"

using namespace qde;

namespace {

using Table = std::vector<std::vector<double>>;

Table random_table(std::size_t outcomes, std::size_t points, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Table f(outcomes, std::vector<double>(points));
    for (std::size_t x = 0; x < points; ++x) {
        double s = 0.0;
        for (auto& fi : f) {
            fi[x] = u(rng);
            s += fi[x] * fi[x];
        }
        for (auto& fi : f) fi[x] /= std::sqrt(s);
    }
    return f;
}

std::vector<double> random_measure(std::size_t points, Rng& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> mu(points);
    double s = 0.0;
    for (auto& v : mu) s += (v = u(rng));
    for (auto& v : mu) v /= s;
    return mu;
}

// (ζ∘perm^k)(x) = ζ(perm^k[x])
Table pull_back(const Table& f, const std::vector<std::size_t>& perm, int k) {
    Table out = f;
    for (std::size_t x = 0; x < perm.size(); ++x) {
        std::size_t y = x;
        for (int i = 0; i < k; ++i) y = perm[y];
        for (std::size_t i = 0; i < f.size(); ++i) out[i][x] = f[i][y];
    }
    return out;
}

std::vector<double> brute_an(const std::vector<double>& mu, const std::vector<std::size_t>& perm, const Table& f,
                             int N) {
    std::vector<double> a;
    Table past = pull_back(f, perm, 1);
    for (int n = 1; n <= N; ++n) {
        if (n > 1) past = oracle::product(past, pull_back(f, perm, n));
        a.push_back(oracle::classical_H(mu, oracle::product(f, past)) - oracle::classical_H(mu, past));
    }
    return a;
}

const double h09 = oracle::binary_entropy(0.9);

}  // namespace

TEST_CASE("classical information examples") {
    const auto uniform2 = FiniteSpace::uniform(2);
    CHECK(classical_information(uniform2, FunctionPartition::indicator({0, 1}, 2)) == doctest::Approx(std::log(2.0)));
    const double c = 1 / std::sqrt(2.0);
    const FunctionPartition flat({{c, c}, {c, c}});
    CHECK(std::abs(classical_information(uniform2, flat)) <= 1e-15);
    CHECK(classical_information(FiniteSpace({0.9, 0.1}), FunctionPartition::indicator({0, 1}, 2)) ==
          doctest::Approx(0.325083).epsilon(1e-6));
    CHECK_THROWS_AS(classical_information(uniform2, FunctionPartition::trivial(3)), Error);
}

TEST_CASE("space and partition invariants") {
    CHECK_THROWS_AS(FiniteSpace({0.5, 0.6}), Error);
    CHECK_THROWS_AS(FiniteSpace({1.1, -0.1}), Error);
    CHECK_THROWS_AS(FunctionPartition({{1.0, 0.5}, {0.0, 0.5}}), Error);
    const FunctionPartition neg({{-1.0, 0.0}, {0.0, 1.0}});
    CHECK(neg[0][0] == 1.0);
}

TEST_CASE("classical information matches the formula and the diagonal embedding") {
    Rng rng(1);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto mu = random_measure(4, rng);
        const auto f = random_table(2 + static_cast<std::size_t>(t % 3), 4, rng);
        const FiniteSpace space(mu);
        const FunctionPartition z(f);
        const double h = classical_information(space, z);
        CHECK(std::abs(h - oracle::classical_H(mu, f)) <= 1e-12);
        CHECK(h >= -1e-9);
        const auto emb = embed_diagonal(space, z);
        worst = std::max(worst, std::abs(information(emb.phi, emb.zeta).total_H.to_double() - h));
        CHECK(invariance_check(emb.phi, emb.zeta) <= 1e-9);
    }
    CHECK(worst <= 1e-8);
    const auto flat = embed_diagonal(FiniteSpace::uniform(2), FunctionPartition({{0.6, 0.6}, {0.8, 0.8}}));
    CHECK(std::abs(information(flat.phi, flat.zeta).total_H.to_double()) <= 1e-12);
}

TEST_CASE("conditional information") {
    Rng rng(2);
    const FiniteSpace space(random_measure(4, rng));
    const FunctionPartition z(random_table(3, 4, rng));
    CHECK(classical_conditional(space, z, FunctionPartition::trivial(4)) ==
          doctest::Approx(classical_information(space, z)).epsilon(1e-12));
    const auto ind = FunctionPartition::indicator({0, 1, 1, 2}, 3);
    CHECK(std::abs(classical_conditional(space, ind, ind)) <= 1e-12);

    for (int t = 0; t < 50; ++t) {
        const auto mu = random_measure(4, rng);
        const FiniteSpace sp(mu);
        const FunctionPartition a(random_table(2, 4, rng)), b(random_table(2, 4, rng));
        const double c = classical_conditional(sp, a, b);
        CHECK(c >= -1e-8);
        const auto ea = embed_diagonal(sp, a);
        CHECK(std::abs(c - conditional_information(ea.phi, ea.zeta, embed_partition(b))) <= 1e-8);
        CHECK(classical_information(sp, compose(a, b)) >= classical_information(sp, a) - 1e-8);

        const std::vector<std::size_t> blocks{static_cast<std::size_t>(t % 2), 1, 0, static_cast<std::size_t>(t % 3 == 0)};
        const auto eta = FunctionPartition::indicator(blocks, 2);
        CHECK(std::abs(classical_conditional(sp, a, eta) - classical_conditional_by_expectation(sp, a, eta)) <= 1e-8);
    }
    CHECK_THROWS_AS(classical_conditional_by_expectation(space, z, FunctionPartition(random_table(2, 4, rng))), Error);
}

TEST_CASE("permutation dynamics") {
    const auto uniform4 = FiniteSpace::uniform(4);
    const std::vector<std::size_t> cycle{1, 2, 3, 0}, id{0, 1, 2, 3};
    const auto ind = FunctionPartition::indicator({0, 0, 1, 1}, 2);

    SUBCASE("identity") {
        const auto s = permutation_entropy_sequence(uniform4, id, ind, 4);
        for (double a : s.values) CHECK(std::abs(a) <= 1e-12);
    }
    SUBCASE("cyclic shift exhausts by n = 3") {
        const auto s = permutation_entropy_sequence(uniform4, cycle, ind, 5);
        const auto b = brute_an(uniform4.measure(), cycle, ind.functions(), 5);
        for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(s.values[i] - b[i]) <= 1e-12);
        for (std::size_t i = 2; i < 5; ++i) CHECK(std::abs(s.values[i]) <= 1e-12);
        CHECK(s.monotonicity_residual <= 1e-12);
    }
    SUBCASE("swap") {
        const FiniteSpace space({0.5, 0.5});
        const std::vector<std::size_t> swap{1, 0};
        const auto s = permutation_entropy_sequence(space, swap, FunctionPartition::indicator({0, 1}, 2), 4);
        for (double a : s.values) CHECK(std::abs(a) <= 1e-12);
        // For a fuzzy partition ζ∘ζ is strictly finer than ζ, so the
        // sequence is brute-forced rather than assumed to vanish.
        const Table f{{0.6, 0.8}, {0.8, 0.6}};
        const auto fs = permutation_entropy_sequence(space, swap, FunctionPartition(f), 4);
        const auto b = brute_an(space.measure(), swap, f, 4);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(fs.values[i] - b[i]) <= 1e-12);
        CHECK(fs.monotonicity_residual <= 1e-12);
    }
    SUBCASE("random permutations and partitions") {
        Rng rng(3);
        for (int t = 0; t < 30; ++t) {
            const std::size_t m = 3 + static_cast<std::size_t>(t % 4);
            std::vector<std::size_t> perm(m);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            const auto f = random_table(2, m, rng);
            const auto s = permutation_entropy_sequence(FiniteSpace::uniform(m), perm, FunctionPartition(f), 3);
            const auto b = brute_an(FiniteSpace::uniform(m).measure(), perm, f, 3);
            for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(s.values[i] - b[i]) <= 1e-10);
            CHECK(s.monotonicity_residual <= 1e-8);

            // θ-invariance of conditional information.
            const FunctionPartition z(f), e(random_table(2, m, rng));
            CHECK(std::abs(classical_conditional(FiniteSpace::uniform(m), permute(z, perm, 1), permute(e, perm, 1)) -
                           classical_conditional(FiniteSpace::uniform(m), z, e)) <= 1e-9);
        }
    }
    CHECK_THROWS_AS(permutation_entropy_sequence(FiniteSpace({0.7, 0.1, 0.1, 0.1}), cycle, ind, 2), Error);
    CHECK_THROWS_AS(permutation_entropy_sequence(uniform4, {0, 0, 1, 2}, ind, 2), Error);
}

TEST_CASE("permutation sequences agree with the embedded quantum sequence") {
    Rng rng(4);
    for (int t = 0; t < 10; ++t) {
        const auto mu = FiniteSpace::uniform(4);
        std::vector<std::size_t> perm{0, 1, 2, 3};
        std::shuffle(perm.begin(), perm.end(), rng);
        const FunctionPartition z(random_table(2, 4, rng));
        const auto c = permutation_entropy_sequence(mu, perm, z, 3);
        const auto e = embed_diagonal(mu, z);
        const auto q = an_sequence(e.phi, permutation_automorphism(perm), e.zeta, 3);
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(c.values[i] - q.values[i]) <= 1e-8);
    }
}

TEST_CASE("markov entropy sequences") {
    SUBCASE("fair coin") {
        const auto s = markov_entropy_sequence(SymbolicShift::bernoulli({0.5, 0.5}), 6);
        for (double a : s.values) CHECK(std::abs(a - std::log(2.0)) <= 1e-10);
    }
    SUBCASE("sticky chain") {
        const SymbolicShift shift({{0.9, 0.1}, {0.1, 0.9}});
        CHECK(shift.stationary()[0] == doctest::Approx(0.5));
        CHECK(shift.entropy_rate() == doctest::Approx(h09).epsilon(1e-14));
        const auto s = markov_entropy_sequence(shift, 8);
        for (double a : s.values) CHECK(std::abs(a - 0.325083) <= 1e-6);
        for (double a : s.values) CHECK(std::abs(a - h09) <= 1e-10);
    }
    SUBCASE("asymmetric chain against word enumeration") {
        const std::vector<std::vector<double>> P{{0.7, 0.2, 0.1}, {0.3, 0.3, 0.4}, {0.5, 0.1, 0.4}};
        const SymbolicShift shift(P);
        const auto s = markov_entropy_sequence(shift, 5);
        for (int n = 1; n <= 5; ++n) {
            const double expect = oracle::markov_block_entropy(P, shift.stationary(), n + 1) -
                                  oracle::markov_block_entropy(P, shift.stationary(), n);
            CHECK(std::abs(s.values[static_cast<std::size_t>(n - 1)] - expect) <= 1e-10);
            CHECK(std::abs(s.values[static_cast<std::size_t>(n - 1)] - shift.entropy_rate()) <= 1e-10);
        }
    }
    SUBCASE("deterministic cycle") {
        const auto s = markov_entropy_sequence(SymbolicShift({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}), 4);
        for (double a : s.values) CHECK(std::abs(a) <= 1e-12);
    }
    SUBCASE("lumped labels decrease toward the rate from above") {
        const std::vector<std::vector<double>> P{{0.7, 0.2, 0.1}, {0.3, 0.3, 0.4}, {0.5, 0.1, 0.4}};
        const auto s = markov_entropy_sequence(SymbolicShift(P), 6, {0, 1, 1});
        CHECK(s.monotonicity_residual <= 1e-10);
    }
    SUBCASE("invalid chains") {
        CHECK_THROWS_AS(SymbolicShift({{0.5, 0.49}, {0.5, 0.5}}), Error);
        CHECK_THROWS_AS(SymbolicShift({{0.9, 0.1}, {0.1, 0.9}}, {0.9, 0.1}), Error);
        CHECK_THROWS_AS(markov_entropy_sequence(SymbolicShift::bernoulli({0.5, 0.5}), 40), Error);
    }
}

TEST_CASE("markov window embedding") {
    const SymbolicShift shift({{0.9, 0.1}, {0.1, 0.9}});
    const auto emb = markov_window_embedding(shift, 4);
    CHECK(emb.space.size() == 16);
    double total = 0.0;
    for (double v : emb.space.measure()) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    // x_0 is the most significant digit: window 0b1000 = (1,0,0,0).
    CHECK(emb.space.measure()[8] == doctest::Approx(0.5 * 0.1 * 0.9 * 0.9));
    CHECK(emb.coordinate[1][8] == 1.0);
    CHECK(emb.perm[8] == 1);  // rotation (1,0,0,0) -> (0,0,0,1)
    // The wrap-around moves mass between cylinders, so the rotation is not
    // measure preserving; only the quantum route (which tolerates this) applies.
    CHECK(permutation_invariance_residual(emb.space, emb.perm) > 1e-3);
    CHECK_THROWS_AS(permutation_entropy_sequence(emb.space, emb.perm, emb.coordinate, 3), Error);
    const auto d = embed_diagonal(emb.space, emb.coordinate);
    const auto s = an_sequence(d.phi, permutation_automorphism(emb.perm), d.zeta, 3);
    for (double a : s.values) CHECK(std::abs(a - h09) <= 1e-10);
    CHECK_FALSE(s.invariant_state);
}

TEST_CASE("comparison bound") {
    const auto mu = FiniteSpace::uniform(5);
    const std::vector<std::size_t> cycle{1, 2, 3, 4, 0};
    const auto ind = FunctionPartition::indicator({0, 1, 1, 0, 1}, 2);
    const auto same = partition_comparison_bound(mu, cycle, ind, ind, 3);
    CHECK(same.holds);
    CHECK(std::abs(same.conditional) <= 1e-12);
    CHECK(std::abs(same.residual) <= 1e-12);

    const auto triv = partition_comparison_bound(mu, cycle, ind, FunctionPartition::trivial(5), 3);
    CHECK(triv.holds);
    CHECK(std::abs(triv.H_eta_n) <= 1e-12);
    CHECK(triv.conditional == doctest::Approx(classical_information(mu, ind)));

    Rng rng(5);
    int violations = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t m = 3 + static_cast<std::size_t>(t % 4);
        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const FunctionPartition z(random_table(2, m, rng)), e(random_table(2, m, rng));
        const auto r = partition_comparison_bound(FiniteSpace::uniform(m), perm, z, e, 1 + t % 4);
        if (!r.holds || r.residual > 1e-8) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("indicator partitions are approximated by ramps") {
    std::vector<double> grid;
    for (int i = 0; i < 200; ++i) grid.push_back((i + 0.5) / 200.0);
    const FiniteSpace mu = FiniteSpace::uniform(grid.size());
    const auto ramp = ramp_partition(grid, {0.3, 0.7}, 0.1);
    CHECK(ramp.size() == 3);
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const auto a = approximate_indicator(mu, grid, {0.3, 0.7}, eps);
        CHECK(a.conditional <= eps);
        CHECK(a.conditional >= -1e-12);
    }
}
