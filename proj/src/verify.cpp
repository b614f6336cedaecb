#include "qde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "qde/errors.hpp"
#include "qde/info.hpp"

namespace qde {

namespace {

class Tracker {
public:
    Tracker(std::string name, double tol) {
        r_.name = std::move(name);
        r_.tolerance = tol;
        r_.max_residual = -std::numeric_limits<double>::infinity();
    }
    void add(double residual) {
        ++r_.trials;
        r_.max_residual = std::max(r_.max_residual, residual);
        if (!(residual <= r_.tolerance)) ++r_.violations;  // NaN counts as a violation
    }
    void skip() {
        ++r_.trials;
        ++r_.skipped;
    }
    FamilyResult done() {
        if (!std::isfinite(r_.max_residual) && r_.max_residual < 0) r_.max_residual = 0;
        return r_;
    }

private:
    FamilyResult r_;
};

std::size_t pick(const std::vector<std::size_t>& v, Rng& rng) {
    if (v.empty()) throw Error(ErrorKind::validation, "property suite: empty dimension list");
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::size_t between(std::size_t lo, std::size_t hi, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

StateFunctional full_rank_state(std::size_t d, Rng& rng) { return StateFunctional(random_density(d, rng)); }

// Enough Kraus operators that Σ K^†K can be normalized to the identity on B.
std::size_t kraus_count(std::size_t in, std::size_t out, std::size_t outcomes, std::size_t extra) {
    const std::size_t needed = (out + in * outcomes - 1) / (in * outcomes);
    return std::max<std::size_t>(needed, 1) + extra;
}

Partition random_family(std::size_t in, std::size_t out, Rng& rng) {
    const std::size_t outcomes = between(2, 3, rng);
    return random_partition(in, out, outcomes, kraus_count(in, out, outcomes, between(0, 1, rng)), rng);
}

double H(const StateFunctional& phi, const Partition& z) { return information(phi, z).total_H.finite_value(); }

// Stream per family so every check is reproducible on its own.
Rng family_rng(const SuiteConfig& c, std::uint64_t tag) { return Rng(derive_seed(c.seed, tag)); }

}  // namespace

FunctionPartition random_function_partition(std::size_t points, std::size_t outcomes, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> a(outcomes, std::vector<double>(points));
    for (std::size_t x = 0; x < points; ++x) {
        double s = 0.0;
        for (auto& row : a) s += row[x] = u(rng) < 0.2 ? 0.0 : u(rng);
        if (s == 0.0) {
            a[0][x] = 1.0;
            s = 1.0;
        }
        for (auto& row : a) row[x] = std::sqrt(row[x] / s);
    }
    return FunctionPartition(std::move(a));
}

PreservedPermutation random_preserved_permutation(std::size_t points, Rng& rng) {
    std::vector<std::size_t> perm(points);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> mu(points, -1.0);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (std::size_t x = 0; x < points; ++x) {
        if (mu[x] >= 0.0) continue;
        const double v = u(rng);
        for (std::size_t y = x; mu[y] < 0.0; y = perm[y]) mu[y] = v;
    }
    const double total = std::accumulate(mu.begin(), mu.end(), 0.0);
    for (auto& m : mu) m /= total;
    return {FiniteSpace(std::move(mu)), std::move(perm)};
}

// --------------------------- relative entropy -------------------------------

FamilyResult check_pinsker_bound(const SuiteConfig& c) {
    Tracker t("relative_entropy_lower_bound", 1e-8);
    Rng rng = family_rng(c, 1);
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t d = between(2, 6, rng);
        const auto w = full_rank_state(d, rng);
        const auto p = full_rank_state(d, rng);
        const double tn = trace_norm(w.density() - p.density());
        t.add(0.5 * tn * tn - relative_entropy(w, p).finite_value());
    }
    return t.done();
}

FamilyResult check_joint_convexity(const SuiteConfig& c) {
    Tracker t("joint_convexity", 1e-8);
    Rng rng = family_rng(c, 2);
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t d = pick(c.dims, rng);
        const auto psi1 = full_rank_state(d, rng);
        const auto psi2 = full_rank_state(d, rng);
        const auto phi1 = full_rank_state(d, rng);
        const auto phi2 = full_rank_state(d, rng);
        const double s1 = relative_entropy(psi1, phi1).finite_value();
        const double s2 = relative_entropy(psi2, phi2).finite_value();
        const double lam = 0.1 * static_cast<double>(1 + k % 9);
        const auto psi = psi1.scaled(lam) + psi2.scaled(1.0 - lam);
        const auto phi = phi1.scaled(lam) + phi2.scaled(1.0 - lam);
        t.add(relative_entropy(psi, phi).finite_value() - (lam * s1 + (1.0 - lam) * s2));
    }
    return t.done();
}

FamilyResult check_monotonicity(const SuiteConfig& c) {
    Tracker t("monotonicity_under_cp_maps", 1e-8);
    Rng rng = family_rng(c, 3);
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t d = pick(c.dims, rng);
        const std::size_t a = pick(c.dims, rng);
        const KrausMap tau = random_partition(a, d, 1, kraus_count(a, d, 1, between(0, 2, rng)), rng).total();
        const auto psi = full_rank_state(d, rng);
        const auto phi = full_rank_state(d, rng);
        const ExtendedReal after = relative_entropy(predual_apply(tau, psi), predual_apply(tau, phi));
        if (after.is_infinite()) {
            t.skip();
            continue;
        }
        t.add(after.to_double() - relative_entropy(psi, phi).finite_value());
    }
    return t.done();
}

namespace {

// ρ = Σ √ρ a_i √ρ with (a_i) a random POVM.
std::vector<StateFunctional> random_decomposition(const StateFunctional& rho, std::size_t parts, Rng& rng) {
    const std::size_t d = rho.dim();
    const Partition povm = random_partition(d, d, parts, 1, rng);
    const auto s = spectral_decompose(rho.density());
    const ComplexMatrix root =
        apply_function(s, [](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; }).matrix();
    std::vector<StateFunctional> out;
    for (const auto& m : povm.maps())
        out.push_back(StateFunctional::restricted(rho.algebra(), root * m.unit_image().matrix() * root));
    return out;
}

}  // namespace

FamilyResult check_donald_identity(const SuiteConfig& c) {
    Tracker t("donald_identity", 1e-8);
    Rng rng = family_rng(c, 4);
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t d = pick(c.dims, rng);
        const auto parts = random_decomposition(full_rank_state(d, rng), 3, rng);
        const auto phi = full_rank_state(d, rng);
        const ExtendedReal r = donald_residual(parts, phi);
        if (r.is_infinite()) {
            t.skip();
            continue;
        }
        t.add(r.to_double());
    }
    return t.done();
}

FamilyResult check_decomposition_gap(const SuiteConfig& c) {
    Tracker t("decomposition_entropy_gap", 1e-8);
    Rng rng = family_rng(c, 5);
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t d = pick(c.dims, rng);
        const auto rho = full_rank_state(d, rng);
        const auto parts = random_decomposition(rho, between(2, 4, rng), rng);
        t.add(-decomposition_entropy_gap(parts, rho));
    }
    return t.done();
}

FamilyResult check_scaling_identity(const SuiteConfig& c) {
    Tracker t("scaling_identity", 1e-9);
    Rng rng = family_rng(c, 6);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t d = pick(c.dims, rng);
        const auto w = full_rank_state(d, rng);
        const auto p = full_rank_state(d, rng);
        const double lam = u(rng);
        const double lhs = relative_entropy(w.scaled(lam), p).finite_value();
        const double rhs = lam * std::log(lam) + lam * relative_entropy(w, p).finite_value();
        t.add(std::abs(lhs - rhs));
    }
    return t.done();
}

// --------------------------- partitions -------------------------------------

FamilyResult check_direct_sum_identity(const SuiteConfig& c) {
    Tracker t("information_direct_sum_identity", 1e-8);
    Rng rng = family_rng(c, 7);
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t a = pick(c.dims, rng);
        const std::size_t b = pick(c.dims, rng);
        const auto phi = full_rank_state(b, rng);
        const Partition z = random_family(a, b, rng);
        const auto r = information(phi, z);
        const ExtendedReal ds = information_via_direct_sum(phi, z);
        if (r.infinite_flag || ds.is_infinite()) {
            t.add(r.infinite_flag == ds.is_infinite() ? 0.0 : std::numeric_limits<double>::infinity());
            continue;
        }
        t.add(std::abs(r.total_H.to_double() - ds.to_double()));
    }
    return t.done();
}

FamilyResult check_decomposition_identity(const SuiteConfig& c) {
    Tracker t("information_classical_quantum_split", 1e-8);
    Rng rng = family_rng(c, 7);  // same instances as the direct-sum family
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t a = pick(c.dims, rng);
        const std::size_t b = pick(c.dims, rng);
        const auto phi = full_rank_state(b, rng);
        const auto r = information(phi, random_family(a, b, rng));
        if (r.infinite_flag) {
            t.skip();
            continue;
        }
        t.add(r.identity_residual);
    }
    return t.done();
}

namespace {

struct Triple {
    StateFunctional phi;
    Partition zeta, eta, beta;
};

Triple random_triple(const SuiteConfig& c, Rng& rng) {
    const std::size_t b = pick(c.dims, rng);
    const std::size_t a = pick(c.dims, rng);
    const std::size_t cc = pick(c.dims, rng);
    const std::size_t dd = pick(c.dims, rng);
    auto phi = full_rank_state(b, rng);
    auto zeta = random_family(a, b, rng);
    auto eta = random_family(cc, a, rng);
    auto beta = random_family(dd, cc, rng);
    return {std::move(phi), std::move(zeta), std::move(eta), std::move(beta)};
}

template <class F>
FamilyResult triple_family(const SuiteConfig& c, const char* name, std::uint64_t tag, F&& residual) {
    Tracker t(name, 1e-8);
    Rng rng = family_rng(c, tag);
    for (int k = 0; k < c.trials; ++k) {
        const Triple tr = random_triple(c, rng);
        try {
            t.add(residual(tr));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::infinite) throw;
            t.skip();
        }
    }
    return t.done();
}

}  // namespace

FamilyResult check_subadditivity(const SuiteConfig& c) {
    return triple_family(c, "subadditivity", 8, [](const Triple& t) {
        const auto after = precompose(t.phi, t.zeta);
        return H(t.phi, compose(t.zeta, t.eta)) - (H(after, t.eta) + H(t.phi, t.zeta));
    });
}

FamilyResult check_conditional_monotonicity(const SuiteConfig& c) {
    return triple_family(c, "conditional_monotonicity", 8, [](const Triple& t) {
        const auto after = precompose(t.phi, t.zeta);
        const Partition eb = compose(t.eta, t.beta);
        const double finer = H(t.phi, compose(t.zeta, eb)) - H(after, eb);
        const double coarser = H(t.phi, compose(t.zeta, t.eta)) - H(after, t.eta);
        return finer - coarser;
    });
}

FamilyResult check_classical_term(const SuiteConfig& c) {
    return triple_family(c, "classical_term_subadditivity", 8, [](const Triple& t) {
        const auto after = precompose(t.phi, t.zeta);
        return information(t.phi, compose(t.zeta, t.eta)).classical_Hc -
               (information(t.phi, t.zeta).classical_Hc + information(after, t.eta).classical_Hc);
    });
}

FamilyResult check_quantum_term(const SuiteConfig& c) {
    return triple_family(c, "quantum_term_subadditivity", 8, [](const Triple& t) {
        const auto after = precompose(t.phi, t.zeta);
        return information(t.phi, compose(t.zeta, t.eta)).quantum_Hq.finite_value() -
               (information(after, t.eta).quantum_Hq.finite_value() +
                information(t.phi, t.zeta).quantum_Hq.finite_value());
    });
}

FamilyResult check_automorphism_invariance(const SuiteConfig& c) {
    Tracker t("automorphism_invariance", 1e-8);
    Rng rng = family_rng(c, 9);
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t d = pick(c.dims, rng);
        const auto phi = StateFunctional::maximally_mixed(d);
        const Partition z = random_family(d, d, rng);
        const Automorphism theta(haar_unitary(d, rng), 1e-9);
        t.add(std::abs(H(phi, z) - H(phi, conjugate(theta, z))));
    }
    return t.done();
}

FamilyResult check_an_certificate(const SuiteConfig& c, int N) {
    Tracker t("an_monotone_and_bounded", 1e-8);
    Rng rng = family_rng(c, 10);
    std::vector<std::size_t> small;
    for (auto d : c.dims)
        if (d <= 3) small.push_back(d);
    if (small.empty()) small = {2};
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t d = pick(small, rng);
        const auto phi = full_rank_state(d, rng);
        const Automorphism theta(haar_unitary(d, rng), 1e-9);
        const Partition z = random_partition(d, d, 2, between(1, 2, rng), rng);
        const auto seq = an_sequence(phi, theta, z, N);
        double lowest = 0.0;
        for (double v : seq.values) lowest = std::min(lowest, v);
        t.add(std::max({seq.monotonicity_residual, seq.bound_residual, -lowest}));
    }
    return t.done();
}

// --------------------------- function partitions ----------------------------

namespace {

template <class F>
FamilyResult classical_family(const SuiteConfig& c, const char* name, std::uint64_t tag, double tol, F&& residual) {
    Tracker t(name, tol);
    Rng rng = family_rng(c, tag);
    for (int k = 0; k < c.trials; ++k) {
        const std::size_t m = between(3, 6, rng);
        auto sys = random_preserved_permutation(m, rng);
        const auto zeta = random_function_partition(m, between(2, 3, rng), rng);
        const auto eta = random_function_partition(m, between(2, 3, rng), rng);
        const auto beta = random_function_partition(m, between(2, 3, rng), rng);
        t.add(residual(sys, zeta, eta, beta));
    }
    return t.done();
}

}  // namespace

FamilyResult check_refinement_growth(const SuiteConfig& c) {
    return classical_family(c, "classical_refinement_growth", 11, 1e-8,
                            [](const PreservedPermutation& s, const FunctionPartition& z, const FunctionPartition& e,
                               const FunctionPartition&) {
                                return classical_information(s.space, z) -
                                       classical_information(s.space, compose(z, e));
                            });
}

FamilyResult check_classical_conditioning(const SuiteConfig& c) {
    return classical_family(c, "classical_conditioning_monotone", 12, 1e-8,
                            [](const PreservedPermutation& s, const FunctionPartition& z, const FunctionPartition& e,
                               const FunctionPartition& b) {
                                return classical_conditional(s.space, z, compose(e, b)) -
                                       classical_conditional(s.space, z, e);
                            });
}

FamilyResult check_permutation_invariance(const SuiteConfig& c) {
    return classical_family(c, "classical_permutation_invariance", 13, 1e-9,
                            [](const PreservedPermutation& s, const FunctionPartition& z, const FunctionPartition&,
                               const FunctionPartition& b) {
                                const double shifted = classical_conditional(s.space, permute(z, s.perm, 1),
                                                                             permute(b, s.perm, 1));
                                return std::abs(shifted - classical_conditional(s.space, z, b));
                            });
}

FamilyResult check_comparison_bound(const SuiteConfig& c, int n_max) {
    return classical_family(c, "classical_comparison_bound", 14, 1e-8,
                            [n_max](const PreservedPermutation& s, const FunctionPartition& z,
                                    const FunctionPartition& e, const FunctionPartition&) {
                                double worst = -std::numeric_limits<double>::infinity();
                                for (int n = 1; n <= n_max; ++n)
                                    worst = std::max(worst,
                                                     partition_comparison_bound(s.space, s.perm, z, e, n).residual);
                                return worst;
                            });
}

FamilyResult check_embedding_agreement(const SuiteConfig& c) {
    return classical_family(c, "classical_quantum_agreement", 15, 1e-8,
                            [](const PreservedPermutation& s, const FunctionPartition& z, const FunctionPartition& e,
                               const FunctionPartition&) {
                                const auto ez = embed_diagonal(s.space, z);
                                const Partition ee = embed_partition(e);
                                const double h = std::abs(classical_information(s.space, z) - H(ez.phi, ez.zeta));
                                const double cond = std::abs(classical_conditional(s.space, z, e) -
                                                             conditional_information(ez.phi, ez.zeta, ee));
                                return std::max(h, cond);
                            });
}

std::vector<FamilyResult> run_property_suite(const SuiteConfig& c) {
    std::vector<std::function<FamilyResult()>> families = {
        [&] { return check_pinsker_bound(c); },
        [&] { return check_joint_convexity(c); },
        [&] { return check_monotonicity(c); },
        [&] { return check_donald_identity(c); },
        [&] { return check_decomposition_gap(c); },
        [&] { return check_scaling_identity(c); },
        [&] { return check_direct_sum_identity(c); },
        [&] { return check_decomposition_identity(c); },
        [&] { return check_subadditivity(c); },
        [&] { return check_conditional_monotonicity(c); },
        [&] { return check_classical_term(c); },
        [&] { return check_quantum_term(c); },
        [&] { return check_automorphism_invariance(c); },
        [&] {
            SuiteConfig small = c;
            small.trials = std::max(1, c.trials / 4);
            return check_an_certificate(small);
        },
        [&] { return check_refinement_growth(c); },
        [&] { return check_classical_conditioning(c); },
        [&] { return check_permutation_invariance(c); },
        [&] { return check_comparison_bound(c); },
        [&] { return check_embedding_agreement(c); },
    };
    std::vector<FamilyResult> out;
    out.reserve(families.size());
    for (auto& f : families) out.push_back(f());
    return out;
}

}  // namespace qde
