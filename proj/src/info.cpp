#include "qde/info.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qde/errors.hpp"
#include "qde/parallel.hpp"

namespace qde {

namespace {

void require_state(const StateFunctional& phi, const Partition& zeta, const Settings& settings, const char* who) {
    if (phi.dim() != zeta.out_dim()) {
        std::ostringstream os;
        os << who << ": state dimension " << phi.dim() << " but the partition produces dimension " << zeta.out_dim();
        throw Error(ErrorKind::dimension_mismatch, os.str());
    }
    if (!phi.is_normalized(settings.normalization_tolerance)) {
        std::ostringstream os;
        os << who << ": state weight " << phi.weight() << " is not 1";
        throw Error(ErrorKind::not_normalized, os.str());
    }
}

struct Branch {
    ComplexMatrix density;
    double weight = 0;
};

std::vector<Branch> branches(const StateFunctional& phi, const Partition& zeta, const Settings& settings) {
    return parallel_map(zeta.size(), settings.threads, [&](std::size_t i) {
        Branch b;
        b.density = zeta.algebra().compress(predual_density(zeta[i], phi.density().matrix()));
        b.weight = b.density.trace().real();
        return b;
    });
}

std::string words_overflow(std::size_t base, int n, std::size_t cap) {
    std::ostringstream os;
    os << "refinement: |zeta|^" << n << " = " << base << "^" << n << " outcomes exceed the branch cap " << cap;
    return os.str();
}

// base^n, saturating past `cap`.
std::size_t capped_power(std::size_t base, int n, std::size_t cap) {
    std::size_t r = 1;
    for (int k = 0; k < n; ++k) {
        if (r > cap / std::max<std::size_t>(base, 1)) return cap + 1;
        r *= base;
    }
    return r;
}

}  // namespace

InformationReport information(const StateFunctional& phi, const Partition& zeta, const Settings& settings) {
    require_state(phi, zeta, settings, "information");
    const auto parts = branches(phi, zeta, settings);
    ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(zeta.in_dim()),
                                              static_cast<Eigen::Index>(zeta.in_dim()));
    for (const auto& b : parts) total += b.density;
    const StateFunctional sigma = StateFunctional::restricted(zeta.algebra(), total, settings);

    struct Term {
        ExtendedReal normalized;
        ExtendedReal raw;
    };
    const auto terms = parallel_map(parts.size(), settings.threads, [&](std::size_t i) {
        Term t{0.0, 0.0};
        const double p = parts[i].weight;
        if (p <= settings.zero_weight) return t;
        const auto raw = StateFunctional::restricted(zeta.algebra(), parts[i].density, settings);
        const auto normalized = StateFunctional::restricted(zeta.algebra(), parts[i].density / p, settings);
        t.normalized = relative_entropy(normalized, sigma, settings);
        t.raw = relative_entropy(raw, sigma, settings);
        return t;
    });

    InformationReport r;
    r.labels = zeta.labels();
    ExtendedReal h = 0.0;
    ExtendedReal hq = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const double p = parts[i].weight;
        r.weights.push_back(p);
        r.per_outcome_divergence.push_back(terms[i].normalized);
        if (p <= settings.zero_weight) continue;
        h += p * terms[i].normalized;
        hq += terms[i].raw;
        r.classical_Hc -= p * std::log(p);
    }
    r.total_H = h;
    r.quantum_Hq = hq;
    r.infinite_flag = h.is_infinite() || hq.is_infinite();
    if (!r.infinite_flag) r.identity_residual = std::abs(h.to_double() - (r.classical_Hc + hq.to_double()));
    return r;
}

ExtendedReal information_via_direct_sum(const StateFunctional& phi, const Partition& zeta, const Settings& settings) {
    require_state(phi, zeta, settings, "information_via_direct_sum");
    if (zeta.size() * zeta.in_dim() > settings.dimension_cap) {
        std::ostringstream os;
        os << "information_via_direct_sum: direct-sum dimension " << zeta.size() * zeta.in_dim()
           << " exceeds the cap " << settings.dimension_cap;
        throw Error(ErrorKind::resource, os.str());
    }
    const auto parts = branches(phi, zeta, settings);
    ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(zeta.in_dim()),
                                              static_cast<Eigen::Index>(zeta.in_dim()));
    for (const auto& b : parts) total += b.density;

    std::vector<ComplexMatrix> first;
    std::vector<ComplexMatrix> second;
    std::vector<BlockAlgebra> copies(parts.size(), zeta.algebra());
    for (const auto& b : parts) {
        first.push_back(b.density);
        second.push_back(b.weight * total);
    }
    const BlockAlgebra sum_algebra = direct_sum(copies);
    const auto phi1 = StateFunctional::restricted(sum_algebra, block_diagonal(first), settings);
    const auto phi2 = StateFunctional::restricted(sum_algebra, block_diagonal(second), settings);
    return relative_entropy(phi1, phi2, settings);
}

StateFunctional precompose(const StateFunctional& phi, const Partition& zeta, const Settings& settings) {
    if (phi.dim() != zeta.out_dim())
        throw Error(ErrorKind::dimension_mismatch, "precompose: state and partition dimensions differ");
    ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(zeta.in_dim()),
                                              static_cast<Eigen::Index>(zeta.in_dim()));
    for (const auto& m : zeta.maps()) total += predual_density(m, phi.density().matrix());
    return StateFunctional::restricted(zeta.algebra(), total, settings);
}

double conditional_information(const StateFunctional& phi, const Partition& zeta, const Partition& eta,
                               const Settings& settings) {
    const Partition joint = compose(zeta, eta, settings);
    const ExtendedReal h_joint = information(phi, joint, settings).total_H;
    const ExtendedReal h_eta = information(precompose(phi, zeta, settings), eta, settings).total_H;
    if (h_joint.is_infinite() || h_eta.is_infinite())
        throw Error(ErrorKind::infinite, "conditional_information: an information term is +inf");
    return h_joint.to_double() - h_eta.to_double();
}

Partition refinement(const Automorphism& theta, const Partition& zeta, int n, const Settings& settings) {
    if (n < 1) throw Error(ErrorKind::validation, "refinement: n must be >= 1");
    if (capped_power(zeta.size(), n, settings.branch_cap) > settings.branch_cap)
        throw Error(ErrorKind::resource, words_overflow(zeta.size(), n, settings.branch_cap));
    Partition r = conjugate(theta.power(-1), zeta);
    for (int k = 2; k <= n; ++k) r = compose(r, conjugate(theta.power(-k), zeta), settings);
    return r;
}

EntropySequence an_sequence(const StateFunctional& phi, const Automorphism& theta, const Partition& zeta, int N,
                            const Settings& settings) {
    if (N < 1) throw Error(ErrorKind::validation, "an_sequence: N must be >= 1");
    if (theta.dim() != zeta.in_dim() || zeta.in_dim() != zeta.out_dim())
        throw Error(ErrorKind::dimension_mismatch, "an_sequence: automorphism and partition dimensions differ");
    if (capped_power(zeta.size(), N + 1, settings.branch_cap) > settings.branch_cap)
        throw Error(ErrorKind::resource, words_overflow(zeta.size(), N + 1, settings.branch_cap));

    EntropySequence seq;
    const InformationReport base = information(phi, zeta, settings);
    if (base.infinite_flag)
        throw Error(ErrorKind::infinite, "an_sequence: H_phi(zeta) is +inf, the sequence is undefined");
    seq.upper_bound = base.total_H.to_double();

    const ComplexMatrix& u = theta.unitary();
    const ComplexMatrix& rho = phi.density().matrix();
    seq.invariance_residual = (u.adjoint() * rho * u - rho).norm();
    seq.invariant_state = seq.invariance_residual <= settings.invariance_tolerance;
    if (!seq.invariant_state) {
        std::ostringstream os;
        os << "state is not invariant under the automorphism (residual " << seq.invariance_residual
           << "); the alternate form is not checked";
        seq.warnings.push_back(os.str());
    }

    const StateFunctional after_zeta = precompose(phi, zeta, settings);
    Partition past = conjugate(theta.power(-1), zeta);  // ζ^-_n
    Partition forward = zeta;                            // θ^{n-1}ζ∘...∘ζ
    for (int n = 1; n <= N; ++n) {
        if (n > 1) past = compose(past, conjugate(theta.power(-n), zeta), settings);
        const ExtendedReal joint = information(phi, compose(zeta, past, settings), settings).total_H;
        const ExtendedReal marginal = information(after_zeta, past, settings).total_H;
        if (joint.is_infinite() || marginal.is_infinite())
            throw Error(ErrorKind::infinite, "an_sequence: conditional information term is +inf");
        seq.values.push_back(joint.to_double() - marginal.to_double());

        const Partition shifted = conjugate(theta.power(n), zeta);
        seq.alternate.push_back(conditional_information(phi, shifted, forward, settings));
        if (n < N) forward = compose(shifted, forward, settings);
    }

    for (std::size_t n = 0; n < seq.values.size(); ++n) {
        if (n + 1 < seq.values.size())
            seq.monotonicity_residual = std::max(seq.monotonicity_residual, seq.values[n + 1] - seq.values[n]);
        seq.bound_residual = std::max(seq.bound_residual, seq.values[n] - seq.upper_bound);
        seq.alternate_deviation = std::max(seq.alternate_deviation, std::abs(seq.values[n] - seq.alternate[n]));
    }
    seq.h_estimate = seq.values.back();
    seq.converged = seq.values.size() >= 2 &&
                    std::abs(seq.values.back() - seq.values[seq.values.size() - 2]) <= settings.convergence_tolerance;
    if (seq.invariant_state && seq.alternate_deviation > settings.identity_tolerance) {
        std::ostringstream os;
        os << "an_sequence: invariant state but |a_n - H(theta^n zeta | ...)| = " << seq.alternate_deviation;
        throw Error(ErrorKind::property_violation, os.str());
    }
    return seq;
}

AdmissibilityReport admissibility_check(const StateFunctional& phi, const Partition& zeta, int N,
                                        const Settings& settings) {
    AdmissibilityReport r;
    r.tolerance = settings.admissibility_tolerance;
    r.sequence = an_sequence(phi, Automorphism::identity(zeta.in_dim()), zeta, N, settings);
    r.admissible = r.sequence.h_estimate <= r.tolerance;
    return r;
}

double invariance_check(const StateFunctional& phi, const Partition& zeta) {
    if (phi.dim() != zeta.out_dim() || zeta.in_dim() != zeta.out_dim())
        throw Error(ErrorKind::dimension_mismatch, "invariance_check: dimensions differ");
    ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(phi.dim()), static_cast<Eigen::Index>(phi.dim()));
    for (const auto& m : zeta.maps()) total += predual_density(m, phi.density().matrix());
    return (total - phi.density().matrix()).norm();
}

ConvexityReport convexity_probe(const StateFunctional& phi0, const StateFunctional& phi1, const Partition& zeta,
                                const Automorphism& theta, int N, const std::vector<double>& grid,
                                const Settings& settings) {
    if (!(phi0.algebra() == phi1.algebra()))
        throw Error(ErrorKind::dimension_mismatch, "convexity_probe: states live on different algebras");
    ConvexityReport r;
    auto h_at = [&](double lam) {
        const ComplexMatrix rho = lam * phi1.density().matrix() + (1.0 - lam) * phi0.density().matrix();
        return an_sequence(StateFunctional::restricted(phi0.algebra(), rho, settings), theta, zeta, N, settings)
            .h_estimate;
    };
    const double h0 = h_at(0.0);
    const double h1 = h_at(1.0);
    for (double lam : grid) {
        if (lam < 0.0 || lam > 1.0) throw Error(ErrorKind::validation, "convexity_probe: grid point outside [0,1]");
        const double v = lam == 0.0 ? h0 : (lam == 1.0 ? h1 : h_at(lam));
        const double dev = v - (lam * h1 + (1.0 - lam) * h0);
        r.lambdas.push_back(lam);
        r.values.push_back(v);
        r.deviations.push_back(dev);
        r.max_deviation = std::max(r.max_deviation, dev);
    }
    r.convex = r.max_deviation <= 1e-6;
    return r;
}

}  // namespace qde
