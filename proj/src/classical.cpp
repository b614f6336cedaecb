#include "qde/classical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "qde/errors.hpp"

namespace qde {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> inv(perm.size(), perm.size());
    for (std::size_t x = 0; x < perm.size(); ++x) {
        if (perm[x] >= perm.size() || inv[perm[x]] != perm.size())
            throw Error(ErrorKind::validation, "permutation: not a bijection of the points");
        inv[perm[x]] = x;
    }
    return inv;
}

void require_points(const FiniteSpace& mu, const FunctionPartition& zeta, const char* who) {
    if (mu.size() != zeta.points()) {
        std::ostringstream os;
        os << who << ": space has " << mu.size() << " points, partition functions have " << zeta.points();
        throw Error(ErrorKind::dimension_mismatch, os.str());
    }
}

std::size_t capped_power(std::size_t base, int n, std::size_t cap) {
    std::size_t r = 1;
    for (int k = 0; k < n; ++k) {
        if (r > cap / std::max<std::size_t>(base, 1)) return cap + 1;
        r *= base;
    }
    return r;
}

// Shannon entropy of a distribution given by its atoms.
template <class Map>
double shannon(const Map& atoms) {
    double h = 0.0;
    for (const auto& [key, p] : atoms) h -= xlogx(p);
    return h;
}

}  // namespace

// --------------------------- FiniteSpace ------------------------------------

FiniteSpace::FiniteSpace(std::vector<double> measure) : mu_(std::move(measure)) {
    if (mu_.empty()) throw Error(ErrorKind::validation, "finite space: no points");
    double sum = 0.0;
    for (double m : mu_) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw Error(ErrorKind::validation, "finite space: negative measure");
        sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "finite space: measure sums to " << sum;
        throw Error(ErrorKind::validation, os.str());
    }
}

FiniteSpace FiniteSpace::uniform(std::size_t points) {
    return FiniteSpace(std::vector<double>(points, 1.0 / static_cast<double>(points)));
}

// --------------------------- FunctionPartition ------------------------------

FunctionPartition::FunctionPartition(std::vector<std::vector<double>> functions, double tol) : f_(std::move(functions)) {
    if (f_.empty() || f_.front().empty()) throw Error(ErrorKind::validation, "function partition: empty");
    const std::size_t m = f_.front().size();
    for (auto& row : f_) {
        if (row.size() != m) throw Error(ErrorKind::dimension_mismatch, "function partition: ragged function table");
        for (double& v : row) {
            if (!std::isfinite(v)) throw Error(ErrorKind::validation, "function partition: non-finite value");
            v = std::abs(v);
        }
    }
    for (std::size_t x = 0; x < m; ++x) {
        double s = 0.0;
        for (const auto& row : f_) s += row[x] * row[x];
        if (std::abs(s - 1.0) > tol) {
            std::ostringstream os;
            os << "function partition: sum of squares is " << s << " at point " << x;
            throw Error(ErrorKind::validation, os.str());
        }
    }
}

FunctionPartition FunctionPartition::indicator(const std::vector<std::size_t>& block_of, std::size_t outcomes) {
    std::vector<std::vector<double>> f(outcomes, std::vector<double>(block_of.size(), 0.0));
    for (std::size_t x = 0; x < block_of.size(); ++x) {
        if (block_of[x] >= outcomes) throw Error(ErrorKind::validation, "indicator partition: block index out of range");
        f[block_of[x]][x] = 1.0;
    }
    return FunctionPartition(std::move(f));
}

FunctionPartition FunctionPartition::trivial(std::size_t points) {
    return FunctionPartition({std::vector<double>(points, 1.0)});
}

double classical_information(const FiniteSpace& mu, const FunctionPartition& zeta) {
    require_points(mu, zeta, "classical_information");
    const auto& m = mu.measure();
    double h = 0.0;
    for (const auto& f : zeta.functions()) {
        double mass = 0.0;
        double local = 0.0;
        for (std::size_t x = 0; x < m.size(); ++x) {
            const double sq = f[x] * f[x];
            mass += m[x] * sq;
            local += m[x] * xlogx(sq);
        }
        h += -xlogx(mass) + local;
    }
    return h;
}

FunctionPartition compose(const FunctionPartition& zeta, const FunctionPartition& eta) {
    if (zeta.points() != eta.points())
        throw Error(ErrorKind::dimension_mismatch, "compose: function partitions on different spaces");
    FunctionPartition r;
    r.f_.reserve(zeta.size() * eta.size());
    for (const auto& a : zeta.functions())
        for (const auto& b : eta.functions()) {
            std::vector<double> prod(a.size());
            for (std::size_t x = 0; x < a.size(); ++x) prod[x] = a[x] * b[x];
            r.f_.push_back(std::move(prod));
        }
    return r;
}

double classical_conditional(const FiniteSpace& mu, const FunctionPartition& zeta, const FunctionPartition& eta) {
    return classical_information(mu, compose(zeta, eta)) - classical_information(mu, eta);
}

double classical_conditional_by_expectation(const FiniteSpace& mu, const FunctionPartition& zeta,
                                            const FunctionPartition& eta) {
    require_points(mu, zeta, "classical_conditional_by_expectation");
    require_points(mu, eta, "classical_conditional_by_expectation");
    const auto& m = mu.measure();
    const std::size_t n = m.size();
    std::vector<std::size_t> block(n);
    for (std::size_t x = 0; x < n; ++x) {
        std::size_t hits = 0;
        for (std::size_t j = 0; j < eta.size(); ++j) {
            const double v = eta[j][x];
            if (std::abs(v - 1.0) <= 1e-12) {
                block[x] = j;
                ++hits;
            } else if (std::abs(v) > 1e-12) {
                throw Error(ErrorKind::validation, "classical_conditional_by_expectation: eta is not an indicator");
            }
        }
        if (hits != 1) throw Error(ErrorKind::validation, "classical_conditional_by_expectation: eta is not an indicator");
    }
    std::vector<double> block_mass(eta.size(), 0.0);
    for (std::size_t x = 0; x < n; ++x) block_mass[block[x]] += m[x];

    double h = 0.0;
    for (const auto& f : zeta.functions()) {
        // E[f²] is constant on each block: <1_j, f²>_μ / μ(block j)
        std::vector<double> inner(eta.size(), 0.0);
        for (std::size_t x = 0; x < n; ++x) inner[block[x]] += m[x] * f[x] * f[x];
        for (std::size_t j = 0; j < eta.size(); ++j)
            if (block_mass[j] > 0.0) h -= block_mass[j] * xlogx(inner[j] / block_mass[j]);
        for (std::size_t x = 0; x < n; ++x) h += m[x] * xlogx(f[x] * f[x]);
    }
    return h;
}

FunctionPartition permute(const FunctionPartition& zeta, const std::vector<std::size_t>& perm, int k) {
    if (perm.size() != zeta.points()) throw Error(ErrorKind::dimension_mismatch, "permute: permutation size");
    const auto inv = inverse_permutation(perm);
    // θ^k(f) = f∘perm^{-k}
    const auto& step = k >= 0 ? inv : perm;
    std::vector<std::size_t> power(perm.size());
    std::iota(power.begin(), power.end(), 0);
    for (int e = 0; e < std::abs(k); ++e)
        for (auto& p : power) p = step[p];
    FunctionPartition r;
    r.f_.reserve(zeta.size());
    for (const auto& f : zeta.functions()) {
        std::vector<double> g(f.size());
        for (std::size_t x = 0; x < f.size(); ++x) g[x] = f[power[x]];
        r.f_.push_back(std::move(g));
    }
    return r;
}

double permutation_invariance_residual(const FiniteSpace& mu, const std::vector<std::size_t>& perm) {
    if (perm.size() != mu.size()) throw Error(ErrorKind::dimension_mismatch, "permutation: size differs from the space");
    inverse_permutation(perm);
    double r = 0.0;
    for (std::size_t x = 0; x < perm.size(); ++x) r = std::max(r, std::abs(mu.measure()[perm[x]] - mu.measure()[x]));
    return r;
}

EntropySequence permutation_entropy_sequence(const FiniteSpace& mu, const std::vector<std::size_t>& perm,
                                             const FunctionPartition& zeta, int N, const Settings& settings) {
    require_points(mu, zeta, "permutation_entropy_sequence");
    if (N < 1) throw Error(ErrorKind::validation, "permutation_entropy_sequence: N must be >= 1");
    const double residual = permutation_invariance_residual(mu, perm);
    if (residual > settings.invariance_tolerance) {
        std::ostringstream os;
        os << "permutation_entropy_sequence: permutation does not preserve the measure (residual " << residual << ")";
        throw Error(ErrorKind::validation, os.str());
    }
    if (capped_power(zeta.size(), N + 1, settings.branch_cap) > settings.branch_cap)
        throw Error(ErrorKind::resource, "permutation_entropy_sequence: |zeta|^(N+1) exceeds the branch cap");

    EntropySequence seq;
    seq.invariance_residual = residual;
    seq.invariant_state = true;
    seq.upper_bound = classical_information(mu, zeta);
    FunctionPartition past = permute(zeta, perm, -1);
    for (int n = 1; n <= N; ++n) {
        if (n > 1) past = compose(past, permute(zeta, perm, -n));
        seq.values.push_back(classical_conditional(mu, zeta, past));
    }
    for (std::size_t n = 0; n < seq.values.size(); ++n) {
        if (n + 1 < seq.values.size())
            seq.monotonicity_residual = std::max(seq.monotonicity_residual, seq.values[n + 1] - seq.values[n]);
        seq.bound_residual = std::max(seq.bound_residual, seq.values[n] - seq.upper_bound);
    }
    seq.h_estimate = seq.values.back();
    seq.converged = seq.values.size() >= 2 &&
                    std::abs(seq.values.back() - seq.values[seq.values.size() - 2]) <= settings.convergence_tolerance;
    return seq;
}

// --------------------------- SymbolicShift ----------------------------------

SymbolicShift::SymbolicShift(std::vector<std::vector<double>> P) : P_(std::move(P)) {
    validate();
    const std::size_t s = P_.size();
    // Solve π (P - I) = 0 with Σ π = 1: replace the last equation by normalization.
    Eigen::MatrixXd a(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j)
            a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = P_[i][j] - (i == j ? 1.0 : 0.0);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s));
    a.row(static_cast<Eigen::Index>(s - 1)).setOnes();
    b(static_cast<Eigen::Index>(s - 1)) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw Error(ErrorKind::validation, "symbolic shift: stationary vector is not unique; pass it explicitly");
    const Eigen::VectorXd pi = lu.solve(b);
    pi_.resize(s);
    for (std::size_t i = 0; i < s; ++i) pi_[i] = std::max(pi(static_cast<Eigen::Index>(i)), 0.0);
    const double total = std::accumulate(pi_.begin(), pi_.end(), 0.0);
    for (auto& p : pi_) p /= total;
}

SymbolicShift::SymbolicShift(std::vector<std::vector<double>> P, std::vector<double> pi)
    : P_(std::move(P)), pi_(std::move(pi)) {
    validate();
    if (pi_.size() != P_.size()) throw Error(ErrorKind::dimension_mismatch, "symbolic shift: stationary vector size");
    double total = 0.0;
    for (double p : pi_) {
        if (!(p >= 0.0)) throw Error(ErrorKind::validation, "symbolic shift: negative stationary weight");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-10) throw Error(ErrorKind::validation, "symbolic shift: stationary vector must sum to 1");
    for (std::size_t j = 0; j < P_.size(); ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < P_.size(); ++i) v += pi_[i] * P_[i][j];
        if (std::abs(v - pi_[j]) > 1e-10) {
            std::ostringstream os;
            os << "symbolic shift: pi P differs from pi by " << std::abs(v - pi_[j]) << " at symbol " << j;
            throw Error(ErrorKind::validation, os.str());
        }
    }
}

SymbolicShift SymbolicShift::bernoulli(const std::vector<double>& p) {
    return SymbolicShift(std::vector<std::vector<double>>(p.size(), p), p);
}

void SymbolicShift::validate() {
    if (P_.empty()) throw Error(ErrorKind::validation, "symbolic shift: empty transition matrix");
    for (std::size_t i = 0; i < P_.size(); ++i) {
        if (P_[i].size() != P_.size()) throw Error(ErrorKind::validation, "symbolic shift: transition matrix is not square");
        double row = 0.0;
        for (double v : P_[i]) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw Error(ErrorKind::validation, "symbolic shift: negative transition probability");
            row += v;
        }
        if (std::abs(row - 1.0) > 1e-10) {
            std::ostringstream os;
            os << "symbolic shift: row " << i << " sums to " << row << ", the matrix is not stochastic";
            throw Error(ErrorKind::validation, os.str());
        }
    }
}

double SymbolicShift::log_cylinder(const std::vector<std::size_t>& word) const {
    if (word.empty()) return 0.0;
    const double ninf = -std::numeric_limits<double>::infinity();
    if (pi_[word[0]] <= 0.0) return ninf;
    double l = std::log(pi_[word[0]]);
    for (std::size_t k = 0; k + 1 < word.size(); ++k) {
        const double p = P_[word[k]][word[k + 1]];
        if (p <= 0.0) return ninf;
        l += std::log(p);
    }
    return l;
}

double SymbolicShift::entropy_rate() const {
    double h = 0.0;
    for (std::size_t i = 0; i < P_.size(); ++i)
        for (std::size_t j = 0; j < P_.size(); ++j) h -= pi_[i] * xlogx(P_[i][j]);
    return h;
}

namespace {

// Distribution of label words of length L (and of the suffix X_1..X_{L-1}).
struct WindowEntropies {
    double full = 0;
    double suffix = 0;
};

WindowEntropies window_entropies(const SymbolicShift& shift, int L, const std::vector<std::size_t>& labels) {
    const std::size_t s = shift.alphabet();
    if (capped_power(s, L, SymbolicShift::window_cap) > SymbolicShift::window_cap) {
        std::ostringstream os;
        os << "markov_entropy_sequence: " << s << "^" << L << " windows exceed the cap " << SymbolicShift::window_cap;
        throw Error(ErrorKind::resource, os.str());
    }
    std::map<std::vector<std::size_t>, double> full;
    std::map<std::vector<std::size_t>, double> suffix;
    std::vector<std::size_t> word(static_cast<std::size_t>(L), 0);
    std::vector<std::size_t> lab(word.size());
    while (true) {
        const double lp = shift.log_cylinder(word);
        if (std::isfinite(lp)) {
            const double p = std::exp(lp);
            for (std::size_t k = 0; k < word.size(); ++k) lab[k] = labels[word[k]];
            full[lab] += p;
            suffix[std::vector<std::size_t>(lab.begin() + 1, lab.end())] += p;
        }
        // odometer increment, last position fastest
        int pos = L - 1;
        while (pos >= 0 && ++word[static_cast<std::size_t>(pos)] == s) word[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
    }
    return {shannon(full), shannon(suffix)};
}

}  // namespace

EntropySequence markov_entropy_sequence(const SymbolicShift& shift, int N, const std::vector<std::size_t>& labels) {
    if (N < 1) throw Error(ErrorKind::validation, "markov_entropy_sequence: N must be >= 1");
    std::vector<std::size_t> lab = labels;
    if (lab.empty()) {
        lab.resize(shift.alphabet());
        std::iota(lab.begin(), lab.end(), 0);
    }
    if (lab.size() != shift.alphabet()) throw Error(ErrorKind::dimension_mismatch, "markov_entropy_sequence: label count");

    EntropySequence seq;
    seq.invariant_state = true;
    seq.upper_bound = window_entropies(shift, 1, lab).full;
    for (int n = 1; n <= N; ++n) {
        const auto w = window_entropies(shift, n + 1, lab);
        seq.values.push_back(w.full - w.suffix);
    }
    for (std::size_t n = 0; n < seq.values.size(); ++n) {
        if (n + 1 < seq.values.size())
            seq.monotonicity_residual = std::max(seq.monotonicity_residual, seq.values[n + 1] - seq.values[n]);
        seq.bound_residual = std::max(seq.bound_residual, seq.values[n] - seq.upper_bound);
    }
    seq.h_estimate = seq.values.back();
    seq.converged = seq.values.size() >= 2 && std::abs(seq.values.back() - seq.values[seq.values.size() - 2]) <= 1e-6;
    return seq;
}

WindowEmbedding markov_window_embedding(const SymbolicShift& shift, int L) {
    if (L < 1) throw Error(ErrorKind::validation, "markov_window_embedding: L must be >= 1");
    const std::size_t s = shift.alphabet();
    const std::size_t count = capped_power(s, L, SymbolicShift::window_cap);
    if (count > SymbolicShift::window_cap)
        throw Error(ErrorKind::resource, "markov_window_embedding: window count exceeds the cap");

    std::vector<double> mu(count);
    std::vector<std::size_t> first(count);
    std::vector<std::size_t> perm(count);
    std::vector<std::size_t> word(static_cast<std::size_t>(L));
    for (std::size_t w = 0; w < count; ++w) {
        std::size_t rest = w;
        for (int k = L - 1; k >= 0; --k) {
            word[static_cast<std::size_t>(k)] = rest % s;
            rest /= s;
        }
        const double lp = shift.log_cylinder(word);
        mu[w] = std::isfinite(lp) ? std::exp(lp) : 0.0;
        first[w] = word[0];
        std::size_t rotated = 0;
        for (int k = 1; k <= L; ++k) rotated = rotated * s + word[static_cast<std::size_t>(k % L)];
        perm[w] = rotated;
    }
    const double total = std::accumulate(mu.begin(), mu.end(), 0.0);
    for (auto& m : mu) m /= total;
    return {FiniteSpace(std::move(mu)), FunctionPartition::indicator(first, s), std::move(perm)};
}

// --------------------------- embedding --------------------------------------

Partition embed_partition(const FunctionPartition& zeta) {
    const auto n = static_cast<Eigen::Index>(zeta.points());
    std::vector<KrausMap> maps;
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        ComplexMatrix k = ComplexMatrix::Zero(n, n);
        for (Eigen::Index x = 0; x < n; ++x) k(x, x) = zeta[i][static_cast<std::size_t>(x)];
        maps.emplace_back(std::vector<ComplexMatrix>{k}, std::to_string(i));
    }
    return Partition(std::move(maps), BlockAlgebra::diagonal(zeta.points()));
}

DiagonalEmbedding embed_diagonal(const FiniteSpace& mu, const FunctionPartition& zeta) {
    require_points(mu, zeta, "embed_diagonal");
    RealVector d(static_cast<Eigen::Index>(mu.size()));
    for (std::size_t x = 0; x < mu.size(); ++x) d(static_cast<Eigen::Index>(x)) = mu.measure()[x];
    return {StateFunctional(BlockAlgebra::diagonal(mu.size()), HermitianMatrix::diagonal(d)), embed_partition(zeta)};
}

Automorphism permutation_automorphism(const std::vector<std::size_t>& perm) {
    inverse_permutation(perm);
    const auto n = static_cast<Eigen::Index>(perm.size());
    ComplexMatrix u = ComplexMatrix::Zero(n, n);
    for (std::size_t x = 0; x < perm.size(); ++x) u(static_cast<Eigen::Index>(perm[x]), static_cast<Eigen::Index>(x)) = 1.0;
    return Automorphism(u);
}

// --------------------------- comparison bound -------------------------------

ComparisonReport partition_comparison_bound(const FiniteSpace& mu, const std::vector<std::size_t>& perm,
                                            const FunctionPartition& zeta, const FunctionPartition& eta, int n,
                                            double tol, const Settings& settings) {
    require_points(mu, zeta, "partition_comparison_bound");
    require_points(mu, eta, "partition_comparison_bound");
    if (n < 1) throw Error(ErrorKind::validation, "partition_comparison_bound: n must be >= 1");
    if (capped_power(std::max(zeta.size(), eta.size()), n, settings.branch_cap) > settings.branch_cap)
        throw Error(ErrorKind::resource, "partition_comparison_bound: branch cap exceeded");
    // ζ_n = θ^{n-1}(ζ)∘...∘θ(ζ)∘ζ
    FunctionPartition zn = zeta;
    FunctionPartition en = eta;
    for (int k = 1; k < n; ++k) {
        zn = compose(permute(zeta, perm, k), zn);
        en = compose(permute(eta, perm, k), en);
    }
    ComparisonReport r;
    r.n = n;
    r.H_zeta_n = classical_information(mu, zn);
    r.H_eta_n = classical_information(mu, en);
    r.conditional = classical_conditional(mu, zeta, eta);
    r.residual = r.H_zeta_n - r.H_eta_n - n * r.conditional;
    r.holds = r.residual <= tol;
    return r;
}

// --------------------------- indicator approximation ------------------------

FunctionPartition ramp_partition(const std::vector<double>& grid, const std::vector<double>& cuts, double width) {
    if (!(width > 0.0)) throw Error(ErrorKind::validation, "ramp_partition: width must be positive");
    if (!std::is_sorted(cuts.begin(), cuts.end())) throw Error(ErrorKind::validation, "ramp_partition: cuts must be sorted");
    const std::size_t k = cuts.size() + 1;
    std::vector<std::vector<double>> f(k, std::vector<double>(grid.size()));
    for (std::size_t x = 0; x < grid.size(); ++x) {
        // s_j = share of mass already past cut j
        std::vector<double> past(cuts.size());
        for (std::size_t j = 0; j < cuts.size(); ++j)
            past[j] = std::clamp((grid[x] - cuts[j]) / width + 0.5, 0.0, 1.0);
        for (std::size_t j = 0; j < k; ++j) {
            const double upto = j == 0 ? 1.0 : past[j - 1];
            const double beyond = j + 1 < k ? past[j] : 0.0;
            f[j][x] = std::sqrt(std::max(upto - beyond, 0.0));
        }
    }
    return FunctionPartition(std::move(f));
}

IndicatorApproximation approximate_indicator(const FiniteSpace& mu, const std::vector<double>& grid,
                                             const std::vector<double>& cuts, double eps) {
    if (grid.size() != mu.size()) throw Error(ErrorKind::dimension_mismatch, "approximate_indicator: grid size");
    std::vector<std::size_t> block(grid.size());
    for (std::size_t x = 0; x < grid.size(); ++x)
        block[x] = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), grid[x]) - cuts.begin());
    const auto zeta = FunctionPartition::indicator(block, cuts.size() + 1);
    double width = 1.0;
    for (int iter = 0; iter < 64; ++iter, width /= 2.0) {
        auto eta = ramp_partition(grid, cuts, width);
        const double h = classical_conditional(mu, zeta, eta);
        if (h <= eps) return {std::move(eta), width, h};
    }
    throw Error(ErrorKind::convergence, "approximate_indicator: tolerance not reached");
}

}  // namespace qde
