#include "qde/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qde/errors.hpp"

namespace qde {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::size_t int_pow(std::size_t base, int n) {
    std::size_t r = 1;
    for (int k = 0; k < n; ++k) r *= base;
    return r;
}

double finite(const ExtendedReal& v, const char* what) {
    if (v.is_infinite()) throw Error(ErrorKind::infinite, std::string(what) + " is +inf");
    return v.to_double();
}

// Caches everything in I(η) that does not depend on η.
class GainEvaluator {
public:
    GainEvaluator(const StateFunctional& phi, const Channel& channel, const Settings& settings)
        : phi_(phi), channel_(channel), settings_(settings), after_(precompose(phi, channel.code(), settings)) {
        const auto base = information(phi, channel.code(), settings);
        H_ = finite(base.total_H, "information_gain: H_phi(zeta)");
        Hc_ = base.classical_Hc;
    }

    InformationGain operator()(const Partition& eta) const {
        const auto marginal = information(after_, eta, settings_);
        const auto joint = information(phi_, compose(channel_.code(), eta, settings_), settings_);
        InformationGain g;
        g.I = H_ + finite(marginal.total_H, "information_gain: H_{phi zeta}(eta)") -
              finite(joint.total_H, "information_gain: H_phi(zeta eta)");
        g.Ic = Hc_ + marginal.classical_Hc - joint.classical_Hc;
        return g;
    }

    double H() const { return H_; }

private:
    const StateFunctional& phi_;
    const Channel& channel_;
    const Settings& settings_;
    StateFunctional after_;
    double H_ = 0;
    double Hc_ = 0;
};

void check_probabilities(const std::vector<double>& probs, const char* who) {
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorKind::validation, std::string(who) + ": negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        std::ostringstream os;
        os << who << ": probabilities sum to " << sum;
        throw Error(ErrorKind::validation, os.str());
    }
}

StateFunctional diagonal_state(const std::vector<double>& probs) {
    RealVector d(idx(probs.size()));
    for (std::size_t i = 0; i < probs.size(); ++i) d(idx(i)) = probs[i];
    return StateFunctional(HermitianMatrix::diagonal(d));
}

}  // namespace

// --------------------------- Channel ----------------------------------------

Channel::Channel(Partition code) : total_(code.total()), code_(std::move(code)) {}

Channel::Channel(KrausMap total, Partition code, const Settings& settings)
    : total_(std::move(total)), code_(std::move(code)) {
    if (total_.in_dim() != code_.in_dim() || total_.out_dim() != code_.out_dim())
        throw Error(ErrorKind::dimension_mismatch, "channel: total map and code have different dimensions");
    const double unital = (total_.unit_image().matrix() -
                           ComplexMatrix::Identity(idx(total_.out_dim()), idx(total_.out_dim())))
                              .norm();
    if (unital > settings.unit_sum_tolerance) {
        std::ostringstream os;
        os << "channel: total map is not unital (|zeta(I) - I|_F = " << unital << ")";
        throw Error(ErrorKind::validation, os.str());
    }
    Rng rng(11);
    for (int s = 0; s < 10; ++s) {
        const ComplexMatrix x = ginibre(total_.in_dim(), total_.in_dim(), rng);
        ComplexMatrix sum = ComplexMatrix::Zero(idx(total_.out_dim()), idx(total_.out_dim()));
        for (const auto& m : code_.maps()) sum += qde::apply(m, x);
        const double gap = (sum - qde::apply(total_, x)).norm() / std::max(1.0, x.norm());
        if (gap > 1e-9) {
            std::ostringstream os;
            os << "channel: code does not sum to the total map (relative gap " << gap << ")";
            throw Error(ErrorKind::validation, os.str());
        }
    }
}

ChannelSystem preparation_ensemble(const std::vector<HermitianMatrix>& states, const std::vector<double>& probs,
                                   const std::string& name) {
    if (states.empty() || states.size() != probs.size())
        throw Error(ErrorKind::validation, "preparation_ensemble: need one probability per state");
    check_probabilities(probs, "preparation_ensemble");
    const std::size_t d = states.front().dim();
    const std::size_t m = states.size();
    std::vector<KrausMap> letters;
    for (std::size_t i = 0; i < m; ++i) {
        if (states[i].dim() != d) throw Error(ErrorKind::dimension_mismatch, "preparation_ensemble: mixed dimensions");
        const StateFunctional rho(states[i]);
        if (!rho.is_normalized()) throw Error(ErrorKind::not_normalized, "preparation_ensemble: state is not normalized");
        const auto& sp = rho.spectrum().front();
        std::vector<ComplexMatrix> ks;
        for (Eigen::Index a = 0; a < sp.eigenvalues.size(); ++a) {
            if (sp.eigenvalues(a) <= 1e-15) continue;
            ComplexMatrix k = ComplexMatrix::Zero(idx(d), idx(m));
            k.col(idx(i)) = std::sqrt(sp.eigenvalues(a)) * sp.eigenvectors.col(a);
            ks.push_back(std::move(k));
        }
        letters.emplace_back(std::move(ks), std::to_string(i));
    }
    return {name, Channel(Partition(std::move(letters))), diagonal_state(probs)};
}

ChannelSystem noisy_ensemble(const ChannelSystem& ensemble, const KrausMap& noise, const std::string& name) {
    const Partition noise_partition({noise.relabeled("n")});
    return {name, Channel(compose(ensemble.channel.code(), noise_partition)), ensemble.phi};
}

ChannelSystem proportional_code(std::size_t dim, const std::vector<double>& lambdas, const StateFunctional& phi) {
    check_probabilities(lambdas, "proportional_code");
    std::vector<KrausMap> letters;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        letters.emplace_back(std::vector<ComplexMatrix>{std::sqrt(lambdas[i]) *
                                                        ComplexMatrix::Identity(idx(dim), idx(dim))},
                             std::to_string(i));
    return {"proportional", Channel(Partition(std::move(letters))), phi};
}

ChannelSystem kraus_split_code(const KrausMap& channel, const StateFunctional& phi, const std::string& name) {
    std::vector<KrausMap> letters;
    for (std::size_t k = 0; k < channel.kraus().size(); ++k)
        letters.emplace_back(std::vector<ComplexMatrix>{channel.kraus()[k]}, std::to_string(k));
    return {name, Channel(channel, Partition(std::move(letters))), phi};
}

KrausMap depolarizing(double p) {
    if (!(p >= 0.0 && p <= 4.0 / 3.0)) throw Error(ErrorKind::validation, "depolarizing: p must lie in [0, 4/3]");
    const double a = std::sqrt(1.0 - 3.0 * p / 4.0);
    const double b = std::sqrt(p / 4.0);
    return KrausMap({a * ComplexMatrix::Identity(2, 2), b * ops::pauli_x(), b * ops::pauli_y(), b * ops::pauli_z()},
                    "depolarizing");
}

KrausMap dephasing(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::validation, "dephasing: p must lie in [0, 1]");
    return KrausMap({std::sqrt(1.0 - p / 2.0) * ComplexMatrix::Identity(2, 2), std::sqrt(p / 2.0) * ops::pauli_z()},
                    "dephasing");
}

// --------------------------- measurement families ---------------------------

HermitianMatrix generator_from_params(const std::vector<double>& params, std::size_t dim) {
    if (params.size() != dim * dim) throw Error(ErrorKind::dimension_mismatch, "generator: expected d^2 parameters");
    ComplexMatrix h = ComplexMatrix::Zero(idx(dim), idx(dim));
    std::size_t k = 0;
    for (std::size_t i = 0; i < dim; ++i) h(idx(i), idx(i)) = params[k++];
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
            const Complex z(params[k], params[k + 1]);
            k += 2;
            h(idx(i), idx(j)) = z;
            h(idx(j), idx(i)) = std::conj(z);
        }
    return HermitianMatrix::symmetrized(h);
}

std::vector<double> params_from_generator(const HermitianMatrix& h) {
    const std::size_t dim = h.dim();
    std::vector<double> p;
    p.reserve(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) p.push_back(h.matrix()(idx(i), idx(i)).real());
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
            p.push_back(h.matrix()(idx(i), idx(j)).real());
            p.push_back(h.matrix()(idx(i), idx(j)).imag());
        }
    return p;
}

MeasurementFamily MeasurementFamily::projective_orbit(std::size_t dim) {
    if (dim == 0) throw Error(ErrorKind::validation, "measurement family: zero dimension");
    MeasurementFamily f;
    f.kind_ = FamilyKind::projective_orbit;
    f.dim_ = dim;
    return f;
}

MeasurementFamily MeasurementFamily::fixed_list(std::vector<Partition> candidates) {
    if (candidates.empty()) throw Error(ErrorKind::validation, "measurement family: empty candidate list");
    MeasurementFamily f;
    f.kind_ = FamilyKind::fixed_list;
    f.dim_ = candidates.front().out_dim();
    for (const auto& c : candidates)
        if (c.out_dim() != f.dim_) throw Error(ErrorKind::dimension_mismatch, "measurement family: mixed dimensions");
    f.candidates_ = std::move(candidates);
    return f;
}

std::size_t MeasurementFamily::outcome_count() const {
    if (kind_ == FamilyKind::projective_orbit) return dim_;
    std::size_t m = 0;
    for (const auto& c : candidates_) m = std::max(m, c.size());
    return m;
}

Partition MeasurementFamily::realize(const std::vector<double>& params) const {
    if (kind_ == FamilyKind::fixed_list) {
        if (params.size() != 1 || params[0] < 0 || params[0] >= static_cast<double>(candidates_.size()))
            throw Error(ErrorKind::validation, "measurement family: fixed lists take one index parameter");
        return candidates_[static_cast<std::size_t>(params[0])];
    }
    return basis_partition(unitary_exp(generator_from_params(params, dim_)));
}

// --------------------------- information gain -------------------------------

InformationGain information_gain(const StateFunctional& phi, const Channel& channel, const Partition& eta,
                                 const Settings& settings) {
    if (eta.out_dim() != channel.input_dim()) {
        std::ostringstream os;
        os << "information_gain: measurement produces dimension " << eta.out_dim() << " but the channel reads "
           << channel.input_dim();
        throw Error(ErrorKind::dimension_mismatch, os.str());
    }
    return GainEvaluator(phi, channel, settings)(eta);
}

ChannelSystem product_system(const StateFunctional& phi, const Channel& channel, int n, const Settings& settings) {
    if (n < 1) throw Error(ErrorKind::validation, "product_system: n must be >= 1");
    Partition code = channel.code();
    ComplexMatrix rho = phi.density().matrix();
    BlockAlgebra algebra = phi.algebra();
    for (int k = 1; k < n; ++k) {
        code = tensor_partition(code, channel.code(), settings);
        rho = tensor(rho, phi.density().matrix(), settings.dimension_cap);
        algebra = tensor(algebra, phi.algebra());
    }
    return {"product", Channel(std::move(code)), StateFunctional::restricted(algebra, rho, settings)};
}

namespace {

enum class Target { C, D };

struct SearchOutcome {
    OptimizationResult trace;
    Partition best;
    InformationGain gain;
};

std::vector<Partition> product_candidates(const std::vector<Partition>& base, int n, std::size_t full_dim,
                                          const Settings& settings) {
    std::vector<Partition> out;
    std::vector<Partition> single;
    for (const auto& c : base) {
        if (c.out_dim() == full_dim) out.push_back(c);
        else single.push_back(c);
    }
    if (!single.empty()) {
        std::vector<Partition> layer = single;
        for (int k = 1; k < n; ++k) {
            std::vector<Partition> next;
            for (const auto& a : layer)
                for (const auto& b : single) next.push_back(tensor_partition(a, b, settings));
            layer = std::move(next);
        }
        for (auto& p : layer)
            if (p.out_dim() == full_dim) out.push_back(std::move(p));
    }
    if (out.empty()) throw Error(ErrorKind::dimension_mismatch, "capacity: no candidate measurement fits the system");
    return out;
}

SearchOutcome search(const ChannelSystem& sys, int n, const Channel& single_channel, const StateFunctional& single_phi,
                     Target target, const CapacityConfig& config, const Settings& settings) {
    const GainEvaluator gain(sys.phi, sys.channel, settings);
    const std::size_t dim = sys.channel.input_dim();
    auto score = [&](const InformationGain& g) { return target == Target::C ? g.I : g.Ic; };

    if (config.fixed_measurements) {
        const auto candidates = product_candidates(*config.fixed_measurements, n, dim, settings);
        SearchOutcome best{{}, candidates.front(), gain(candidates.front())};
        best.trace.value = score(best.gain);
        for (std::size_t c = 1; c < candidates.size(); ++c) {
            const auto g = gain(candidates[c]);
            if (score(g) > best.trace.value) {
                best.trace.value = score(g);
                best.trace.x = {static_cast<double>(c)};
                best.best = candidates[c];
                best.gain = g;
            }
        }
        if (best.trace.x.empty()) best.trace.x = {0.0};
        return best;
    }

    const auto family = MeasurementFamily::projective_orbit(dim);
    std::optional<std::vector<double>> start;
    if (n == 2) {
        // restart 0 begins at the product of the single-block optimum
        const auto one = search({"single", single_channel, single_phi}, 1, single_channel, single_phi, target, config,
                                settings);
        const std::size_t d1 = single_channel.input_dim();
        const HermitianMatrix h1 = generator_from_params(one.trace.x, d1);
        const ComplexMatrix id = ComplexMatrix::Identity(idx(d1), idx(d1));
        start = params_from_generator(
            HermitianMatrix::symmetrized(tensor(h1.matrix(), id) + tensor(id, h1.matrix())));
    }
    const auto result = maximize(
        [&](const std::vector<double>& x) { return score(gain(family.realize(x))); }, family.parameter_count(),
        config.optimizer, start);
    const Partition best = family.realize(result.x);
    return {result, best, gain(best)};
}

CapacityReport make_report(const StateFunctional& phi, const Channel& channel, int n, const CapacityConfig& config,
                           const Settings& settings, bool run_C, bool run_D) {
    if (n < 1) throw Error(ErrorKind::validation, "capacity: n must be >= 1");
    if (n > 2 && !config.allow_large_n) {
        std::ostringstream os;
        os << "capacity: n = " << n << " needs the large-n override (search dimension d^" << 2 * n << ")";
        throw Error(ErrorKind::resource, os.str());
    }
    if (int_pow(channel.input_dim(), n) > settings.dimension_cap)
        throw Error(ErrorKind::resource, "capacity: product dimension exceeds the cap");

    const ChannelSystem sys = product_system(phi, channel, n, settings);
    CapacityReport r;
    r.n = n;
    r.H_upper = finite(information(sys.phi, sys.channel.code(), settings).total_H, "capacity: H");
    if (n > 2) r.warnings.push_back("large n: search space and branch count grow as d^(2n)");

    std::optional<SearchOutcome> c_out;
    std::optional<SearchOutcome> d_out;
    if (run_C) c_out = search(sys, n, channel, phi, Target::C, config, settings);
    if (run_D) d_out = search(sys, n, channel, phi, Target::D, config, settings);

    // each optimum is also a candidate for the other functional
    if (c_out) {
        r.C_n_lower = c_out->gain.I;
        r.D_n_lower = c_out->gain.Ic;
        r.best_C_parameters = c_out->trace.x;
        r.best_D_parameters = c_out->trace.x;
        r.C_trace = c_out->trace;
    }
    if (d_out) {
        if (!c_out || d_out->gain.Ic > r.D_n_lower) {
            r.D_n_lower = d_out->gain.Ic;
            r.best_D_parameters = d_out->trace.x;
        }
        if (!c_out || d_out->gain.I > r.C_n_lower) {
            r.C_n_lower = d_out->gain.I;
            r.best_C_parameters = d_out->trace.x;
        }
        r.D_trace = d_out->trace;
    }
    r.chain_residual = std::max({0.0, -r.D_n_lower, r.D_n_lower - r.C_n_lower, r.C_n_lower - r.H_upper});
    return r;
}

}  // namespace

CapacityReport optimize_Cn(const StateFunctional& phi, const Channel& channel, int n, const CapacityConfig& config,
                           const Settings& settings) {
    return make_report(phi, channel, n, config, settings, true, false);
}

CapacityReport optimize_Dn(const StateFunctional& phi, const Channel& channel, int n, const CapacityConfig& config,
                           const Settings& settings) {
    return make_report(phi, channel, n, config, settings, false, true);
}

CapacityReport capacity_bounds(const StateFunctional& phi, const Channel& channel, int n, const CapacityConfig& config,
                               const Settings& settings) {
    return make_report(phi, channel, n, config, settings, true, true);
}

RateReport capacity_rate(const StateFunctional& phi, const Channel& channel, int n_max, const CapacityConfig& config,
                         const Settings& settings) {
    if (n_max < 1) throw Error(ErrorKind::validation, "capacity_rate: n_max must be >= 1");
    RateReport r;
    for (int n = 1; n <= n_max; ++n) {
        r.blocks.push_back(capacity_bounds(phi, channel, n, config, settings));
        r.C_rate.push_back(r.blocks.back().C_n_lower / n);
        r.D_rate.push_back(r.blocks.back().D_n_lower / n);
    }
    if (n_max >= 2) {
        const double c1 = r.blocks[0].C_n_lower;
        const double c2 = r.blocks[1].C_n_lower;
        r.superadditivity_surplus = c2 - 2.0 * c1;
        r.superadditivity_residual = std::max(0.0, 2.0 * c1 - 2e-4 - c2);
        r.superadditivity_ok = r.superadditivity_residual == 0.0;
    }
    return r;
}

HolevoReport holevo_quantity(const StateFunctional& phi, const Channel& channel, const Settings& settings) {
    const Partition& code = channel.code();
    if (!code.algebra().is_full())
        throw Error(ErrorKind::validation, "holevo_quantity: needs the full matrix algebra");
    const auto info = information(phi, code, settings);
    HolevoReport r;
    r.information = finite(info.total_H, "holevo_quantity: H");
    r.chi = von_neumann_entropy(precompose(phi, code, settings), settings);
    for (std::size_t i = 0; i < code.size(); ++i) {
        const double p = info.weights[i];
        if (p <= settings.zero_weight) continue;
        const ComplexMatrix branch = predual_density(code[i], phi.density().matrix()) / p;
        r.chi -= p * von_neumann_entropy(StateFunctional::restricted(code.algebra(), branch, settings), settings);
    }
    r.identity_residual = std::abs(r.chi - r.information);
    if (r.identity_residual > settings.identity_tolerance) {
        std::ostringstream os;
        os << "holevo_quantity: |chi - H_phi(zeta)| = " << r.identity_residual;
        throw Error(ErrorKind::property_violation, os.str());
    }
    return r;
}

}  // namespace qde
