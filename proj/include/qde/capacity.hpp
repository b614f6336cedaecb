// Channels with codes, information gain of a measurement and
// finite-block capacities C^n, D^n found by search over measurements.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qde/info.hpp"
#include "qde/optimizer.hpp"
#include "qde/partition.hpp"
#include "qde/state.hpp"

namespace qde {

// A unital channel ζ: A -> B together with a code ζ = Σ_i ζ_i.
class Channel {
public:
    explicit Channel(Partition code);
    // Also checks Σ_i code_i(x) = total(x) within 1e-9 on random x.
    Channel(KrausMap total, Partition code, const Settings& settings = default_settings());

    const KrausMap& total() const { return total_; }
    const Partition& code() const { return code_; }
    std::size_t input_dim() const { return code_.in_dim(); }   // measured algebra A
    std::size_t letter_dim() const { return code_.out_dim(); } // algebra B carrying φ

private:
    KrausMap total_;
    Partition code_;
};

// A channel bundled with the state on B it is evaluated at.
struct ChannelSystem {
    std::string name;
    Channel channel;
    StateFunctional phi;
};

// ζ_i(x) = tr(ρ_i x)|i><i| with φ = diag(p).
ChannelSystem preparation_ensemble(const std::vector<HermitianMatrix>& states, const std::vector<double>& probs,
                                   const std::string& name = "ensemble");
// Same ensemble sent through a noise channel (single-map partition on A).
ChannelSystem noisy_ensemble(const ChannelSystem& ensemble, const KrausMap& noise, const std::string& name);
// Code {√λ_i I} on M_d.
ChannelSystem proportional_code(std::size_t dim, const std::vector<double>& lambdas, const StateFunctional& phi);
// One letter per Kraus operator of a channel.
ChannelSystem kraus_split_code(const KrausMap& channel, const StateFunctional& phi, const std::string& name);

// Heisenberg-picture noise channels on a qubit.
KrausMap depolarizing(double p);
KrausMap dephasing(double p);

enum class FamilyKind { projective_orbit, fixed_list };

class MeasurementFamily {
public:
    // P_j = U|j><j|U^† with U = exp(iH(θ)), θ ∈ R^{d²}.
    static MeasurementFamily projective_orbit(std::size_t dim);
    static MeasurementFamily fixed_list(std::vector<Partition> candidates);

    FamilyKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    std::size_t parameter_count() const { return kind_ == FamilyKind::projective_orbit ? dim_ * dim_ : 0; }
    std::size_t outcome_count() const;
    const std::vector<Partition>& candidates() const { return candidates_; }

    Partition realize(const std::vector<double>& params) const;

private:
    FamilyKind kind_ = FamilyKind::projective_orbit;
    std::size_t dim_ = 0;
    std::vector<Partition> candidates_;
};

// Hermitian generator for a parameter vector (diagonal first, then Re/Im of
// the strict upper triangle row by row) and its inverse.
HermitianMatrix generator_from_params(const std::vector<double>& params, std::size_t dim);
std::vector<double> params_from_generator(const HermitianMatrix& h);

struct InformationGain {
    double I = 0;
    double Ic = 0;
};

// I = H_φ(ζ) + H_{φ∘ζ}(η) - H_φ(ζ∘η), Ic the same with H^c.
InformationGain information_gain(const StateFunctional& phi, const Channel& channel, const Partition& eta,
                                 const Settings& settings = default_settings());

struct CapacityConfig {
    NelderMeadConfig optimizer;
    bool allow_large_n = false;  // n > 2 is refused otherwise
    std::optional<std::vector<Partition>> fixed_measurements;  // per-block candidates instead of the orbit
};

struct CapacityReport {
    int n = 1;
    double C_n_lower = 0;
    double D_n_lower = 0;
    double H_upper = 0;  // n H_φ(ζ)
    std::vector<double> best_C_parameters;
    std::vector<double> best_D_parameters;
    OptimizationResult C_trace;
    OptimizationResult D_trace;
    double chain_residual = 0;  // largest violation of 0 <= D <= C <= H
    std::vector<std::string> warnings;
};

// n-fold product system: φ^{⊗n} and the code ζ^{⊗n}.
ChannelSystem product_system(const StateFunctional& phi, const Channel& channel, int n,
                             const Settings& settings = default_settings());

CapacityReport optimize_Cn(const StateFunctional& phi, const Channel& channel, int n, const CapacityConfig& config,
                           const Settings& settings = default_settings());
CapacityReport optimize_Dn(const StateFunctional& phi, const Channel& channel, int n, const CapacityConfig& config,
                           const Settings& settings = default_settings());
// Both searches, each optimum re-scored under the other functional.
CapacityReport capacity_bounds(const StateFunctional& phi, const Channel& channel, int n, const CapacityConfig& config,
                               const Settings& settings = default_settings());

struct RateReport {
    std::vector<CapacityReport> blocks;  // n = 1..n_max
    std::vector<double> C_rate;          // C_n / n
    std::vector<double> D_rate;
    double superadditivity_residual = 0;  // max(2 C_1 - C_2 - 2e-4, 0)
    double superadditivity_surplus = 0;   // C_2 - 2 C_1
    bool superadditivity_ok = true;
};

RateReport capacity_rate(const StateFunctional& phi, const Channel& channel, int n_max, const CapacityConfig& config,
                         const Settings& settings = default_settings());

struct HolevoReport {
    double chi = 0;
    double information = 0;
    double identity_residual = 0;
};

// χ = S(ρ̄) - Σ p_i S(ρ_i); Error(property_violation) if |χ - H_φ(ζ)| > identity tolerance.
HolevoReport holevo_quantity(const StateFunctional& phi, const Channel& channel,
                             const Settings& settings = default_settings());

}  // namespace qde
