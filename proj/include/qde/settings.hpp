// Numerical tolerances and resource caps

#pragma once

#include <cstddef>

namespace qde {

// Every tolerance used by the library lives here; outputs echo the values used.
struct Settings {
    double support_cutoff = 1e-12;        // relative to the largest eigenvalue
    double psd_tolerance = 1e-10;         // eigenvalues in [-tol, 0) are clamped
    double hermiticity_tolerance = 1e-10;
    double normalization_tolerance = 1e-10;
    double zero_weight = 1e-14;           // outcomes below this contribute 0
    double unit_sum_tolerance = 1e-8;     // |sum_i zeta_i(I) - I|_F
    double subunital_tolerance = 1e-9;
    double projector_tolerance = 1e-9;
    double commutation_tolerance = 1e-9;
    double invariance_tolerance = 1e-9;
    double identity_tolerance = 1e-8;     // asserted identities (alt a_n form, Holevo)
    double convergence_tolerance = 1e-6;  // |a_N - a_{N-1}|
    double admissibility_tolerance = 1e-6;
    std::size_t dimension_cap = 4096;
    std::size_t branch_cap = 4096;
    unsigned threads = 1;
};

inline const Settings& default_settings() {
    static const Settings s{};
    return s;
}

}  // namespace qde
