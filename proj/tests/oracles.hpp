// Independent reference computations for the tests. Only Eigen and scalar
// arithmetic; nothing here calls into qde numerics.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXcd;
using cd = std::complex<double>;

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline double shannon(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) h -= xlogx(v);
    return h;
}

inline double binary_entropy(double p) { return -xlogx(p) - xlogx(1.0 - p); }

inline Mat herm(const Mat& m) { return 0.5 * (m + m.adjoint()); }

inline Eigen::VectorXd eigenvalues(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(m));
    return es.eigenvalues();
}

inline Mat log_on_support(const Mat& m, double cut) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(m));
    Eigen::VectorXd l = es.eigenvalues();
    for (Eigen::Index i = 0; i < l.size(); ++i) l(i) = l(i) > cut ? std::log(l(i)) : 0.0;
    return es.eigenvectors() * l.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

inline double vn_entropy(const Mat& rho) {
    double s = 0.0;
    for (double v : eigenvalues(rho)) s -= xlogx(std::max(v, 0.0));
    return s;
}

// tr(ρ_ω (ln ρ_ω - ln ρ_φ)) for full-rank ρ_φ; +inf when ω leaves φ's support.
inline double umegaki(const Mat& w, const Mat& p) {
    Eigen::SelfAdjointEigenSolver<Mat> ep(herm(p));
    const double top = std::max(ep.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < ep.eigenvalues().size(); ++i)
        if (ep.eigenvalues()(i) <= 1e-12 * top) {
            const Eigen::VectorXcd v = ep.eigenvectors().col(i);
            if ((v.adjoint() * w * v)(0, 0).real() > 1e-12 * top) return std::numeric_limits<double>::infinity();
        }
    const double cut = 1e-12 * top;
    return (w * (log_on_support(w, cut) - log_on_support(p, cut))).trace().real();
}

// Σ K ρ K^†
inline Mat predual(const std::vector<Mat>& kraus, const Mat& rho) {
    Mat out = Mat::Zero(kraus.front().rows(), kraus.front().rows());
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
}

struct Info {
    double H = 0, Hc = 0, Hq = 0;
    std::vector<double> weights;
};

// Branch densities σ_i = Σ_k K ρ K^† on a full algebra.
inline Info information(const Mat& rho, const std::vector<std::vector<Mat>>& maps) {
    Info r;
    std::vector<Mat> sig;
    Mat total = Mat::Zero(maps.front().front().rows(), maps.front().front().rows());
    for (const auto& m : maps) {
        sig.push_back(predual(m, rho));
        total += sig.back();
        r.weights.push_back(sig.back().trace().real());
    }
    for (std::size_t i = 0; i < sig.size(); ++i) {
        const double p = r.weights[i];
        if (p <= 1e-14) continue;
        r.H += p * umegaki(sig[i] / p, total);
        r.Hq += umegaki(sig[i], total);
        r.Hc -= xlogx(p);
    }
    return r;
}

// Kraus families of ζ∘η: products L K, i-major.
inline std::vector<std::vector<Mat>> compose(const std::vector<std::vector<Mat>>& z,
                                             const std::vector<std::vector<Mat>>& e) {
    std::vector<std::vector<Mat>> out;
    for (const auto& zi : z)
        for (const auto& ej : e) {
            std::vector<Mat> ks;
            for (const auto& k : zi)
                for (const auto& l : ej) ks.push_back(l * k);
            out.push_back(ks);
        }
    return out;
}

// Exact Shannon entropy of an n-window of a stationary Markov chain, by
// enumeration of all words.
inline double markov_block_entropy(const std::vector<std::vector<double>>& P, const std::vector<double>& pi, int len) {
    const std::size_t s = P.size();
    std::size_t words = 1;
    for (int i = 0; i < len; ++i) words *= s;
    double h = 0.0;
    std::vector<std::size_t> w(static_cast<std::size_t>(len));
    for (std::size_t idx = 0; idx < words; ++idx) {
        std::size_t r = idx;
        for (int k = len - 1; k >= 0; --k) {
            w[static_cast<std::size_t>(k)] = r % s;
            r /= s;
        }
        double p = pi[w[0]];
        for (int k = 0; k + 1 < len; ++k) p *= P[w[static_cast<std::size_t>(k)]][w[static_cast<std::size_t>(k) + 1]];
        h -= xlogx(p);
    }
    return h;
}

// Classical H of a function partition straight from the displayed formula.
inline double classical_H(const std::vector<double>& mu, const std::vector<std::vector<double>>& f) {
    double h = 0.0;
    for (const auto& fi : f) {
        double m = 0.0, t = 0.0;
        for (std::size_t x = 0; x < mu.size(); ++x) {
            const double q = fi[x] * fi[x];
            m += mu[x] * q;
            t += mu[x] * xlogx(q);
        }
        h += -xlogx(m) + t;
    }
    return h;
}

inline std::vector<std::vector<double>> product(const std::vector<std::vector<double>>& a,
                                                const std::vector<std::vector<double>>& b) {
    std::vector<std::vector<double>> out;
    for (const auto& ai : a)
        for (const auto& bj : b) {
            std::vector<double> v(ai.size());
            for (std::size_t x = 0; x < v.size(); ++x) v[x] = ai[x] * bj[x];
            out.push_back(v);
        }
    return out;
}

// Mutual information of a classical channel with input law p and rows W[i][j].
inline double mutual_information(const std::vector<double>& p, const std::vector<std::vector<double>>& W) {
    std::vector<double> q(W.front().size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) q[j] += p[i] * W[i][j];
    double I = shannon(q);
    for (std::size_t i = 0; i < p.size(); ++i) I -= p[i] * shannon(W[i]);
    return I;
}

// Qubit pure-state ensemble measured in the real basis at angle t:
// |b_0> = (cos t, sin t), |b_1> = (-sin t, cos t).
inline std::vector<std::vector<double>> real_basis_channel(const std::vector<Eigen::Vector2d>& states, double t) {
    const Eigen::Vector2d b0(std::cos(t), std::sin(t)), b1(-std::sin(t), std::cos(t));
    std::vector<std::vector<double>> W;
    for (const auto& s : states) {
        const double a = b0.dot(s), b = b1.dot(s);
        W.push_back({a * a, b * b});
    }
    return W;
}

// max over t in [0, π) at the given resolution.
inline double grid_search(const std::function<double(double)>& f, double step) {
    double best = -std::numeric_limits<double>::infinity();
    for (double t = 0.0; t < M_PI; t += step) best = std::max(best, f(t));
    return best;
}

}  // namespace oracle
