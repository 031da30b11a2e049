#pragma once

#include <cmath>
#include <vector>

#include "dephase/types.hpp"

namespace dephase {

namespace detail {

/// n^y for n = 0..dim-1, with exact fast paths for the common exponents.
inline std::vector<double> level_powers(int dim, double y) {
    std::vector<double> out(static_cast<size_t>(dim));
    if (y == 1.0) {
        for (int n = 0; n < dim; ++n) out[static_cast<size_t>(n)] = n;
    } else if (y == 0.5) {
        for (int n = 0; n < dim; ++n) out[static_cast<size_t>(n)] = std::sqrt(static_cast<double>(n));
    } else if (y == 2.0) {
        for (int n = 0; n < dim; ++n) out[static_cast<size_t>(n)] = static_cast<double>(n) * n;
    } else {
        out[0] = 0.0;
        for (int n = 1; n < dim; ++n) out[static_cast<size_t>(n)] = std::pow(static_cast<double>(n), y);
    }
    return out;
}

/// Variance of the values under the weights, two-pass for stability.
inline double weighted_variance(const std::vector<double>& weights,
                                const std::vector<double>& values) {
    double mean = 0.0;
    for (size_t n = 0; n < weights.size(); ++n) mean += weights[n] * values[n];
    double var = 0.0;
    for (size_t n = 0; n < weights.size(); ++n) {
        const double d = values[n] - mean;
        var += weights[n] * d * d;
    }
    return var;
}

}  // namespace detail

/// The (|0> + |1>)/sqrt(2) superposition projector: a 2-level pure state
/// with all four coefficients 1/2.
inline SystemState make_superposition_system() {
    SystemState s;
    s.dim = 2;
    s.B = {Cplx(0.5, 0.0), Cplx(0.5, 0.0), Cplx(0.5, 0.0), Cplx(0.5, 0.0)};
    return s;
}

/// Fock projector |n><n| in a space of dim levels (dim > n).
inline SystemState make_fock_system(int n, int dim = -1) {
    if (n < 0) throw PreconditionError("fock level must be >= 0");
    if (dim < 0) dim = n + 1;
    if (dim <= n) throw PreconditionError("fock system dim must exceed the level");
    SystemState s;
    s.dim = dim;
    s.B.assign(static_cast<size_t>(dim) * dim, Cplx(0.0, 0.0));
    s.at(n, n) = 1.0;
    return s;
}

/// Pure state from amplitudes (normalized internally).
inline SystemState make_pure_system(const std::vector<Cplx>& amplitudes) {
    const int dim = static_cast<int>(amplitudes.size());
    if (dim < 1) throw PreconditionError("pure system needs at least one amplitude");
    double norm2 = 0.0;
    for (const auto& a : amplitudes) norm2 += std::norm(a);
    if (!(norm2 > 0)) throw PreconditionError("pure system amplitudes are all zero");
    SystemState s;
    s.dim = dim;
    s.B.resize(static_cast<size_t>(dim) * dim);
    for (int v = 0; v < dim; ++v)
        for (int w = 0; w < dim; ++w)
            s.at(v, w) = amplitudes[static_cast<size_t>(v)] *
                         std::conj(amplitudes[static_cast<size_t>(w)]) / norm2;
    return s;
}

/// Thermal mode at dimensionless inverse temperature beta_homega = hbar*Omega/(kB*T).
///
/// probs[n] ~ exp(-n*beta_homega), truncated at the smallest dimension whose
/// discarded tail mass is below tail_epsilon, then renormalized. Downstream
/// error from the infinite-sum truncation is bounded by this single knob.
inline ModeDistribution make_thermal_mode(double beta_homega, double tail_epsilon = 1e-12) {
    if (!(beta_homega > 0.0))
        throw InvalidTemperatureError(
            "beta*hbar*Omega must be > 0 (the infinite-temperature limit is not normalizable)");
    if (!(tail_epsilon > 0.0 && tail_epsilon < 1.0))
        throw PreconditionError("tail_epsilon must lie in (0, 1)");

    const double q = std::exp(-beta_homega);
    // tail mass after keeping n = 0..d-1 of the normalized geometric law is q^d
    int dim = 1;
    if (q > 0.0) {
        const double d_min = std::log(tail_epsilon) / std::log(q);
        dim = std::max(1, static_cast<int>(std::floor(d_min)) + 1);
        while (std::pow(q, dim) >= tail_epsilon) ++dim;
    }

    ModeDistribution mode;
    mode.dim = dim;
    mode.provenance = ModeDistribution::Provenance::thermal;
    mode.nbar = 1.0 / std::expm1(beta_homega);
    mode.tail_epsilon = tail_epsilon;
    mode.probs.resize(static_cast<size_t>(dim));
    double sum = 0.0;
    double w = 1.0;
    for (int n = 0; n < dim; ++n, w *= q) {
        mode.probs[static_cast<size_t>(n)] = w;
        sum += w;
    }
    for (auto& p : mode.probs) p /= sum;
    return mode;
}

/// Pegg-Barnett phase state |phi_m>(r): uniform occupation of the lowest
/// r_trunc + 1 number states. m enters only the off-diagonal phases, which
/// the linear entropy ignores; it is recorded for the oracle's benefit.
inline ModeDistribution make_phase_state_mode(int r_trunc, int m) {
    if (r_trunc < 0) throw PreconditionError("phase state r_trunc must be >= 0");
    if (m < 0 || m > r_trunc)
        throw InvalidPhaseIndexError("phase index m must lie in 0..r_trunc");
    ModeDistribution mode;
    mode.dim = r_trunc + 1;
    mode.provenance = ModeDistribution::Provenance::phase_state;
    mode.r_trunc = r_trunc;
    mode.m = m;
    mode.probs.assign(static_cast<size_t>(r_trunc) + 1, 1.0 / (r_trunc + 1));
    return mode;
}

/// Custom diagonal mode from raw occupation probabilities (renormalized).
inline ModeDistribution make_custom_mode(std::vector<double> probs) {
    ModeDistribution mode;
    mode.dim = static_cast<int>(probs.size());
    mode.provenance = ModeDistribution::Provenance::custom;
    mode.probs = std::move(probs);
    double sum = 0.0;
    for (double p : mode.probs) sum += p;
    if (!(sum > 0.0)) throw PreconditionError("custom mode probabilities sum to zero");
    for (auto& p : mode.probs) p /= sum;
    mode.validate();
    return mode;
}

/// Variance of the (N2)^y operator under the mode's number distribution.
inline double variance_of_power(const ModeDistribution& dist, double y) {
    const auto powers = detail::level_powers(dist.dim, y);
    return detail::weighted_variance(dist.probs, powers);
}

/// Variance of the (N1)^x operator under the system's number populations
/// (the diagonal of B).
inline double system_power_variance(const SystemState& state, double x) {
    std::vector<double> weights(static_cast<size_t>(state.dim));
    for (int v = 0; v < state.dim; ++v)
        weights[static_cast<size_t>(v)] = std::max(0.0, state.at(v, v).real());
    const auto powers = detail::level_powers(state.dim, x);
    return detail::weighted_variance(weights, powers);
}

}  // namespace dephase
