#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "dephase/states.hpp"
#include "dephase/time_series.hpp"
#include "dephase/types.hpp"

namespace dephase {

/// Full density matrix of a single reservoir mode, off-diagonals included.
/// The oracle keeps these to prove the diagonal-only ModeDistribution loses
/// nothing for the linear entropy.
struct ModeMatrix {
    int dim = 0;
    std::vector<Cplx> rho;  // dim x dim, row-major

    const Cplx& at(int r, int s) const { return rho[static_cast<size_t>(r) * dim + s]; }

    /// Diagonal matrix carrying the distribution's occupation probabilities.
    static ModeMatrix from_distribution(const ModeDistribution& dist) {
        ModeMatrix m;
        m.dim = dist.dim;
        m.rho.assign(static_cast<size_t>(dist.dim) * dist.dim, Cplx(0.0, 0.0));
        for (int r = 0; r < dist.dim; ++r)
            m.rho[static_cast<size_t>(r) * dist.dim + r] = dist.probs[static_cast<size_t>(r)];
        return m;
    }

    /// Pegg-Barnett phase-state projector: rho_{n,n'} = exp(i(n-n')phi_m)/(r+1)
    /// with phi_m = 2 pi m / (r+1).
    static ModeMatrix phase_state(int r_trunc, int m) {
        if (r_trunc < 0) throw PreconditionError("phase state r_trunc must be >= 0");
        if (m < 0 || m > r_trunc)
            throw InvalidPhaseIndexError("phase index m must lie in 0..r_trunc");
        const int d = r_trunc + 1;
        const double phi = 2.0 * std::numbers::pi * m / d;
        ModeMatrix mat;
        mat.dim = d;
        mat.rho.resize(static_cast<size_t>(d) * d);
        for (int n = 0; n < d; ++n)
            for (int np = 0; np < d; ++np) {
                const double arg = (n - np) * phi;
                mat.rho[static_cast<size_t>(n) * d + np] =
                    Cplx(std::cos(arg), std::sin(arg)) / static_cast<double>(d);
            }
        return mat;
    }

    /// Projection onto the diagonal (what the analytic engine sees).
    ModeMatrix diagonal_projection() const {
        ModeMatrix m;
        m.dim = dim;
        m.rho.assign(static_cast<size_t>(dim) * dim, Cplx(0.0, 0.0));
        for (int r = 0; r < dim; ++r)
            m.rho[static_cast<size_t>(r) * dim + r] = at(r, r);
        return m;
    }
};

/// Full product-space density matrix, basis ordered lexicographically as
/// (v, r_1, ..., r_M).
struct FullState {
    int d_s = 0;
    std::vector<int> d_r;
    std::vector<Cplx> rho;  // D x D, row-major

    long long dim() const {
        long long d = d_s;
        for (int dr : d_r) d *= dr;
        return d;
    }

    long long reservoir_block() const {
        long long r = 1;
        for (int dr : d_r) r *= dr;
        return r;
    }
};

inline constexpr long long kDefaultSizeCap = 4096;

/// Tensor product sys (x) modes[0] (x) ... (x) modes[M-1].
/// The oracle stores the dense D x D matrix; D beyond the cap is refused.
inline FullState build_full_initial_state(const SystemState& sys,
                                          const std::vector<ModeMatrix>& modes,
                                          long long size_cap = kDefaultSizeCap) {
    long long D = sys.dim;
    for (const auto& m : modes) {
        D *= m.dim;
        if (D > 100'000'000LL) break;  // already far beyond any sane cap
    }
    if (D > size_cap) throw SizeCapError(D, size_cap);

    FullState st;
    st.d_s = sys.dim;
    st.d_r.reserve(modes.size());
    for (const auto& m : modes) st.d_r.push_back(m.dim);

    // fold the Kronecker product left to right
    std::vector<Cplx> acc = sys.B;
    long long na = sys.dim;
    for (const auto& m : modes) {
        const long long nb = m.dim;
        std::vector<Cplx> next(static_cast<size_t>(na * nb) * static_cast<size_t>(na * nb));
        for (long long a = 0; a < na; ++a)
            for (long long b = 0; b < na; ++b) {
                const Cplx base = acc[static_cast<size_t>(a * na + b)];
                if (base == Cplx(0.0, 0.0)) continue;
                for (long long r = 0; r < nb; ++r)
                    for (long long s = 0; s < nb; ++s)
                        next[static_cast<size_t>((a * nb + r) * (na * nb) + (b * nb + s))] =
                            base * m.rho[static_cast<size_t>(r * nb + s)];
            }
        acc = std::move(next);
        na *= nb;
    }
    st.rho = std::move(acc);
    return st;
}

/// Eigenenergies E(v, r) = hbar omega v + hbar^2 g v^2
///   + sum_l hbar Omega r_l + sum_l hbar^(x+y) lambda_l v^x r_l^y,
/// indexed like FullState's basis.
struct EnergyTable {
    std::vector<double> energies;
    int d_s = 0;
    std::vector<int> d_r;
    double hbar = 1.0;
};

inline EnergyTable build_energy_table(const ModelSpec& model, int d_s,
                                      const std::vector<int>& d_r) {
    if (static_cast<int>(d_r.size()) != model.mode_count())
        throw ConfigError("energy table: mode dimensions do not match model couplings");
    EnergyTable table;
    table.d_s = d_s;
    table.d_r = d_r;
    table.hbar = model.hbar;

    const auto vx = detail::level_powers(d_s, model.x.value);
    std::vector<std::vector<double>> ry(d_r.size());
    for (size_t l = 0; l < d_r.size(); ++l)
        ry[l] = detail::level_powers(d_r[l], model.y.value);

    long long D = d_s;
    for (int dr : d_r) D *= dr;
    table.energies.resize(static_cast<size_t>(D));

    const double h_int = std::pow(model.hbar, model.x.value + model.y.value);
    std::vector<int> idx(d_r.size(), 0);
    for (long long a = 0; a < D; ++a) {
        // decode lexicographic (v, r_1..r_M)
        long long rest = a;
        for (size_t l = d_r.size(); l-- > 0;) {
            idx[l] = static_cast<int>(rest % d_r[l]);
            rest /= d_r[l];
        }
        const int v = static_cast<int>(rest);
        double e = model.hbar * model.omega * v +
                   model.hbar * model.hbar * model.g * static_cast<double>(v) * v;
        for (size_t l = 0; l < d_r.size(); ++l) {
            e += model.hbar * model.Omega * idx[l];
            e += h_int * model.couplings[l].value * vx[static_cast<size_t>(v)] *
                 ry[l][static_cast<size_t>(idx[l])];
        }
        table.energies[static_cast<size_t>(a)] = e;
    }
    return table;
}

/// Exact diagonal-Hamiltonian evolution:
/// rho_ab(t) = rho_ab(0) * exp(-i (E_a - E_b) t / hbar).
inline FullState evolve_full(const FullState& state, const EnergyTable& table, double t) {
    const long long D = state.dim();
    if (static_cast<long long>(table.energies.size()) != D)
        throw ConfigError("energy table size does not match state dimension");
    FullState out = state;
    const double scale = t / table.hbar;
    for (long long a = 0; a < D; ++a) {
        for (long long b = 0; b < D; ++b) {
            const double arg = (table.energies[static_cast<size_t>(a)] -
                                table.energies[static_cast<size_t>(b)]) *
                               scale;
            out.rho[static_cast<size_t>(a * D + b)] *= Cplx(std::cos(arg), -std::sin(arg));
        }
    }
    return out;
}

/// rho_1[v,w] = sum over reservoir diagonal of rho[(v,r),(w,r)].
inline std::vector<Cplx> partial_trace_system(const FullState& state) {
    const long long D = state.dim();
    const long long R = state.reservoir_block();
    std::vector<Cplx> red(static_cast<size_t>(state.d_s) * state.d_s, Cplx(0.0, 0.0));
    for (int v = 0; v < state.d_s; ++v)
        for (int w = 0; w < state.d_s; ++w) {
            Cplx acc(0.0, 0.0);
            for (long long r = 0; r < R; ++r)
                acc += state.rho[static_cast<size_t>((v * R + r) * D + (w * R + r))];
            red[static_cast<size_t>(v) * state.d_s + w] = acc;
        }
    return red;
}

/// Reduced state at time t. Only reservoir-diagonal blocks of rho survive
/// the partial trace, so the full D x D evolution need not be materialized.
inline std::vector<Cplx> evolve_reduced(const FullState& state, const EnergyTable& table,
                                        double t) {
    const long long D = state.dim();
    if (static_cast<long long>(table.energies.size()) != D)
        throw ConfigError("energy table size does not match state dimension");
    const long long R = state.reservoir_block();
    const double scale = t / table.hbar;
    std::vector<Cplx> red(static_cast<size_t>(state.d_s) * state.d_s, Cplx(0.0, 0.0));
    for (int v = 0; v < state.d_s; ++v)
        for (int w = 0; w < state.d_s; ++w) {
            Cplx acc(0.0, 0.0);
            for (long long r = 0; r < R; ++r) {
                const long long a = v * R + r;
                const long long b = w * R + r;
                const Cplx& el = state.rho[static_cast<size_t>(a * D + b)];
                if (el == Cplx(0.0, 0.0)) continue;
                const double arg = (table.energies[static_cast<size_t>(a)] -
                                    table.energies[static_cast<size_t>(b)]) *
                                   scale;
                acc += el * Cplx(std::cos(arg), -std::sin(arg));
            }
            red[static_cast<size_t>(v) * state.d_s + w] = acc;
        }
    return red;
}

inline double matrix_purity(const std::vector<Cplx>& m) {
    double s = 0.0;
    for (const auto& el : m) s += std::norm(el);
    return s;
}

inline double full_purity(const FullState& state) { return matrix_purity(state.rho); }

/// Brute-force linear entropy curve: evolve, partial-trace, measure purity.
inline TimeSeries evolve_linear_entropy(const FullState& state, const EnergyTable& table,
                                        const std::vector<double>& times,
                                        std::string meta = {}) {
    TimeSeries series;
    series.times = times;
    series.meta = std::move(meta);
    series.values.resize(times.size());
    series.validate();
    for (size_t k = 0; k < times.size(); ++k) {
        const auto red = evolve_reduced(state, table, times[k]);
        series.values[k] = 1.0 - matrix_purity(red);
    }
    return series;
}

}  // namespace dephase
