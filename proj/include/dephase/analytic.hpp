#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dephase/states.hpp"
#include "dephase/time_series.hpp"
#include "dephase/types.hpp"

namespace dephase {

/// Characteristic times of one model + initial-state configuration.
///
/// tau_R is 2*t_D by construction. t_R and Lambda are absent when the
/// exponents are non-integer or the couplings are not exact commensurate
/// rationals; k holds Lambda/lambda_l per mode when Lambda is present.
struct CharacteristicTimes {
    double t_D = std::numeric_limits<double>::infinity();
    std::optional<double> t_R;
    double tau_R = std::numeric_limits<double>::infinity();
    std::optional<double> Lambda;
    std::vector<double> k;
};

/// Per-mode characteristic function g(u) = sum_r probs[r] * exp(-i u r^y).
///
/// The double sum over (r, s) in the linear entropy factorizes into
/// g(u) * conj(g(u)) per mode; |g(u)| <= 1 with equality at u = 0.
inline Cplx mode_factor(const ModeDistribution& dist, double y, double u) {
    const auto powers = detail::level_powers(dist.dim, y);
    // compensated sums: M-fold mode products magnify any per-mode error M
    // times, and the thermal closed-form agreement budget is 1e-12 at M = 201
    double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
    for (int r = 0; r < dist.dim; ++r) {
        const double phase = u * powers[static_cast<size_t>(r)];
        const double p = dist.probs[static_cast<size_t>(r)];
        double term = p * std::cos(phase) - cre;
        double next = re + term;
        cre = (next - re) - term;
        re = next;
        term = -p * std::sin(phase) - cim;
        next = im + term;
        cim = (next - im) - term;
        im = next;
    }
    return {re, im};
}

/// Exact linear entropy delta(t) = 1 - sum_{v,w} |B_{v,w}|^2 *
/// prod_l |g_l(hbar^(x+y-1) * lambda_l * (v^x - w^x) * t)|^2.
inline double linear_entropy(const ModelSpec& model, const SystemState& sys,
                             const ReservoirSpec& res, double t) {
    require_consistent(model, res);
    const double hpow = model.hbar_power();
    const auto vx = detail::level_powers(sys.dim, model.x.value);

    double total = 0.0;
    for (int v = 0; v < sys.dim; ++v) {
        total += std::norm(sys.at(v, v));
        for (int w = 0; w < v; ++w) {
            const double bsq = std::norm(sys.at(v, w));
            if (bsq == 0.0) continue;
            const double dvx = vx[static_cast<size_t>(v)] - vx[static_cast<size_t>(w)];
            double prod = 1.0;
            for (int l = 0; l < model.mode_count(); ++l) {
                const double u = hpow * model.couplings[static_cast<size_t>(l)].value * dvx * t;
                prod *= std::norm(mode_factor(res.modes[static_cast<size_t>(l)], model.y.value, u));
            }
            total += 2.0 * bsq * prod;
        }
    }
    return 1.0 - total;
}

namespace detail {

/// |g_l(c * t_k)|^2 over a uniform time grid via phase-rotation recurrence,
/// re-anchored with exact exponentials every 64 steps. The anchor interval
/// bounds the per-mode drift near 7e-15, which keeps even 200-fold mode
/// products well inside the 1e-12 agreement budget.
inline void accumulate_mode_profile(const ModeDistribution& dist, double y, double c,
                                    const std::vector<double>& times, std::vector<double>& prod) {
    const size_t n = times.size();
    const size_t d = static_cast<size_t>(dist.dim);
    const auto powers = level_powers(dist.dim, y);
    const double dt = n > 1 ? times[1] - times[0] : 0.0;

    std::vector<double> zr(d), zi(d), wr(d), wi(d);
    for (size_t r = 0; r < d; ++r) {
        const double step = c * dt * powers[r];
        wr[r] = std::cos(step);
        wi[r] = -std::sin(step);
    }
    constexpr size_t kAnchorEvery = 64;
    for (size_t k = 0; k < n; ++k) {
        if (k % kAnchorEvery == 0) {
            const double t = times[k];
            for (size_t r = 0; r < d; ++r) {
                const double phase = c * t * powers[r];
                zr[r] = std::cos(phase);
                zi[r] = -std::sin(phase);
            }
        }
        double gre = 0.0, gim = 0.0;
        const double* p = dist.probs.data();
        for (size_t r = 0; r < d; ++r) {
            gre += p[r] * zr[r];
            gim += p[r] * zi[r];
            const double nr = zr[r] * wr[r] - zi[r] * wi[r];
            const double ni = zr[r] * wi[r] + zi[r] * wr[r];
            zr[r] = nr;
            zi[r] = ni;
        }
        prod[k] *= gre * gre + gim * gim;
    }
}

}  // namespace detail

/// linear_entropy sampled over a time grid. Uniform grids take an O(d_r)
/// per-sample rotation path; arbitrary grids fall back to pointwise
/// evaluation. Both agree with linear_entropy() to ~1e-13.
inline TimeSeries linear_entropy_series(const ModelSpec& model, const SystemState& sys,
                                        const ReservoirSpec& res,
                                        const std::vector<double>& times,
                                        std::string meta = {}) {
    require_consistent(model, res);
    TimeSeries series;
    series.times = times;
    series.meta = std::move(meta);
    series.values.assign(times.size(), 0.0);
    series.validate();

    const bool uniform = series.is_uniform();
    if (!uniform) {
        for (size_t k = 0; k < times.size(); ++k)
            series.values[k] = linear_entropy(model, sys, res, times[k]);
        return series;
    }

    const double hpow = model.hbar_power();
    const auto vx = detail::level_powers(sys.dim, model.x.value);
    double diag = 0.0;
    for (int v = 0; v < sys.dim; ++v) diag += std::norm(sys.at(v, v));

    std::vector<double> acc(times.size(), 0.0);
    std::vector<double> prod;
    for (int v = 0; v < sys.dim; ++v) {
        for (int w = 0; w < v; ++w) {
            const double bsq = std::norm(sys.at(v, w));
            if (bsq == 0.0) continue;
            const double dvx = vx[static_cast<size_t>(v)] - vx[static_cast<size_t>(w)];
            prod.assign(times.size(), 1.0);
            for (int l = 0; l < model.mode_count(); ++l) {
                const double c = hpow * model.couplings[static_cast<size_t>(l)].value * dvx;
                detail::accumulate_mode_profile(res.modes[static_cast<size_t>(l)], model.y.value,
                                                c, times, prod);
            }
            for (size_t k = 0; k < times.size(); ++k) acc[k] += 2.0 * bsq * prod[k];
        }
    }
    for (size_t k = 0; k < times.size(); ++k) series.values[k] = 1.0 - diag - acc[k];
    return series;
}

/// Closed form for the superposition system against M identical thermal
/// modes with x = y = 1:
///   delta(t) = (1/2) * { 1 - [ (1-q)^2 / (1 + q^2 - 2 q cos(lambda hbar t)) ]^M },
/// q = exp(-beta_homega). Periodic in t with period 2*pi/(lambda*hbar).
inline double thermal_linear_entropy(int M, double beta_homega, double lambda, double hbar,
                                     double t) {
    if (M < 1) throw PreconditionError("thermal closed form needs M >= 1");
    if (!(beta_homega > 0.0))
        throw InvalidTemperatureError("beta*hbar*Omega must be > 0");
    const double q = std::exp(-beta_homega);
    // denominator written as (1-q)^2 + 4q sin^2(theta/2): same expression as
    // 1 + q^2 - 2q cos(theta) but with no cancellation near theta = 0, where
    // the M-th power amplifies any bracket error
    const double s = std::sin(0.5 * lambda * hbar * t);
    const double bracket = (1.0 - q) * (1.0 - q) /
                           ((1.0 - q) * (1.0 - q) + 4.0 * q * s * s);
    return 0.5 * (1.0 - std::pow(bracket, M));
}

/// Decoherence time t_D = 1 / ( hbar^(x+y-1) * Delta1 * sqrt(2 sum_l (lambda_l Delta2_l)^2) ).
///
/// Requires a pure system state (delta(0) = 0). Returns +infinity when
/// Delta1 = 0 or every lambda_l * Delta2_l vanishes: no decoherence happens.
inline double decoherence_time(const ModelSpec& model, const SystemState& sys,
                               const ReservoirSpec& res) {
    require_consistent(model, res);
    if (!sys.is_pure())
        throw PreconditionError("decoherence_time requires a pure system state");
    const double d1sq = system_power_variance(sys, model.x.value);
    double sum = 0.0;
    for (int l = 0; l < model.mode_count(); ++l) {
        const double lam = model.couplings[static_cast<size_t>(l)].value;
        sum += lam * lam * variance_of_power(res.modes[static_cast<size_t>(l)], model.y.value);
    }
    if (!(d1sq > 0.0) || !(sum > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / (model.hbar_power() * std::sqrt(d1sq) * std::sqrt(2.0 * sum));
}

/// Largest Lambda with every nonzero lambda_l / Lambda a (signed) integer.
/// Absent when any nonzero coupling lacks an exact rational annotation or
/// all couplings vanish.
inline std::optional<Rational> coupling_gcd(const ModelSpec& model) {
    Rational acc{0, 1};
    bool any = false;
    for (const auto& c : model.couplings) {
        if (c.value == 0.0) continue;
        if (!c.exact) return std::nullopt;
        acc = any ? rational_gcd(acc, *c.exact) : c.exact->abs();
        any = true;
    }
    if (!any) return std::nullopt;
    return acc;
}

/// Revival time t_R = 2 pi s / (hbar^(x+y-1) * Lambda): the least common
/// period at which every interaction phase closes. Absent when x or y is
/// non-integer or the couplings are non-commensurate; absence is a value,
/// not an error.
inline std::optional<double> revival_time(const ModelSpec& model, long long s = 1) {
    if (s < 1) throw PreconditionError("revival index s must be >= 1");
    if (!model.x.is_integer() || !model.y.is_integer()) return std::nullopt;
    const auto gcd = coupling_gcd(model);
    if (!gcd) return std::nullopt;
    return 2.0 * std::numbers::pi * static_cast<double>(s) /
           (model.hbar_power() * gcd->value());
}

/// Revival lifetime tau_R = 2 t_D. Equal to
/// sqrt(2) / (hbar^(x+y-1) * Lambda * Delta1 * Delta2) with
/// Delta2 = sqrt(sum_l (Delta2_l / k_l)^2), k_l = Lambda / lambda_l,
/// whenever Lambda exists.
inline double revival_lifetime(const ModelSpec& model, const SystemState& sys,
                               const ReservoirSpec& res) {
    return 2.0 * decoherence_time(model, sys, res);
}

/// Aggregate reservoir variance Delta2^2 = sum_l (Delta2_l * lambda_l / Lambda)^2
/// entering the tau_R closed form. Requires Lambda.
inline double aggregate_delta2(const ModelSpec& model, const ReservoirSpec& res,
                               const Rational& Lambda) {
    require_consistent(model, res);
    double sum = 0.0;
    for (int l = 0; l < model.mode_count(); ++l) {
        const double ratio = model.couplings[static_cast<size_t>(l)].value / Lambda.value();
        sum += ratio * ratio * variance_of_power(res.modes[static_cast<size_t>(l)], model.y.value);
    }
    return std::sqrt(sum);
}

inline CharacteristicTimes characteristic_times(const ModelSpec& model, const SystemState& sys,
                                                const ReservoirSpec& res, long long s = 1) {
    CharacteristicTimes ct;
    ct.t_D = decoherence_time(model, sys, res);
    ct.tau_R = 2.0 * ct.t_D;
    ct.t_R = revival_time(model, s);
    const auto gcd = coupling_gcd(model);
    if (gcd && model.x.is_integer() && model.y.is_integer()) {
        ct.Lambda = gcd->value();
        ct.k.reserve(model.couplings.size());
        for (const auto& c : model.couplings)
            ct.k.push_back(c.value == 0.0 ? std::numeric_limits<double>::infinity()
                                          : gcd->value() / c.value);
    }
    return ct;
}

enum class RecurrenceStatus { found, irrational_ratio, degenerate };

/// Recurrence analysis outcome: `time` is set only for status == found.
struct RecurrenceResult {
    RecurrenceStatus status = RecurrenceStatus::degenerate;
    std::optional<double> time;
};

/// Time at which the reduced density matrix itself returns to its initial
/// value (for the oscillator model with omega = hbar*g and reservoir
/// occupation restricted to multiples of n below):
///   lambda = 0            ->  t_r = s pi / (hbar g)
///   2g/lambda = n/m in Q  ->  t_r = 2 pi m s / (hbar lambda n)
/// irrational 2g/lambda    ->  absent.
/// g = 0 with lambda = 0 is degenerate (every t recurs); g = 0 with a live
/// coupling closes all phases at t_r = 2 pi s / (hbar lambda), the n -> 0
/// limit the formula itself cannot express.
inline RecurrenceResult recurrence_time(double g, const Coupling& lambda, double hbar,
                                        long long s = 1) {
    if (!(g >= 0.0)) throw PreconditionError("Kerr strength g must be >= 0");
    if (!(hbar > 0.0)) throw PreconditionError("hbar must be > 0");
    if (s < 1) throw PreconditionError("recurrence index s must be >= 1");
    const double pi = std::numbers::pi;

    if (lambda.value == 0.0) {
        if (g == 0.0) return {RecurrenceStatus::degenerate, std::nullopt};
        return {RecurrenceStatus::found, static_cast<double>(s) * pi / (hbar * g)};
    }
    const double abs_lambda = std::abs(lambda.value);
    if (g == 0.0)
        return {RecurrenceStatus::found, 2.0 * pi * static_cast<double>(s) / (hbar * abs_lambda)};

    auto lam_exact = lambda.exact ? lambda.exact : Rational::from_double_exact(lambda.value);
    auto g_exact = Rational::from_double_exact(g);
    if (!lam_exact || !g_exact) return {RecurrenceStatus::irrational_ratio, std::nullopt};

    const Rational ratio =
        Rational::divide(Rational::multiply(Rational{2, 1}, *g_exact), lam_exact->abs());
    const double t = 2.0 * pi * static_cast<double>(ratio.den) * static_cast<double>(s) /
                     (hbar * abs_lambda * static_cast<double>(ratio.num));
    return {RecurrenceStatus::found, t};
}

/// Effective Hilbert space size Hs = sqrt(1 + 12 * delta2^2): the dimension
/// of the truncated phase state producing the same purity loss.
inline double effective_hilbert_size(double delta2) {
    if (!(delta2 >= 0.0)) throw PreconditionError("delta2 must be >= 0");
    return std::sqrt(1.0 + 12.0 * delta2 * delta2);
}

struct EquivalentReservoir {
    double nbar = 0.0;
    int r_trunc = 0;
};

/// Single-mode reservoirs reproducing a target Delta2 (y = 1): the thermal
/// occupation solving nbar*(nbar+1) = delta2^2 and the phase-state
/// truncation round(Hs) - 1.
inline EquivalentReservoir equivalent_reservoir(double delta2_target) {
    if (!(delta2_target >= 0.0)) throw PreconditionError("delta2 must be >= 0");
    const double d2sq = delta2_target * delta2_target;
    EquivalentReservoir eq;
    eq.nbar = 2.0 * d2sq / (1.0 + std::sqrt(1.0 + 4.0 * d2sq));
    const double hs = effective_hilbert_size(delta2_target);
    eq.r_trunc = std::max(0, static_cast<int>(std::lround(hs)) - 1);
    return eq;
}

}  // namespace dephase
