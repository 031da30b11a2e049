#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "dephase/detail/linalg.hpp"
#include "dephase/time_series.hpp"

namespace dephase {

/// Outcome of the short-time expansion fit delta(t) ~ delta1 t + delta2 t^2.
/// t_D = 1/sqrt(delta2); +infinity signals a non-decaying series.
struct DecoherenceFit {
    double t_D = std::numeric_limits<double>::infinity();
    double delta1 = 0.0;
    double delta2 = 0.0;
    double window = 0.0;  // final fit window [0, window]
    int n_points = 0;
};

/// Fits the quadratic onset of a linear-entropy curve.
///
/// The series must start at t = 0 with delta(0) < 1e-12. A quartic basis
/// {t, t^2, t^3, t^4} is fit on a shrinking window until the cubic-and-above
/// contribution at the window edge is below 1% of the quadratic term and the
/// window is a small fraction of the fitted t_D itself; a fixed window would
/// bias the curvature, since t_D is an infinitesimal-time object. At least 8
/// samples must remain inside the final window, so sample densely below the
/// expected t_D.
inline DecoherenceFit fit_decoherence_time(const TimeSeries& series,
                                           std::optional<double> window_hint = std::nullopt) {
    series.validate();
    if (series.size() < 9)
        throw PreconditionError("decoherence fit needs at least 9 samples");
    if (std::abs(series.times.front()) > 1e-12 || std::abs(series.values.front()) >= 1e-12)
        throw PreconditionError(
            "decoherence fit requires a series starting at t = 0 with delta(0) < 1e-12");

    double window = window_hint ? std::min(*window_hint, series.times.back())
                                : series.times.back();

    DecoherenceFit fit;
    for (int iter = 0; iter < 60; ++iter) {
        std::vector<double> b1, b2, b3, b4, rhs;
        for (size_t i = 0; i < series.size(); ++i) {
            const double t = series.times[i];
            if (t > window * (1.0 + 1e-12)) break;
            const double tau = t / window;
            b1.push_back(tau);
            b2.push_back(tau * tau);
            b3.push_back(tau * tau * tau);
            b4.push_back(tau * tau * tau * tau);
            rhs.push_back(series.values[i]);
        }
        if (static_cast<int>(rhs.size()) - 1 < 8)
            throw PreconditionError(
                "decoherence fit: fewer than 8 samples inside the fit window; sample more densely");
        const auto c = detail::lstsq({b1, b2, b3, b4}, rhs);
        fit.delta1 = c[0] / window;
        fit.delta2 = c[1] / (window * window);
        fit.window = window;
        fit.n_points = static_cast<int>(rhs.size());

        if (!(c[1] > 0.0)) {
            // non-decaying at every scale examined: no-decoherence signal
            fit.t_D = std::numeric_limits<double>::infinity();
            return fit;
        }
        fit.t_D = 1.0 / std::sqrt(fit.delta2);

        // pull the window down to a small fraction of the fitted t_D first
        if (window > 0.055 * fit.t_D) {
            const double target = 0.05 * fit.t_D;
            window = (target < window * 0.65) ? std::max(target, window * 0.05) : window * 0.65;
            continue;
        }
        const double high_order = std::abs(c[2]) + std::abs(c[3]);
        if (high_order <= 0.01 * std::abs(c[1])) return fit;
        window *= 0.65;
    }
    throw PreconditionError("decoherence fit did not converge; sample a denser early window");
}

}  // namespace dephase
