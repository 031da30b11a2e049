#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dephase/errors.hpp"

namespace dephase {

/// Sampled (t, delta(t)) curve exchanged between the analytic engine, the
/// oracle, the fitters and the CSV layer.
struct TimeSeries {
    std::vector<double> times;   // strictly increasing
    std::vector<double> values;
    std::string meta;            // configuration digest / description

    size_t size() const { return times.size(); }

    void validate() const {
        if (times.size() != values.size())
            throw PreconditionError("time series: times and values differ in length");
        for (size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw PreconditionError("time series: times must be strictly increasing");
    }

    /// True when the sampling interval is constant to within a relative 1e-9.
    bool is_uniform() const {
        if (times.size() < 3) return true;
        const double dt = times[1] - times[0];
        for (size_t i = 2; i < times.size(); ++i)
            if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
                return false;
        return true;
    }
};

/// n equally spaced samples covering [t0, t1], endpoints included.
inline std::vector<double> uniform_grid(double t0, double t1, int n) {
    if (n < 2) throw PreconditionError("grid needs at least 2 samples");
    if (!(t1 > t0)) throw PreconditionError("grid needs t1 > t0");
    std::vector<double> t(static_cast<size_t>(n));
    const double dt = (t1 - t0) / (n - 1);
    for (int i = 0; i < n; ++i) t[static_cast<size_t>(i)] = t0 + dt * i;
    t.back() = t1;
    return t;
}

}  // namespace dephase
