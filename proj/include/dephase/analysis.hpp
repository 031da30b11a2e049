#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dephase/time_series.hpp"

namespace dephase {

/// One purity-revival dip. `depth` is the delta value at the dip minimum;
/// `full_width` is measured where the curve crosses
/// depth + (plateau - depth)/2 on both flanks.
struct RevivalEvent {
    double time = 0.0;
    double depth = 0.0;
    double full_width = 0.0;
};

/// Finds local minima of delta below depth_threshold. The plateau used for
/// the half-depth width is the series maximum. An empty list is a valid
/// result (no revivals in the window).
inline std::vector<RevivalEvent> detect_revivals(const TimeSeries& series,
                                                 double depth_threshold) {
    series.validate();
    if (!(depth_threshold > 0.0 && depth_threshold < 1.0))
        throw PreconditionError("depth_threshold must lie in (0, 1)");
    const auto& t = series.times;
    const auto& v = series.values;
    const size_t n = v.size();
    std::vector<RevivalEvent> events;
    if (n < 3) return events;

    const double plateau = *std::max_element(v.begin(), v.end());

    size_t i = 1;
    while (i + 1 < n) {
        if (!(v[i] < depth_threshold && v[i] <= v[i - 1] && v[i] <= v[i + 1])) {
            ++i;
            continue;
        }
        size_t j = i;  // flat run of equal minima
        while (j + 1 < n - 1 && v[j + 1] == v[i]) ++j;
        const bool falls_in = v[i - 1] > v[i];
        const bool rises_out = j + 1 < n && v[j + 1] > v[j];
        if (falls_in || rises_out) {
            RevivalEvent ev;
            const size_t mid = (i + j) / 2;
            ev.time = t[mid];
            ev.depth = v[mid];
            const double level = v[mid] + 0.5 * (plateau - v[mid]);
            // walk out to the half-depth crossings, interpolating linearly
            double left = t.front();
            for (size_t a = i; a-- > 0;) {
                if (v[a] >= level) {
                    const double f = (level - v[a + 1]) / (v[a] - v[a + 1]);
                    left = t[a + 1] + f * (t[a] - t[a + 1]);
                    break;
                }
            }
            double right = t.back();
            for (size_t b = j + 1; b < n; ++b) {
                if (v[b] >= level) {
                    const double f = (level - v[b - 1]) / (v[b] - v[b - 1]);
                    right = t[b - 1] + f * (t[b] - t[b - 1]);
                    break;
                }
            }
            ev.full_width = right - left;
            events.push_back(ev);
        }
        i = j + 1;
    }
    return events;
}

/// Moving average of delta over a centered window of width `resolution`,
/// modeling a finite measurement time resolution. With resolution much larger
/// than tau_R the revival dip is averaged away toward the plateau.
inline TimeSeries coarse_grain(const TimeSeries& series, double resolution) {
    series.validate();
    if (!(resolution >= 0.0)) throw PreconditionError("resolution must be >= 0");
    if (resolution == 0.0 || series.size() < 2) return series;

    double max_step = 0.0;
    for (size_t i = 1; i < series.size(); ++i)
        max_step = std::max(max_step, series.times[i] - series.times[i - 1]);
    if (max_step > resolution / 4.0)
        throw PreconditionError(
            "coarse_grain: sampling interval exceeds resolution/4; resample the series first");

    const auto& t = series.times;
    const auto& v = series.values;
    const size_t n = v.size();
    TimeSeries out;
    out.times = t;
    out.meta = series.meta;
    out.values.resize(n);

    const double half = resolution / 2.0;
    size_t lo = 0, hi = 0;
    for (size_t i = 0; i < n; ++i) {
        while (hi < n && t[hi] <= t[i] + half) ++hi;
        while (lo < hi && t[lo] < t[i] - half) ++lo;
        double sum = 0.0;
        for (size_t k = lo; k < hi; ++k) sum += v[k];
        out.values[i] = sum / static_cast<double>(hi - lo);
    }
    return out;
}

}  // namespace dephase
