#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tsmotif {

/// A multidimensional time series, stored column-major: one contiguous
/// array per dimension, all of the same length. Values are validated to
/// be finite on construction.
class TimeSeries {
public:
    TimeSeries() = default;

    static TimeSeries from_columns(std::vector<std::vector<double>> columns,
                                   std::vector<std::string> names = {}) {
        if (columns.empty())
            throw std::invalid_argument("time series needs at least one dimension");
        const size_t n = columns[0].size();
        if (n == 0)
            throw std::invalid_argument("time series must not be empty");
        for (size_t f = 0; f < columns.size(); f++) {
            if (columns[f].size() != n)
                throw std::invalid_argument("dimension " + std::to_string(f) +
                                            " has length " + std::to_string(columns[f].size()) +
                                            ", expected " + std::to_string(n));
            for (size_t t = 0; t < n; t++) {
                if (!std::isfinite(columns[f][t]))
                    throw std::invalid_argument("non-finite value in dimension " +
                                                std::to_string(f) + " at position " +
                                                std::to_string(t));
            }
        }
        if (!names.empty() && names.size() != columns.size())
            throw std::invalid_argument("dimension name count does not match dimension count");
        TimeSeries ts;
        ts.columns_ = std::move(columns);
        ts.names_ = std::move(names);
        return ts;
    }

    uint32_t length() const { return columns_.empty() ? 0 : (uint32_t)columns_[0].size(); }
    uint32_t dims() const { return (uint32_t)columns_.size(); }

    std::span<const double> column(uint32_t f) const { return columns_[f]; }
    double at(uint32_t t, uint32_t f) const { return columns_[f][t]; }

    const std::vector<std::string>& dim_names() const { return names_; }

    /// Number of length-`window` subsequences.
    uint32_t num_windows(uint32_t window) const {
        if (window == 0 || window > length())
            throw std::invalid_argument("window length " + std::to_string(window) +
                                        " invalid for series of length " +
                                        std::to_string(length()));
        return length() - window + 1;
    }

private:
    std::vector<std::vector<double>> columns_;
    std::vector<std::string> names_;
};

/// Per-dimension rolling mean and standard deviation (population
/// convention, divide by w) for every window offset, plus flags marking
/// near-constant windows.
struct StatsTable {
    static constexpr double kFlatThreshold = 1e-10;

    uint32_t window = 0;
    std::vector<std::vector<double>> means;  // [dim][offset]
    std::vector<std::vector<double>> stds;   // [dim][offset]
    std::vector<std::vector<uint8_t>> flat;  // [dim][offset]

    uint32_t num_windows() const { return means.empty() ? 0 : (uint32_t)means[0].size(); }
};

/// Rolling statistics for all subsequences. Sums are centered on the
/// column mean and resynchronized periodically so the rolling update does
/// not drift.
inline StatsTable sliding_stats(const TimeSeries& ts, uint32_t window) {
    const uint32_t nw = ts.num_windows(window);
    const double w = (double)window;
    StatsTable st;
    st.window = window;
    st.means.resize(ts.dims());
    st.stds.resize(ts.dims());
    st.flat.resize(ts.dims());

    constexpr uint32_t kResync = 4096;
    for (uint32_t f = 0; f < ts.dims(); f++) {
        auto col = ts.column(f);
        long double total = 0;
        for (double v : col) total += v;
        const double center = (double)(total / (long double)col.size());

        auto& means = st.means[f];
        auto& stds = st.stds[f];
        auto& flat = st.flat[f];
        means.resize(nw);
        stds.resize(nw);
        flat.resize(nw);

        long double s1 = 0, s2 = 0;
        for (uint32_t a = 0; a < nw; a++) {
            if (a % kResync == 0) {
                s1 = 0;
                s2 = 0;
                for (uint32_t i = 0; i < window; i++) {
                    long double v = (long double)col[a + i] - center;
                    s1 += v;
                    s2 += v * v;
                }
            } else {
                long double in = (long double)col[a + window - 1] - center;
                long double out = (long double)col[a - 1] - center;
                s1 += in - out;
                s2 += in * in - out * out;
            }
            long double mu = s1 / w;
            long double var = s2 / w - mu * mu;
            if (var < 1e-12) {
                // the rolled accumulators leave residue that would mask
                // truly constant windows; recompute this window exactly
                long double e1 = 0, e2 = 0;
                for (uint32_t i = 0; i < window; i++) e1 += (long double)col[a + i] - center;
                mu = e1 / w;
                for (uint32_t i = 0; i < window; i++) {
                    const long double dv = ((long double)col[a + i] - center) - mu;
                    e2 += dv * dv;
                }
                var = e2 / w;
            }
            if (var < 0) var = 0;
            const double sd = std::sqrt((double)var);
            means[a] = (double)mu + center;
            stds[a] = sd;
            flat[a] = sd < StatsTable::kFlatThreshold;
        }
    }
    return st;
}

} // namespace tsmotif
