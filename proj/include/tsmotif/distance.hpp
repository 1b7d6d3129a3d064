#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsmotif/time_series.hpp"

namespace tsmotif {

/// z-normalized Euclidean distance between windows starting at `a` and `b`
/// of dimension `f`. Ranges over [0, 2*sqrt(w)]. Flat windows: 0 if both
/// are flat, the maximum 2*sqrt(w) if exactly one is.
inline double znorm_distance(const TimeSeries& ts, const StatsTable& st,
                             uint32_t a, uint32_t b, uint32_t f) {
    const uint32_t w = st.window;
    if (a == b) return 0.0;
    const bool flat_a = st.flat[f][a], flat_b = st.flat[f][b];
    if (flat_a && flat_b) return 0.0;
    if (flat_a || flat_b) return 2.0 * std::sqrt((double)w);
    auto col = ts.column(f);
    const double* x = col.data() + a;
    const double* y = col.data() + b;
    // centered products: no cancellation against large offsets, exactly
    // symmetric in (a, b), and corr == 1 for identical content
    const double ma = st.means[f][a], mb = st.means[f][b];
    double sxy = 0, sxx = 0, syy = 0;
    for (uint32_t i = 0; i < w; i++) {
        const double dx = x[i] - ma;
        const double dy = y[i] - mb;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double denom = std::sqrt(sxx * syy);
    if (denom == 0.0) return 0.0;
    const double corr = std::clamp(sxy / denom, -1.0, 1.0);
    return std::sqrt(2.0 * w * (1.0 - corr));
}

/// All D unidimensional distances for the pair (a, b).
inline void distance_profile(const TimeSeries& ts, const StatsTable& st,
                             uint32_t a, uint32_t b, std::span<double> out) {
    for (uint32_t f = 0; f < ts.dims(); f++) out[f] = znorm_distance(ts, st, a, b, f);
}

struct DimSelection {
    double dist = 0;            // sum over the selected dimensions
    double max_dist = 0;        // largest selected per-dimension distance
    std::vector<uint32_t> dims; // selected dimension indices, ascending
};

/// The d smallest per-dimension distances, ties broken by lower dimension
/// index. Because the summed objective is separable this is exactly the
/// minimum over all size-d subsets.
inline DimSelection select_dims(std::span<const double> per_dim, uint32_t d) {
    const uint32_t total = (uint32_t)per_dim.size();
    if (d < 1 || d > total)
        throw std::invalid_argument("motif dimensionality must be in [1, D]");
    std::vector<uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t x, uint32_t y) {
        if (per_dim[x] != per_dim[y]) return per_dim[x] < per_dim[y];
        return x < y;
    });
    DimSelection sel;
    sel.dims.assign(order.begin(), order.begin() + d);
    std::sort(sel.dims.begin(), sel.dims.end());
    for (uint32_t f : sel.dims) {
        sel.dist += per_dim[f];
        sel.max_dist = std::max(sel.max_dist, per_dim[f]);
    }
    return sel;
}

struct SubdimDistance {
    double dist = 0;
    double max_dist = 0;
    std::vector<uint32_t> dims;
    std::vector<double> per_dim;
};

/// d-dimensional distance of the pair (a, b): the minimum over size-d
/// dimension subsets of the summed z-normalized distances.
inline SubdimDistance subdim_distance(const TimeSeries& ts, const StatsTable& st,
                                      uint32_t a, uint32_t b, uint32_t d) {
    SubdimDistance res;
    res.per_dim.resize(ts.dims());
    distance_profile(ts, st, a, b, res.per_dim);
    DimSelection sel = select_dims(res.per_dim, d);
    res.dist = sel.dist;
    res.max_dist = sel.max_dist;
    res.dims = std::move(sel.dims);
    return res;
}

/// Trivial match: identical offsets or offsets within the exclusion zone.
inline bool is_trivial_match(uint32_t a, uint32_t b, uint32_t exclusion) {
    const uint32_t gap = a > b ? a - b : b - a;
    return gap <= exclusion;
}

/// A candidate or confirmed motif: the pair of window offsets, its
/// distance profile and the selected dimensions.
struct MotifPair {
    uint32_t a = 0, b = 0;
    double dist = 0;      // d-dimensional distance over `dims`
    double max_dist = 0;  // largest selected per-dimension distance
    std::vector<uint32_t> dims;
    std::vector<double> per_dim;
    double failure_bound = 0;
};

/// Total order used everywhere motifs are ranked: (distance, a, b).
inline bool motif_less(const MotifPair& x, const MotifPair& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
}

/// Two pairs overlap when any endpoint of one is within the exclusion
/// zone of an endpoint of the other.
inline bool pairs_overlap(uint32_t a1, uint32_t b1, uint32_t a2, uint32_t b2,
                          uint32_t exclusion) {
    auto near = [exclusion](uint32_t u, uint32_t v) {
        return (u > v ? u - v : v - u) <= exclusion;
    };
    return near(a1, a2) || near(a1, b2) || near(b1, a2) || near(b1, b2);
}

} // namespace tsmotif
