#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tsmotif/rng.hpp"
#include "tsmotif/time_series.hpp"

namespace tsmotif {

struct PlantedMotif {
    TimeSeries series;
    uint32_t a = 0, b = 0;          // planted window offsets, a < b
    std::vector<uint32_t> dims;     // dimensions carrying the pattern
};

/// D-dimensional standard random walk with one sinusoidal pattern
/// (amplitude 1, three cycles) written into d randomly chosen dimensions
/// at two non-overlapping offsets. The second copy carries additive
/// Gaussian noise of scale noise_sigma, which tunes the contrast.
inline PlantedMotif generate_planted(uint32_t n, uint32_t dims, uint32_t d, uint32_t window,
                                     double noise_sigma, uint64_t seed) {
    if (dims == 0 || d < 1 || d > dims)
        throw std::invalid_argument("pattern dimensionality must be in [1, D]");
    if (window < 4) throw std::invalid_argument("window too short for a sinusoidal pattern");
    if (noise_sigma < 0) throw std::invalid_argument("noise scale must be non-negative");
    const uint32_t exclusion = window / 2;
    if (n < 2 * window + exclusion)
        throw std::invalid_argument("series too short for two non-overlapping windows");

    std::vector<std::vector<double>> cols(dims);
    for (uint32_t f = 0; f < dims; f++) {
        auto rng = keyed_rng(seed, {rng_tag::planted_walk, f});
        std::normal_distribution<double> step;
        cols[f].resize(n);
        double level = 0;
        for (uint32_t t = 0; t < n; t++) {
            level += step(rng);
            cols[f][t] = level;
        }
    }

    auto place = keyed_rng(seed, {rng_tag::planted_place});
    std::vector<uint32_t> all_dims(dims);
    std::iota(all_dims.begin(), all_dims.end(), 0u);
    std::shuffle(all_dims.begin(), all_dims.end(), place);
    std::vector<uint32_t> chosen(all_dims.begin(), all_dims.begin() + d);
    std::sort(chosen.begin(), chosen.end());

    const uint32_t gap = std::max(exclusion, window);
    std::uniform_int_distribution<uint32_t> pick(0, n - window);
    uint32_t a = 0, b = 0;
    do {
        a = pick(place);
        b = pick(place);
    } while ((a > b ? a - b : b - a) <= gap);
    if (a > b) std::swap(a, b);

    std::vector<double> pattern(window);
    for (uint32_t i = 0; i < window; i++)
        pattern[i] = std::sin(2.0 * std::numbers::pi * 3.0 * (double)i / (double)window);

    auto noise = keyed_rng(seed, {rng_tag::planted_noise});
    std::normal_distribution<double> eps;
    for (uint32_t f : chosen) {
        const double base_a = cols[f][a];
        const double base_b = cols[f][b];
        for (uint32_t i = 0; i < window; i++) {
            cols[f][a + i] = base_a + pattern[i];
            cols[f][b + i] = base_b + pattern[i] + noise_sigma * eps(noise);
        }
    }

    PlantedMotif out;
    out.series = TimeSeries::from_columns(std::move(cols));
    out.a = a;
    out.b = b;
    out.dims = std::move(chosen);
    return out;
}

} // namespace tsmotif
