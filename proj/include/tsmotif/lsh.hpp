#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "tsmotif/convolution.hpp"
#include "tsmotif/rng.hpp"
#include "tsmotif/time_series.hpp"

namespace tsmotif {

inline uint32_t resolve_threads(uint32_t requested) {
    return requested == 0 ? (uint32_t)omp_get_max_threads() : requested;
}

/// Probability that two points at the given z-normalized distance fall
/// into the same bucket of a discretized random projection with the given
/// quantization width.
inline double collision_probability(double distance, double width) {
    if (distance < 0) throw std::invalid_argument("distance must be non-negative");
    if (width <= 0) throw std::invalid_argument("quantization width must be positive");
    if (distance == 0) return 1.0;
    const double t = width / distance;
    const double norm_neg_t = 0.5 * std::erfc(t / std::sqrt(2.0));
    const double p = 1.0 - 2.0 * norm_neg_t -
                     (2.0 / (std::sqrt(2.0 * std::numbers::pi) * t)) *
                         (1.0 - std::exp(-0.5 * t * t));
    return std::clamp(p, 0.0, 1.0);
}

struct WidthEstimate {
    double value = 1.0;
    bool degenerate = false;  // set when the sampled projections had no spread
    double sample_min = 0, sample_max = 0;
};

/// Width of 256 equal-width buckets spanning the empirical range of
/// projections of z-normalized windows onto standard-normal directions.
/// Directions come from keyed_rng(seed, {rng_tag::width_direction, v});
/// offsets are sampled per dimension. Deterministic given the seed.
inline WidthEstimate estimate_quantization_width(const TimeSeries& ts, const StatsTable& st,
                                                 uint32_t n_vectors = 8,
                                                 uint32_t n_samples = 2000,
                                                 uint64_t seed = 1) {
    const uint32_t w = st.window;
    const uint32_t nw = st.num_windows();
    if (n_vectors == 0) throw std::invalid_argument("need at least one direction vector");
    const uint32_t ns = std::min(n_samples, nw);

    std::vector<std::vector<double>> dirs(n_vectors);
    std::vector<double> dir_sums(n_vectors, 0.0);
    for (uint32_t v = 0; v < n_vectors; v++) {
        auto rng = keyed_rng(seed, {rng_tag::width_direction, v});
        std::normal_distribution<double> normal;
        dirs[v].resize(w);
        for (uint32_t i = 0; i < w; i++) {
            dirs[v][i] = normal(rng);
            dir_sums[v] += dirs[v][i];
        }
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (uint32_t f = 0; f < ts.dims(); f++) {
        auto col = ts.column(f);
        auto rng = keyed_rng(seed, {rng_tag::width_sample, f});
        std::uniform_int_distribution<uint32_t> pick(0, nw - 1);
        for (uint32_t s = 0; s < ns; s++) {
            const uint32_t a = (ns == nw) ? s : pick(rng);
            for (uint32_t v = 0; v < n_vectors; v++) {
                double proj = 0.0;
                if (!st.flat[f][a]) {
                    double dot = 0;
                    const double* x = col.data() + a;
                    for (uint32_t i = 0; i < w; i++) dot += x[i] * dirs[v][i];
                    proj = (dot - st.means[f][a] * dir_sums[v]) / st.stds[f][a];
                }
                lo = std::min(lo, proj);
                hi = std::max(hi, proj);
            }
        }
    }

    WidthEstimate est;
    est.sample_min = lo;
    est.sample_max = hi;
    if (!(hi > lo)) {
        est.value = 1.0;
        est.degenerate = true;
        return est;
    }
    est.value = (hi - lo) / 256.0;
    return est;
}

/// The sampled hash family. Repetition j uses the pair of half-word
/// functions (left bank slot j div m, right bank slot j mod m), giving
/// m^2 repetitions from K*m scalar functions per dimension.
struct HashPool {
    uint32_t dims = 0;
    uint32_t window = 0;
    uint32_t word_length = 0;  // K, even
    uint32_t bank_size = 0;    // m
    double width = 1.0;        // quantization width r
    uint64_t seed = 0;

    // Flattened [f][side][slot][q] direction vectors (length `window`)
    // and offsets, q in [0, word_length/2).
    std::vector<double> directions;
    std::vector<double> offsets;

    uint32_t repetitions() const { return bank_size * bank_size; }
    uint32_t half_length() const { return word_length / 2; }

    size_t bank_index(uint32_t f, uint32_t side, uint32_t slot) const {
        return ((size_t)f * 2 + side) * bank_size + slot;
    }
    std::span<const double> direction(uint32_t f, uint32_t side, uint32_t slot, uint32_t q) const {
        const size_t base = (bank_index(f, side, slot) * half_length() + q) * window;
        return {directions.data() + base, window};
    }
    double offset(uint32_t f, uint32_t side, uint32_t slot, uint32_t q) const {
        return offsets[bank_index(f, side, slot) * half_length() + q];
    }
};

/// Samples the hash family. The concatenation count is rounded up to an
/// even value (two word halves) and the repetition count down to a
/// perfect square m^2; when a memory limit is given, m shrinks until the
/// hash words fit the budget of num_windows * dims * L * K bytes.
inline HashPool build_hash_pool(uint32_t dims, uint32_t window, uint32_t max_word_length,
                                uint32_t max_repetitions, double width, uint64_t seed,
                                uint32_t num_windows, uint64_t memory_limit = 0) {
    if (dims == 0 || window == 0) throw std::invalid_argument("empty hash pool shape");
    if (max_word_length < 1) throw std::invalid_argument("need at least one concatenation");
    if (max_repetitions < 1) throw std::invalid_argument("need at least one repetition");
    if (width <= 0) throw std::invalid_argument("quantization width must be positive");

    HashPool pool;
    pool.dims = dims;
    pool.window = window;
    pool.word_length = max_word_length + (max_word_length % 2);
    pool.width = width;
    pool.seed = seed;

    uint32_t m = 1;
    while ((uint64_t)(m + 1) * (m + 1) <= max_repetitions) m++;
    if (memory_limit > 0) {
        while (m >= 1) {
            const uint64_t bytes =
                (uint64_t)num_windows * dims * m * m * pool.word_length;
            if (bytes <= memory_limit) break;
            m--;
        }
        if (m == 0)
            throw std::invalid_argument(
                "memory limit too small for a single repetition of hash words");
    }
    pool.bank_size = m;

    const uint32_t half = pool.half_length();
    pool.directions.resize((size_t)dims * 2 * m * half * window);
    pool.offsets.resize((size_t)dims * 2 * m * half);
    for (uint32_t f = 0; f < dims; f++) {
        for (uint32_t side = 0; side < 2; side++) {
            for (uint32_t slot = 0; slot < m; slot++) {
                auto rng = keyed_rng(seed, {rng_tag::pool_bank, f, side, slot});
                std::normal_distribution<double> normal;
                const size_t base = pool.bank_index(f, side, slot);
                double* dir = pool.directions.data() + base * half * window;
                for (uint32_t q = 0; q < half; q++)
                    for (uint32_t i = 0; i < window; i++) dir[(size_t)q * window + i] = normal(rng);
                std::uniform_real_distribution<double> uniform(0.0, width);
                for (uint32_t q = 0; q < half; q++)
                    pool.offsets[base * half + q] = uniform(rng);
            }
        }
    }
    return pool;
}

/// Hash words of every window for every (dimension, repetition): K
/// single-byte symbols, interleaved from the left and right half-word
/// banks selected by the repetition index.
struct HashMatrix {
    uint32_t dims = 0;
    uint32_t window = 0;
    uint32_t word_length = 0;  // K
    uint32_t bank_size = 0;    // m
    uint32_t num_windows = 0;
    double width = 1.0;
    uint64_t seed = 0;

    // words[f * L + j]: num_windows * word_length bytes.
    std::vector<std::vector<uint8_t>> words;
    // Number of direction vectors actually convolved (tensoring economy:
    // D * K * m, not D * K * L).
    uint64_t direction_vectors = 0;

    uint32_t repetitions() const { return bank_size * bank_size; }
    const uint8_t* word(uint32_t f, uint32_t j, uint32_t a) const {
        return words[(size_t)f * repetitions() + j].data() + (size_t)a * word_length;
    }
};

/// Hashes every window in every dimension. Per scalar function: sliding
/// dot products over the raw series by cyclic convolution, converted to
/// the z-normalized projection via the rolling stats (flat windows map to
/// projection 0), discretized by the pool width, shifted by the
/// per-function minimum and clamped to one byte.
inline HashMatrix compute_all_hashes(const TimeSeries& ts, const StatsTable& st,
                                     const HashPool& pool, uint32_t threads = 0) {
    const uint32_t D = pool.dims;
    const uint32_t w = pool.window;
    const uint32_t K = pool.word_length;
    const uint32_t m = pool.bank_size;
    const uint32_t L = pool.repetitions();
    const uint32_t half = pool.half_length();
    const uint32_t nw = st.num_windows();
    if (ts.dims() != D || st.window != w)
        throw std::invalid_argument("hash pool was built for a different series shape");

    HashMatrix hm;
    hm.dims = D;
    hm.window = w;
    hm.word_length = K;
    hm.bank_size = m;
    hm.num_windows = nw;
    hm.width = pool.width;
    hm.seed = pool.seed;

    std::vector<std::unique_ptr<SlidingDotProduct>> conv(D);
    for (uint32_t f = 0; f < D; f++)
        conv[f] = std::make_unique<SlidingDotProduct>(ts.column(f), w);

    const uint32_t nt = resolve_threads(threads);
    const size_t n_banks = (size_t)D * 2 * m;
    std::vector<std::vector<uint8_t>> banks(n_banks);
    std::vector<uint64_t> convolved(n_banks, 0);

#pragma omp parallel for num_threads(nt) schedule(dynamic)
    for (int64_t task = 0; task < (int64_t)n_banks; task++) {
        const uint32_t f = (uint32_t)(task / (2 * m));
        const uint32_t side = (uint32_t)((task / m) % 2);
        const uint32_t slot = (uint32_t)(task % m);
        auto& bank = banks[pool.bank_index(f, side, slot)];
        bank.resize((size_t)nw * half);
        std::vector<double> dots(nw);
        std::vector<int64_t> raw(nw);
        for (uint32_t q = 0; q < half; q++) {
            auto dir = pool.direction(f, side, slot, q);
            conv[f]->compute(dir, dots);
            convolved[task]++;
            double dir_sum = 0;
            for (double v : dir) dir_sum += v;
            const double b = pool.offset(f, side, slot, q);
            int64_t lo = std::numeric_limits<int64_t>::max();
            for (uint32_t a = 0; a < nw; a++) {
                const double proj = st.flat[f][a]
                                        ? 0.0
                                        : (dots[a] - st.means[f][a] * dir_sum) / st.stds[f][a];
                const int64_t v = (int64_t)std::floor((proj + b) / pool.width);
                raw[a] = v;
                lo = std::min(lo, v);
            }
            for (uint32_t a = 0; a < nw; a++) {
                const int64_t shifted = raw[a] - lo;
                bank[(size_t)a * half + q] = (uint8_t)std::min<int64_t>(shifted, 255);
            }
        }
    }
    for (uint64_t c : convolved) hm.direction_vectors += c;

    hm.words.resize((size_t)D * L);
#pragma omp parallel for num_threads(nt) schedule(static) collapse(2)
    for (int64_t f = 0; f < (int64_t)D; f++) {
        for (int64_t j = 0; j < (int64_t)L; j++) {
            const uint32_t l = (uint32_t)(j / m);
            const uint32_t r = (uint32_t)(j % m);
            const uint8_t* left = banks[pool.bank_index((uint32_t)f, 0, l)].data();
            const uint8_t* right = banks[pool.bank_index((uint32_t)f, 1, r)].data();
            auto& out = hm.words[(size_t)f * L + j];
            out.resize((size_t)nw * K);
            for (uint32_t a = 0; a < nw; a++) {
                uint8_t* word = out.data() + (size_t)a * K;
                const uint8_t* lhs = left + (size_t)a * half;
                const uint8_t* rhs = right + (size_t)a * half;
                for (uint32_t t = 0; t < half; t++) {
                    word[2 * t] = lhs[t];
                    word[2 * t + 1] = rhs[t];
                }
            }
        }
    }
    return hm;
}

} // namespace tsmotif
