#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "tsmotif/distance.hpp"
#include "tsmotif/rng.hpp"
#include "tsmotif/time_series.hpp"

namespace tsmotif {

namespace detail {

struct ScoredPair {
    double dist;
    uint32_t a, b;
    friend bool operator<(const ScoredPair& x, const ScoredPair& y) {
        if (x.dist != y.dist) return x.dist < y.dist;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    }
};

/// Keeps the `cap` best-scoring pairs seen so far and remembers whether
/// anything was dropped.
class BestPairBuffer {
public:
    explicit BestPairBuffer(size_t cap) : cap_(cap) {}

    void add(ScoredPair p) {
        if (heap_.size() < cap_) {
            heap_.push_back(p);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (p < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = p;
            std::push_heap(heap_.begin(), heap_.end());
            saturated_ = true;
        } else {
            saturated_ = true;
        }
    }

    bool saturated() const { return saturated_; }
    const std::vector<ScoredPair>& entries() const { return heap_; }

private:
    size_t cap_;
    bool saturated_ = false;
    std::vector<ScoredPair> heap_;
};

/// Visits every non-trivial pair (a < b) exactly once, presenting the
/// per-dimension distance profile. Dot products roll along diagonals so
/// each pair costs O(D) instead of O(D*w). Visitors are per-thread; the
/// number of pairs visited is returned.
template <typename V>
inline uint64_t scan_all_pairs(const TimeSeries& ts, const StatsTable& st, uint32_t exclusion,
                               uint32_t nt, std::vector<V>& visitors) {
    const uint32_t nw = st.num_windows();
    const uint32_t w = st.window;
    const uint32_t D = ts.dims();
    const double max_dist = 2.0 * std::sqrt((double)w);
    uint64_t examined = 0;
    if (nw < 2 || exclusion + 1 > nw - 1) return 0;

#pragma omp parallel num_threads((int)nt) reduction(+ : examined)
    {
        V& visit = visitors[omp_get_thread_num()];
        std::vector<double> dots(D), per_dim(D);
#pragma omp for schedule(dynamic, 8)
        for (int64_t delta = (int64_t)exclusion + 1; delta <= (int64_t)nw - 1; delta++) {
            for (uint32_t f = 0; f < D; f++) {
                auto col = ts.column(f);
                const double* x = col.data();
                const double* y = col.data() + delta;
                double dot = 0;
                for (uint32_t i = 0; i < w; i++) dot += x[i] * y[i];
                dots[f] = dot;
            }
            for (uint32_t a = 0;; a++) {
                const uint32_t b = a + (uint32_t)delta;
                if (a > 0) {
                    for (uint32_t f = 0; f < D; f++) {
                        auto col = ts.column(f);
                        dots[f] += col[a + w - 1] * col[b + w - 1] - col[a - 1] * col[b - 1];
                    }
                }
                for (uint32_t f = 0; f < D; f++) {
                    const bool fa = st.flat[f][a], fb = st.flat[f][b];
                    if (fa && fb) {
                        per_dim[f] = 0.0;
                    } else if (fa || fb) {
                        per_dim[f] = max_dist;
                    } else {
                        double corr = (dots[f] - w * st.means[f][a] * st.means[f][b]) /
                                      (w * st.stds[f][a] * st.stds[f][b]);
                        corr = std::clamp(corr, -1.0, 1.0);
                        per_dim[f] = std::sqrt(2.0 * w * (1.0 - corr));
                    }
                }
                visit(a, b, std::span<const double>(per_dim));
                examined++;
                if (b == nw - 1) break;
            }
        }
    }
    return examined;
}

struct TopkScanVisitor {
    std::vector<uint32_t> ds;  // requested dimensionalities, ascending
    std::vector<BestPairBuffer> buffers;
    std::vector<double> scratch;

    TopkScanVisitor(std::vector<uint32_t> ds_, size_t cap)
        : ds(std::move(ds_)), buffers(ds.size(), BestPairBuffer(cap)), scratch(16) {}

    void operator()(uint32_t a, uint32_t b, std::span<const double> per_dim) {
        scratch.assign(per_dim.begin(), per_dim.end());
        std::sort(scratch.begin(), scratch.end());
        double sum = 0;
        size_t next = 0;
        for (uint32_t f = 0; f < scratch.size() && next < ds.size(); f++) {
            sum += scratch[f];
            while (next < ds.size() && ds[next] == f + 1) {
                buffers[next].add({sum, a, b});
                next++;
            }
        }
    }
};

struct PairScanOutcome {
    // per requested dimensionality, in input order
    std::vector<std::vector<MotifPair>> motifs;
    uint64_t pairs_examined = 0;
    bool partial = false;
};

/// Exact non-overlapping top-k for each requested dimensionality in one
/// quadratic sweep: pairs are ranked by (distance, a, b) and selected
/// greedily, skipping any pair that overlaps an already selected one.
inline PairScanOutcome exact_pair_scan(const TimeSeries& ts, const StatsTable& st,
                                       std::vector<uint32_t> ds, uint32_t k, uint32_t exclusion,
                                       uint32_t threads) {
    for (uint32_t d : ds)
        if (d < 1 || d > ts.dims())
            throw std::invalid_argument("motif dimensionality must be in [1, D]");
    const uint32_t nt = std::max(1u, threads == 0 ? (uint32_t)omp_get_max_threads() : threads);
    const uint32_t nw = st.num_windows();
    const uint64_t total_pairs = (uint64_t)nw * (nw - 1) / 2;

    PairScanOutcome out;
    out.motifs.resize(ds.size());
    size_t cap = std::max<size_t>(4096, (size_t)64 * k);
    for (int attempt = 0;; attempt++) {
        std::vector<TopkScanVisitor> visitors(nt, TopkScanVisitor(ds, cap));
        out.pairs_examined = scan_all_pairs(ts, st, exclusion, nt, visitors);

        bool need_retry = false;
        for (size_t di = 0; di < ds.size(); di++) {
            std::vector<ScoredPair> all;
            bool saturated = false;
            for (const auto& v : visitors) {
                const auto& es = v.buffers[di].entries();
                all.insert(all.end(), es.begin(), es.end());
                saturated = saturated || v.buffers[di].saturated();
            }
            std::sort(all.begin(), all.end());
            std::vector<ScoredPair> selected;
            for (const auto& sp : all) {
                bool blocked = false;
                for (const auto& s : selected)
                    if (pairs_overlap(s.a, s.b, sp.a, sp.b, exclusion)) {
                        blocked = true;
                        break;
                    }
                if (!blocked) {
                    selected.push_back(sp);
                    if (selected.size() == k) break;
                }
            }
            if (selected.size() < k && saturated && cap < total_pairs) {
                need_retry = true;
                break;
            }
            out.motifs[di].clear();
            for (const auto& sp : selected) {
                SubdimDistance sd = subdim_distance(ts, st, sp.a, sp.b, ds[di]);
                MotifPair mp;
                mp.a = sp.a;
                mp.b = sp.b;
                mp.dist = sd.dist;
                mp.max_dist = sd.max_dist;
                mp.dims = std::move(sd.dims);
                mp.per_dim = std::move(sd.per_dim);
                mp.failure_bound = 0.0;
                out.motifs[di].push_back(std::move(mp));
            }
            if (selected.size() < k) out.partial = true;
        }
        if (!need_retry) break;
        cap *= 8;
    }
    return out;
}

} // namespace detail

inline constexpr uint64_t kOracleGuardPairs = 100000000;  // 1e8

/// Exact top-k d-dimensional motifs by scanning all pairs. Refuses
/// series whose pair count exceeds the guard unless allow_large is set.
inline std::vector<MotifPair> exact_topk(const TimeSeries& ts, uint32_t window, uint32_t k,
                                         uint32_t d, int64_t exclusion = -1,
                                         bool allow_large = false, uint32_t threads = 0,
                                         bool* partial = nullptr) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    const StatsTable st = sliding_stats(ts, window);
    const uint32_t nw = st.num_windows();
    const uint64_t pairs = (uint64_t)nw * (nw - 1) / 2;
    if (pairs > kOracleGuardPairs && !allow_large)
        throw std::invalid_argument("refusing exhaustive scan over " + std::to_string(pairs) +
                                    " pairs; pass allow_large to override");
    const uint32_t excl = exclusion < 0 ? window / 2 : (uint32_t)exclusion;
    auto outcome = detail::exact_pair_scan(ts, st, {d}, k, excl, threads);
    if (partial) *partial = outcome.partial;
    return std::move(outcome.motifs[0]);
}

struct ContrastReport {
    uint32_t d = 0, k = 0;
    double kth_max_dist = 0;   // dist-d-max of the k-th motif
    double nth_max_dist = 0;   // dist-d-max of the n-th motif (or sampled estimate)
    double contrast = 0;
    bool sampled = false;      // n-th motif estimated from random pairs
    bool infinite = false;     // k-th motif distance was zero
};

/// Contrast of the series: ratio between the n-th and k-th motif's
/// dist-d-max, n being the series length. On large inputs the n-th motif
/// is estimated as the median over sampled non-trivial pairs.
inline ContrastReport contrast(const TimeSeries& ts, uint32_t window, uint32_t d, uint32_t k,
                               uint32_t sample_size = 100000, uint64_t seed = 1,
                               bool force_sampled = false, uint32_t threads = 0) {
    const StatsTable st = sliding_stats(ts, window);
    const uint32_t nw = st.num_windows();
    const uint32_t excl = window / 2;
    const uint64_t pairs = (uint64_t)nw * (nw - 1) / 2;

    ContrastReport rep;
    rep.d = d;
    rep.k = k;

    auto top = exact_topk(ts, window, k, d, -1, false, threads);
    if (top.size() < k)
        throw std::invalid_argument("series does not contain k non-overlapping motifs");
    rep.kth_max_dist = top.back().max_dist;

    const bool exact_nth = !force_sampled && pairs <= 10000000;  // 1e7
    if (exact_nth) {
        // ranked pairs without the mutual-overlap constraint
        const uint32_t nt = std::max(1u, threads == 0 ? (uint32_t)omp_get_max_threads() : threads);
        std::vector<detail::TopkScanVisitor> visitors(
            nt, detail::TopkScanVisitor({d}, ts.length()));
        detail::scan_all_pairs(ts, st, excl, nt, visitors);
        std::vector<detail::ScoredPair> all;
        for (const auto& v : visitors) {
            const auto& es = v.buffers[0].entries();
            all.insert(all.end(), es.begin(), es.end());
        }
        std::sort(all.begin(), all.end());
        if (all.empty()) throw std::invalid_argument("no non-trivial pairs");
        const size_t pos = std::min<size_t>(ts.length(), all.size()) - 1;
        SubdimDistance sd = subdim_distance(ts, st, all[pos].a, all[pos].b, d);
        rep.nth_max_dist = sd.max_dist;
    } else {
        if (sample_size < 10000)
            throw std::invalid_argument("sampled contrast needs at least 10^4 pairs");
        auto rng = keyed_rng(seed, {rng_tag::contrast_sample});
        std::uniform_int_distribution<uint32_t> pick(0, nw - 1);
        std::vector<double> maxima;
        maxima.reserve(sample_size);
        while (maxima.size() < sample_size) {
            const uint32_t a = pick(rng), b = pick(rng);
            if (is_trivial_match(a, b, excl)) continue;
            SubdimDistance sd = subdim_distance(ts, st, std::min(a, b), std::max(a, b), d);
            maxima.push_back(sd.max_dist);
        }
        auto mid = maxima.begin() + maxima.size() / 2;
        std::nth_element(maxima.begin(), mid, maxima.end());
        rep.nth_max_dist = *mid;
        rep.sampled = true;
    }

    // distances this far below the metric's range are numerically zero
    // (exact duplicates)
    if (rep.kth_max_dist <= 2.0 * std::sqrt((double)window) * 1e-7) {
        rep.infinite = true;
        rep.contrast = std::numeric_limits<double>::infinity();
    } else {
        rep.contrast = rep.nth_max_dist / rep.kth_max_dist;
    }
    return rep;
}

} // namespace tsmotif
