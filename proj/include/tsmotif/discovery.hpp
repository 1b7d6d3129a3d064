#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "tsmotif/distance.hpp"
#include "tsmotif/hash_index.hpp"
#include "tsmotif/lsh.hpp"
#include "tsmotif/oracle.hpp"
#include "tsmotif/time_series.hpp"
#include "tsmotif/top_queue.hpp"

namespace tsmotif {

enum class BoundForm { tensored, independent };

/// Upper bound on the probability that a pair whose selected dimensions
/// are all within dist_d_max was never examined, after `reps_done`
/// repetitions at the given prefix length (preceded, for shorter
/// prefixes, by a full pass at prefix+1). The tensored form accounts for
/// words assembled from left/right half-word banks of size `bank_size`.
inline double failure_bound(double dist_d_max, uint32_t d, uint32_t prefix, uint32_t reps_done,
                            uint32_t word_length, uint32_t repetitions, uint32_t bank_size,
                            double width, BoundForm form = BoundForm::tensored) {
    if (prefix < 1 || prefix > word_length)
        throw std::invalid_argument("prefix length out of range");
    if (reps_done < 1 || reps_done > repetitions)
        throw std::invalid_argument("repetition count out of range");
    const double p = std::pow(collision_probability(dist_d_max, width), (double)d);
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    if (form == BoundForm::independent) {
        double bound = std::pow(1.0 - std::pow(p, (double)prefix), (double)reps_done);
        if (prefix < word_length)
            bound *= std::pow(1.0 - std::pow(p, (double)(prefix + 1)),
                              (double)(repetitions - reps_done));
        return clamp01(bound);
    }
    // Tensored: a prefix of length i spans ceil(i/2) left and floor(i/2)
    // right symbols; full rows of the bank grid count against the longer
    // half, the partial row against the shorter one. A zero-length right
    // half always collides and the partial row shares a single left
    // function, so it contributes one more longer-half factor at most.
    auto half_term = [&](uint32_t plen, uint32_t count) {
        const uint32_t hi = (plen + 1) / 2, lo = plen / 2;
        const uint32_t rows = count / bank_size, rest = count % bank_size;
        double term = std::pow(1.0 - std::pow(p, (double)hi), (double)rows);
        if (rest > 0) {
            if (lo == 0)
                term *= 1.0 - std::pow(p, (double)hi);
            else
                term *= std::pow(1.0 - std::pow(p, (double)lo), (double)rest);
        }
        return term;
    };
    double bound = half_term(prefix, reps_done);
    if (prefix < word_length) bound *= half_term(prefix + 1, repetitions - reps_done);
    return clamp01(bound);
}

/// Number of dimensions in which the words of a and b agree on the first
/// `prefix` symbols in repetition `rep`.
inline uint32_t pair_weight(const HashMatrix& hm, uint32_t a, uint32_t b, uint32_t prefix,
                            uint32_t rep) {
    uint32_t weight = 0;
    for (uint32_t f = 0; f < hm.dims; f++)
        if (std::memcmp(hm.word(f, rep, a), hm.word(f, rep, b), prefix) == 0) weight++;
    return weight;
}

struct Counters {
    uint64_t distance_computations = 0;  // full distance profiles evaluated
    uint64_t word_comparisons = 0;       // prefix comparisons while weighting pairs
    uint64_t candidate_pairs = 0;        // distinct non-trivial pairs examined per repetition
    uint64_t trivial_skips = 0;
    uint64_t duplicate_skips = 0;        // pairs already handled at the longer prefix
    uint64_t direction_vectors = 0;      // hash evaluation economy (D*K*m)
};

struct DiscoveryParams {
    uint32_t window = 0;
    uint32_t k = 1;
    uint32_t d_low = 1, d_high = 1;
    double delta = 0.01;
    uint32_t max_word_length = 8;    // concatenations cap
    uint32_t max_repetitions = 200;  // repetitions cap
    double width = 0;                // quantization width; 0 = estimate from data
    int64_t exclusion = -1;          // -1 = floor(window / 2)
    uint64_t seed = 1;
    uint64_t memory_limit = 0;       // bytes for hash words; 0 = unlimited
    bool union_bound = false;        // apply delta / k per motif
    BoundForm bound = BoundForm::tensored;
    uint32_t threads = 0;            // 0 = hardware
    bool skip_duplicates = true;
    uint32_t width_vectors = 8;
    uint32_t width_samples = 2000;
};

struct DimensionResult {
    uint32_t d = 0;
    std::vector<MotifPair> motifs;
    bool confirmed = false;  // stopping condition met (false for fallback/exact paths)
    bool fallback = false;
    uint32_t stop_prefix = 0, stop_rep = 0;        // coordinates at confirmation
    uint32_t first_full_prefix = 0, first_full_rep = 0;  // queue first held k pairs
    double wall_ms = 0;  // since traversal start; not deterministic
};

struct DiscoveryResult {
    std::vector<DimensionResult> per_d;  // ascending dimensionality
    Counters counters;
    double width = 0;
    bool width_degenerate = false;
    uint32_t word_length = 0, bank_size = 0;
    bool fallback_used = false;
    bool partial = false;  // some dimensionality holds fewer than k pairs
    double index_build_ms = 0;
    uint64_t seed = 0;

    const DimensionResult& for_d(uint32_t d) const {
        for (const auto& r : per_d)
            if (r.d == d) return r;
        throw std::invalid_argument("no result for dimensionality " + std::to_string(d));
    }
};

using MotifSink = std::function<void(const DimensionResult&)>;
/// Test/diagnostic hook invoked after every repetition with the current
/// (prefix, repetition) and, per dimensionality, the queue's worst
/// distance (or +inf while the queue is not yet full).
using RepetitionProbe = std::function<void(uint32_t prefix, uint32_t rep,
                                           const std::vector<std::pair<uint32_t, double>>&)>;

namespace detail {

inline void validate_params(const DiscoveryParams& prm, const TimeSeries& ts) {
    if (prm.window == 0 || prm.window > ts.length())
        throw std::invalid_argument("window length invalid for this series");
    if (prm.k == 0) throw std::invalid_argument("k must be positive");
    if (prm.d_low < 1 || prm.d_low > prm.d_high || prm.d_high > ts.dims())
        throw std::invalid_argument("dimensionality range must satisfy 1 <= d_low <= d_high <= D");
    if (!(prm.delta > 0.0 && prm.delta < 1.0))
        throw std::invalid_argument("delta must lie in (0, 1)");
    if (prm.max_word_length < 1) throw std::invalid_argument("need at least one concatenation");
    if (prm.max_repetitions < 1) throw std::invalid_argument("need at least one repetition");
}

class DiscoveryEngine {
public:
    DiscoveryEngine(const TimeSeries& ts, const DiscoveryParams& prm, MotifSink sink,
                    RepetitionProbe probe)
        : ts_(ts), prm_(prm), sink_(std::move(sink)), probe_(std::move(probe)) {}

    DiscoveryResult run() {
        validate_params(prm_, ts_);
        const auto t0 = std::chrono::steady_clock::now();
        st_ = sliding_stats(ts_, prm_.window);
        nw_ = st_.num_windows();
        excl_ = prm_.exclusion < 0 ? prm_.window / 2 : (uint32_t)prm_.exclusion;
        nt_ = resolve_threads(prm_.threads);

        double width = prm_.width;
        if (width <= 0) {
            WidthEstimate est = estimate_quantization_width(ts_, st_, prm_.width_vectors,
                                                            prm_.width_samples, prm_.seed);
            width = est.value;
            result_.width_degenerate = est.degenerate;
        }
        result_.width = width;
        result_.seed = prm_.seed;

        HashPool pool = build_hash_pool(ts_.dims(), prm_.window, prm_.max_word_length,
                                        prm_.max_repetitions, width, prm_.seed, nw_,
                                        prm_.memory_limit);
        index_ = HashIndex(compute_all_hashes(ts_, st_, pool, prm_.threads), prm_.threads);
        result_.counters.direction_vectors = index_.matrix().direction_vectors;
        K_ = pool.word_length;
        m_ = pool.bank_size;
        L_ = pool.repetitions();
        result_.word_length = K_;
        result_.bank_size = m_;
        result_.index_build_ms = ms_since(t0);

        delta_eff_ = prm_.union_bound ? prm_.delta / (double)prm_.k : prm_.delta;
        for (uint32_t d = prm_.d_low; d <= prm_.d_high; d++) {
            states_.push_back(State{d, MotifQueue(prm_.k, excl_), false, DimensionResult{}});
            states_.back().result.d = d;
        }
        threshold_ = prm_.d_low;

        const auto t_run = std::chrono::steady_clock::now();
        bool done = false;
        for (uint32_t prefix = K_; prefix >= 1 && !done; prefix--) {
            for (uint32_t rep = 0; rep < L_ && !done; rep++) {
                process_repetition(prefix, rep);
                done = check_stops(prefix, rep + 1, t_run);
                if (probe_) {
                    std::vector<std::pair<uint32_t, double>> snap;
                    for (const auto& s : states_)
                        snap.emplace_back(s.d, s.queue.full()
                                                   ? s.queue.worst().dist
                                                   : std::numeric_limits<double>::infinity());
                    probe_(prefix, rep + 1, snap);
                }
            }
        }
        if (!done) run_fallback(t_run);

        for (auto& s : states_) {
            if (s.result.motifs.size() < prm_.k) result_.partial = true;
            result_.per_d.push_back(std::move(s.result));
        }
        return std::move(result_);
    }

private:
    struct State {
        uint32_t d;
        MotifQueue queue;
        bool confirmed;
        DimensionResult result;
        bool first_full_set = false;
    };

    static double ms_since(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }

    void process_repetition(uint32_t prefix, uint32_t rep) {
        const uint32_t D = ts_.dims();
        const HashMatrix& hm = index_.matrix();
        std::vector<std::vector<std::pair<uint32_t, uint32_t>>> found(D);
        std::vector<Counters> local(D);

#pragma omp parallel for num_threads((int)nt_) schedule(dynamic)
        for (int64_t f = 0; f < (int64_t)D; f++) {
            auto& out = found[f];
            auto& cnt = local[f];
            auto ord = index_.order((uint32_t)f, rep);
            index_.for_each_group((uint32_t)f, rep, prefix, [&](uint32_t gb, uint32_t ge) {
                if (ge - gb < 2) return;
                for (uint32_t p = gb; p < ge; p++) {
                    for (uint32_t q = p + 1; q < ge; q++) {
                        const uint32_t a = std::min(ord[p], ord[q]);
                        const uint32_t b = std::max(ord[p], ord[q]);
                        if (is_trivial_match(a, b, excl_)) {
                            cnt.trivial_skips++;
                            continue;
                        }
                        uint32_t weight = 0, weight_next = 0;
                        uint32_t lowest = std::numeric_limits<uint32_t>::max();
                        for (uint32_t fd = 0; fd < D; fd++) {
                            const uint8_t* wa = hm.word(fd, rep, a);
                            const uint8_t* wb = hm.word(fd, rep, b);
                            cnt.word_comparisons++;
                            if (std::memcmp(wa, wb, prefix) == 0) {
                                weight++;
                                if (lowest == std::numeric_limits<uint32_t>::max()) lowest = fd;
                                if (prefix < K_ && wa[prefix] == wb[prefix]) weight_next++;
                            }
                        }
                        // each pair is owned by its lowest colliding dimension
                        if (lowest != (uint32_t)f) continue;
                        cnt.candidate_pairs++;
                        if (weight < threshold_) continue;
                        if (prm_.skip_duplicates && prefix < K_ && weight_next >= threshold_) {
                            cnt.duplicate_skips++;
                            continue;
                        }
                        out.emplace_back(a, b);
                    }
                }
            });
        }

        std::vector<std::pair<uint32_t, uint32_t>> buffer;
        for (uint32_t f = 0; f < D; f++) {
            buffer.insert(buffer.end(), found[f].begin(), found[f].end());
            result_.counters.word_comparisons += local[f].word_comparisons;
            result_.counters.candidate_pairs += local[f].candidate_pairs;
            result_.counters.trivial_skips += local[f].trivial_skips;
            result_.counters.duplicate_skips += local[f].duplicate_skips;
        }
        std::sort(buffer.begin(), buffer.end());
        buffer.erase(std::unique(buffer.begin(), buffer.end()), buffer.end());
        if (buffer.empty()) return;

        result_.counters.distance_computations += buffer.size();
        std::vector<double> profiles((size_t)buffer.size() * D);
#pragma omp parallel for num_threads((int)nt_) schedule(static)
        for (int64_t idx = 0; idx < (int64_t)buffer.size(); idx++) {
            distance_profile(ts_, st_, buffer[idx].first, buffer[idx].second,
                             std::span<double>(profiles.data() + idx * D, D));
        }

        // queue updates are serial and ordered: independent of thread count
        for (size_t idx = 0; idx < buffer.size(); idx++) {
            std::span<const double> profile(profiles.data() + idx * D, D);
            for (auto& s : states_) {
                if (s.confirmed) continue;
                DimSelection sel = select_dims(profile, s.d);
                MotifPair mp;
                mp.a = buffer[idx].first;
                mp.b = buffer[idx].second;
                mp.dist = sel.dist;
                mp.max_dist = sel.max_dist;
                mp.dims = std::move(sel.dims);
                mp.per_dim.assign(profile.begin(), profile.end());
                s.queue.offer(mp);
            }
        }
    }

    bool check_stops(uint32_t prefix, uint32_t reps_done,
                     std::chrono::steady_clock::time_point t_run) {
        for (auto& s : states_) {
            if (s.confirmed || !s.queue.full()) continue;
            if (!s.first_full_set) {
                s.first_full_set = true;
                s.result.first_full_prefix = prefix;
                s.result.first_full_rep = reps_done;
            }
            const double bound = failure_bound(s.queue.worst().max_dist, s.d, prefix, reps_done,
                                               K_, L_, m_, result_.width, prm_.bound);
            if (bound <= delta_eff_) {
                s.confirmed = true;
                s.result.confirmed = true;
                s.result.stop_prefix = prefix;
                s.result.stop_rep = reps_done;
                s.result.wall_ms = ms_since(t_run);
                s.result.motifs = s.queue.entries();
                for (auto& mp : s.result.motifs)
                    mp.failure_bound = failure_bound(mp.max_dist, s.d, prefix, reps_done, K_, L_,
                                                     m_, result_.width, prm_.bound);
                if (sink_) sink_(s.result);
            }
        }
        uint32_t next_threshold = 0;
        bool all_confirmed = true;
        for (const auto& s : states_) {
            if (!s.confirmed) {
                all_confirmed = false;
                next_threshold = next_threshold == 0 ? s.d : std::min(next_threshold, s.d);
            }
        }
        if (!all_confirmed) threshold_ = next_threshold;
        return all_confirmed;
    }

    void run_fallback(std::chrono::steady_clock::time_point t_run) {
        result_.fallback_used = true;
        std::vector<uint32_t> ds;
        for (const auto& s : states_)
            if (!s.confirmed) ds.push_back(s.d);
        auto outcome = detail::exact_pair_scan(ts_, st_, ds, prm_.k, excl_, prm_.threads);
        result_.counters.distance_computations += outcome.pairs_examined;
        result_.counters.candidate_pairs += outcome.pairs_examined;
        size_t di = 0;
        for (auto& s : states_) {
            if (s.confirmed) continue;
            s.result.motifs = std::move(outcome.motifs[di++]);
            s.result.fallback = true;
            s.result.stop_prefix = 0;
            s.result.stop_rep = 0;
            s.result.wall_ms = ms_since(t_run);
            if (sink_) sink_(s.result);
        }
    }

    const TimeSeries& ts_;
    DiscoveryParams prm_;
    MotifSink sink_;
    RepetitionProbe probe_;

    StatsTable st_;
    HashIndex index_;
    DiscoveryResult result_;
    std::vector<State> states_;
    uint32_t nw_ = 0, excl_ = 0, nt_ = 1;
    uint32_t K_ = 0, m_ = 0, L_ = 0;
    uint32_t threshold_ = 1;
    double delta_eff_ = 0;
};

} // namespace detail

/// Adaptive LSH traversal over a range of motif dimensionalities: one
/// top-k queue per dimensionality, each emitted as soon as its own
/// stopping condition certifies the failure probability. Falls back to
/// the exhaustive scan when the hash words are exhausted.
inline DiscoveryResult discover_motifs_multi(const TimeSeries& ts, const DiscoveryParams& params,
                                             MotifSink sink = nullptr,
                                             RepetitionProbe probe = nullptr) {
    detail::DiscoveryEngine engine(ts, params, std::move(sink), std::move(probe));
    return engine.run();
}

/// Single-dimensionality discovery (d_low == d_high).
inline DiscoveryResult discover_motifs(const TimeSeries& ts, const DiscoveryParams& params,
                                       MotifSink sink = nullptr, RepetitionProbe probe = nullptr) {
    if (params.d_low != params.d_high)
        throw std::invalid_argument("discover_motifs expects a single dimensionality");
    return discover_motifs_multi(ts, params, std::move(sink), std::move(probe));
}

/// Exact top-k for every requested dimensionality by scanning all
/// non-trivial pairs; failure bounds are zero.
inline DiscoveryResult exhaustive_scan(const TimeSeries& ts, const DiscoveryParams& params) {
    detail::validate_params(params, ts);
    const StatsTable st = sliding_stats(ts, params.window);
    const uint32_t excl = params.exclusion < 0 ? params.window / 2 : (uint32_t)params.exclusion;
    std::vector<uint32_t> ds;
    for (uint32_t d = params.d_low; d <= params.d_high; d++) ds.push_back(d);
    auto outcome = detail::exact_pair_scan(ts, st, ds, params.k, excl, params.threads);

    DiscoveryResult res;
    res.seed = params.seed;
    res.counters.distance_computations = outcome.pairs_examined;
    res.counters.candidate_pairs = outcome.pairs_examined;
    res.fallback_used = true;
    res.partial = outcome.partial;
    for (size_t di = 0; di < ds.size(); di++) {
        DimensionResult dr;
        dr.d = ds[di];
        dr.motifs = std::move(outcome.motifs[di]);
        dr.fallback = true;
        res.per_d.push_back(std::move(dr));
    }
    return res;
}

} // namespace tsmotif
