#pragma once

#include <string>

#include <json.hpp>

#include "tsmotif/discovery.hpp"

namespace tsmotif {

/// Echo of the resolved run configuration, carried in every summary
/// record so that a run can be reproduced from its output alone.
struct ParamsEcho {
    std::string input;  // file path or generate spec
    DiscoveryParams params;
};

inline nlohmann::json params_json(const ParamsEcho& echo) {
    const DiscoveryParams& p = echo.params;
    return {
        {"input", echo.input},
        {"window", p.window},
        {"k", p.k},
        {"d_low", p.d_low},
        {"d_high", p.d_high},
        {"delta", p.delta},
        {"max_concatenations", p.max_word_length},
        {"max_repetitions", p.max_repetitions},
        {"r_requested", p.width},
        {"exclusion", p.exclusion},
        {"seed", p.seed},
        {"memory_limit", p.memory_limit},
        {"union_bound", p.union_bound},
        {"bound", p.bound == BoundForm::tensored ? "tensored" : "independent"},
        {"threads", p.threads},
    };
}

inline nlohmann::json motif_json(const MotifPair& mp) {
    return {
        {"a", mp.a},
        {"b", mp.b},
        {"dims", mp.dims},
        {"dist_d", mp.dist},
        {"dist_d_max", mp.max_dist},
        {"per_dim", mp.per_dim},
        {"failure_bound", mp.failure_bound},
    };
}

/// One line-delimited record per confirmed motif pair.
inline nlohmann::json motif_record_json(const DimensionResult& dr, size_t rank) {
    nlohmann::json rec = motif_json(dr.motifs[rank]);
    rec["type"] = "motif";
    rec["d"] = dr.d;
    rec["rank"] = rank;
    rec["confirmed"] = dr.confirmed;
    rec["fallback"] = dr.fallback;
    rec["stop_prefix"] = dr.stop_prefix;
    rec["stop_rep"] = dr.stop_rep;
    rec["wall_ms"] = dr.wall_ms;
    return rec;
}

inline nlohmann::json counters_json(const Counters& c) {
    return {
        {"distance_computations", c.distance_computations},
        {"word_comparisons", c.word_comparisons},
        {"candidate_pairs", c.candidate_pairs},
        {"trivial_skips", c.trivial_skips},
        {"duplicate_skips", c.duplicate_skips},
        {"direction_vectors", c.direction_vectors},
    };
}

inline nlohmann::json summary_json(const DiscoveryResult& res, const ParamsEcho& echo) {
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& dr : res.per_d) {
        nlohmann::json motifs = nlohmann::json::array();
        for (const auto& mp : dr.motifs) motifs.push_back(motif_json(mp));
        dims.push_back({
            {"d", dr.d},
            {"confirmed", dr.confirmed},
            {"fallback", dr.fallback},
            {"stop_prefix", dr.stop_prefix},
            {"stop_rep", dr.stop_rep},
            {"wall_ms", dr.wall_ms},
            {"motifs", std::move(motifs)},
        });
    }
    return {
        {"type", "summary"},
        {"params", params_json(echo)},
        {"K", res.word_length},
        {"L", res.word_length == 0 ? 0 : res.bank_size * res.bank_size},
        {"m", res.bank_size},
        {"r", res.width},
        {"r_degenerate", res.width_degenerate},
        {"delta", echo.params.delta},
        {"seed", res.seed},
        {"index_build_ms", res.index_build_ms},
        {"counters", counters_json(res.counters)},
        {"results", std::move(dims)},
        {"flags",
         {{"fallback_used", res.fallback_used}, {"partial_result", res.partial}}},
    };
}

} // namespace tsmotif
