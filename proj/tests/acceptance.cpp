// Acceptance suite: end-to-end checks of the discovery pipeline against
// its oracle, its probabilistic guarantees, and its instrumentation.
// Prints one PASS/FAIL line per criterion and exits non-zero on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsmotif/discovery.hpp"
#include "tsmotif/hash_index.hpp"
#include "tsmotif/oracle.hpp"
#include "tsmotif/run.hpp"
#include "tsmotif/synthetic.hpp"

using namespace tsmotif;
using nlohmann::json;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] criterion %2d: %-22s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id,
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) failures++;
}

void run(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = fn();
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, name, pass, detail, secs);
}

std::vector<json> read_records(const std::string& path) {
    std::ifstream in(path);
    std::vector<json> records;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) records.push_back(json::parse(line));
    return records;
}

// ---------------------------------------------------------------- 1
std::pair<bool, std::string> oracle_exactness() {
    for (int s = 0; s < 20; s++) {
        const uint64_t seed = 100 + s;
        const double noise = s % 2 == 0 ? 0.02 : 0.06;
        std::ostringstream spec;
        spec << "n=1000,D=4,d=2,w=50,noise=" << noise;
        const std::string out = "/tmp/tsmotif_acc1.jsonl";
        int code = run_cli({"--generate", spec.str(), "--k", "3", "--dims", "2", "--seed",
                            std::to_string(seed), "--exact", "--output", out});
        if (code != 0) return {false, "exit code " + std::to_string(code)};
        auto records = read_records(out);
        auto planted = generate_planted(1000, 4, 2, 50, noise, seed);
        auto oracle = exact_topk(planted.series, 50, 3, 2);
        if (records.size() != oracle.size() + 1)
            return {false, "record count mismatch at seed " + std::to_string(seed)};
        for (size_t i = 0; i < oracle.size(); i++) {
            const json& r = records[i];
            if (r["a"].get<uint32_t>() != oracle[i].a ||
                r["b"].get<uint32_t>() != oracle[i].b ||
                r["dist_d"].get<double>() != oracle[i].dist ||
                r["dist_d_max"].get<double>() != oracle[i].max_dist ||
                r["dims"].get<std::vector<uint32_t>>() != oracle[i].dims)
                return {false, "mismatch at seed " + std::to_string(seed) + " rank " +
                                   std::to_string(i)};
        }
    }
    return {true, "20/20 datasets bit-identical"};
}

// ------------------------------------------------------------- 2, 3
struct RecallOutcome {
    double recall02 = 0, recall001 = 0, mare = 0;
};

RecallOutcome recall_experiment() {
    RecallOutcome out;
    int hits02 = 0, hits001 = 0;
    double err_sum = 0;
    const int seeds02 = 100, seeds001 = 50;
    for (int s = 0; s < seeds02; s++) {
        const uint64_t seed = 5000 + s;
        auto planted = generate_planted(2000, 5, 2, 300, 0.01, seed);
        auto oracle = exact_topk(planted.series, 300, 1, 2);
        DiscoveryParams prm;
        prm.window = 300;
        prm.d_low = prm.d_high = 2;
        prm.delta = 0.2;
        prm.seed = seed;
        auto res = discover_motifs(planted.series, prm);
        const auto& mp = res.per_d[0].motifs.at(0);
        if (mp.a == oracle[0].a && mp.b == oracle[0].b) hits02++;
        err_sum += std::abs(mp.dist - oracle[0].dist) / oracle[0].dist;
    }
    for (int s = 0; s < seeds001; s++) {
        const uint64_t seed = 7000 + s;
        auto planted = generate_planted(2000, 5, 2, 300, 0.01, seed);
        auto oracle = exact_topk(planted.series, 300, 1, 2);
        DiscoveryParams prm;
        prm.window = 300;
        prm.d_low = prm.d_high = 2;
        prm.delta = 0.01;
        prm.seed = seed;
        auto res = discover_motifs(planted.series, prm);
        const auto& mp = res.per_d[0].motifs.at(0);
        if (mp.a == oracle[0].a && mp.b == oracle[0].b) hits001++;
    }
    out.recall02 = hits02 / (double)seeds02;
    out.recall001 = hits001 / (double)seeds001;
    out.mare = err_sum / seeds02;
    return out;
}

// ---------------------------------------------------------------- 4
std::pair<bool, std::string> collision_model() {
    std::mt19937_64 rng(424242);
    std::normal_distribution<double> gap;
    for (double ratio : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double R = 1.0, r = ratio;
        std::uniform_real_distribution<double> offset(0.0, r);
        size_t hits = 0;
        const size_t samples = 1000000;
        for (size_t i = 0; i < samples; i++) {
            const double u = offset(rng);
            const double g = R * gap(rng);
            if (std::floor(u / r) == std::floor((g + u) / r)) hits++;
        }
        const double mc = hits / (double)samples;
        const double model = collision_probability(R, r);
        if (std::abs(mc - model) > 2e-3) {
            std::ostringstream os;
            os << "r/R=" << ratio << " model=" << model << " mc=" << mc;
            return {false, os.str()};
        }
    }
    return {true, "5/5 ratios within 2e-3"};
}

// ---------------------------------------------------------------- 5
std::pair<bool, std::string> subquadratic_pruning() {
    const uint32_t n = 20000, w = 300;
    const uint64_t seed = 31337;
    auto planted = generate_planted(n, 5, 2, w, 0.01, seed);
    auto st = sliding_stats(planted.series, w);

    // contrast precondition: planted dist-d-max vs sampled median
    auto prof = subdim_distance(planted.series, st, planted.a, planted.b, 2);
    std::mt19937_64 rng(1);
    const uint32_t nw = st.num_windows();
    std::uniform_int_distribution<uint32_t> pick(0, nw - 1);
    std::vector<double> maxima;
    while (maxima.size() < 10000) {
        uint32_t a = pick(rng), b = pick(rng);
        if (is_trivial_match(a, b, w / 2)) continue;
        maxima.push_back(
            subdim_distance(planted.series, st, std::min(a, b), std::max(a, b), 2).max_dist);
    }
    std::nth_element(maxima.begin(), maxima.begin() + maxima.size() / 2, maxima.end());
    const double contrast_est = maxima[maxima.size() / 2] / prof.max_dist;
    if (contrast_est < 2.0)
        return {false, "planted contrast too low: " + std::to_string(contrast_est)};

    DiscoveryParams prm;
    prm.window = w;
    prm.d_low = prm.d_high = 2;
    prm.seed = seed;
    auto res = discover_motifs(planted.series, prm);
    if (res.fallback_used) return {false, "fallback defeats pruning"};
    const uint64_t budget = (uint64_t)nw * (nw - 1) / 2 / 100;
    std::ostringstream os;
    os << res.counters.distance_computations << " of " << budget << " allowed (contrast "
       << (int)contrast_est << ")";
    const auto& mp = res.per_d[0].motifs.at(0);
    const bool correct = mp.a == planted.a && mp.b == planted.b;
    return {res.counters.distance_computations <= budget && correct, os.str()};
}

// ---------------------------------------------------------------- 6
std::pair<bool, std::string> noise_robustness() {
    int hits = 0;
    const int seeds = 12;
    for (int s = 0; s < seeds; s++) {
        const uint64_t seed = 9000 + s;
        // 4 informative dimensions plus 16 random-walk noise dimensions
        auto planted = generate_planted(2000, 20, 2, 100, 0.01, seed);
        DiscoveryParams prm;
        prm.window = 100;
        prm.d_low = prm.d_high = 2;
        prm.delta = 0.01;
        prm.seed = seed;
        auto res = discover_motifs(planted.series, prm);
        const auto& mp = res.per_d[0].motifs.at(0);
        if (mp.a == planted.a && mp.b == planted.b) hits++;
    }
    return {hits >= 11, std::to_string(hits) + "/12 recovered"};
}

// ---------------------------------------------------------------- 7
std::pair<bool, std::string> tensoring_economy() {
    auto planted = generate_planted(400, 3, 2, 40, 0.05, 3);
    auto st = sliding_stats(planted.series, 40);
    const uint32_t D = 3;
    for (auto [kmax, lmax] : std::vector<std::pair<uint32_t, uint32_t>>{
             {8, 200}, {4, 9}, {6, 30}, {10, 100}, {2, 1}, {7, 50}}) {
        auto pool = build_hash_pool(D, 40, kmax, lmax, 0.7, 11, st.num_windows());
        auto hm = compute_all_hashes(planted.series, st, pool);
        const uint64_t expect = (uint64_t)D * pool.word_length * pool.bank_size;
        if (hm.direction_vectors != expect)
            return {false, "K_max=" + std::to_string(kmax) + " L_max=" + std::to_string(lmax) +
                               ": " + std::to_string(hm.direction_vectors) + " != " +
                               std::to_string(expect)};
    }
    return {true, "D*K*m vectors in 6/6 configurations"};
}

// ---------------------------------------------------------------- 8
std::pair<bool, std::string> index_refinement() {
    std::mt19937_64 rng(8080);
    for (int cs = 0; cs < 1000; cs++) {
        HashMatrix hm;
        hm.dims = 1;
        hm.window = 4;
        hm.word_length = 2 + (uint32_t)(rng() % 7);
        hm.bank_size = 1;
        hm.num_windows = 2 + (uint32_t)(rng() % 59);
        hm.words.resize(1);
        const int alphabet = 1 + (int)(rng() % 4);
        hm.words[0].resize((size_t)hm.num_windows * hm.word_length);
        for (auto& b : hm.words[0]) b = (uint8_t)(rng() % alphabet);
        HashIndex idx(std::move(hm), 1);
        const uint32_t K = idx.matrix().word_length;
        std::vector<std::pair<uint32_t, uint32_t>> finer;
        for (uint32_t prefix = K; prefix >= 1; prefix--) {
            auto groups = idx.collision_groups(0, 0, prefix);
            uint32_t cursor = 0;
            for (auto [gb, ge] : groups) {
                if (gb != cursor || ge <= gb) return {false, "not a partition"};
                cursor = ge;
            }
            if (cursor != idx.matrix().num_windows) return {false, "partition incomplete"};
            if (prefix < K) {
                // every group at this level must be a union of adjacent
                // finer groups: all finer boundaries within it must align
                size_t fi = 0;
                for (auto [gb, ge] : groups) {
                    if (fi >= finer.size() || finer[fi].first != gb)
                        return {false, "refinement broken (start)"};
                    uint32_t end = gb;
                    while (fi < finer.size() && finer[fi].first == end) {
                        end = finer[fi].second;
                        fi++;
                        if (end == ge) break;
                    }
                    if (end != ge) return {false, "refinement broken (end)"};
                }
            }
            finer = std::move(groups);
        }
    }
    return {true, "1000/1000 random indexes refine"};
}

// ---------------------------------------------------------------- 9
std::pair<bool, std::string> multi_d_consistency() {
    for (int s = 0; s < 10; s++) {
        const uint64_t seed = 11000 + s;
        auto planted = generate_planted(1500, 4, 2, 120, 0.01, seed);
        DiscoveryParams prm;
        prm.window = 120;
        prm.delta = 0.01;
        prm.seed = seed;
        prm.d_low = 2;
        prm.d_high = 4;
        auto multi = discover_motifs_multi(planted.series, prm);
        for (uint32_t d = 2; d <= 4; d++) {
            DiscoveryParams single = prm;
            single.d_low = single.d_high = d;
            auto res = discover_motifs(planted.series, single);
            const auto& a = multi.for_d(d).motifs.at(0);
            const auto& b = res.per_d[0].motifs.at(0);
            if (a.a != b.a || a.b != b.b)
                return {false, "seed " + std::to_string(seed) + " d=" + std::to_string(d) +
                                   ": (" + std::to_string(a.a) + "," + std::to_string(a.b) +
                                   ") vs (" + std::to_string(b.a) + "," + std::to_string(b.b) +
                                   ")"};
        }
    }
    return {true, "10/10 datasets agree for every d"};
}

// --------------------------------------------------------------- 10
std::pair<bool, std::string> determinism() {
    auto planted = generate_planted(1500, 4, 2, 120, 0.01, 777);
    std::vector<DiscoveryResult> results;
    for (uint32_t threads : {1u, 2u, 8u}) {
        DiscoveryParams prm;
        prm.window = 120;
        prm.k = 2;
        prm.d_low = 2;
        prm.d_high = 3;
        prm.seed = 777;
        prm.threads = threads;
        results.push_back(discover_motifs_multi(planted.series, prm));
    }
    for (size_t i = 1; i < results.size(); i++) {
        const auto& a = results[0];
        const auto& b = results[i];
        if (a.width != b.width) return {false, "width differs"};
        const auto& ca = a.counters;
        const auto& cb = b.counters;
        if (ca.distance_computations != cb.distance_computations ||
            ca.word_comparisons != cb.word_comparisons ||
            ca.candidate_pairs != cb.candidate_pairs ||
            ca.trivial_skips != cb.trivial_skips ||
            ca.duplicate_skips != cb.duplicate_skips ||
            ca.direction_vectors != cb.direction_vectors)
            return {false, "counters differ at threads run " + std::to_string(i)};
        for (size_t di = 0; di < a.per_d.size(); di++) {
            const auto& ma = a.per_d[di].motifs;
            const auto& mb = b.per_d[di].motifs;
            if (ma.size() != mb.size()) return {false, "motif count differs"};
            for (size_t r = 0; r < ma.size(); r++)
                if (ma[r].a != mb[r].a || ma[r].b != mb[r].b || ma[r].dist != mb[r].dist)
                    return {false, "motif indices differ"};
            if (a.per_d[di].stop_prefix != b.per_d[di].stop_prefix ||
                a.per_d[di].stop_rep != b.per_d[di].stop_rep)
                return {false, "stop coordinates differ"};
        }
    }
    return {true, "1, 2 and 8 threads byte-agree"};
}

} // namespace

int main() {
    std::printf("acceptance suite\n");

    run(1, "oracle exactness", oracle_exactness);

    RecallOutcome rec;
    run(2, "recall guarantee", [&rec]() -> std::pair<bool, std::string> {
        rec = recall_experiment();
        std::ostringstream os;
        os << "recall(delta=0.2)=" << rec.recall02 << " (need >= 0.68), recall(delta=0.01)="
           << rec.recall001 << " (need >= 0.94)";
        return {rec.recall02 >= 0.68 && rec.recall001 >= 0.94, os.str()};
    });
    run(3, "distance quality", [&rec]() -> std::pair<bool, std::string> {
        std::ostringstream os;
        os << "MARE=" << rec.mare * 100 << "% (limit 3%)";
        return {rec.mare <= 0.03, os.str()};
    });

    run(4, "collision model", collision_model);
    run(5, "subquadratic pruning", subquadratic_pruning);
    run(6, "noise robustness", noise_robustness);
    run(7, "tensoring economy", tensoring_economy);
    run(8, "index refinement", index_refinement);
    run(9, "multi-d consistency", multi_d_consistency);
    run(10, "determinism", determinism);

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
