#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsmotif/csv.hpp"
#include "tsmotif/discovery.hpp"
#include "tsmotif/oracle.hpp"
#include "tsmotif/report.hpp"
#include "tsmotif/synthetic.hpp"

namespace tsmotif {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPartial = 2;

namespace detail {

struct GenerateSpec {
    uint32_t n = 0, dims = 0, d = 0, window = 0;
    double noise = 0.1;
};

inline GenerateSpec parse_generate_spec(const std::string& spec) {
    GenerateSpec g;
    for (const auto& item : split_line(spec, ',')) {
        const size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("generate spec entry \"" + item + "\" is not key=value");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "n") g.n = (uint32_t)std::stoul(val);
        else if (key == "D") g.dims = (uint32_t)std::stoul(val);
        else if (key == "d") g.d = (uint32_t)std::stoul(val);
        else if (key == "w") g.window = (uint32_t)std::stoul(val);
        else if (key == "noise") g.noise = std::stod(val);
        else throw std::invalid_argument("unknown generate spec key \"" + key + "\"");
    }
    if (g.n == 0 || g.dims == 0 || g.d == 0 || g.window == 0)
        throw std::invalid_argument("generate spec needs n, D, d and w");
    return g;
}

inline std::pair<uint32_t, uint32_t> parse_dims_spec(const std::string& spec) {
    const size_t dots = spec.find("..");
    if (dots == std::string::npos) {
        const uint32_t d = (uint32_t)std::stoul(spec);
        return {d, d};
    }
    return {(uint32_t)std::stoul(spec.substr(0, dots)),
            (uint32_t)std::stoul(spec.substr(dots + 2))};
}

} // namespace detail

/// CLI entry point; argv-style arguments without the program name.
/// Streams one record per confirmed motif plus a final summary record as
/// JSON lines. Exit codes: 0 success, 1 input error, 2 partial result.
inline int run_cli(const std::vector<std::string>& args, std::ostream& fallback_out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"Subdimensional motif discovery in multidimensional time series"};

    std::string input_path, generate_spec, dims_spec, output_path, bound_name = "tensored";
    bool has_header = false, union_bound = false, exact = false, force = false;
    std::string delimiter = ",";
    DiscoveryParams prm;
    double noise_override = -1;

    auto* input_opt = app.add_option("--input", input_path, "CSV file of the time series");
    auto* gen_opt = app.add_option("--generate", generate_spec,
                                   "synthetic planted-motif series, e.g. n=2000,D=5,d=2,w=300");
    input_opt->excludes(gen_opt);
    gen_opt->excludes(input_opt);
    app.add_flag("--header", has_header, "first CSV row holds dimension names");
    app.add_option("--delimiter", delimiter, "CSV delimiter (default ,)");
    app.add_option("--window", prm.window, "subsequence length");
    app.add_option("--k", prm.k, "number of motifs (default 1)");
    app.add_option("--dims", dims_spec, "motif dimensionality, a single value or a range a..b");
    app.add_option("--delta", prm.delta, "failure probability (default 0.01)");
    app.add_option("--max-k", prm.max_word_length, "max hash concatenations (default 8)");
    app.add_option("--max-l", prm.max_repetitions, "max repetitions (default 200)");
    app.add_option("--r", prm.width, "quantization width (default: estimated from data)");
    app.add_option("--seed", prm.seed, "random seed (default 1)");
    app.add_option("--memory", prm.memory_limit, "hash index memory budget in bytes");
    app.add_option("--exclusion", prm.exclusion, "exclusion zone (default window/2)");
    app.add_option("--threads", prm.threads, "worker threads (default: hardware)");
    app.add_flag("--union-bound", union_bound, "guarantee all k motifs jointly (delta/k each)");
    app.add_flag("--exact", exact, "skip the index and run the exhaustive scan");
    app.add_flag("--force", force, "override the exhaustive-scan size guard");
    app.add_option("--noise", noise_override, "noise sigma for --generate (overrides spec)");
    app.add_option("--output", output_path, "write records to this file instead of stdout");
    app.add_option("--bound", bound_name, "stopping bound form: tensored | independent")
        ->check(CLI::IsMember({"tensored", "independent"}));

    std::vector<const char*> argv;
    argv.push_back("tsmotif");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse((int)argv.size(), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }

    try {
        prm.union_bound = union_bound;
        prm.bound = bound_name == "tensored" ? BoundForm::tensored : BoundForm::independent;

        TimeSeries series;
        std::string input_echo;
        if (!generate_spec.empty()) {
            auto g = detail::parse_generate_spec(generate_spec);
            if (noise_override >= 0) g.noise = noise_override;
            series = generate_planted(g.n, g.dims, g.d, g.window, g.noise, prm.seed).series;
            if (prm.window == 0) prm.window = g.window;
            if (dims_spec.empty()) dims_spec = std::to_string(g.d);
            input_echo = "generate:" + generate_spec;
        } else if (!input_path.empty()) {
            if (delimiter.size() != 1)
                throw std::invalid_argument("delimiter must be a single character");
            series = load_csv(input_path, has_header, delimiter[0]);
            input_echo = input_path;
        } else {
            throw std::invalid_argument("one of --input or --generate is required");
        }
        if (prm.window == 0) throw std::invalid_argument("--window is required");
        if (dims_spec.empty()) throw std::invalid_argument("--dims is required");
        std::tie(prm.d_low, prm.d_high) = detail::parse_dims_spec(dims_spec);

        std::ofstream file_out;
        std::ostream* out = &fallback_out;
        if (!output_path.empty()) {
            file_out.open(output_path);
            if (!file_out) throw std::invalid_argument("cannot write " + output_path);
            out = &file_out;
        }

        MotifSink sink = [&](const DimensionResult& dr) {
            for (size_t rank = 0; rank < dr.motifs.size(); rank++)
                *out << motif_record_json(dr, rank).dump() << std::endl;
        };

        DiscoveryResult result;
        if (exact) {
            const uint64_t nw = series.num_windows(prm.window);
            const uint64_t pairs = nw * (nw - 1) / 2;
            if (pairs > kOracleGuardPairs && !force)
                throw std::invalid_argument("refusing exhaustive scan over " +
                                            std::to_string(pairs) +
                                            " pairs; pass --force to override");
            result = exhaustive_scan(series, prm);
            for (const auto& dr : result.per_d) sink(dr);
        } else {
            result = discover_motifs_multi(series, prm, sink);
        }

        ParamsEcho echo{input_echo, prm};
        *out << summary_json(result, echo).dump() << std::endl;
        return result.partial ? kExitPartial : kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << std::endl;
        return kExitError;
    }
}

} // namespace tsmotif
