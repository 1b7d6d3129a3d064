#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "tsmotif/lsh.hpp"

namespace tsmotif {

/// Prefix-searchable hash storage: for every (dimension, repetition) the
/// window indices sorted lexicographically by hash word, ties by index.
/// Windows sharing a word prefix of any length occupy a contiguous range.
/// Immutable after construction; concurrent scans are safe.
class HashIndex {
public:
    static constexpr char kMagic[8] = {'T', 'S', 'M', 'I', 'D', 'X', '0', '1'};

    HashIndex() = default;

    explicit HashIndex(HashMatrix matrix, uint32_t threads = 0) : matrix_(std::move(matrix)) {
        build(threads);
    }

    const HashMatrix& matrix() const { return matrix_; }

    std::span<const uint32_t> order(uint32_t f, uint32_t j) const {
        return orders_[(size_t)f * matrix_.repetitions() + j];
    }

    /// Calls fn(begin, end) for every maximal run of entries in
    /// order(f, j) whose words agree on the first `prefix` symbols.
    /// Runs of size one are included; the runs partition the order.
    template <typename Fn>
    void for_each_group(uint32_t f, uint32_t j, uint32_t prefix, Fn&& fn) const {
        check_prefix(prefix);
        auto ord = order(f, j);
        if (ord.empty()) return;
        uint32_t start = 0;
        for (uint32_t p = 1; p <= ord.size(); p++) {
            if (p == ord.size() ||
                std::memcmp(matrix_.word(f, j, ord[p]), matrix_.word(f, j, ord[p - 1]),
                            prefix) != 0) {
                fn(start, p);
                start = p;
            }
        }
    }

    std::vector<std::pair<uint32_t, uint32_t>> collision_groups(uint32_t f, uint32_t j,
                                                                uint32_t prefix) const {
        std::vector<std::pair<uint32_t, uint32_t>> groups;
        for_each_group(f, j, prefix, [&](uint32_t b, uint32_t e) { groups.emplace_back(b, e); });
        return groups;
    }

    void save(std::ostream& out) const {
        out.write(kMagic, sizeof(kMagic));
        write_pod(out, (uint32_t)1);  // version
        write_pod(out, matrix_.dims);
        write_pod(out, matrix_.window);
        write_pod(out, matrix_.word_length);
        write_pod(out, matrix_.bank_size);
        write_pod(out, matrix_.num_windows);
        write_pod(out, matrix_.width);
        write_pod(out, matrix_.seed);
        write_pod(out, matrix_.direction_vectors);
        for (const auto& w : matrix_.words)
            out.write((const char*)w.data(), (std::streamsize)w.size());
        for (const auto& o : orders_)
            out.write((const char*)o.data(), (std::streamsize)(o.size() * sizeof(uint32_t)));
        if (!out) throw std::runtime_error("failed to write index");
    }

    static HashIndex load(std::istream& in) {
        char magic[8];
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
            throw std::runtime_error("not a hash index file (bad magic)");
        uint32_t version = read_pod<uint32_t>(in);
        if (version != 1)
            throw std::runtime_error("unsupported hash index version " + std::to_string(version));
        HashIndex idx;
        auto& hm = idx.matrix_;
        hm.dims = read_pod<uint32_t>(in);
        hm.window = read_pod<uint32_t>(in);
        hm.word_length = read_pod<uint32_t>(in);
        hm.bank_size = read_pod<uint32_t>(in);
        hm.num_windows = read_pod<uint32_t>(in);
        hm.width = read_pod<double>(in);
        hm.seed = read_pod<uint64_t>(in);
        hm.direction_vectors = read_pod<uint64_t>(in);
        const size_t tables = (size_t)hm.dims * hm.repetitions();
        hm.words.resize(tables);
        for (auto& w : hm.words) {
            w.resize((size_t)hm.num_windows * hm.word_length);
            in.read((char*)w.data(), (std::streamsize)w.size());
        }
        idx.orders_.resize(tables);
        for (auto& o : idx.orders_) {
            o.resize(hm.num_windows);
            in.read((char*)o.data(), (std::streamsize)(o.size() * sizeof(uint32_t)));
        }
        if (!in) throw std::runtime_error("truncated hash index file");
        return idx;
    }

private:
    void build(uint32_t threads) {
        const uint32_t L = matrix_.repetitions();
        const size_t tables = (size_t)matrix_.dims * L;
        const uint32_t nw = matrix_.num_windows;
        const uint32_t K = matrix_.word_length;
        orders_.resize(tables);
        const uint32_t nt = resolve_threads(threads);
#pragma omp parallel for num_threads(nt) schedule(dynamic)
        for (int64_t t = 0; t < (int64_t)tables; t++) {
            auto& ord = orders_[t];
            ord.resize(nw);
            std::iota(ord.begin(), ord.end(), 0u);
            const uint8_t* base = matrix_.words[t].data();
            std::sort(ord.begin(), ord.end(), [&](uint32_t x, uint32_t y) {
                const int c = std::memcmp(base + (size_t)x * K, base + (size_t)y * K, K);
                if (c != 0) return c < 0;
                return x < y;
            });
        }
    }

    void check_prefix(uint32_t prefix) const {
        if (prefix < 1 || prefix > matrix_.word_length)
            throw std::invalid_argument("prefix length must be in [1, K]");
    }

    template <typename T>
    static void write_pod(std::ostream& out, T v) {
        out.write((const char*)&v, sizeof(T));
    }
    template <typename T>
    static T read_pod(std::istream& in) {
        T v{};
        in.read((char*)&v, sizeof(T));
        return v;
    }

    HashMatrix matrix_;
    std::vector<std::vector<uint32_t>> orders_;
};

} // namespace tsmotif
