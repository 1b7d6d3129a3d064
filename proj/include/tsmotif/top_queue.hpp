#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tsmotif/distance.hpp"

namespace tsmotif {

/// Bounded best-k collection of mutually non-overlapping motif pairs.
/// A candidate is rejected when it overlaps a pair that ranks at or
/// before it in the (distance, a, b) order; inserting it evicts any
/// strictly worse overlapping pairs. Entries are kept ascending.
class MotifQueue {
public:
    MotifQueue(uint32_t capacity, uint32_t exclusion)
        : capacity_(capacity), exclusion_(exclusion) {
        if (capacity == 0) throw std::invalid_argument("queue capacity must be positive");
    }

    bool offer(const MotifPair& p) {
        for (const auto& e : entries_) {
            if (pairs_overlap(e.a, e.b, p.a, p.b, exclusion_) && !motif_less(p, e))
                return false;
        }
        size_t evicted = 0;
        for (size_t i = entries_.size(); i-- > 0;) {
            if (pairs_overlap(entries_[i].a, entries_[i].b, p.a, p.b, exclusion_)) {
                entries_.erase(entries_.begin() + (std::ptrdiff_t)i);
                evicted++;
            }
        }
        auto pos = entries_.begin();
        while (pos != entries_.end() && motif_less(*pos, p)) ++pos;
        const bool kept = evicted > 0 || entries_.size() < capacity_ ||
                          pos != entries_.end();
        entries_.insert(pos, p);
        if (entries_.size() > capacity_) entries_.pop_back();
        return kept;
    }

    bool full() const { return entries_.size() == capacity_; }
    size_t size() const { return entries_.size(); }
    uint32_t capacity() const { return capacity_; }
    uint32_t exclusion() const { return exclusion_; }

    /// The current k-th (largest-distance) pair; only valid when non-empty.
    const MotifPair& worst() const { return entries_.back(); }

    const std::vector<MotifPair>& entries() const { return entries_; }

private:
    uint32_t capacity_;
    uint32_t exclusion_;
    std::vector<MotifPair> entries_;
};

} // namespace tsmotif
