#pragma once

// Linear-scan reference sampler: segments of the given lengths laid out on a
// line in insertion order. The slow baseline the shard structure is checked
// against, and the layout used by the worked single-line selection examples.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace teststat {

class NaiveLineSampler {
public:
    void insert(std::uint64_t key, double weight) {
        entries_.push_back({key, weight});
        total_ += weight;
    }

    double total() const { return total_; }

    std::uint64_t sample(double u) const {
        if (!(u > 0.0) || u > total_) throw std::invalid_argument("naive sampler: point out of range");
        double cum = 0.0;
        for (const auto& e : entries_) {
            cum += e.weight;
            if (u <= cum) return e.key;
        }
        return entries_.back().key;
    }

private:
    struct Entry {
        std::uint64_t key;
        double weight;
    };
    std::vector<Entry> entries_;
    double total_ = 0.0;
};

}  // namespace teststat
