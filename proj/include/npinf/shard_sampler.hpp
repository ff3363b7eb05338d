#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "npinf/rng.hpp"

namespace npinf {

using EventKey = std::uint64_t;

/// Dynamic categorical distribution over keyed events, supporting weighted
/// sampling, O(precision) insert/remove, and sampling without replacement.
///
/// Each weight is quantized to an integer number of quanta of size
/// 2^-precision and decomposed into its binary shards: one shard of length
/// 2^(b-precision) per set bit b. Shards live in per-length arrays, so a
/// removed shard can be swap-filled by the last shard of its array without
/// leaving holes. Selection lays the arrays out on a line, coarsest shards
/// first, and locates a point by a prefix-sum binary search over the levels
/// followed by constant-time index arithmetic within the level.
///
/// Weights below one quantum (including zero) are bumped up to exactly one
/// quantum, so every live event has nonzero selection probability; the bias
/// is at most 2^-precision per event. Weights above 2^62 quanta are rejected.
class ShardSampler {
public:
    static constexpr int kMaxBits = 63;  // quanta counts use bits 0..62

    explicit ShardSampler(int precision_bits = 20) : precision_(precision_bits) {
        if (precision_bits < 1 || precision_bits > 62) {
            throw std::invalid_argument("ShardSampler: precision must be in [1, 62]");
        }
        prefix_.fill(0);
    }

    int precision() const { return precision_; }
    std::size_t size() const { return index_.size(); }
    bool empty() const { return index_.empty(); }
    std::uint64_t total_quanta() const { return total_quanta_; }
    double total_mass() const { return std::ldexp(static_cast<double>(total_quanta_), -precision_); }

    /// Nearest multiple of 2^-precision, in quanta (ties away from zero;
    /// results of zero bumped to one quantum).
    std::uint64_t quantize(double weight) const {
        if (!std::isfinite(weight) || weight < 0.0) {
            throw std::invalid_argument("ShardSampler: weight must be finite and non-negative");
        }
        const double scaled = std::ldexp(weight, precision_);
        if (scaled > static_cast<double>(std::uint64_t{1} << 62)) {
            throw std::invalid_argument("ShardSampler: weight exceeds 2^62 quanta");
        }
        const auto q = static_cast<std::uint64_t>(std::llround(scaled));
        return q == 0 ? 1 : q;
    }

    bool contains(EventKey key) const { return index_.count(key) != 0; }

    /// Quantized weight of a live event.
    double weight_of(EventKey key) const {
        return std::ldexp(static_cast<double>(quanta_of(key)), -precision_);
    }

    std::uint64_t quanta_of(EventKey key) const {
        auto it = index_.find(key);
        if (it == index_.end()) throw std::invalid_argument("ShardSampler: unknown event key");
        std::uint64_t q = 0;
        for (const Slot& s : it->second) q += std::uint64_t{1} << s.bit;
        return q;
    }

    /// Shard count of the array holding shards of length 2^-level. Levels
    /// <= 0 address the coarser arrays used by weights of one or more.
    std::size_t count_at_level(int level) const {
        const int bit = precision_ - level;
        if (bit < 0 || bit >= kMaxBits) return 0;
        return arrays_[static_cast<std::size_t>(bit)].size();
    }

    void insert(EventKey key, double weight) {
        if (index_.count(key)) throw std::invalid_argument("ShardSampler: duplicate event key");
        const std::uint64_t q = quantize(weight);
        auto& slots = index_[key];
        for (std::uint64_t rest = q; rest != 0;) {
            const int bit = std::countr_zero(rest);
            rest &= rest - 1;
            auto& arr = arrays_[static_cast<std::size_t>(bit)];
            slots.push_back(Slot{static_cast<std::uint32_t>(arr.size()), static_cast<std::uint8_t>(bit)});
            arr.push_back(key);
        }
        total_quanta_ += q;
        rebuild_prefix();
    }

    void remove(EventKey key) {
        auto it = index_.find(key);
        if (it == index_.end()) throw std::invalid_argument("ShardSampler: unknown event key");
        std::uint64_t q = 0;
        for (const Slot& s : it->second) {
            q += std::uint64_t{1} << s.bit;
            auto& arr = arrays_[s.bit];
            const std::uint32_t last = static_cast<std::uint32_t>(arr.size()) - 1;
            if (s.pos != last) {
                const EventKey moved = arr[last];
                arr[s.pos] = moved;
                for (Slot& ms : index_.at(moved)) {
                    if (ms.bit == s.bit && ms.pos == last) {
                        ms.pos = s.pos;
                        break;
                    }
                }
            }
            arr.pop_back();
        }
        index_.erase(it);
        total_quanta_ -= q;
        rebuild_prefix();
    }

    /// Event owning the shard that covers position u on the concatenated
    /// line of arrays; u must lie in (0, total_mass]. Does not remove.
    EventKey sample(double u) const {
        if (total_quanta_ == 0) throw std::logic_error("ShardSampler: sample from empty distribution");
        if (!(u > 0.0) || u > total_mass()) {
            throw std::invalid_argument("ShardSampler: sample point outside (0, total_mass]");
        }
        std::uint64_t x = static_cast<std::uint64_t>(std::ceil(std::ldexp(u, precision_)));
        if (x < 1) x = 1;
        if (x > total_quanta_) x = total_quanta_;

        // First layout slot whose cumulative quanta reach x.
        std::size_t lo = 0, hi = kMaxBits - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (prefix_[mid] >= x) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        const int bit = kMaxBits - 1 - static_cast<int>(lo);
        const std::uint64_t before = lo == 0 ? 0 : prefix_[lo - 1];
        const std::uint64_t offset = x - before;  // 1-based within the level
        const std::uint64_t j = (offset + (std::uint64_t{1} << bit) - 1) >> bit;
        return arrays_[static_cast<std::size_t>(bit)][static_cast<std::size_t>(j - 1)];
    }

    EventKey sample(std::mt19937_64& gen) const {
        return sample(uniform01_open_closed(gen) * total_mass());
    }

    EventKey sample_and_remove(double u) {
        const EventKey key = sample(u);
        remove(key);
        return key;
    }

    EventKey sample_and_remove(std::mt19937_64& gen) {
        const EventKey key = sample(gen);
        remove(key);
        return key;
    }

    std::vector<std::pair<EventKey, std::uint64_t>> live_events() const {
        std::vector<std::pair<EventKey, std::uint64_t>> out;
        out.reserve(index_.size());
        for (const auto& [key, slots] : index_) {
            std::uint64_t q = 0;
            for (const Slot& s : slots) q += std::uint64_t{1} << s.bit;
            out.emplace_back(key, q);
        }
        return out;
    }

    /// Full structural check: index and arrays agree bidirectionally, shard
    /// levels are distinct per event, and the mass bookkeeping matches.
    /// Throws std::logic_error on the first violation.
    void audit() const {
        std::size_t total_slots = 0;
        std::uint64_t mass = 0;
        for (const auto& [key, slots] : index_) {
            std::uint64_t bits_seen = 0;
            for (const Slot& s : slots) {
                const std::uint64_t bit_mask = std::uint64_t{1} << s.bit;
                if (bits_seen & bit_mask) throw std::logic_error("audit: duplicate shard level for event");
                bits_seen |= bit_mask;
                const auto& arr = arrays_[s.bit];
                if (s.pos >= arr.size() || arr[s.pos] != key) {
                    throw std::logic_error("audit: index entry does not match array slot");
                }
                mass += bit_mask;
            }
            total_slots += slots.size();
        }
        std::size_t array_slots = 0;
        std::uint64_t running = 0;
        for (int bit = kMaxBits - 1; bit >= 0; --bit) {
            const auto& arr = arrays_[static_cast<std::size_t>(bit)];
            for (std::size_t pos = 0; pos < arr.size(); ++pos) {
                auto it = index_.find(arr[pos]);
                if (it == index_.end()) throw std::logic_error("audit: array slot holds dead event");
                bool found = false;
                for (const Slot& s : it->second) {
                    if (s.bit == bit && s.pos == pos) {
                        found = true;
                        break;
                    }
                }
                if (!found) throw std::logic_error("audit: array slot missing from index");
            }
            array_slots += arr.size();
            running += static_cast<std::uint64_t>(arr.size()) << bit;
            if (prefix_[static_cast<std::size_t>(kMaxBits - 1 - bit)] != running) {
                throw std::logic_error("audit: stale prefix sum");
            }
        }
        if (total_slots != array_slots) throw std::logic_error("audit: slot count mismatch");
        if (mass != total_quanta_) throw std::logic_error("audit: total mass mismatch");
    }

private:
    struct Slot {
        std::uint32_t pos;
        std::uint8_t bit;
    };

    void rebuild_prefix() {
        std::uint64_t running = 0;
        for (int bit = kMaxBits - 1; bit >= 0; --bit) {
            running += static_cast<std::uint64_t>(arrays_[static_cast<std::size_t>(bit)].size()) << bit;
            prefix_[static_cast<std::size_t>(kMaxBits - 1 - bit)] = running;
        }
    }

    int precision_;
    std::uint64_t total_quanta_ = 0;
    std::array<std::vector<EventKey>, kMaxBits> arrays_;
    std::array<std::uint64_t, kMaxBits> prefix_;
    std::unordered_map<EventKey, std::vector<Slot>> index_;
};

}  // namespace npinf
