#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "perclab/rational.hpp"

namespace perclab {

inline constexpr int kMaxTerminals = 6;
inline constexpr std::array<int, kMaxTerminals + 1> kBell = {1, 1, 2, 5, 15, 52, 203};

int bell_number(int k);

// A set partition of k ordered terminals, stored as its restricted-growth
// string. Canonical index = position in the lexicographic RGS order; this
// order is frozen and documented (README), since serialized distributions
// are read positionally. For k = 3 the order is
//   0: abc   1: ab|c   2: ac|b   3: a|bc   4: a|b|c
// (with terminals named a, b, c).
struct TerminalPartition {
    int k = 0;
    int index = 0;
    std::array<uint8_t, kMaxTerminals> labels{};  // labels[i] = block of terminal i

    bool together(int i, int j) const { return labels[i] == labels[j]; }
    int block_count() const;
    /// Bitmask of terminals sharing terminal i's block.
    uint8_t block_mask(int i) const;
    /// Display name using the given terminal names, blocks joined by '|'.
    std::string name(const std::vector<std::string>& terminal_names) const;
};

// Precomputed table of all Bell(k) partitions plus a dense rank lookup used in
// enumeration hot loops.
class PartitionTable {
public:
    explicit PartitionTable(int k);

    int k() const { return k_; }
    int size() const { return static_cast<int>(partitions_.size()); }
    const TerminalPartition& at(int index) const { return partitions_[index]; }
    const std::vector<TerminalPartition>& all() const { return partitions_; }

    /// Index of the partition with the given first-occurrence labels.
    int index_of(const uint8_t* labels) const;

    /// Canonical index from arbitrary per-terminal keys: terminals with equal
    /// keys share a block. Keys are any ints (e.g. union-find roots).
    int index_from_keys(const int* keys) const;

private:
    int k_;
    std::vector<TerminalPartition> partitions_;
    std::vector<int16_t> rank_;  // packed base-k label string -> index
};

/// Shared immutable table for k terminals, 1 <= k <= 6.
const PartitionTable& partition_table(int k);

/// All Bell(k) partitions in the canonical order.
std::vector<TerminalPartition> canonical_partitions(int k);

// Indices in the k = 3 table, used throughout the 3-terminal machinery.
namespace p3 {
inline constexpr int ABC = 0;     // abc
inline constexpr int AB_C = 1;    // ab|c
inline constexpr int AC_B = 2;    // ac|b
inline constexpr int A_BC = 3;    // a|bc
inline constexpr int SPLIT = 4;   // a|b|c
}  // namespace p3

// A boolean combination of pairwise-connection events, represented as the set
// of partitions satisfying it.
struct EventSet {
    int k = 0;
    uint64_t mask = 0;

    EventSet() = default;
    EventSet(int k_, uint64_t m) : k(k_), mask(m) {}

    bool contains(int partition_index) const { return (mask >> partition_index) & 1; }
    EventSet unite(const EventSet& o) const { return {k, mask | o.mask}; }
    EventSet intersect(const EventSet& o) const { return {k, mask & o.mask}; }
    EventSet complement() const {
        uint64_t full = (bell_number(k) >= 64) ? ~0ull : ((1ull << bell_number(k)) - 1);
        return {k, full & ~mask};
    }
    static EventSet full(int k) { return EventSet{k, 0}.complement(); }
    static EventSet empty(int k) { return {k, 0}; }
    static EventSet atom_together(int k, int a, int b);  // "a~b"
};

/// Parses expressions such as "a~b", "a~b OR a~c", "a!~b AND a!~c",
/// with NOT/parentheses; "x≁y" is accepted as a synonym for "x!~y".
EventSet parse_event(const std::string& expr, const std::vector<std::string>& terminal_names);

// Exact probability vector over the canonical partitions of k terminals.
struct PartitionDistribution {
    int k = 0;
    std::vector<Rational> probs;

    PartitionDistribution() = default;
    explicit PartitionDistribution(int k_) : k(k_), probs(bell_number(k_), Rational(0)) {}

    void validate() const;  // entries >= 0, sum exactly 1
    Rational event_probability(const EventSet& e) const;
};

}  // namespace perclab
