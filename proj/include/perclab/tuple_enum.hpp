#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "perclab/models.hpp"
#include "perclab/partitions.hpp"

namespace perclab {

// Classifies every outcome tuple (J1..J8) in J^8 — the partitions of
// (C1, C2, and the six swapped configurations under the three edge-set
// choices) — as feasible or infeasible. Feasibility is decided by a
// universal-graph construction over vertex "codes": a code declares, for
// each of the 8 configurations, which terminal block its cluster carries
// (or none). The two maximal graphs consistent with the declarations are
// refined by deleting codes whose realized cluster class contradicts the
// declaration, to a fixpoint. Any tuple realized by a concrete graph maps
// into the construction with all its codes self-consistent, so the surviving
// set is a safe over-approximation of the achievable tuples.

inline constexpr int kTupleCount = 390625;  // 5^8
inline constexpr int kObservedEdgeCap = 10;

// Packed base-5 index; J1 is the most significant digit, so fixing J1 gives a
// contiguous slice of the index space.
using TupleIndex = uint32_t;

TupleIndex pack_tuple(const std::array<int, 8>& parts);
std::array<int, 8> unpack_tuple(TupleIndex t);

struct FeasibleSet {
    std::vector<uint64_t> bits;

    FeasibleSet() : bits((kTupleCount + 63) / 64, 0) {}
    bool test(TupleIndex i) const { return (bits[i >> 6] >> (i & 63)) & 1; }
    void set(TupleIndex i) { bits[i >> 6] |= 1ull << (i & 63); }
    uint64_t count() const;
    void merge(const FeasibleSet& o);
    std::array<uint64_t, 5> counts_by_first() const;

    // File format: "PLFS" magic, u8 version, u64 little-endian bit count,
    // then the bits packed LSB-first in little-endian 64-bit words.
    void save(const std::string& path) const;
    static FeasibleSet load(const std::string& path);
};

/// Edge-side membership from declared endpoint classes (terminal bitmasks,
/// 0 meaning "no terminal"). `which` is 0,1,2 for the three edge sets; the
/// C1 partition is implied by the class masks and is validated only.
bool side_predicate(int which, uint8_t class_u, uint8_t class_v, int c1_partition);

/// Universal-graph feasibility of one tuple. Pure; thread-safe.
bool feasible(TupleIndex t);

struct TupleSlice {
    // coordinate (0..7, i.e. J1..J8) -> fixed partition index
    std::vector<std::pair<int, int>> fixed;
};

/// Classifies the (sliced) tuple space; embarrassingly parallel and
/// deterministic for any worker count.
FeasibleSet enumerate_feasible(const TupleSlice& slice = {}, int workers = 1);

/// All tuples realized by g: enumerates every configuration pair, computes
/// the true edge sets from C1, and records the 8 induced partitions.
/// The soundness oracle for the over-approximation contract.
std::vector<TupleIndex> observed_tuples(const Graph& g, int workers = 1);

/// The tuple with b and c relabeled: values permuted, pair coordinates for
/// the first two edge sets exchanged.
TupleIndex relabel_bc(TupleIndex t);

}  // namespace perclab
