#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "perclab/models.hpp"
#include "perclab/partitions.hpp"

namespace perclab {

// Machinery for coupling two independent configurations C1, C2 of the same
// 3-terminal bond model through adaptive edge-set choices. swap_config(c1,c2,S)
// (models.hpp) is the configuration taking C1's statuses on S and C2's off S.

inline constexpr int kPairEnumCap = 12;  // 4^|E| pair enumerations

/// Open-edge component of each terminal, as vertex bitmasks (|V| <= 64).
std::array<uint64_t, 3> terminal_components(const Graph& g, const Configuration& c);

// The three edge-set choices driving the coupling bounds, as functions of the
// component structure of C1. Membership of an edge follows a priority rule on
// which terminals its endpoints' C1-components contain:
//   set 1:  touches c -> in;  else touches a -> out;  else touches b -> in;  else out
//   set 2:  same with b and c interchanged
//   set 3:  touches a -> out; else touches b or c -> in; else out
struct STriple {
    uint64_t s1 = 0, s2 = 0, s3 = 0;  // edge bitmasks
    uint64_t get(int i) const { return i == 0 ? s1 : (i == 1 ? s2 : s3); }
};

STriple s_sets(const Graph& g, const Configuration& c1);

// Partition index and S-sets for every configuration of g, built once and
// shared by the pair-enumeration loops.
struct SwapTables {
    std::vector<uint8_t> part;               // per configuration
    std::vector<std::array<uint64_t, 3>> s;  // per configuration
    int edge_count = 0;
};

SwapTables build_swap_tables(const Graph& g);

/// The priority rule itself, on the union of the two endpoints' terminal
/// masks (bit0=a, bit1=b, bit2=c). Shared with the tuple classifier so both
/// modules decide membership identically.
inline bool side_rule(int which, uint8_t terminal_union) {
    switch (which) {
        case 0: return (terminal_union & 4) ? true : ((terminal_union & 1) ? false : (terminal_union & 2));
        case 1: return (terminal_union & 2) ? true : ((terminal_union & 1) ? false : (terminal_union & 4));
        default: return (terminal_union & 1) ? false : (terminal_union & 6);
    }
}

// An adaptive procedure assigning every edge to S or its complement, deciding
// the side before that edge's statuses are revealed.
struct ScheduleView {
    const Graph* g = nullptr;
    uint64_t revealed = 0;  // edges already revealed
    uint64_t c1_open = 0;   // statuses, valid on revealed bits only
    uint64_t c2_open = 0;
};

class SwapSchedule {
public:
    virtual ~SwapSchedule() = default;
    virtual std::string name() const = 0;
    /// True when decisions never read C2 statuses; enables per-C1 caching.
    virtual bool reads_c1_only() const { return false; }
    virtual void begin(const Graph& g) = 0;
    /// Next unrevealed edge and its side (true = S).
    virtual std::pair<int, bool> choose(const ScheduleView& view) = 0;
};

/// Built-ins: "fig1" (grow a's component into S), "s1"/"s2"/"s3" (the
/// priority procedures above, realized adaptively), "constant" (everything
/// into S). Throws on unknown name.
std::unique_ptr<SwapSchedule> make_schedule(const std::string& name);

/// Runs the schedule to completion; hard error if it repeats or skips edges.
uint64_t run_schedule(const Graph& g, SwapSchedule& sched, const Configuration& c1,
                      const Configuration& c2);

struct TreeLemmaResult {
    bool pass = false;
    Rational max_deviation;
};

/// Enumerates all (C1,C2) pairs with weight P(C1)P(C2) and checks that the
/// joint law of (swap(c1,c2,S), swap(c2,c1,S)) is exactly the product law.
TreeLemmaResult verify_tree_lemma(const Graph& g, SwapSchedule& sched);

struct KeyObservationResult {
    bool pass = true;
    std::optional<std::pair<Configuration, Configuration>> counterexample;
    std::string failed_check;
};

// Exhaustively checks, for every configuration pair:
//  (i)  C1 fully split and swap3 joins a to b or c  =>  swap1 joins ab or swap2 joins ac
//  (ii) C1 fully split  =>  swap1 keeps a,c apart
//  (iii) C1 keeps a apart from b and c  =>  the complement-of-set-3 swap does too
KeyObservationResult verify_key_observation(const Graph& g);

struct SwapBoundReport {
    PartitionDistribution rho;
    Rational joint_s1_ab;        // P(C1 split  &  swap1 in a~b)
    Rational joint_s2_ac;
    Rational joint_s3_ab_or_ac;
    bool s1_bound_holds = false;  // joint_s1_ab <= rho(ab|c)
    bool s2_bound_holds = false;
    bool key_bound_holds = false;  // joint_s3 <= joint_s1 + joint_s2
    Rational s3_lower;             // P(a!~b & a!~c)P(ab v ac) - P(a|bc)
    bool s3_lower_holds = false;
    Rational final_lhs, final_rhs;  // assembled inequality on rho
    bool final_holds = false;
};

/// The three joint probabilities by pair enumeration, each checked against
/// its single-run bound, and the assembled product inequality on rho.
SwapBoundReport final_inequality_report(const Graph& g, int workers = 1);

}  // namespace perclab
