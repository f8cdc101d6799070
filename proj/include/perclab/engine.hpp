#pragma once

#include <array>
#include <optional>
#include <vector>

#include "perclab/models.hpp"
#include "perclab/partitions.hpp"

namespace perclab {

inline constexpr int kDefaultExactCap = 24;

struct EngineOptions {
    enum class Mode { Exact, MonteCarlo };
    Mode mode = Mode::Exact;
    uint64_t sample_count = 0;  // monte-carlo only
    uint64_t seed = 0;          // monte-carlo only
    int worker_count = 1;
    int exact_cap = kDefaultExactCap;  // max uncertain random elements
};

struct DistributionResult {
    PartitionDistribution rho;
    std::optional<std::vector<uint64_t>> counts;  // per partition, monte-carlo only
    std::optional<uint64_t> samples;
};

// Exact mode sums P(C) over all configurations of the uncertain elements
// (elements with p in {0,1} are folded in up front); Monte-Carlo mode draws
// sample_count configurations from a counter-based generator keyed by
// (seed, sampleIndex), so results are identical for any worker count.
DistributionResult bond_distribution(const Graph& g, const EngineOptions& opts = {});
DistributionResult site_distribution(const SiteModel& m, const EngineOptions& opts = {});
DistributionResult hyper_distribution(const HyperModel& h, const EngineOptions& opts = {});

/// Float mirror of the exact bond computation; used inside search loops where
/// exactness is re-established at the reporting boundary.
std::vector<double> bond_distribution_float(const Graph& g, const std::vector<double>& edge_probs);

struct PreprocessResult {
    Graph graph;
    bool terminals_merged = false;
    // Groups of original terminal names that were contracted together.
    std::vector<std::vector<std::string>> merged_terminal_groups;
};

/// Deletes probability-0 edges and contracts probability-1 edges. The
/// partition distribution is unchanged; if certain edges join two terminals
/// the terminal list shrinks and the merge is reported.
PreprocessResult preprocess(const Graph& g);

struct KmaxQuery {
    std::vector<int> region;          // Lambda, non-empty vertex subset
    Rational threshold = Rational(1); // lambda >= 1
    std::optional<int> focus_vertex;  // u, for the per-vertex tail
};

struct KmaxResult {
    Rational tail_max;                   // P(|K_max(Lambda)| >= lambda)
    std::optional<Rational> tail_focus;  // P(|K_u cap Lambda| >= lambda)
};

KmaxResult kmax_tail(const Graph& g, const KmaxQuery& q, const EngineOptions& opts = {});

// Both extreme partition probabilities and their margins against a target p,
// plus (for 4 terminals) the cluster-tail inequality instance
// P(all together) <= P(some pair together)^2.
struct DichotomyReport {
    int k = 0;
    Rational all_together;
    Rational all_separate;
    Rational target_p;
    Rational margin_top;     // p - P(all together)
    Rational margin_bottom;  // (1-p) - P(all separate)
    std::optional<Rational> pairwise_union;       // k=4: P(some pair together)
    std::optional<bool> tail_inequality_holds;    // k=4
};

DichotomyReport dichotomy_scan(const Graph& g, const Rational& p, const EngineOptions& opts = {});

}  // namespace perclab
