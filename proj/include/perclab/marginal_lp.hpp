#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "perclab/partitions.hpp"
#include "perclab/tuple_enum.hpp"

namespace perclab {

// Feasibility program over the feasible outcome tuples: nonnegative mass q on
// the tuples such that each of the four pair projections — (C1,C2) and the
// three (swap, complement-swap) pairs — has marginal law rho x rho. A point
// rho with an infeasible program cannot arise from any bond model, and the
// infeasibility ships an exact Farkas certificate.
//
// Rows: 100 = 4 groups x 25 pairs, index = group*25 + first*5 + second,
// with partition indices in the canonical order. Right-hand side of row
// (g,(x,y)) is rho[x]*rho[y].

inline constexpr int kLpRows = 100;

struct ProfileList {
    std::vector<TupleIndex> profiles;          // ascending
    std::vector<std::array<uint16_t, 4>> rows; // the 4 unit rows of each column
};

/// Distinct pair-projection profiles of the feasible set (the projections
/// determine the tuple, so this is a validated re-indexing).
ProfileList aggregate_profiles(const FeasibleSet& f);

std::vector<Rational> marginal_rhs(const PartitionDistribution& rho);

struct Certificate {
    std::vector<Rational> dual;  // one entry per row
};

struct SolveResult {
    bool feasible = false;
    // witness: basic solution with exact Aq = b, q >= 0 (profile, mass) pairs
    std::vector<std::pair<TupleIndex, Rational>> witness;
    Certificate certificate;  // valid iff !feasible
    int pivots = 0;
};

/// Exact rational phase-1 simplex. Deterministic; anti-cycling via a Bland
/// fallback after long degenerate runs.
SolveResult solve_marginal_lp(const ProfileList& cols, const PartitionDistribution& rho);

/// Independent exact re-check of the Farkas conditions: dual·column <= 0 for
/// every profile column and dual·rhs > 0. Shares no code with the solver.
bool verify_certificate(const ProfileList& cols, const PartitionDistribution& rho,
                        const Certificate& cert);

/// Exact check that a witness satisfies all 100 equalities with q >= 0.
bool verify_witness(const ProfileList& cols, const PartitionDistribution& rho,
                    const std::vector<std::pair<TupleIndex, Rational>>& witness);

std::string certificate_to_json(const Certificate& cert, const PartitionDistribution& rho);
std::pair<Certificate, PartitionDistribution> certificate_from_json(const std::string& text);

struct GridSpec {
    enum class Mode { Bound, Full, SymmetricSlice };
    int denom = 100;
    Mode mode = Mode::Bound;
};

struct PointRecord {
    std::array<int, 5> coords;  // numerators over the grid denominator
    bool lp_feasible = false;
    int certificate_index = -1;  // into ScanReport::certificates
};

struct BandStats {
    int level = 0;  // min(coords[0], coords[4]) of the band
    uint64_t total = 0, cached = 0, solved = 0, infeasible = 0;
    bool feasible_found = false;
};

struct ScanReport {
    GridSpec grid;
    int coord_denom = 100;  // denominator of PointRecord coords (3x grid for the slice)
    Rational bound;  // max of min(rho(top), rho(bottom)) over feasible classified points
    std::optional<std::array<int, 5>> witness_point;
    std::vector<BandStats> bands;
    std::vector<Certificate> certificates;  // distinct, creation order
    std::vector<PointRecord> points;        // every classified point
};

// Bound mode walks bands of min(rho[0], rho[4]) downward and stops at the
// first feasible point, so every point above the reported bound carries a
// certificate; Full mode classifies the whole grid; SymmetricSlice walks
// rho = (x, s, s, s, x). A cache of already-verified certificates screens
// points before any solve; batches are merged in point order so reruns are
// byte-identical.
ScanReport scan_grid(const FeasibleSet& f, const GridSpec& grid, int workers = 1);

struct Sample {
    std::string label;
    PartitionDistribution rho;
    bool from_graph = false;
};

struct SampleOutcome {
    std::string label;
    bool violates_strong_bound = false;  // quadratic-corrected split bound
    bool violates_pair_product = false;
    bool lp_feasible = false;
    bool consistent = false;
};

/// Violating either derived inequality must make the program infeasible;
/// graph-drawn samples satisfying both must be feasible.
std::vector<SampleOutcome> check_derived_inequalities(const ProfileList& cols,
                                                      const std::vector<Sample>& samples);

}  // namespace perclab
