#pragma once

#include <string>
#include <utility>
#include <vector>

#include "perclab/models.hpp"
#include "perclab/partitions.hpp"

namespace perclab {

// Constructions that re-express one percolation model inside another while
// preserving every boolean combination of pairwise terminal-connection
// events. Auxiliary vertices are named "e{i}" (per edge) and "h{i}" (per
// hyperedge); models whose own vertices use those names are rejected so the
// terminal maps stay reproducible.

struct TerminalMap {
    std::vector<std::pair<std::string, std::string>> entries;  // source -> target
};

/// Each edge becomes an auxiliary vertex open with the edge probability,
/// adjacent to both endpoints; originals are open with probability 1.
std::pair<SiteModel, TerminalMap> bond_to_site(const Graph& g);

/// Each hyperedge becomes an auxiliary vertex adjacent to all members.
std::pair<SiteModel, TerminalMap> hyper_to_site(const HyperModel& h);

/// Subdivides every adjacency with an always-open auxiliary vertex, then
/// replaces each original vertex v by a hyperedge {v, adjacent auxiliaries}
/// carrying v's probability. Hyperedges of size 1 (isolated vertices) cannot
/// affect any connectivity event and are dropped.
std::pair<HyperModel, TerminalMap> site_to_hyper(const SiteModel& m);

struct SimulationCheck {
    bool equal = false;
    Rational max_residual;
};

/// Entrywise comparison of two distributions over the same terminal count
/// (the terminal maps here preserve terminal order, so the partition
/// correspondence is the identity).
SimulationCheck verify_simulation(const PartitionDistribution& src,
                                  const PartitionDistribution& dst);

}  // namespace perclab
