#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perclab/rational.hpp"

namespace perclab {

// Models keep user-facing string ids at the boundary and dense indices
// internally. Terminals are ordered; their order fixes the partition indexing.

struct Graph {
    std::vector<std::string> vertex_names;
    struct Edge {
        int u, v;
        Rational p;
    };
    std::vector<Edge> edges;
    std::vector<int> terminals;

    int vertex_count() const { return static_cast<int>(vertex_names.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int terminal_count() const { return static_cast<int>(terminals.size()); }
    int vertex_index(const std::string& name) const;
    std::vector<std::string> terminal_names() const;
    void validate() const;
};

struct SiteModel {
    std::vector<std::string> vertex_names;
    std::vector<std::pair<int, int>> edges;  // adjacency only
    std::vector<Rational> vertex_prob;       // one per vertex
    std::vector<int> terminals;

    int vertex_count() const { return static_cast<int>(vertex_names.size()); }
    int terminal_count() const { return static_cast<int>(terminals.size()); }
    int vertex_index(const std::string& name) const;
    std::vector<std::string> terminal_names() const;
    void validate() const;
};

struct HyperModel {
    std::vector<std::string> vertex_names;
    struct HyperEdge {
        std::vector<int> members;  // size >= 2
        Rational p;
    };
    std::vector<HyperEdge> hyperedges;
    std::vector<int> terminals;

    int vertex_count() const { return static_cast<int>(vertex_names.size()); }
    int terminal_count() const { return static_cast<int>(terminals.size()); }
    int vertex_index(const std::string& name) const;
    std::vector<std::string> terminal_names() const;
    void validate() const;
};

// Open/closed statuses of the model's random elements (edges, vertices or
// hyperedges), packed as a bitmask. Element counts beyond 62 are outside the
// exact engine's reach anyway.
struct Configuration {
    uint64_t bits = 0;
    int size = 0;

    bool open(int i) const { return (bits >> i) & 1; }
};

/// result agrees with c1 on s and with c2 off s.
inline Configuration swap_config(const Configuration& c1, const Configuration& c2, uint64_t s) {
    return {(c1.bits & s) | (c2.bits & ~s), c1.size};
}

}  // namespace perclab
