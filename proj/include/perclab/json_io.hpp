#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "perclab/models.hpp"
#include "perclab/partitions.hpp"

namespace perclab {

// File formats (all schema 1, documented in the README):
//  - bond model:  {"vertices":[...], "terminals":[...],
//                  "edges":[{"u":"a","v":"b","p":"1/2"}]}
//  - site model:  edges carry no "p"; adds "sites":[{"v":"a","p":"1"}]
//  - hyper model: {"hyperedges":[{"vertices":["a","b","c"],"p":"1/2"}]}
// Probabilities are strings parsed as exact rationals ("1/2", "0.32537").

using AnyModel = std::variant<Graph, SiteModel, HyperModel>;

AnyModel parse_model_json(const std::string& text);
AnyModel load_model(const std::string& path);

std::string model_to_json(const Graph& g);
std::string model_to_json(const SiteModel& m);
std::string model_to_json(const HyperModel& h);

int model_terminal_count(const AnyModel& m);
std::vector<std::string> model_terminal_names(const AnyModel& m);

struct DistributionDocument {
    std::vector<std::string> terminal_names;
    PartitionDistribution rho;
    std::string mode = "exact";
    std::optional<uint64_t> samples;             // monte-carlo only
    std::optional<std::vector<uint64_t>> counts; // monte-carlo only
};

std::string distribution_to_json(const DistributionDocument& doc);
DistributionDocument parse_distribution_json(const std::string& text);
DistributionDocument load_distribution(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// FNV-1a 64-bit digest used in run manifests.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace perclab
