#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "colist/graph.hpp"

namespace colist {

/// A set of possibly-overlapping clusters, each a sorted unique vector of
/// movie ids. No empty clusters, no two clusters with identical member sets.
/// Cluster ids are positional: cluster_label(i) names cluster i in reports
/// and subgraph selection.
struct ClusterSolution {
    std::vector<std::vector<std::string>> clusters;

    std::size_t num_clusters() const { return clusters.size(); }
    bool empty() const { return clusters.empty(); }

    /// Distinct covered nodes, sorted.
    std::vector<std::string> covered_nodes() const;
    /// Nodes carrying more than one cluster label.
    std::size_t multi_labeled_count() const;
    /// movie_id -> sorted cluster indices. Unassigned nodes are absent.
    std::unordered_map<std::string, std::vector<std::uint32_t>> node_labels() const;

    bool operator==(const ClusterSolution&) const = default;
};

/// Positional cluster id, e.g. cluster_label(0) == "c0001".
std::string cluster_label(std::size_t index);

/// Canonical form: members sorted and deduplicated, empty clusters dropped,
/// duplicate member sets collapsed, clusters ordered lexicographically by
/// member sequence.
ClusterSolution canonical_solution(std::vector<std::vector<std::string>> raw_clusters);

/// Overlapping community detection on a weighted graph. Implementations must
/// be deterministic for a fixed (graph, seed) and thread every stochastic
/// choice through the seed. Invocations on the same immutable graph may run
/// concurrently.
class Clusterer {
  public:
    virtual ~Clusterer() = default;
    virtual ClusterSolution cluster(const CoListGraph& g, std::uint64_t seed) const = 0;
    virtual std::string name() const = 0;
};

/// Read a clustering in the one-cluster-per-line, whitespace-separated-ids
/// format used by common community-detection tools. Duplicate clusters are
/// collapsed with a warning on stderr. When a graph is supplied, member ids
/// are validated against its node set (unknown id -> ValidationError).
ClusterSolution load_clustering(const std::filesystem::path& path,
                                const CoListGraph* validate_against = nullptr);

void save_clustering(const ClusterSolution& solution, const std::filesystem::path& path);

/// JSON report with per-cluster sizes, covered-node and multi-label counts.
void write_cluster_report(const ClusterSolution& solution, const std::filesystem::path& path);

}  // namespace colist
