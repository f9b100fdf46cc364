#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "colist/cluster.hpp"
#include "colist/graph.hpp"
#include "colist/membership.hpp"
#include "colist/metadata.hpp"

namespace colist {

/// Distinct-list count per movie of the table (computed on whatever table it
/// is given; characterization uses the unfiltered one).
std::unordered_map<std::string, std::size_t> list_counts(const MembershipTable& table);

struct TopListedRow {
    std::string movie_id;
    std::size_t lists = 0;
    std::optional<double> rating;
};

/// Top-k movies by list count, descending, ties by movie_id; rating joined
/// from metadata when present.
std::vector<TopListedRow> top_listed(const std::unordered_map<std::string, std::size_t>& counts,
                                     const MetadataTable& meta, std::size_t k);

struct GenreAggregate {
    std::size_t movie_count = 0;
    double mean_lists = 0.0;
    std::optional<double> mean_rating;  // absent when no movie of the genre is rated
};

/// Per-genre means of list count and rating; movies with a missing rating are
/// excluded from the rating mean only.
std::map<std::string, GenreAggregate> genre_aggregates(
    const std::unordered_map<std::string, std::size_t>& counts, const MetadataTable& meta);

/// Sample Pearson correlation coefficient. Requires |x| == |y| >= 2 and
/// non-constant inputs (ContractError otherwise).
double pearson(std::span<const double> x, std::span<const double> y);

/// A graph plus per-node cluster labels (among the selected clusters).
struct AnnotatedSubgraph {
    CoListGraph graph;
    /// node id -> sorted cluster labels containing it; multi-labeled nodes
    /// are those with more than one entry.
    std::map<std::string, std::vector<std::string>> node_clusters;

    std::size_t multi_labeled_count() const;
};

/// Subgraph induced by the union of the selected clusters' members. Cluster
/// ids follow cluster_label(); unknown ids raise LookupError, members missing
/// from the graph raise ValidationError.
AnnotatedSubgraph cluster_subgraph(const CoListGraph& g, const ClusterSolution& clusters,
                                   std::span<const std::string> selected);

void write_movie_counts_csv(const std::unordered_map<std::string, std::size_t>& counts,
                            const MetadataTable& meta, const std::filesystem::path& path);
void write_top_listed_csv(std::span<const TopListedRow> rows, const std::filesystem::path& path);
void write_genre_means_csv(const std::map<std::string, GenreAggregate>& aggregates,
                           const std::filesystem::path& path);

}  // namespace colist
