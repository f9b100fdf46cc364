#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "colist/membership.hpp"

namespace colist {

enum class WeightKind { raw_count, normalized };

/// Undirected weighted graph over movie ids. Node ids are kept
/// lexicographically sorted so node indices order the same way as ids, which
/// makes "smallest id" tie-breaking and canonical (smaller id first) edge
/// order fall out of plain index comparisons. No self-loops; symmetry is
/// structural (each edge stored in both adjacency rows). Immutable once
/// finalized and safe to share read-only across threads.
class CoListGraph {
  public:
    CoListGraph() = default;
    CoListGraph(std::vector<std::string> node_ids, WeightKind kind);

    /// Build phase. Indices must differ; duplicate edges are rejected at
    /// finalize(). Weights must be > 0.
    void add_edge(std::uint32_t a, std::uint32_t b, double weight);
    void add_edge(std::string_view a, std::string_view b, double weight);
    /// Sorts adjacency rows and computes strengths. Must be called once,
    /// before any query.
    void finalize();

    WeightKind weight_kind() const { return kind_; }
    std::size_t num_nodes() const { return ids_.size(); }
    std::size_t num_edges() const { return num_edges_; }
    bool empty() const { return ids_.empty(); }

    const std::vector<std::string>& node_ids() const { return ids_; }
    const std::string& id_of(std::uint32_t idx) const { return ids_[idx]; }
    std::optional<std::uint32_t> index_of(std::string_view id) const;
    bool has_node(std::string_view id) const { return index_of(id).has_value(); }

    /// Neighbors of a node as (index, weight), sorted by index.
    std::span<const std::pair<std::uint32_t, double>> neighbors(std::uint32_t idx) const;
    std::optional<double> edge_weight(std::uint32_t a, std::uint32_t b) const;
    /// Weighted degree.
    double strength(std::uint32_t idx) const { return strength_[idx]; }
    std::size_t degree(std::uint32_t idx) const { return adjacency_[idx].size(); }

    /// Visit every edge once as f(a, b, w) with a < b, ascending (a, b).
    template <typename F>
    void for_each_edge(F&& f) const {
        for (std::uint32_t a = 0; a < adjacency_.size(); ++a) {
            for (const auto& [b, w] : adjacency_[a]) {
                if (b > a) f(a, b, w);
            }
        }
    }

  private:
    std::vector<std::string> ids_;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency_;
    std::vector<double> strength_;
    std::size_t num_edges_ = 0;
    WeightKind kind_ = WeightKind::raw_count;
    bool finalized_ = false;
};

/// Co-listed graph over all movies of the (already filtered) table: edge
/// {A,B} iff A != B share at least one list, weighted by the shared-list
/// count.
CoListGraph build_raw_graph(const MembershipTable& table);

/// CoCit-style normalization of a shared-list count against the two list-set
/// sizes: shared^2 / (min(a,b) * mean(a,b)), in [0,1]. The mean is the
/// arithmetic mean in real arithmetic.
double cocit_weight(std::size_t size_a, std::size_t size_b, std::size_t shared);

/// Reweight every raw-count edge via cocit_weight, list-set sizes taken from
/// the table the raw graph was built from. Node and edge sets are unchanged.
CoListGraph normalize_graph(const CoListGraph& raw, const MembershipTable& table);

/// Keep edges with weight >= tau (inclusive). Isolated nodes are retained
/// unless drop_isolated is set.
CoListGraph threshold_graph(const CoListGraph& g, double tau, bool drop_isolated = false);

/// Connected components as vectors of node ids, each sorted; components
/// ordered by size descending, ties by smallest member id.
std::vector<std::vector<std::string>> connected_components(const CoListGraph& g);

/// Subgraph induced by the center and its neighbors, neighbor-neighbor edges
/// included. Unknown center raises LookupError.
CoListGraph ego_network(const CoListGraph& g, std::string_view center);

/// Subgraph induced by the given node ids; ids not present in g raise
/// LookupError.
CoListGraph induced_subgraph(const CoListGraph& g, std::span<const std::string> node_ids);

/// Copy of g without degree-0 nodes.
CoListGraph drop_isolated_nodes(const CoListGraph& g);

}  // namespace colist
