#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "colist/graph.hpp"
#include "colist/metadata.hpp"

namespace colist {

/// Weighted edge list: movie_id_a <tab> movie_id_b <tab> weight, canonical
/// pair order (smaller id first), rows sorted, weights with 6 decimal places.
/// A leading "# weight_kind: ..." comment records the kind for import.
/// Isolated nodes do not survive this format; use GraphML for full fidelity.
void write_edge_list(const CoListGraph& g, const std::filesystem::path& path);

/// Read an edge list written by write_edge_list (or any id\tid\tweight file;
/// '#' lines are skipped). The kind comes from the header comment unless
/// kind_override is given; absent both, raises ParseError.
CoListGraph read_edge_list(const std::filesystem::path& path,
                           std::optional<WeightKind> kind_override = std::nullopt);

/// Round every weight to the value the 6-decimal edge-list format stores, so
/// a graph passed through write_edge_list + read_edge_list comes back
/// bit-identical. The pipeline applies this before handing a graph to the
/// consensus stage, which makes running the stages as separate commands over
/// the on-disk artifacts equivalent to the in-process pipeline.
CoListGraph quantize_weights(const CoListGraph& g);

/// GraphML export with an edge weight attribute. When metadata is supplied
/// each node carries the seven categorical attributes ('|'-joined) and the
/// rating; node_clusters adds per-node "clusters" labels and a "multi" flag
/// for nodes assigned to several clusters.
void write_graphml(const CoListGraph& g, const std::filesystem::path& path,
                   const MetadataTable* meta = nullptr,
                   const std::map<std::string, std::vector<std::string>>* node_clusters = nullptr);

}  // namespace colist
