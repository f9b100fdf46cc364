#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "colist/cluster.hpp"
#include "colist/graph.hpp"

namespace colist {

/// Symmetric pairwise co-assignment affinity accumulated over ensemble runs.
/// Sparse: an absent entry is 0. Keys are canonical (i < j) index pairs into
/// the sorted node vector; no diagonal entries are stored. Entries hold raw
/// Jaccard sums while accumulating and land in [0,1] once divided by the run
/// count (build_consensus returns them normalized).
struct ConsensusMatrix {
    std::vector<std::string> nodes;  // lex sorted
    std::unordered_map<std::uint64_t, double> entries;
    std::uint32_t runs = 0;

    static std::uint64_t pack(std::uint32_t i, std::uint32_t j);
    static std::pair<std::uint32_t, std::uint32_t> unpack(std::uint64_t key);

    std::optional<std::uint32_t> index_of(std::string_view id) const;
    double value_at(std::uint32_t i, std::uint32_t j) const;
    double value(std::string_view a, std::string_view b) const;
};

/// Uniform sample without replacement of round(fraction * |nodes|) node ids,
/// deterministic per seed, returned sorted. fraction must lie in (0, 1].
std::vector<std::string> sample_nodes(const CoListGraph& g, double fraction, std::uint64_t seed);

/// Jaccard similarity of two sorted label sets; 0 when the union is empty.
double jaccard_labels(std::span<const std::uint32_t> labels_a,
                      std::span<const std::uint32_t> labels_b);

/// Add one run's pairwise Jaccard scores into the matrix (raw, no 1/r).
/// Only pairs sharing at least one cluster contribute (a pair never
/// co-clustered adds nothing, the sparse 0). Solution members outside the
/// sampled set raise ContractError.
void accumulate_run(ConsensusMatrix& m, const ClusterSolution& solution,
                    std::span<const std::string> sampled);

struct RunRecord {
    std::vector<std::string> sampled;  // sorted
    ClusterSolution solution;
};

/// Seed stream reserved for the final consensus-graph clustering. Ensemble
/// runs use streams 2*run and 2*run+1, so anything >= 2^33 cannot collide.
inline constexpr std::uint64_t kFinalSeedStream = 0x66696e616cULL;

struct ConsensusOptions {
    std::uint32_t runs = 100;
    double fraction = 0.8;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;
    /// Divide each entry by the number of runs that co-sampled the pair
    /// instead of by the run count. Off by default.
    bool normalize_by_cosample = false;
    /// Retain per-run samples and solutions (for replay-style validation).
    bool record_runs = false;
};

struct ConsensusResult {
    ConsensusMatrix matrix;
    std::vector<RunRecord> run_records;  // only filled when record_runs
};

/// Run the ensemble: per run, sample nodes, cluster the induced subgraph with
/// a per-run seed derived from the master seed, and accumulate. Entries are
/// normalized before returning. Runs execute on `workers` threads but merge
/// in run order, so the result is identical for any worker count. A clusterer
/// failure aborts the build with the run index attached.
ConsensusResult build_consensus(const CoListGraph& g, const Clusterer& base,
                                const ConsensusOptions& options);

/// The weighted graph a consensus matrix induces: every nonzero entry is an
/// edge; no threshold is applied.
CoListGraph consensus_graph(const ConsensusMatrix& m);

/// Cluster the consensus matrix viewed as an affinity graph and discard
/// clusters smaller than min_size. An entry-less matrix yields an empty
/// solution.
ClusterSolution final_clusters(const ConsensusMatrix& m, const Clusterer& base,
                               std::uint64_t seed, std::size_t min_size = 3);

/// Sparse triple export: node_a, node_b, value per line, canonical pair
/// order, 6 decimals.
void write_consensus_matrix(const ConsensusMatrix& m, const std::filesystem::path& path);
ConsensusMatrix read_consensus_matrix(const std::filesystem::path& path);

}  // namespace colist
