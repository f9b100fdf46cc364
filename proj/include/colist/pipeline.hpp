#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "colist/format.hpp"

namespace colist {

/// Full pipeline configuration. Defaults mirror the standard analysis
/// parameters (list sizes 5..100, movies on >= 5 lists, edge threshold 0.1,
/// 100 runs at 80% sampling, clusters of >= 3 kept, summaries at >= 0.8).
struct PipelineConfig {
    std::filesystem::path memberships;
    std::filesystem::path metadata;  // may be empty; enrichment then aborts
    std::filesystem::path out_dir;
    Format format = Format::tsv;

    std::size_t min_list_size = 5;
    std::size_t max_list_size = 100;
    std::size_t min_movie_lists = 5;
    double tau = 0.1;
    std::uint32_t runs = 100;
    double fraction = 0.8;
    std::uint64_t seed = 42;
    std::size_t min_cluster_size = 3;
    double enrich_threshold = 0.8;
    unsigned workers = 0;  // 0 = available parallelism
    std::size_t top_k = 20;

    bool stats_only = false;       // only the data characterization outputs
    bool keep_isolated = false;    // keep isolated nodes in the clustering input
    bool full_universe = false;    // enrichment null over all metadata movies
    bool cosample_normalization = false;
};

/// A stage failure, named after the stage that raised it.
struct PipelineError : std::runtime_error {
    std::string stage;
    PipelineError(std::string stage_name, const std::string& cause)
        : std::runtime_error("stage " + stage_name + ": " + cause), stage(std::move(stage_name)) {}
};

/// Run ingest -> filter -> build -> normalize -> threshold -> consensus ->
/// final clusters -> enrichment -> summaries, writing every intermediate
/// artifact under config.out_dir plus a manifest of all parameters and seeds.
/// Artifacts are written to a .partial path and renamed on stage success, so
/// an aborted run leaves only .partial files behind for incomplete stages.
void run_pipeline(const PipelineConfig& config);

/// Flat key=value config file; keys match the CLI flag names. Unknown keys
/// raise ValidationError.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace colist
