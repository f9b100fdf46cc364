#include "colist/pipeline.hpp"

#include <fstream>
#include <vector>

#include "json.hpp"

#include "colist/analytics.hpp"
#include "colist/cluster.hpp"
#include "colist/consensus.hpp"
#include "colist/enrichment.hpp"
#include "colist/errors.hpp"
#include "colist/graph.hpp"
#include "colist/graph_io.hpp"
#include "colist/lfm.hpp"
#include "colist/membership.hpp"
#include "colist/metadata.hpp"
#include "colist/rng.hpp"

namespace colist {

namespace {

namespace fs = std::filesystem;

// Artifact writer: the payload lands in <path>.partial and is renamed into
// place only when the writer succeeds, so an aborted stage leaves .partial
// files, never a truncated final artifact.
class ArtifactSink {
  public:
    explicit ArtifactSink(fs::path dir) : dir_(std::move(dir)) {}

    template <typename Writer>
    void emit(const std::string& name, Writer&& writer) {
        fs::path partial = dir_ / (name + ".partial");
        writer(partial);
        fs::rename(partial, dir_ / name);
        names_.push_back(name);
    }

    std::vector<std::string> names() const {
        std::vector<std::string> sorted = names_;
        std::sort(sorted.begin(), sorted.end());
        return sorted;
    }

  private:
    fs::path dir_;
    std::vector<std::string> names_;
};

template <typename Body>
auto stage(const std::string& name, Body&& body) {
    try {
        return body();
    } catch (const PipelineError&) {
        throw;  // already attributed to an inner stage
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

nlohmann::json parameters_json(const PipelineConfig& config) {
    return nlohmann::json{
        {"cosample_normalization", config.cosample_normalization},
        {"enrich_threshold", config.enrich_threshold},
        {"format", format_name(config.format)},
        {"fraction", config.fraction},
        {"full_universe", config.full_universe},
        {"keep_isolated", config.keep_isolated},
        {"max_list_size", config.max_list_size},
        {"min_cluster_size", config.min_cluster_size},
        {"min_list_size", config.min_list_size},
        {"min_movie_lists", config.min_movie_lists},
        {"runs", config.runs},
        {"seed", config.seed},
        {"stats_only", config.stats_only},
        {"tau", config.tau},
        {"top_k", config.top_k},
        {"workers", config.workers},
    };
}

std::string memberships_artifact_name(Format format) {
    return std::string("filtered_memberships.") + format_name(format);
}

}  // namespace

void run_pipeline(const PipelineConfig& config) {
    if (config.memberships.empty()) throw PipelineError("ingest", "no memberships file given");
    if (config.out_dir.empty()) throw PipelineError("ingest", "no output directory given");
    fs::create_directories(config.out_dir);
    ArtifactSink sink(config.out_dir);

    // --- ingest ------------------------------------------------------------
    MembershipTable raw_table = stage("ingest", [&] {
        return parse_memberships(config.memberships, config.format);
    });
    // A missing metadata file is not an ingest failure: the characterization
    // degrades gracefully and only the enrichment stage hard-requires it.
    MetadataTable meta;
    bool have_metadata = false;
    if (!config.metadata.empty() && fs::exists(config.metadata)) {
        meta = stage("ingest", [&] { return parse_metadata(config.metadata, config.format); });
        have_metadata = true;
    }

    // --- characterization (unfiltered table, by design) ---------------------
    auto counts = list_counts(raw_table);
    std::optional<double> genre_pearson;
    stage("stats", [&] {
        sink.emit("movie_counts.csv",
                  [&](const fs::path& p) { write_movie_counts_csv(counts, meta, p); });
        auto top = top_listed(counts, meta, config.top_k);
        sink.emit("top_listed.csv", [&](const fs::path& p) { write_top_listed_csv(top, p); });
        auto genres = genre_aggregates(counts, meta);
        sink.emit("genre_means.csv",
                  [&](const fs::path& p) { write_genre_means_csv(genres, p); });
        std::vector<double> mean_lists, mean_rating;
        for (const auto& [genre, agg] : genres) {
            if (!agg.mean_rating) continue;
            mean_lists.push_back(agg.mean_lists);
            mean_rating.push_back(*agg.mean_rating);
        }
        try {
            genre_pearson = pearson(mean_lists, mean_rating);
        } catch (const ContractError&) {
            // too few rated genres, or constant means: no correlation to report
        }
        return 0;
    });

    nlohmann::json manifest;
    manifest["inputs"] = {{"memberships", config.memberships.string()},
                          {"metadata", have_metadata ? config.metadata.string() : ""}};
    manifest["parameters"] = parameters_json(config);
    nlohmann::json& stats = manifest["stats"];
    stats["lists"] = raw_table.num_lists();
    stats["movies"] = raw_table.num_movies();
    stats["memberships"] = raw_table.num_memberships();
    if (genre_pearson) stats["genre_count_rating_pearson"] = *genre_pearson;

    if (!config.stats_only) {
        // --- filter ----------------------------------------------------------
        MembershipTable filtered = stage("filter", [&] {
            MembershipTable t = filter_lists(raw_table, config.min_list_size,
                                             config.max_list_size);
            t = filter_movies(t, config.min_movie_lists);
            sink.emit(memberships_artifact_name(config.format),
                      [&](const fs::path& p) { write_memberships(t, p, config.format); });
            return t;
        });
        stats["filtered_lists"] = filtered.num_lists();
        stats["filtered_movies"] = filtered.num_movies();
        stats["filtered_memberships"] = filtered.num_memberships();

        // --- build / normalize / threshold ------------------------------------
        CoListGraph raw_graph = stage("build", [&] {
            CoListGraph g = build_raw_graph(filtered);
            sink.emit("raw_graph.edges", [&](const fs::path& p) { write_edge_list(g, p); });
            return g;
        });
        CoListGraph normalized = stage("normalize", [&] {
            CoListGraph g = normalize_graph(raw_graph, filtered);
            sink.emit("normalized_graph.edges",
                      [&](const fs::path& p) { write_edge_list(g, p); });
            return g;
        });
        CoListGraph graph = stage("threshold", [&] {
            // quantized to the on-disk precision, so downstream stages see
            // exactly what a rerun from graph.edges would see
            CoListGraph g = quantize_weights(threshold_graph(
                normalized, config.tau, /*drop_isolated=*/!config.keep_isolated));
            sink.emit("graph.edges", [&](const fs::path& p) { write_edge_list(g, p); });
            return g;
        });
        stats["graph_nodes"] = graph.num_nodes();
        stats["graph_edges"] = graph.num_edges();

        // --- consensus ---------------------------------------------------------
        LfmClusterer base;
        ConsensusMatrix matrix = stage("consensus", [&] {
            ConsensusOptions options;
            options.runs = config.runs;
            options.fraction = config.fraction;
            options.master_seed = config.seed;
            options.workers = config.workers;
            options.normalize_by_cosample = config.cosample_normalization;
            ConsensusMatrix m = build_consensus(graph, base, options).matrix;
            sink.emit("consensus_matrix.tsv",
                      [&](const fs::path& p) { write_consensus_matrix(m, p); });
            return m;
        });
        stats["consensus_entries"] = matrix.entries.size();

        // --- final clusters ------------------------------------------------------
        ClusterSolution solution = stage("clusters", [&] {
            ClusterSolution s = final_clusters(matrix, base,
                                               derive_seed(config.seed, kFinalSeedStream),
                                               config.min_cluster_size);
            sink.emit("clusters.txt", [&](const fs::path& p) { save_clustering(s, p); });
            sink.emit("clusters_report.json",
                      [&](const fs::path& p) { write_cluster_report(s, p); });
            return s;
        });
        stats["clusters"] = solution.num_clusters();
        stats["covered_nodes"] = solution.covered_nodes().size();
        stats["multi_labeled"] = solution.multi_labeled_count();

        // --- enrichment + summaries ---------------------------------------------
        if (!have_metadata) {
            throw PipelineError("enrichment",
                                "metadata file required for enrichment: " +
                                    (config.metadata.empty() ? std::string("none given")
                                                             : config.metadata.string() +
                                                                   " is missing"));
        }
        std::vector<std::string> universe =
            config.full_universe ? meta.movie_ids() : graph.node_ids();
        EnrichmentContext ctx(meta, universe);
        stage("enrichment", [&] {
            EnrichmentReport report = build_enrichment_report(solution, ctx);
            sink.emit("enrichment.csv",
                      [&](const fs::path& p) { write_enrichment_csv(report, p); });
            if (!solution.empty()) {
                for (auto a : kAttributes) {
                    auto curve = coverage_curve(solution, ctx, a);
                    sink.emit(std::string("coverage_") + std::string(attribute_name(a)) + ".csv",
                              [&](const fs::path& p) { write_curve_csv(curve, p); });
                }
                auto multi = multi_attribute_curve(solution, ctx, config.enrich_threshold);
                sink.emit("multi_attribute.csv",
                          [&](const fs::path& p) { write_multi_curve_csv(multi, p); });
            }
            return 0;
        });
        stage("summaries", [&] {
            sink.emit("summaries.tsv", [&](const fs::path& p) {
                std::ofstream out(p);
                if (!out) throw IoError("cannot open " + p.string() + " for writing");
                out << "cluster_id\tsize\tsummary\n";
                for (std::size_t c = 0; c < solution.num_clusters(); ++c) {
                    out << cluster_label(c) << '\t' << solution.clusters[c].size() << '\t'
                        << summarize_cluster(solution.clusters[c], ctx,
                                             config.enrich_threshold)
                        << '\n';
                }
                if (!out) throw IoError("write failed: " + p.string());
            });
            if (!solution.empty()) {
                std::vector<std::string> all_labels;
                for (std::size_t c = 0; c < solution.num_clusters(); ++c) {
                    all_labels.push_back(cluster_label(c));
                }
                AnnotatedSubgraph annotated = cluster_subgraph(graph, solution, all_labels);
                sink.emit("clusters.graphml", [&](const fs::path& p) {
                    write_graphml(annotated.graph, p, &meta, &annotated.node_clusters);
                });
            }
            return 0;
        });
    }

    // --- manifest ------------------------------------------------------------
    stage("manifest", [&] {
        sink.emit("manifest.json", [&](const fs::path& p) {
            // the manifest itself is not in its artifact list
            manifest["artifacts"] = sink.names();
            std::ofstream out(p);
            out << manifest.dump(2) << '\n';
            if (!out) throw IoError("write failed: " + p.string());
        });
        return 0;
    });
}

namespace {

std::string strip(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::size_t to_count(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        auto n = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return n;
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + ": not a count: " + value);
    }
}

double to_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + ": not a number: " + value);
    }
}

bool to_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ValidationError("config key " + key + ": not a boolean: " + value);
}

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    PipelineConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = strip(line);
        if (text.empty() || text.front() == '#') continue;
        std::size_t eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected key=value");
        }
        std::string key = strip(text.substr(0, eq));
        std::string value = strip(text.substr(eq + 1));

        if (key == "memberships") {
            config.memberships = value;
        } else if (key == "metadata") {
            config.metadata = value;
        } else if (key == "out") {
            config.out_dir = value;
        } else if (key == "format") {
            auto f = format_from_name(value);
            if (!f) throw ValidationError("config key format: unknown format: " + value);
            config.format = *f;
        } else if (key == "min-list-size") {
            config.min_list_size = to_count(key, value);
        } else if (key == "max-list-size") {
            config.max_list_size = to_count(key, value);
        } else if (key == "min-movie-lists") {
            config.min_movie_lists = to_count(key, value);
        } else if (key == "tau") {
            config.tau = to_real(key, value);
        } else if (key == "runs") {
            config.runs = static_cast<std::uint32_t>(to_count(key, value));
        } else if (key == "fraction") {
            config.fraction = to_real(key, value);
        } else if (key == "seed") {
            config.seed = to_count(key, value);
        } else if (key == "min-cluster-size") {
            config.min_cluster_size = to_count(key, value);
        } else if (key == "enrich-threshold") {
            config.enrich_threshold = to_real(key, value);
        } else if (key == "workers") {
            config.workers = static_cast<unsigned>(to_count(key, value));
        } else if (key == "top-k") {
            config.top_k = to_count(key, value);
        } else if (key == "stats-only") {
            config.stats_only = to_flag(key, value);
        } else if (key == "keep-isolated") {
            config.keep_isolated = to_flag(key, value);
        } else if (key == "full-universe") {
            config.full_universe = to_flag(key, value);
        } else if (key == "cosample-normalization") {
            config.cosample_normalization = to_flag(key, value);
        } else {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": unknown config key: " + key);
        }
    }
    return config;
}

}  // namespace colist
