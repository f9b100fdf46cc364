// colist: mine latent item clusters from user-curated lists.
//
// Subcommands mirror the pipeline stages and compose over each other's
// on-disk artifacts; `colist pipeline` runs them all in one process.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
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
#include "colist/pipeline.hpp"
#include "colist/rng.hpp"

namespace fs = std::filesystem;
using namespace colist;

namespace {

Format parse_format(const std::string& name) {
    auto f = format_from_name(name);
    if (!f) throw ValidationError("unknown format: " + name);
    return *f;
}

void add_ingest_command(CLI::App& app) {
    auto cmd = app.add_subcommand("ingest",
                                  "Parse a membership file and apply the list/movie filters");
    auto memberships = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("tsv");
    auto min_list = std::make_shared<std::size_t>(5);
    auto max_list = std::make_shared<std::size_t>(100);
    auto min_movie = std::make_shared<std::size_t>(5);
    cmd->add_option("--memberships", *memberships, "membership file (list, user, movie)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "filtered membership file to write")->required();
    cmd->add_option("--format", *format, "file format")
        ->check(CLI::IsMember({"tsv", "jsonl"}))
        ->capture_default_str();
    cmd->add_option("--min-list-size", *min_list, "drop lists with fewer movies")
        ->capture_default_str();
    cmd->add_option("--max-list-size", *max_list, "drop lists with more movies")
        ->capture_default_str();
    cmd->add_option("--min-movie-lists", *min_movie, "drop movies on fewer lists")
        ->capture_default_str();
    cmd->callback([=] {
        Format f = parse_format(*format);
        MembershipTable table = parse_memberships(*memberships, f);
        std::cout << "ingested " << table.num_memberships() << " memberships ("
                  << table.num_lists() << " lists, " << table.num_movies() << " movies)\n";
        table = filter_movies(filter_lists(table, *min_list, *max_list), *min_movie);
        write_memberships(table, *out, f);
        std::cout << "filtered to " << table.num_memberships() << " memberships ("
                  << table.num_lists() << " lists, " << table.num_movies() << " movies) -> "
                  << *out << '\n';
    });
}

void add_stats_command(CLI::App& app) {
    auto cmd = app.add_subcommand("stats",
                                  "Characterize a membership file (list counts, top movies, "
                                  "per-genre means)");
    auto memberships = std::make_shared<std::string>();
    auto metadata = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("tsv");
    auto top_k = std::make_shared<std::size_t>(20);
    cmd->add_option("--memberships", *memberships, "membership file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--metadata", *metadata, "metadata file (ratings, genres)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "output directory")->required();
    cmd->add_option("--format", *format, "file format")
        ->check(CLI::IsMember({"tsv", "jsonl"}))
        ->capture_default_str();
    cmd->add_option("--top-k", *top_k, "rows in the top-listed ranking")->capture_default_str();
    cmd->callback([=] {
        Format f = parse_format(*format);
        MembershipTable table = parse_memberships(*memberships, f);
        MetadataTable meta;
        if (!metadata->empty()) meta = parse_metadata(*metadata, f);

        fs::create_directories(*out);
        auto counts = list_counts(table);
        write_movie_counts_csv(counts, meta, fs::path(*out) / "movie_counts.csv");
        auto top = top_listed(counts, meta, *top_k);
        write_top_listed_csv(top, fs::path(*out) / "top_listed.csv");
        auto genres = genre_aggregates(counts, meta);
        write_genre_means_csv(genres, fs::path(*out) / "genre_means.csv");

        std::cout << table.num_movies() << " movies across " << table.num_lists()
                  << " lists (" << table.num_memberships() << " memberships)\n";
        for (std::size_t i = 0; i < top.size() && i < 5; ++i) {
            std::cout << "  #" << i + 1 << "  " << top[i].movie_id << "  " << top[i].lists
                      << " lists\n";
        }
        std::vector<double> mean_lists, mean_rating;
        for (const auto& [genre, agg] : genres) {
            if (!agg.mean_rating) continue;
            mean_lists.push_back(agg.mean_lists);
            mean_rating.push_back(*agg.mean_rating);
        }
        try {
            std::cout << "genre mean-lists vs mean-rating correlation: "
                      << pearson(mean_lists, mean_rating) << '\n';
        } catch (const ContractError&) {
            // not enough rated genres for a correlation
        }
        std::cout << "wrote movie_counts.csv, top_listed.csv, genre_means.csv -> " << *out
                  << '\n';
    });
}

void add_graph_command(CLI::App& app) {
    auto cmd = app.add_subcommand(
        "graph", "Build the co-listed graph from filtered memberships, normalize, threshold");
    auto memberships = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("tsv");
    auto tau = std::make_shared<double>(0.1);
    auto keep_isolated = std::make_shared<bool>(false);
    cmd->add_option("--memberships", *memberships, "filtered membership file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "output directory")->required();
    cmd->add_option("--format", *format, "file format")
        ->check(CLI::IsMember({"tsv", "jsonl"}))
        ->capture_default_str();
    cmd->add_option("--tau", *tau, "minimum normalized weight kept (inclusive)")
        ->capture_default_str();
    cmd->add_flag("--keep-isolated", *keep_isolated,
                  "keep nodes isolated by the threshold in the graph");
    cmd->callback([=] {
        MembershipTable table = parse_memberships(*memberships, parse_format(*format));
        fs::create_directories(*out);
        CoListGraph raw = build_raw_graph(table);
        write_edge_list(raw, fs::path(*out) / "raw_graph.edges");
        CoListGraph normalized = normalize_graph(raw, table);
        write_edge_list(normalized, fs::path(*out) / "normalized_graph.edges");
        CoListGraph graph =
            quantize_weights(threshold_graph(normalized, *tau, !*keep_isolated));
        write_edge_list(graph, fs::path(*out) / "graph.edges");
        std::cout << "raw graph: " << raw.num_nodes() << " nodes, " << raw.num_edges()
                  << " edges\n";
        std::cout << "thresholded at " << *tau << ": " << graph.num_nodes() << " nodes, "
                  << graph.num_edges() << " edges -> " << *out << "/graph.edges\n";
    });
}

void add_cluster_command(CLI::App& app) {
    auto cmd = app.add_subcommand("cluster", "One base-clusterer run over a graph");
    auto graph_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(42);
    auto weight_kind = std::make_shared<std::string>();
    cmd->add_option("--graph", *graph_path, "edge-list file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "clustering file to write (one cluster per line)")
        ->required();
    cmd->add_option("--seed", *seed, "random seed")->capture_default_str();
    cmd->add_option("--weight-kind", *weight_kind,
                    "weight kind for edge lists without a header")
        ->check(CLI::IsMember({"raw_count", "normalized"}));
    cmd->callback([=] {
        std::optional<WeightKind> kind;
        if (*weight_kind == "raw_count") kind = WeightKind::raw_count;
        if (*weight_kind == "normalized") kind = WeightKind::normalized;
        CoListGraph g = read_edge_list(*graph_path, kind);
        ClusterSolution solution = LfmClusterer().cluster(g, *seed);
        save_clustering(solution, *out);
        std::cout << solution.num_clusters() << " clusters covering "
                  << solution.covered_nodes().size() << " of " << g.num_nodes() << " nodes ("
                  << solution.multi_labeled_count() << " multi-labeled) -> " << *out << '\n';
    });
}

void add_consensus_command(CLI::App& app) {
    auto cmd = app.add_subcommand(
        "consensus", "Ensemble consensus clustering: subsampled runs, Jaccard consensus "
                     "matrix, final clusters");
    auto graph_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto runs = std::make_shared<std::uint32_t>(100);
    auto fraction = std::make_shared<double>(0.8);
    auto seed = std::make_shared<std::uint64_t>(42);
    auto workers = std::make_shared<unsigned>(0);
    auto min_cluster = std::make_shared<std::size_t>(3);
    auto cosample = std::make_shared<bool>(false);
    cmd->add_option("--graph", *graph_path, "edge-list file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "output directory")->required();
    cmd->add_option("--runs", *runs, "ensemble size")->capture_default_str();
    cmd->add_option("--fraction", *fraction, "node fraction sampled per run")
        ->capture_default_str();
    cmd->add_option("--seed", *seed, "master seed")->capture_default_str();
    cmd->add_option("--workers", *workers, "worker threads (0 = available parallelism)")
        ->capture_default_str();
    cmd->add_option("--min-cluster-size", *min_cluster, "discard smaller final clusters")
        ->capture_default_str();
    cmd->add_flag("--cosample-normalization", *cosample,
                  "normalize entries by co-sampling counts instead of the run count");
    cmd->callback([=] {
        CoListGraph g = read_edge_list(*graph_path);
        LfmClusterer base;
        ConsensusOptions options;
        options.runs = *runs;
        options.fraction = *fraction;
        options.master_seed = *seed;
        options.workers = *workers;
        options.normalize_by_cosample = *cosample;
        fs::create_directories(*out);
        ConsensusMatrix matrix = build_consensus(g, base, options).matrix;
        write_consensus_matrix(matrix, fs::path(*out) / "consensus_matrix.tsv");
        ClusterSolution solution =
            final_clusters(matrix, base, derive_seed(*seed, kFinalSeedStream), *min_cluster);
        save_clustering(solution, fs::path(*out) / "clusters.txt");
        write_cluster_report(solution, fs::path(*out) / "clusters_report.json");
        std::cout << *runs << " runs over " << g.num_nodes() << " nodes: "
                  << matrix.entries.size() << " consensus entries\n";
        std::cout << solution.num_clusters() << " final clusters (>= " << *min_cluster
                  << " members) covering " << solution.covered_nodes().size() << " nodes, "
                  << solution.multi_labeled_count() << " multi-labeled -> " << *out << '\n';
    });
}

void add_enrich_command(CLI::App& app) {
    auto cmd = app.add_subcommand(
        "enrich", "Score clusters against metadata: corrected enrichment, coverage curves, "
                  "summaries");
    auto clusters_path = std::make_shared<std::string>();
    auto metadata = std::make_shared<std::string>();
    auto graph_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("tsv");
    auto threshold = std::make_shared<double>(0.8);
    auto full_universe = std::make_shared<bool>(false);
    cmd->add_option("--clusters", *clusters_path, "clustering file (one cluster per line)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--metadata", *metadata, "metadata file")
        ->required()
        ->check(CLI::ExistingFile);
    auto graph_opt = cmd->add_option("--graph", *graph_path,
                                     "graph whose nodes form the enrichment universe")
                         ->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "output directory")->required();
    cmd->add_option("--format", *format, "metadata file format")
        ->check(CLI::IsMember({"tsv", "jsonl"}))
        ->capture_default_str();
    cmd->add_option("--enrich-threshold", *threshold, "summary/curve enrichment threshold")
        ->capture_default_str();
    cmd->add_flag("--full-universe", *full_universe,
                  "use every metadata movie as the null-model universe")
        ->excludes(graph_opt);
    cmd->callback([=] {
        MetadataTable meta = parse_metadata(*metadata, parse_format(*format));
        std::optional<CoListGraph> g;
        if (!graph_path->empty()) g = read_edge_list(*graph_path);
        if (!g && !*full_universe) {
            throw ValidationError("need --graph or --full-universe for the universe");
        }
        ClusterSolution solution = load_clustering(*clusters_path, g ? &*g : nullptr);
        std::vector<std::string> universe = g ? g->node_ids() : meta.movie_ids();

        EnrichmentContext ctx(meta, universe);
        fs::create_directories(*out);
        EnrichmentReport report = build_enrichment_report(solution, ctx);
        write_enrichment_csv(report, fs::path(*out) / "enrichment.csv");
        if (!solution.empty()) {
            for (auto a : kAttributes) {
                write_curve_csv(coverage_curve(solution, ctx, a),
                                fs::path(*out) /
                                    (std::string("coverage_") + std::string(attribute_name(a)) +
                                     ".csv"));
            }
            write_multi_curve_csv(multi_attribute_curve(solution, ctx, *threshold),
                                  fs::path(*out) / "multi_attribute.csv");
        }

        std::ofstream summaries(fs::path(*out) / "summaries.tsv");
        if (!summaries) throw IoError("cannot open summaries.tsv for writing");
        summaries << "cluster_id\tsize\tsummary\n";
        std::size_t described = 0;
        for (std::size_t c = 0; c < solution.num_clusters(); ++c) {
            std::string text = summarize_cluster(solution.clusters[c], ctx, *threshold);
            if (!text.empty()) ++described;
            summaries << cluster_label(c) << '\t' << solution.clusters[c].size() << '\t' << text
                      << '\n';
        }
        std::cout << described << " of " << solution.num_clusters()
                  << " clusters earned a summary at threshold " << *threshold << " -> " << *out
                  << '\n';
    });
}

void add_export_command(CLI::App& app) {
    auto cmd = app.add_subcommand(
        "export", "Export the annotated subgraph induced by selected clusters");
    auto graph_path = std::make_shared<std::string>();
    auto clusters_path = std::make_shared<std::string>();
    auto metadata = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("tsv");
    auto select = std::make_shared<std::vector<std::string>>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--graph", *graph_path, "edge-list file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--clusters", *clusters_path, "clustering file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--metadata", *metadata, "metadata file for node attributes")
        ->check(CLI::ExistingFile);
    cmd->add_option("--format", *format, "metadata file format")
        ->check(CLI::IsMember({"tsv", "jsonl"}))
        ->capture_default_str();
    cmd->add_option("--select", *select, "cluster ids to export (e.g. c0001)")->required();
    cmd->add_option("--out", *out, "output file (.graphml or .edges)")->required();
    cmd->callback([=] {
        CoListGraph g = read_edge_list(*graph_path);
        ClusterSolution solution = load_clustering(*clusters_path, &g);
        AnnotatedSubgraph sub = cluster_subgraph(g, solution, *select);
        fs::path out_path(*out);
        if (out_path.extension() == ".graphml") {
            MetadataTable meta;
            if (!metadata->empty()) meta = parse_metadata(*metadata, parse_format(*format));
            write_graphml(sub.graph, out_path, metadata->empty() ? nullptr : &meta,
                          &sub.node_clusters);
        } else {
            write_edge_list(sub.graph, out_path);
        }
        std::cout << "subgraph: " << sub.graph.num_nodes() << " nodes, "
                  << sub.graph.num_edges() << " edges, " << sub.multi_labeled_count()
                  << " multi-labeled -> " << *out << '\n';
    });
}

void add_pipeline_command(CLI::App& app) {
    auto cmd = app.add_subcommand("pipeline", "Run every stage end-to-end with a manifest");
    auto config = std::make_shared<PipelineConfig>();
    auto memberships = std::make_shared<std::string>();
    auto metadata = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("tsv");

    auto config_path = std::make_shared<std::string>();
    cmd->add_option("--config", *config_path, "flat key=value config file; flags override")
        ->check(CLI::ExistingFile);
    cmd->add_option("--memberships", *memberships, "membership file (flag or config)");
    cmd->add_option("--metadata", *metadata, "metadata file");
    cmd->add_option("--out", *out, "output directory (flag or config)");
    cmd->add_option("--format", *format, "file format")
        ->check(CLI::IsMember({"tsv", "jsonl"}))
        ->capture_default_str();
    cmd->add_option("--min-list-size", config->min_list_size, "drop lists with fewer movies")
        ->capture_default_str();
    cmd->add_option("--max-list-size", config->max_list_size, "drop lists with more movies")
        ->capture_default_str();
    cmd->add_option("--min-movie-lists", config->min_movie_lists, "drop movies on fewer lists")
        ->capture_default_str();
    cmd->add_option("--tau", config->tau, "minimum normalized weight kept")
        ->capture_default_str();
    cmd->add_option("--runs", config->runs, "ensemble size")->capture_default_str();
    cmd->add_option("--fraction", config->fraction, "node fraction sampled per run")
        ->capture_default_str();
    cmd->add_option("--seed", config->seed, "master seed")->capture_default_str();
    cmd->add_option("--min-cluster-size", config->min_cluster_size,
                    "discard smaller final clusters")
        ->capture_default_str();
    cmd->add_option("--enrich-threshold", config->enrich_threshold,
                    "summary/curve enrichment threshold")
        ->capture_default_str();
    cmd->add_option("--workers", config->workers,
                    "consensus worker threads (0 = available parallelism)")
        ->capture_default_str();
    cmd->add_option("--top-k", config->top_k, "rows in the top-listed ranking")
        ->capture_default_str();
    cmd->add_flag("--stats-only", config->stats_only,
                  "only the data characterization, no clustering");
    cmd->add_flag("--keep-isolated", config->keep_isolated,
                  "keep nodes isolated by the threshold");
    cmd->add_flag("--full-universe", config->full_universe,
                  "enrichment null model over every metadata movie");
    cmd->add_flag("--cosample-normalization", config->cosample_normalization,
                  "normalize consensus entries by co-sampling counts");
    cmd->callback([=] {
        // Flag values land in *config during parsing; a config file supplies
        // the base and every flag actually given overrides its key.
        PipelineConfig merged = *config;
        if (!config_path->empty()) {
            merged = load_pipeline_config(*config_path);
            auto given = [&](const char* flag) { return cmd->count(flag) > 0; };
            if (given("--min-list-size")) merged.min_list_size = config->min_list_size;
            if (given("--max-list-size")) merged.max_list_size = config->max_list_size;
            if (given("--min-movie-lists")) merged.min_movie_lists = config->min_movie_lists;
            if (given("--tau")) merged.tau = config->tau;
            if (given("--runs")) merged.runs = config->runs;
            if (given("--fraction")) merged.fraction = config->fraction;
            if (given("--seed")) merged.seed = config->seed;
            if (given("--min-cluster-size")) merged.min_cluster_size = config->min_cluster_size;
            if (given("--enrich-threshold")) merged.enrich_threshold = config->enrich_threshold;
            if (given("--workers")) merged.workers = config->workers;
            if (given("--top-k")) merged.top_k = config->top_k;
            if (given("--stats-only")) merged.stats_only = config->stats_only;
            if (given("--keep-isolated")) merged.keep_isolated = config->keep_isolated;
            if (given("--full-universe")) merged.full_universe = config->full_universe;
            if (given("--cosample-normalization")) {
                merged.cosample_normalization = config->cosample_normalization;
            }
        }
        if (cmd->count("--memberships") > 0) merged.memberships = *memberships;
        if (cmd->count("--metadata") > 0) merged.metadata = *metadata;
        if (cmd->count("--out") > 0) merged.out_dir = *out;
        if (cmd->count("--format") > 0) merged.format = parse_format(*format);
        if (merged.memberships.empty()) throw CLI::RequiredError("--memberships (flag or config)");
        if (merged.out_dir.empty()) throw CLI::RequiredError("--out (flag or config)");
        run_pipeline(merged);

        fs::path out_dir = merged.out_dir;
        std::ifstream manifest_in(out_dir / "manifest.json");
        nlohmann::json manifest = nlohmann::json::parse(manifest_in);
        const auto& stats = manifest.at("stats");
        std::cout << "pipeline complete -> " << out_dir.string() << '\n';
        std::cout << "  " << stats.at("movies").get<std::size_t>() << " movies on "
                  << stats.at("lists").get<std::size_t>() << " lists";
        if (stats.contains("graph_nodes")) {
            std::cout << "; graph " << stats.at("graph_nodes").get<std::size_t>() << " nodes / "
                      << stats.at("graph_edges").get<std::size_t>() << " edges";
        }
        if (stats.contains("clusters")) {
            std::cout << "; " << stats.at("clusters").get<std::size_t>() << " clusters ("
                      << stats.at("multi_labeled").get<std::size_t>() << " movies multi-labeled)";
        }
        std::cout << "\n  manifest: " << (out_dir / "manifest.json").string() << '\n';
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mine latent item clusters from user-curated membership lists"};
    app.require_subcommand(1);

    add_ingest_command(app);
    add_stats_command(app);
    add_graph_command(app);
    add_cluster_command(app);
    add_consensus_command(app);
    add_enrich_command(app);
    add_export_command(app);
    add_pipeline_command(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const PipelineError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
