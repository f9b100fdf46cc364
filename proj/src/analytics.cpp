#include "colist/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "colist/errors.hpp"

namespace colist {

std::unordered_map<std::string, std::size_t> list_counts(const MembershipTable& table) {
    std::unordered_map<std::string, std::size_t> counts;
    counts.reserve(table.num_movies());
    for (std::uint32_t m = 0; m < table.num_movies(); ++m) {
        counts.emplace(table.movies()[m], table.movie_lists(m).size());
    }
    return counts;
}

std::vector<TopListedRow> top_listed(const std::unordered_map<std::string, std::size_t>& counts,
                                     const MetadataTable& meta, std::size_t k) {
    if (k < 1) throw ContractError("top_listed needs k >= 1");
    std::vector<TopListedRow> rows;
    rows.reserve(counts.size());
    for (const auto& [movie_id, lists] : counts) {
        const MovieMetadata* record = meta.find(movie_id);
        rows.push_back(TopListedRow{movie_id, lists,
                                    record ? record->rating : std::nullopt});
    }
    std::sort(rows.begin(), rows.end(), [](const TopListedRow& a, const TopListedRow& b) {
        if (a.lists != b.lists) return a.lists > b.lists;
        return a.movie_id < b.movie_id;
    });
    if (rows.size() > k) rows.resize(k);
    return rows;
}

std::map<std::string, GenreAggregate> genre_aggregates(
    const std::unordered_map<std::string, std::size_t>& counts, const MetadataTable& meta) {
    struct Sums {
        std::size_t movies = 0;
        double lists = 0.0;
        std::size_t rated = 0;
        double rating = 0.0;
    };
    std::map<std::string, Sums> sums;
    // Iterate the metadata table (sorted by id) rather than the hash map so
    // the floating-point accumulation order is reproducible.
    for (std::size_t i = 0; i < meta.size(); ++i) {
        auto it = counts.find(meta.id_at(i));
        if (it == counts.end()) continue;
        const MovieMetadata& record = meta.at(i);
        for (const auto& genre : record.values(Attribute::genres)) {
            Sums& s = sums[genre];
            ++s.movies;
            s.lists += static_cast<double>(it->second);
            if (record.rating) {
                ++s.rated;
                s.rating += *record.rating;
            }
        }
    }
    std::map<std::string, GenreAggregate> out;
    for (const auto& [genre, s] : sums) {
        GenreAggregate agg;
        agg.movie_count = s.movies;
        agg.mean_lists = s.lists / static_cast<double>(s.movies);
        if (s.rated > 0) agg.mean_rating = s.rating / static_cast<double>(s.rated);
        out.emplace(genre, agg);
    }
    return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractError("pearson: length mismatch");
    if (x.size() < 2) throw ContractError("pearson: need at least two points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw ContractError("pearson: correlation undefined for constant input");
    }
    return sxy / std::sqrt(sxx * syy);
}

std::size_t AnnotatedSubgraph::multi_labeled_count() const {
    std::size_t n = 0;
    for (const auto& [node, labels] : node_clusters) {
        if (labels.size() > 1) ++n;
    }
    return n;
}

AnnotatedSubgraph cluster_subgraph(const CoListGraph& g, const ClusterSolution& clusters,
                                   std::span<const std::string> selected) {
    if (selected.empty()) throw ContractError("no clusters selected");

    // cluster_label(i) -> i for the label lookup
    std::vector<std::size_t> picked;
    picked.reserve(selected.size());
    for (const auto& label : selected) {
        std::size_t index = clusters.num_clusters();
        for (std::size_t c = 0; c < clusters.num_clusters(); ++c) {
            if (cluster_label(c) == label) {
                index = c;
                break;
            }
        }
        if (index == clusters.num_clusters()) throw LookupError("unknown cluster id: " + label);
        picked.push_back(index);
    }
    std::sort(picked.begin(), picked.end());
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());

    AnnotatedSubgraph out;
    for (std::size_t c : picked) {
        for (const auto& node : clusters.clusters[c]) {
            if (!g.has_node(node)) {
                throw ValidationError("cluster member not in graph: " + node);
            }
            out.node_clusters[node].push_back(cluster_label(c));  // ascending c: sorted
        }
    }
    std::vector<std::string> nodes;
    nodes.reserve(out.node_clusters.size());
    for (const auto& [node, labels] : out.node_clusters) nodes.push_back(node);
    out.graph = induced_subgraph(g, nodes);
    return out;
}

namespace {

std::string rating_csv(const std::optional<double>& rating) {
    if (!rating) return "";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *rating);
    return std::string(buf, end);
}

std::string fmt6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

}  // namespace

void write_movie_counts_csv(const std::unordered_map<std::string, std::size_t>& counts,
                            const MetadataTable& meta, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    std::vector<std::string> ids;
    ids.reserve(counts.size());
    for (const auto& [movie_id, lists] : counts) ids.push_back(movie_id);
    std::sort(ids.begin(), ids.end());
    out << "movie_id,lists,rating\n";
    for (const auto& id : ids) {
        const MovieMetadata* record = meta.find(id);
        out << id << ',' << counts.at(id) << ','
            << rating_csv(record ? record->rating : std::nullopt) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_top_listed_csv(std::span<const TopListedRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "rank,movie_id,lists,rating\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << i + 1 << ',' << rows[i].movie_id << ',' << rows[i].lists << ','
            << rating_csv(rows[i].rating) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_genre_means_csv(const std::map<std::string, GenreAggregate>& aggregates,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "genre,movies,mean_lists,mean_rating\n";
    for (const auto& [genre, agg] : aggregates) {
        out << genre << ',' << agg.movie_count << ',' << fmt6(agg.mean_lists) << ','
            << (agg.mean_rating ? fmt6(*agg.mean_rating) : "") << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace colist
