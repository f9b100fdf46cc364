#pragma once

// Shared helpers for the test suites: scratch directories, tiny file and
// table builders, and the brute-force oracles the fast paths are checked
// against.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <unistd.h>

#include "colist/graph.hpp"
#include "colist/membership.hpp"
#include "colist/metadata.hpp"

namespace tu {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(COLIST_DATA_DIR); }

#ifdef COLIST_CLI_PATH
inline std::string cli_path() { return COLIST_CLI_PATH; }
#endif

/// Self-deleting scratch directory.
class TempDir {
  public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = fs::temp_directory_path() /
                ("colist_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(std::string_view name) const { return path_ / name; }

  private:
    fs::path path_;
};

inline void write_file(const fs::path& p, std::string_view content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Description of lists by id -> member movie ids; order preserved.
using ListSpec = std::vector<std::pair<std::string, std::vector<std::string>>>;

inline colist::MembershipTable lists_table(const ListSpec& lists) {
    std::vector<colist::MembershipRow> rows;
    for (const auto& [list_id, movies] : lists) {
        for (const auto& m : movies) rows.push_back({list_id, "u1", m});
    }
    return colist::MembershipTable::from_rows(rows);
}

/// Finalized graph from explicit edges; node set may exceed the edges.
inline colist::CoListGraph make_graph(
    std::vector<std::string> ids,
    const std::vector<std::tuple<std::string, std::string, double>>& edges,
    colist::WeightKind kind = colist::WeightKind::normalized) {
    colist::CoListGraph g(std::move(ids), kind);
    for (const auto& [a, b, w] : edges) g.add_edge(a, b, w);
    g.finalize();
    return g;
}

/// Uniform-weight clique edges over the given nodes.
inline std::vector<std::tuple<std::string, std::string, double>> clique_edges(
    const std::vector<std::string>& nodes, double w) {
    std::vector<std::tuple<std::string, std::string, double>> edges;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            edges.emplace_back(nodes[i], nodes[j], w);
    return edges;
}

/// Brute-force shared-list counts: for every movie pair, scan every list.
inline std::map<std::pair<std::string, std::string>, std::size_t> shared_counts(
    const ListSpec& lists) {
    std::set<std::string> movies;
    for (const auto& [_, members] : lists)
        movies.insert(members.begin(), members.end());
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (const auto& a : movies) {
        for (const auto& b : movies) {
            if (!(a < b)) continue;
            std::size_t n = 0;
            for (const auto& [_, members] : lists) {
                std::set<std::string> s(members.begin(), members.end());
                if (s.count(a) && s.count(b)) ++n;
            }
            if (n > 0) counts[{a, b}] = n;
        }
    }
    return counts;
}

/// Distinct-list count per movie, brute force.
inline std::map<std::string, std::size_t> list_set_sizes(const ListSpec& lists) {
    std::map<std::string, std::set<std::string>> sets;
    for (const auto& [list_id, members] : lists)
        for (const auto& m : members) sets[m].insert(list_id);
    std::map<std::string, std::size_t> sizes;
    for (const auto& [m, s] : sets) sizes[m] = s.size();
    return sizes;
}

/// Metadata builder keyed by attribute name for readable test fixtures.
struct MetaSpec {
    std::string movie_id;
    std::string type;
    std::string decade;
    std::vector<std::string> genres;
    std::vector<std::string> countries;
    std::vector<std::string> languages;
    std::vector<std::string> directors;
    std::vector<std::string> actors;
    std::optional<double> rating;
};

inline colist::MetadataTable meta_table(const std::vector<MetaSpec>& specs) {
    std::vector<std::pair<std::string, colist::MovieMetadata>> entries;
    for (const auto& s : specs) {
        colist::MovieMetadata m;
        auto set = [&](colist::Attribute a, std::vector<std::string> values) {
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            m.attrs[static_cast<std::size_t>(a)] = std::move(values);
        };
        if (!s.type.empty()) set(colist::Attribute::type, {s.type});
        if (!s.decade.empty()) set(colist::Attribute::decade, {s.decade});
        set(colist::Attribute::genres, s.genres);
        set(colist::Attribute::countries, s.countries);
        set(colist::Attribute::languages, s.languages);
        set(colist::Attribute::directors, s.directors);
        set(colist::Attribute::actors, s.actors);
        m.rating = s.rating;
        entries.emplace_back(s.movie_id, std::move(m));
    }
    return colist::MetadataTable::from_entries(std::move(entries));
}

}  // namespace tu
