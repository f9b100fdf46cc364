#include <doctest.h>

#include <algorithm>
#include <set>

#include "colist/cluster.hpp"
#include "colist/errors.hpp"
#include "colist/lfm.hpp"
#include "colist/rng.hpp"
#include "testutil.hpp"

using namespace colist;

namespace {

std::set<std::set<std::string>> as_sets(const ClusterSolution& s) {
    std::set<std::set<std::string>> out;
    for (const auto& c : s.clusters) out.insert({c.begin(), c.end()});
    return out;
}

void check_well_formed(const ClusterSolution& s, const CoListGraph& g) {
    std::set<std::vector<std::string>> seen;
    for (const auto& c : s.clusters) {
        CHECK_FALSE(c.empty());
        CHECK(std::is_sorted(c.begin(), c.end()));
        CHECK(std::adjacent_find(c.begin(), c.end()) == c.end());
        CHECK(seen.insert(c).second);  // no duplicate member sets
        for (const auto& m : c) CHECK(g.has_node(m));
    }
}

}  // namespace

TEST_SUITE("cluster solutions") {
    TEST_CASE("canonical form sorts, dedups, and drops empties") {
        auto s = canonical_solution({{"B", "A", "B"}, {}, {"A", "B"}, {"C"}});
        REQUIRE(s.num_clusters() == 2);
        CHECK(s.clusters[0] == std::vector<std::string>{"A", "B"});
        CHECK(s.clusters[1] == std::vector<std::string>{"C"});
    }

    TEST_CASE("labels are positional and 1-based") {
        CHECK(cluster_label(0) == "c0001");
        CHECK(cluster_label(9) == "c0010");
        CHECK(cluster_label(142) == "c0143");
    }

    TEST_CASE("covered nodes and multi-label counts") {
        ClusterSolution s{{{"A", "B"}, {"B", "C"}, {"D"}}};
        CHECK(s.covered_nodes() == std::vector<std::string>{"A", "B", "C", "D"});
        CHECK(s.multi_labeled_count() == 1);
        auto labels = s.node_labels();
        CHECK(labels.at("B") == std::vector<std::uint32_t>{0, 1});
        CHECK(labels.at("D") == std::vector<std::uint32_t>{2});
        CHECK(labels.count("Z") == 0);
    }
}

TEST_SUITE("clustering files") {
    TEST_CASE("one cluster per line, overlap allowed") {
        tu::TempDir dir;
        tu::write_file(dir / "c.txt", "A B C\nC D E\n");
        auto s = load_clustering(dir / "c.txt");
        REQUIRE(s.num_clusters() == 2);
        CHECK(as_sets(s) ==
              std::set<std::set<std::string>>{{"A", "B", "C"}, {"C", "D", "E"}});
        CHECK(s.multi_labeled_count() == 1);  // C carries both labels
    }

    TEST_CASE("empty file loads as an empty solution") {
        tu::TempDir dir;
        tu::write_file(dir / "c.txt", "");
        CHECK(load_clustering(dir / "c.txt").empty());
    }

    TEST_CASE("repeated ids on a line collapse to a set") {
        tu::TempDir dir;
        tu::write_file(dir / "c.txt", "A A\n");
        auto s = load_clustering(dir / "c.txt");
        REQUIRE(s.num_clusters() == 1);
        CHECK(s.clusters[0] == std::vector<std::string>{"A"});
    }

    TEST_CASE("members are validated against a graph when given") {
        tu::TempDir dir;
        tu::write_file(dir / "c.txt", "A B\nZ\n");
        auto g = tu::make_graph({"A", "B"}, {{"A", "B", 0.5}});
        CHECK_THROWS_AS(load_clustering(dir / "c.txt", &g), ValidationError);
        CHECK_NOTHROW(load_clustering(dir / "c.txt"));
    }

    TEST_CASE("duplicate clusters collapse on load") {
        tu::TempDir dir;
        tu::write_file(dir / "c.txt", "A B\nB A\nC\n");
        auto s = load_clustering(dir / "c.txt");
        CHECK(s.num_clusters() == 2);
    }

    TEST_CASE("save and load round trip") {
        tu::TempDir dir;
        ClusterSolution s{{{"A", "B"}, {"B", "C", "D"}}};
        save_clustering(s, dir / "c.txt");
        CHECK(load_clustering(dir / "c.txt") == s);
    }

    TEST_CASE("report counts clusters, coverage, and overlap") {
        tu::TempDir dir;
        ClusterSolution s{{{"A", "B"}, {"B", "C", "D"}}};
        write_cluster_report(s, dir / "report.json");
        auto json = tu::read_file(dir / "report.json");
        CHECK(json.find("\"num_clusters\": 2") != std::string::npos);
        CHECK(json.find("\"covered_nodes\": 4") != std::string::npos);
        CHECK(json.find("\"multi_labeled\": 1") != std::string::npos);
        CHECK(json.find("\"c0001\"") != std::string::npos);
    }
}

TEST_SUITE("lfm clustering") {
    TEST_CASE("a uniform clique is one cluster") {
        std::vector<std::string> nodes{"A", "B", "C", "D", "E"};
        auto g = tu::make_graph(nodes, tu::clique_edges(nodes, 1.0));
        auto s = LfmClusterer().cluster(g, 42);
        REQUIRE(s.num_clusters() == 1);
        CHECK(s.clusters[0] == nodes);
    }

    TEST_CASE("two cliques over a weak bridge separate") {
        std::vector<std::string> left{"a1", "a2", "a3", "a4", "a5", "a6"};
        std::vector<std::string> right{"b1", "b2", "b3", "b4", "b5", "b6"};
        auto edges = tu::clique_edges(left, 1.0);
        auto more = tu::clique_edges(right, 1.0);
        edges.insert(edges.end(), more.begin(), more.end());
        edges.emplace_back("a1", "b1", 0.1);
        std::vector<std::string> all = left;
        all.insert(all.end(), right.begin(), right.end());
        auto g = tu::make_graph(all, edges);

        for (std::uint64_t seed : {0, 7, 42, 1234}) {
            auto s = LfmClusterer().cluster(g, seed);
            CHECK(as_sets(s) == std::set<std::set<std::string>>{
                                    {left.begin(), left.end()},
                                    {right.begin(), right.end()}});
        }
    }

    TEST_CASE("a node shared by two cliques lands in both clusters") {
        std::vector<std::string> left{"a1", "a2", "a3", "a4", "s"};
        std::vector<std::string> right{"b1", "b2", "b3", "b4", "s"};
        auto edges = tu::clique_edges(left, 1.0);
        auto more = tu::clique_edges(right, 1.0);
        edges.insert(edges.end(), more.begin(), more.end());
        auto g = tu::make_graph({"a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4", "s"}, edges);

        auto s = LfmClusterer().cluster(g, 42);
        REQUIRE(s.num_clusters() == 2);
        auto labels = s.node_labels();
        CHECK(labels.at("s").size() == 2);
        CHECK(as_sets(s) == std::set<std::set<std::string>>{
                                {left.begin(), left.end()},
                                {right.begin(), right.end()}});
    }

    TEST_CASE("empty or raw-count graphs are contract errors") {
        CHECK_THROWS_AS(LfmClusterer().cluster(CoListGraph{}, 1), ContractError);
        auto raw = build_raw_graph(tu::lists_table({{"L1", {"A", "B"}}}));
        CHECK_THROWS_AS(LfmClusterer().cluster(raw, 1), ContractError);
    }

    TEST_CASE("same seed reproduces the solution exactly") {
        Rng rng(314);
        std::vector<std::string> ids;
        for (int i = 0; i < 30; ++i) ids.push_back("m" + std::to_string(i));
        std::vector<std::tuple<std::string, std::string, double>> edges;
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j)
                if (rng.unit() < 0.2)
                    edges.emplace_back(ids[i], ids[j], 0.1 + 0.9 * rng.unit());
        auto g = tu::make_graph(ids, edges);
        auto a = LfmClusterer().cluster(g, 99);
        auto b = LfmClusterer().cluster(g, 99);
        CHECK(a == b);
    }

    TEST_CASE("solutions are well-formed on random graphs") {
        Rng rng(2718);
        for (int trial = 0; trial < 8; ++trial) {
            std::vector<std::string> ids;
            std::size_t n = 10 + rng.bounded(30);
            for (std::size_t i = 0; i < n; ++i) ids.push_back("m" + std::to_string(i));
            std::vector<std::tuple<std::string, std::string, double>> edges;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (rng.unit() < 0.15)
                        edges.emplace_back(ids[i], ids[j], 0.05 + 0.95 * rng.unit());
            auto g = tu::make_graph(ids, edges);
            auto s = LfmClusterer().cluster(g, trial);
            check_well_formed(s, g);
        }
    }

    TEST_CASE("heavily overlapping communities merge") {
        // Two cliques sharing 4 of 5 nodes: Jaccard of the grown communities
        // is 4/6 < 0.8 if they stay apart, but growth itself absorbs the
        // shared majority, so the solution collapses to one cluster.
        std::vector<std::string> nodes{"A", "B", "C", "D", "E", "F"};
        auto edges = tu::clique_edges({"A", "B", "C", "D", "E"}, 1.0);
        auto more = tu::clique_edges({"B", "C", "D", "E", "F"}, 1.0);
        for (auto& e : more) {
            auto dup = std::find(edges.begin(), edges.end(), e);
            if (dup == edges.end()) edges.push_back(e);
        }
        auto g = tu::make_graph(nodes, edges);
        auto s = LfmClusterer().cluster(g, 5);
        CHECK(s.num_clusters() == 1);
    }
}
