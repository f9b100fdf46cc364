#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "colist/consensus.hpp"
#include "colist/errors.hpp"
#include "colist/lfm.hpp"
#include "colist/rng.hpp"
#include "testutil.hpp"

using namespace colist;

namespace {

/// Ignores the graph and always reports the same clusters.
struct FixedClusterer final : Clusterer {
    ClusterSolution fixed;
    explicit FixedClusterer(ClusterSolution s) : fixed(std::move(s)) {}
    ClusterSolution cluster(const CoListGraph&, std::uint64_t) const override { return fixed; }
    std::string name() const override { return "fixed"; }
};

struct ThrowingClusterer final : Clusterer {
    ClusterSolution cluster(const CoListGraph&, std::uint64_t) const override {
        throw std::runtime_error("boom");
    }
    std::string name() const override { return "throwing"; }
};

CoListGraph two_triangles() {
    return tu::make_graph({"A", "B", "C", "D", "E", "F"},
                          {{"A", "B", 1.0},
                           {"B", "C", 1.0},
                           {"A", "C", 1.0},
                           {"D", "E", 1.0},
                           {"E", "F", 1.0},
                           {"D", "F", 1.0}});
}

CoListGraph random_graph(Rng& rng, std::size_t n, double p) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = "m";
        id += ('0' + static_cast<char>(i / 10));
        id += ('0' + static_cast<char>(i % 10));
        ids.push_back(id);
    }
    std::vector<std::tuple<std::string, std::string, double>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.unit() < p) edges.emplace_back(ids[i], ids[j], 0.1 + 0.9 * rng.unit());
    return tu::make_graph(ids, edges);
}

}  // namespace

TEST_SUITE("consensus matrix basics") {
    TEST_CASE("keys pack order-free and reject the diagonal") {
        CHECK(ConsensusMatrix::pack(3, 7) == ConsensusMatrix::pack(7, 3));
        CHECK_THROWS_AS(ConsensusMatrix::pack(4, 4), ContractError);
        Rng rng(8);
        for (int i = 0; i < 200; ++i) {
            std::uint32_t a = static_cast<std::uint32_t>(rng.bounded(100000));
            std::uint32_t b = static_cast<std::uint32_t>(rng.bounded(100000));
            if (a == b) continue;
            auto [lo, hi] = ConsensusMatrix::unpack(ConsensusMatrix::pack(a, b));
            CHECK(lo == std::min(a, b));
            CHECK(hi == std::max(a, b));
        }
    }

    TEST_CASE("value lookups are symmetric and default to 0") {
        ConsensusMatrix m;
        m.nodes = {"A", "B", "C"};
        m.entries[ConsensusMatrix::pack(0, 2)] = 0.25;
        CHECK(m.value_at(0, 2) == 0.25);
        CHECK(m.value_at(2, 0) == 0.25);
        CHECK(m.value_at(0, 1) == 0.0);
        CHECK(m.value("A", "C") == 0.25);
        CHECK(m.value("C", "A") == 0.25);
        CHECK_THROWS_AS(m.value("A", "Z"), LookupError);
    }

    TEST_CASE("the final-clustering seed stream cannot collide with run streams") {
        CHECK(kFinalSeedStream >= (1ULL << 33));
    }
}

TEST_SUITE("node sampling") {
    TEST_CASE("fraction 1 keeps every node") {
        auto g = two_triangles();
        CHECK(sample_nodes(g, 1.0, 3) == g.node_ids());
    }

    TEST_CASE("fraction 0.8 of 10 nodes is exactly 8") {
        Rng rng(21);
        auto g = random_graph(rng, 10, 0.4);
        REQUIRE(g.num_nodes() == 10);
        for (std::uint64_t seed = 0; seed < 20; ++seed)
            CHECK(sample_nodes(g, 0.8, seed).size() == 8);
    }

    TEST_CASE("the same seed draws the same subset") {
        Rng rng(22);
        auto g = random_graph(rng, 40, 0.2);
        CHECK(sample_nodes(g, 0.5, 99) == sample_nodes(g, 0.5, 99));
    }

    TEST_CASE("samples are sorted unique subsets of the node set") {
        Rng rng(23);
        auto g = random_graph(rng, 30, 0.2);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto s = sample_nodes(g, 0.6, seed);
            CHECK(std::is_sorted(s.begin(), s.end()));
            CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
            for (const auto& id : s) CHECK(g.has_node(id));
        }
    }

    TEST_CASE("out-of-range fractions are contract errors") {
        auto g = two_triangles();
        CHECK_THROWS_AS(sample_nodes(g, 0.0, 1), ContractError);
        CHECK_THROWS_AS(sample_nodes(g, 1.5, 1), ContractError);
        CHECK_THROWS_AS(sample_nodes(g, -0.3, 1), ContractError);
    }
}

TEST_SUITE("label jaccard") {
    TEST_CASE("hand cases") {
        std::vector<std::uint32_t> c1{0};
        std::vector<std::uint32_t> c2{1};
        std::vector<std::uint32_t> c12{0, 1};
        std::vector<std::uint32_t> none{};
        CHECK(jaccard_labels(c1, c1) == 1.0);
        CHECK(jaccard_labels(c1, c2) == 0.0);
        CHECK(jaccard_labels(c1, c12) == 0.5);
        CHECK(jaccard_labels(none, none) == 0.0);
        std::vector<std::uint32_t> a{0, 1, 2};
        std::vector<std::uint32_t> b{1, 2, 3, 4};
        CHECK(jaccard_labels(a, b) == doctest::Approx(2.0 / 5.0).epsilon(1e-12));
    }
}

TEST_SUITE("run accumulation") {
    TEST_CASE("a co-clustered pair adds its full jaccard") {
        ConsensusMatrix m;
        m.nodes = {"A", "B"};
        std::vector<std::string> sampled{"A", "B"};
        accumulate_run(m, ClusterSolution{{{"A", "B"}}}, sampled);
        CHECK(m.entries.size() == 1);
        CHECK(m.value("A", "B") == 1.0);
    }

    TEST_CASE("partial label overlap adds a fraction") {
        ConsensusMatrix m;
        m.nodes = {"A", "B", "C"};
        std::vector<std::string> sampled{"A", "B", "C"};
        accumulate_run(m, ClusterSolution{{{"A", "B"}, {"B", "C"}}}, sampled);
        CHECK(m.value("A", "B") == 0.5);  // {c1} vs {c1,c2}
        CHECK(m.value("B", "C") == 0.5);
        CHECK(m.value("A", "C") == 0.0);  // disjoint labels: entry stays absent
        CHECK(m.entries.size() == 2);
    }

    TEST_CASE("accumulation sums across runs") {
        ConsensusMatrix m;
        m.nodes = {"A", "B"};
        std::vector<std::string> sampled{"A", "B"};
        accumulate_run(m, ClusterSolution{{{"A", "B"}}}, sampled);
        accumulate_run(m, ClusterSolution{{{"A", "B"}}}, sampled);
        CHECK(m.value("A", "B") == 2.0);
    }

    TEST_CASE("members outside the sampled set are contract errors") {
        ConsensusMatrix m;
        m.nodes = {"A", "B", "Z"};
        std::vector<std::string> sampled{"A", "B"};
        CHECK_THROWS_AS(accumulate_run(m, ClusterSolution{{{"A", "Z"}}}, sampled),
                        ContractError);
    }
}

TEST_SUITE("ensemble consensus") {
    TEST_CASE("one full-sample run reproduces its own pair scores") {
        auto g = two_triangles();
        ConsensusOptions opts;
        opts.runs = 1;
        opts.fraction = 1.0;
        opts.master_seed = 5;
        opts.record_runs = true;
        auto result = build_consensus(g, LfmClusterer(), opts);
        REQUIRE(result.run_records.size() == 1);

        ConsensusMatrix manual;
        manual.nodes = g.node_ids();
        accumulate_run(manual, result.run_records[0].solution,
                       result.run_records[0].sampled);
        CHECK(result.matrix.entries == manual.entries);
        CHECK(result.matrix.runs == 1);
    }

    TEST_CASE("identical runs collapse under normalization") {
        auto g = two_triangles();
        FixedClusterer base(ClusterSolution{{{"A", "B", "C"}, {"D", "E", "F"}}});
        ConsensusOptions one;
        one.runs = 1;
        one.fraction = 1.0;
        ConsensusOptions five = one;
        five.runs = 5;
        auto m1 = build_consensus(g, base, one).matrix;
        auto m5 = build_consensus(g, base, five).matrix;
        CHECK(m1.entries == m5.entries);
        for (const auto& [key, v] : m5.entries) CHECK(v == 1.0);
    }

    TEST_CASE("entries stay in [0,1], keys canonical, bounded by co-sampling") {
        Rng rng(606);
        auto g = random_graph(rng, 25, 0.25);
        ConsensusOptions opts;
        opts.runs = 12;
        opts.fraction = 0.7;
        opts.master_seed = 8;
        opts.record_runs = true;
        auto result = build_consensus(g, LfmClusterer(), opts);

        // How often was each pair sampled together?
        std::map<std::uint64_t, unsigned> cosampled;
        for (const auto& rec : result.run_records) {
            std::vector<std::uint32_t> idx;
            for (const auto& id : rec.sampled) idx.push_back(*result.matrix.index_of(id));
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (std::size_t j = i + 1; j < idx.size(); ++j)
                    ++cosampled[ConsensusMatrix::pack(idx[i], idx[j])];
        }
        for (const auto& [key, v] : result.matrix.entries) {
            auto [i, j] = ConsensusMatrix::unpack(key);
            CHECK(i < j);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            // entry * runs = raw jaccard sum <= number of co-sampled runs
            CHECK(v * opts.runs <= cosampled[key] + 1e-9);
        }
    }

    TEST_CASE("worker count never changes the result") {
        Rng rng(607);
        auto g = random_graph(rng, 30, 0.2);
        ConsensusOptions opts;
        opts.runs = 9;
        opts.fraction = 0.8;
        opts.master_seed = 17;
        auto serial = build_consensus(g, LfmClusterer(), opts).matrix;
        opts.workers = 4;
        auto pooled = build_consensus(g, LfmClusterer(), opts).matrix;
        CHECK(serial.nodes == pooled.nodes);
        CHECK(serial.entries == pooled.entries);
    }

    TEST_CASE("cosample normalization divides by co-occurrence counts") {
        auto g = two_triangles();
        FixedClusterer base(ClusterSolution{{{"A", "B", "C"}, {"D", "E", "F"}}});
        ConsensusOptions opts;
        opts.runs = 4;
        opts.fraction = 1.0;  // every pair co-sampled in every run
        opts.normalize_by_cosample = true;
        auto m = build_consensus(g, base, opts).matrix;
        for (const auto& [key, v] : m.entries) CHECK(v == 1.0);
    }

    TEST_CASE("a failing run aborts the build with its index") {
        auto g = two_triangles();
        ConsensusOptions opts;
        opts.runs = 3;
        for (unsigned workers : {1u, 3u}) {
            opts.workers = workers;
            try {
                build_consensus(g, ThrowingClusterer(), opts);
                FAIL("expected Error");
            } catch (const Error& e) {
                std::string msg = e.what();
                CHECK(msg.find("run 0") != std::string::npos);
                CHECK(msg.find("boom") != std::string::npos);
            }
        }
    }

    TEST_CASE("degenerate options are contract errors") {
        auto g = two_triangles();
        ConsensusOptions opts;
        opts.runs = 0;
        CHECK_THROWS_AS(build_consensus(g, LfmClusterer(), opts), ContractError);
        opts.runs = 1;
        opts.fraction = 0.0;
        CHECK_THROWS_AS(build_consensus(g, LfmClusterer(), opts), ContractError);
        ConsensusOptions ok;
        CHECK_THROWS_AS(build_consensus(CoListGraph{}, LfmClusterer(), ok), ContractError);
    }
}

TEST_SUITE("final clustering") {
    TEST_CASE("min_size discards small consensus clusters") {
        ConsensusMatrix m;
        m.nodes = {"A", "B"};
        m.entries[ConsensusMatrix::pack(0, 1)] = 1.0;
        m.runs = 1;

        std::vector<std::vector<std::string>> raw{{"x1", "x2"}, {"y1", "y2", "y3"}};
        std::vector<std::string> big;
        for (int i = 0; i < 143; ++i) big.push_back("z" + std::to_string(1000 + i));
        raw.push_back(big);
        FixedClusterer base(canonical_solution(raw));

        auto s = final_clusters(m, base, 1, 3);
        std::multiset<std::size_t> sizes;
        for (const auto& c : s.clusters) sizes.insert(c.size());
        CHECK(sizes == std::multiset<std::size_t>{3, 143});
    }

    TEST_CASE("never-co-sampled blocks come out as separate clusters") {
        ConsensusMatrix m;
        m.nodes = {"A", "B", "C", "D", "E", "F"};
        auto idx = [&](const std::string& id) { return *m.index_of(id); };
        const std::vector<std::pair<std::string, std::string>> ones{
            {"A", "B"}, {"A", "C"}, {"B", "C"}, {"D", "E"}, {"D", "F"}, {"E", "F"}};
        for (const auto& [a, b] : ones)
            m.entries[ConsensusMatrix::pack(idx(a), idx(b))] = 1.0;
        m.runs = 10;

        auto s = final_clusters(m, LfmClusterer(), 42, 3);
        REQUIRE(s.num_clusters() == 2);
        CHECK(s.clusters[0] == std::vector<std::string>{"A", "B", "C"});
        CHECK(s.clusters[1] == std::vector<std::string>{"D", "E", "F"});
    }

    TEST_CASE("an all-zero matrix yields an empty solution") {
        ConsensusMatrix m;
        m.nodes = {"A", "B", "C"};
        m.runs = 10;
        CHECK(final_clusters(m, LfmClusterer(), 1, 3).empty());
    }

    TEST_CASE("the consensus graph covers every nonzero entry, unthresholded") {
        ConsensusMatrix m;
        m.nodes = {"A", "B", "C"};
        m.entries[ConsensusMatrix::pack(0, 1)] = 0.000001;  // tiny but nonzero
        m.entries[ConsensusMatrix::pack(1, 2)] = 0.9;
        auto g = consensus_graph(m);
        CHECK(g.num_edges() == 2);
        CHECK(g.weight_kind() == WeightKind::normalized);
        CHECK(g.node_ids() == m.nodes);
    }
}

TEST_SUITE("consensus matrix io") {
    TEST_CASE("write and read round trip at format precision") {
        ConsensusMatrix m;
        m.nodes = {"A", "B", "C", "D"};
        m.entries[ConsensusMatrix::pack(0, 1)] = 0.5;
        m.entries[ConsensusMatrix::pack(0, 2)] = 1.0 / 3.0;
        m.entries[ConsensusMatrix::pack(2, 3)] = 1.0;
        tu::TempDir dir;
        write_consensus_matrix(m, dir / "m.tsv");
        auto back = read_consensus_matrix(dir / "m.tsv");
        CHECK(back.nodes == m.nodes);
        CHECK(back.value("A", "B") == 0.5);
        CHECK(back.value("A", "C") == doctest::Approx(0.333333).epsilon(1e-12));
        CHECK(back.value("C", "D") == 1.0);
        CHECK(back.entries.size() == 3);
    }
}
