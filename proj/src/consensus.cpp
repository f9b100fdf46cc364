#include "colist/consensus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "colist/errors.hpp"
#include "colist/rng.hpp"

namespace colist {

std::uint64_t ConsensusMatrix::pack(std::uint32_t i, std::uint32_t j) {
    if (i == j) throw ContractError("diagonal consensus entry");
    if (i > j) std::swap(i, j);
    return (static_cast<std::uint64_t>(i) << 32) | j;
}

std::pair<std::uint32_t, std::uint32_t> ConsensusMatrix::unpack(std::uint64_t key) {
    return {static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key)};
}

std::optional<std::uint32_t> ConsensusMatrix::index_of(std::string_view id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - nodes.begin());
}

double ConsensusMatrix::value_at(std::uint32_t i, std::uint32_t j) const {
    auto it = entries.find(pack(i, j));
    return it == entries.end() ? 0.0 : it->second;
}

double ConsensusMatrix::value(std::string_view a, std::string_view b) const {
    auto ia = index_of(a);
    auto ib = index_of(b);
    if (!ia) throw LookupError("node not in consensus matrix: " + std::string(a));
    if (!ib) throw LookupError("node not in consensus matrix: " + std::string(b));
    return value_at(*ia, *ib);
}

std::vector<std::string> sample_nodes(const CoListGraph& g, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ContractError("sample fraction must lie in (0, 1]");
    }
    const std::size_t n = g.num_nodes();
    const auto k = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(n)));

    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {  // partial Fisher-Yates
        std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());

    std::vector<std::string> ids;
    ids.reserve(k);
    for (std::uint32_t i : idx) ids.push_back(g.id_of(i));
    return ids;  // index order == lex order
}

double jaccard_labels(std::span<const std::uint32_t> labels_a,
                      std::span<const std::uint32_t> labels_b) {
    std::size_t inter = 0, i = 0, j = 0;
    while (i < labels_a.size() && j < labels_b.size()) {
        if (labels_a[i] < labels_b[j]) {
            ++i;
        } else if (labels_b[j] < labels_a[i]) {
            ++j;
        } else {
            ++inter;
            ++i;
            ++j;
        }
    }
    std::size_t uni = labels_a.size() + labels_b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// One run's pairwise scores, keyed by packed matrix-index pairs. Each pair
// sharing at least one cluster appears exactly once with its full Jaccard
// score; never-co-clustered pairs are absent (the sparse 0).
std::unordered_map<std::uint64_t, double> pair_scores(const ConsensusMatrix& m,
                                                      const ClusterSolution& solution) {
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> label_sets;
    std::vector<std::vector<std::uint32_t>> cluster_idx(solution.clusters.size());
    for (std::uint32_t c = 0; c < solution.clusters.size(); ++c) {
        cluster_idx[c].reserve(solution.clusters[c].size());
        for (const auto& id : solution.clusters[c]) {
            auto idx = m.index_of(id);
            if (!idx) throw ContractError("cluster member not in consensus universe: " + id);
            label_sets[*idx].push_back(c);  // ascending c: stays sorted
            cluster_idx[c].push_back(*idx);
        }
    }

    std::unordered_map<std::uint64_t, double> scores;
    for (const auto& members : cluster_idx) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                std::uint64_t key = ConsensusMatrix::pack(members[a], members[b]);
                if (scores.contains(key)) continue;  // already scored via an earlier shared cluster
                scores.emplace(key, jaccard_labels(label_sets[members[a]],
                                                   label_sets[members[b]]));
            }
        }
    }
    return scores;
}

}  // namespace

void accumulate_run(ConsensusMatrix& m, const ClusterSolution& solution,
                    std::span<const std::string> sampled) {
    for (const auto& cluster : solution.clusters) {
        for (const auto& id : cluster) {
            if (!std::binary_search(sampled.begin(), sampled.end(), id)) {
                throw ContractError("cluster member outside sampled set: " + id);
            }
        }
    }
    for (const auto& [key, score] : pair_scores(m, solution)) {
        m.entries[key] += score;
    }
}

namespace {

struct RunOutput {
    std::unordered_map<std::uint64_t, double> scores;
    std::vector<std::uint64_t> cosampled;  // packed pairs, only under cosample normalization
    RunRecord record;                      // only filled when recording
    std::exception_ptr error;
};

RunOutput execute_run(const CoListGraph& g, const Clusterer& base, const ConsensusMatrix& m,
                      const ConsensusOptions& options, std::uint32_t run) {
    RunOutput out;
    try {
        std::uint64_t sample_seed = derive_seed(options.master_seed, 2ULL * run);
        std::uint64_t cluster_seed = derive_seed(options.master_seed, 2ULL * run + 1);
        std::vector<std::string> sampled = sample_nodes(g, options.fraction, sample_seed);
        CoListGraph sub = induced_subgraph(g, sampled);
        ClusterSolution solution = base.cluster(sub, cluster_seed);
        out.scores = pair_scores(m, solution);
        if (options.normalize_by_cosample) {
            std::vector<std::uint32_t> idx;
            idx.reserve(sampled.size());
            for (const auto& id : sampled) idx.push_back(*m.index_of(id));
            out.cosampled.reserve(idx.size() * (idx.size() - 1) / 2);
            for (std::size_t a = 0; a < idx.size(); ++a) {
                for (std::size_t b = a + 1; b < idx.size(); ++b) {
                    out.cosampled.push_back(ConsensusMatrix::pack(idx[a], idx[b]));
                }
            }
        }
        if (options.record_runs) {
            out.record = RunRecord{std::move(sampled), std::move(solution)};
        }
    } catch (...) {
        out.error = std::current_exception();
    }
    return out;
}

[[noreturn]] void rethrow_run_failure(std::uint32_t run, const std::exception_ptr& error) {
    try {
        std::rethrow_exception(error);
    } catch (const std::exception& e) {
        throw Error("consensus run " + std::to_string(run) + " failed: " + e.what());
    }
}

}  // namespace

ConsensusResult build_consensus(const CoListGraph& g, const Clusterer& base,
                                const ConsensusOptions& options) {
    if (options.runs < 1) throw ContractError("consensus needs at least one run");
    if (g.empty()) throw ContractError("consensus over an empty graph");
    if (!(options.fraction > 0.0) || options.fraction > 1.0) {
        throw ContractError("sample fraction must lie in (0, 1]");
    }

    ConsensusResult result;
    ConsensusMatrix& m = result.matrix;
    m.nodes = g.node_ids();
    m.runs = options.runs;

    std::unordered_map<std::uint64_t, std::uint32_t> cosample_counts;

    // Partial results always merge in run order — per entry, the addition
    // sequence is then independent of how runs were scheduled, so any worker
    // count produces bit-identical sums.
    auto merge = [&](std::uint32_t run, RunOutput& out) {
        if (out.error) rethrow_run_failure(run, out.error);
        for (const auto& [key, score] : out.scores) m.entries[key] += score;
        for (std::uint64_t key : out.cosampled) ++cosample_counts[key];
        if (options.record_runs) result.run_records.push_back(std::move(out.record));
    };

    unsigned workers = options.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, options.runs);

    if (workers <= 1) {
        for (std::uint32_t run = 0; run < options.runs; ++run) {
            RunOutput out = execute_run(g, base, m, options, run);
            merge(run, out);
        }
    } else {
        std::vector<RunOutput> outputs(options.runs);
        std::vector<char> done(options.runs, 0);
        std::mutex mu;
        std::condition_variable cv;
        std::atomic<std::uint32_t> next_run{0};

        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::uint32_t run = next_run.fetch_add(1);
                    if (run >= options.runs) return;
                    RunOutput out = execute_run(g, base, m, options, run);
                    {
                        std::lock_guard lock(mu);
                        outputs[run] = std::move(out);
                        done[run] = 1;
                    }
                    cv.notify_one();
                }
            });
        }

        std::exception_ptr failure;
        for (std::uint32_t run = 0; run < options.runs; ++run) {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return done[run] != 0; });
            RunOutput out = std::move(outputs[run]);
            lock.unlock();
            if (!failure) {
                try {
                    merge(run, out);
                } catch (...) {
                    failure = std::current_exception();  // still drain remaining runs
                }
            }
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    if (options.normalize_by_cosample) {
        for (auto& [key, value] : m.entries) {
            value /= static_cast<double>(cosample_counts.at(key));
        }
    } else {
        for (auto& [key, value] : m.entries) {
            value /= static_cast<double>(options.runs);
        }
    }
    return result;
}

CoListGraph consensus_graph(const ConsensusMatrix& m) {
    CoListGraph g(m.nodes, WeightKind::normalized);
    std::vector<std::uint64_t> keys;
    keys.reserve(m.entries.size());
    for (const auto& [key, value] : m.entries) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    for (std::uint64_t key : keys) {
        auto [i, j] = ConsensusMatrix::unpack(key);
        g.add_edge(i, j, m.entries.at(key));
    }
    g.finalize();
    return g;
}

ClusterSolution final_clusters(const ConsensusMatrix& m, const Clusterer& base,
                               std::uint64_t seed, std::size_t min_size) {
    if (min_size < 1) throw ContractError("min_size must be at least 1");
    if (m.entries.empty()) return {};

    ClusterSolution solution = base.cluster(consensus_graph(m), seed);
    std::erase_if(solution.clusters,
                  [min_size](const auto& c) { return c.size() < min_size; });
    return solution;
}

void write_consensus_matrix(const ConsensusMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    std::vector<std::uint64_t> keys;
    keys.reserve(m.entries.size());
    for (const auto& [key, value] : m.entries) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    char buf[64];
    for (std::uint64_t key : keys) {
        auto [i, j] = ConsensusMatrix::unpack(key);
        std::snprintf(buf, sizeof buf, "%.6f", m.entries.at(key));
        out << m.nodes[i] << '\t' << m.nodes[j] << '\t' << buf << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

ConsensusMatrix read_consensus_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    struct Triple {
        std::string a, b;
        double value;
    };
    std::vector<Triple> triples;
    ConsensusMatrix m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected node\\tnode\\tvalue");
        }
        Triple t;
        t.a = line.substr(0, t1);
        t.b = line.substr(t1 + 1, t2 - t1 - 1);
        try {
            t.value = std::stod(line.substr(t2 + 1));
        } catch (const std::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad value");
        }
        if (t.a.empty() || t.b.empty() || t.a == t.b) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad node pair");
        }
        m.nodes.push_back(t.a);
        m.nodes.push_back(t.b);
        triples.push_back(std::move(t));
    }
    std::sort(m.nodes.begin(), m.nodes.end());
    m.nodes.erase(std::unique(m.nodes.begin(), m.nodes.end()), m.nodes.end());
    for (const auto& t : triples) {
        m.entries[ConsensusMatrix::pack(*m.index_of(t.a), *m.index_of(t.b))] = t.value;
    }
    return m;
}

}  // namespace colist
