#include "colist/cluster.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "colist/errors.hpp"

namespace colist {

std::vector<std::string> ClusterSolution::covered_nodes() const {
    std::vector<std::string> out;
    for (const auto& cluster : clusters) out.insert(out.end(), cluster.begin(), cluster.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t ClusterSolution::multi_labeled_count() const {
    std::unordered_map<std::string, std::size_t> seen;
    for (const auto& cluster : clusters)
        for (const auto& node : cluster) ++seen[node];
    std::size_t n = 0;
    for (const auto& [node, count] : seen)
        if (count > 1) ++n;
    return n;
}

std::unordered_map<std::string, std::vector<std::uint32_t>> ClusterSolution::node_labels() const {
    std::unordered_map<std::string, std::vector<std::uint32_t>> labels;
    for (std::uint32_t c = 0; c < clusters.size(); ++c)
        for (const auto& node : clusters[c]) labels[node].push_back(c);
    return labels;
}

std::string cluster_label(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "c%04zu", index + 1);
    return buf;
}

ClusterSolution canonical_solution(std::vector<std::vector<std::string>> raw) {
    for (auto& cluster : raw) {
        std::sort(cluster.begin(), cluster.end());
        cluster.erase(std::unique(cluster.begin(), cluster.end()), cluster.end());
    }
    raw.erase(std::remove_if(raw.begin(), raw.end(),
                             [](const auto& c) { return c.empty(); }),
              raw.end());
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    return ClusterSolution{std::move(raw)};
}

ClusterSolution load_clustering(const std::filesystem::path& path, const CoListGraph* validate_against) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<std::vector<std::string>> raw;
    std::string line;
    std::size_t line_no = 0;
    std::size_t raw_count = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> members;
        std::istringstream row(line);
        std::string token;
        while (row >> token) members.push_back(std::move(token));
        if (members.empty()) continue;
        if (validate_against) {
            for (const auto& node : members) {
                if (!validate_against->index_of(node)) {
                    throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                          ": node " + node + " not in graph");
                }
            }
        }
        ++raw_count;
        raw.push_back(std::move(members));
    }
    ClusterSolution solution = canonical_solution(std::move(raw));
    if (solution.clusters.size() < raw_count) {
        std::cerr << "warning: " << path.string() << ": collapsed "
                  << raw_count - solution.clusters.size() << " duplicate cluster(s)\n";
    }
    return solution;
}

void save_clustering(const ClusterSolution& solution, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& cluster : solution.clusters) {
        for (std::size_t i = 0; i < cluster.size(); ++i) {
            if (i) out << '\t';
            out << cluster[i];
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_cluster_report(const ClusterSolution& solution, const std::filesystem::path& path) {
    nlohmann::json report;
    report["num_clusters"] = solution.num_clusters();
    report["covered_nodes"] = solution.covered_nodes().size();
    report["multi_labeled"] = solution.multi_labeled_count();
    auto& clusters = report["clusters"] = nlohmann::json::array();
    for (std::size_t c = 0; c < solution.num_clusters(); ++c) {
        clusters.push_back({{"id", cluster_label(c)}, {"size", solution.clusters[c].size()}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << report.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace colist
