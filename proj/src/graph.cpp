#include "colist/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "colist/errors.hpp"

namespace colist {

namespace {

std::uint64_t pack_pair(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

CoListGraph::CoListGraph(std::vector<std::string> node_ids, WeightKind kind)
    : ids_(std::move(node_ids)), kind_(kind) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    adjacency_.resize(ids_.size());
}

void CoListGraph::add_edge(std::uint32_t a, std::uint32_t b, double weight) {
    if (finalized_) throw ContractError("graph is finalized");
    if (a == b) throw ContractError("self-loop on node " + ids_[a]);
    if (a >= ids_.size() || b >= ids_.size()) throw ContractError("edge endpoint out of range");
    if (!(weight > 0.0)) throw ContractError("edge weight must be positive");
    adjacency_[a].emplace_back(b, weight);
    adjacency_[b].emplace_back(a, weight);
    ++num_edges_;
}

void CoListGraph::add_edge(std::string_view a, std::string_view b, double weight) {
    auto ia = index_of(a);
    auto ib = index_of(b);
    if (!ia) throw LookupError("unknown node " + std::string(a));
    if (!ib) throw LookupError("unknown node " + std::string(b));
    add_edge(*ia, *ib, weight);
}

void CoListGraph::finalize() {
    strength_.assign(ids_.size(), 0.0);
    for (std::uint32_t i = 0; i < adjacency_.size(); ++i) {
        auto& row = adjacency_[i];
        std::sort(row.begin(), row.end());
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k].first == row[k - 1].first) {
                throw ValidationError("duplicate edge {" + ids_[i] + "," + ids_[row[k].first] +
                                      "}");
            }
        }
        double s = 0.0;
        for (const auto& [n, w] : row) s += w;
        strength_[i] = s;
    }
    finalized_ = true;
}

std::optional<std::uint32_t> CoListGraph::index_of(std::string_view id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - ids_.begin());
}

std::span<const std::pair<std::uint32_t, double>> CoListGraph::neighbors(
    std::uint32_t idx) const {
    return adjacency_[idx];
}

std::optional<double> CoListGraph::edge_weight(std::uint32_t a, std::uint32_t b) const {
    const auto& row = adjacency_[a];
    auto it = std::lower_bound(row.begin(), row.end(), b,
                               [](const auto& entry, std::uint32_t n) { return entry.first < n; });
    if (it == row.end() || it->first != b) return std::nullopt;
    return it->second;
}

CoListGraph build_raw_graph(const MembershipTable& table) {
    CoListGraph g(table.movies(), WeightKind::raw_count);
    // movie indices coincide: both sides are the same lex-sorted movie vector
    std::unordered_map<std::uint64_t, std::uint32_t> shared;
    for (std::uint32_t l = 0; l < table.num_lists(); ++l) {
        auto members = table.list_members(l);
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                shared[pack_pair(members[i], members[j])]++;
            }
        }
    }
    std::vector<std::uint64_t> keys;
    keys.reserve(shared.size());
    for (const auto& [key, count] : shared) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    for (std::uint64_t key : keys) {
        auto a = static_cast<std::uint32_t>(key >> 32);
        auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
        g.add_edge(a, b, static_cast<double>(shared[key]));
    }
    g.finalize();
    return g;
}

double cocit_weight(std::size_t size_a, std::size_t size_b, std::size_t shared) {
    if (size_a < 1 || size_b < 1) {
        throw ContractError("cocit_weight: list-set sizes must be >= 1");
    }
    if (shared > std::min(size_a, size_b)) {
        throw ContractError("cocit_weight: shared exceeds the smaller list-set size");
    }
    double s = static_cast<double>(shared);
    double min_size = static_cast<double>(std::min(size_a, size_b));
    double mean_size = (static_cast<double>(size_a) + static_cast<double>(size_b)) / 2.0;
    return (s * s) / (min_size * mean_size);
}

CoListGraph normalize_graph(const CoListGraph& raw, const MembershipTable& table) {
    if (raw.weight_kind() != WeightKind::raw_count) {
        throw ContractError("normalize_graph: input graph is already normalized");
    }
    std::vector<std::size_t> list_set_size(raw.num_nodes());
    for (std::uint32_t i = 0; i < raw.num_nodes(); ++i) {
        auto movie = table.movie_index(raw.id_of(i));
        if (!movie) {
            throw ContractError("normalize_graph: node " + raw.id_of(i) +
                                " missing from the membership table");
        }
        list_set_size[i] = table.movie_lists(*movie).size();
    }
    CoListGraph g(raw.node_ids(), WeightKind::normalized);
    raw.for_each_edge([&](std::uint32_t a, std::uint32_t b, double w) {
        auto shared = static_cast<std::size_t>(std::llround(w));
        g.add_edge(a, b, cocit_weight(list_set_size[a], list_set_size[b], shared));
    });
    g.finalize();
    return g;
}

CoListGraph threshold_graph(const CoListGraph& g, double tau, bool drop_isolated) {
    if (g.weight_kind() != WeightKind::normalized) {
        throw ContractError("threshold_graph: graph must be normalized");
    }
    if (!(tau >= 0.0 && tau <= 1.0)) throw ContractError("threshold_graph: tau must be in [0,1]");
    CoListGraph out(g.node_ids(), WeightKind::normalized);
    g.for_each_edge([&](std::uint32_t a, std::uint32_t b, double w) {
        if (w >= tau) out.add_edge(a, b, w);
    });
    out.finalize();
    if (drop_isolated) return drop_isolated_nodes(out);
    return out;
}

std::vector<std::vector<std::string>> connected_components(const CoListGraph& g) {
    std::vector<std::vector<std::string>> components;
    std::vector<bool> seen(g.num_nodes(), false);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t start = 0; start < g.num_nodes(); ++start) {
        if (seen[start]) continue;
        seen[start] = true;
        stack.assign(1, start);
        std::vector<std::uint32_t> component;
        while (!stack.empty()) {
            std::uint32_t v = stack.back();
            stack.pop_back();
            component.push_back(v);
            for (const auto& [n, w] : g.neighbors(v)) {
                if (!seen[n]) {
                    seen[n] = true;
                    stack.push_back(n);
                }
            }
        }
        std::sort(component.begin(), component.end());
        std::vector<std::string> ids;
        ids.reserve(component.size());
        for (std::uint32_t v : component) ids.push_back(g.id_of(v));
        components.push_back(std::move(ids));
    }
    // size descending, ties by smallest member id (= first id, members sorted)
    std::stable_sort(components.begin(), components.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() > y.size();
        return x.front() < y.front();
    });
    return components;
}

CoListGraph induced_subgraph(const CoListGraph& g, std::span<const std::string> node_ids) {
    std::vector<std::uint32_t> kept;
    kept.reserve(node_ids.size());
    for (const auto& id : node_ids) {
        auto idx = g.index_of(id);
        if (!idx) throw LookupError("unknown node " + id);
        kept.push_back(*idx);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

    std::vector<std::uint32_t> remap(g.num_nodes(), UINT32_MAX);
    std::vector<std::string> ids;
    ids.reserve(kept.size());
    for (std::uint32_t new_idx = 0; new_idx < kept.size(); ++new_idx) {
        remap[kept[new_idx]] = new_idx;
        ids.push_back(g.id_of(kept[new_idx]));
    }
    CoListGraph out(std::move(ids), g.weight_kind());
    for (std::uint32_t old_a : kept) {
        for (const auto& [old_b, w] : g.neighbors(old_a)) {
            if (old_b > old_a && remap[old_b] != UINT32_MAX) {
                out.add_edge(remap[old_a], remap[old_b], w);
            }
        }
    }
    out.finalize();
    return out;
}

CoListGraph ego_network(const CoListGraph& g, std::string_view center) {
    auto idx = g.index_of(center);
    if (!idx) throw LookupError("unknown node " + std::string(center));
    std::vector<std::string> ids;
    ids.push_back(std::string(center));
    for (const auto& [n, w] : g.neighbors(*idx)) ids.push_back(g.id_of(n));
    return induced_subgraph(g, ids);
}

CoListGraph drop_isolated_nodes(const CoListGraph& g) {
    std::vector<std::string> ids;
    for (std::uint32_t i = 0; i < g.num_nodes(); ++i) {
        if (g.degree(i) > 0) ids.push_back(g.id_of(i));
    }
    return induced_subgraph(g, ids);
}

}  // namespace colist
