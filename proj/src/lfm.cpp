#include "colist/lfm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "colist/errors.hpp"
#include "colist/rng.hpp"

namespace colist {

namespace {

// Jaccard of two sorted index vectors.
double member_jaccard(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++inter;
            ++i;
            ++j;
        }
    }
    std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

ClusterSolution LfmClusterer::cluster(const CoListGraph& g, std::uint64_t seed) const {
    if (g.empty()) throw ContractError("cluster(): empty graph");
    if (g.weight_kind() != WeightKind::normalized) {
        throw ContractError("cluster(): graph weights must be normalized");
    }

    const auto n = static_cast<std::uint32_t>(g.num_nodes());

    // Seed-shuffled scan order; rank[v] is v's position after the shuffle.
    // Every tie-break below resolves to the lowest rank, which makes the
    // shuffle the sole randomness source.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<std::uint32_t> rank(n);
    for (std::uint32_t i = 0; i < n; ++i) rank[order[i]] = i;

    const double alpha = params_.alpha;
    // Fitness k_in / (k_in + k_out)^alpha. The denominator equals the sum of
    // member strengths, so both terms carry incrementally. pow() is skipped
    // at alpha == 1 to keep the arithmetic exactly reproducible.
    auto fitness = [alpha](double kin, double ktot) {
        if (ktot <= 0.0) return 0.0;
        return alpha == 1.0 ? kin / ktot : kin / std::pow(ktot, alpha);
    };

    auto by_rank = [&rank](std::uint32_t a, std::uint32_t b) { return rank[a] < rank[b]; };

    std::vector<char> assigned(n, 0);
    std::vector<char> in_community(n, 0);
    std::vector<std::vector<std::uint32_t>> communities;

    for (;;) {
        // Next seed: unassigned node of highest strength, earliest rank on ties.
        std::optional<std::uint32_t> seed_node;
        for (std::uint32_t v : order) {
            if (assigned[v]) continue;
            if (!seed_node || g.strength(v) > g.strength(*seed_node)) seed_node = v;
        }
        if (!seed_node) break;

        std::vector<std::uint32_t> members;
        std::unordered_map<std::uint32_t, double> weight_to_c;  // candidate -> weight into C
        std::set<std::uint32_t, decltype(by_rank)> frontier(by_rank);
        double kin = 0.0, ktot = 0.0;

        auto add_member = [&](std::uint32_t x) {
            auto it = weight_to_c.find(x);
            if (it != weight_to_c.end()) {
                kin += 2.0 * it->second;
                weight_to_c.erase(it);
                frontier.erase(x);
            }
            ktot += g.strength(x);
            in_community[x] = 1;
            members.push_back(x);
            for (const auto& [y, w] : g.neighbors(x)) {
                if (in_community[y]) continue;
                weight_to_c[y] += w;
                frontier.insert(y);
            }
        };

        add_member(*seed_node);
        for (;;) {
            const double base = fitness(kin, ktot);
            double best_gain = 0.0;
            std::optional<std::uint32_t> best;
            for (std::uint32_t y : frontier) {
                double wy = weight_to_c.find(y)->second;
                double gain = fitness(kin + 2.0 * wy, ktot + g.strength(y)) - base;
                if (gain > best_gain) {  // strict: exact ties keep the earliest rank
                    best_gain = gain;
                    best = y;
                }
            }
            if (!best) break;  // no strictly positive gain left
            add_member(*best);
        }

        for (std::uint32_t m : members) {
            assigned[m] = 1;
            in_community[m] = 0;
        }
        std::sort(members.begin(), members.end());
        communities.push_back(std::move(members));
    }

    // Merge near-duplicates: any pair with Jaccard >= merge_overlap collapses
    // to its union, repeated to a fixpoint. Pairs are scanned in creation
    // order so the merge sequence is deterministic.
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < communities.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < communities.size() && !merged; ++j) {
                if (member_jaccard(communities[i], communities[j]) < params_.merge_overlap) {
                    continue;
                }
                std::vector<std::uint32_t> unioned;
                std::set_union(communities[i].begin(), communities[i].end(),
                               communities[j].begin(), communities[j].end(),
                               std::back_inserter(unioned));
                communities[i] = std::move(unioned);
                communities.erase(communities.begin() + static_cast<std::ptrdiff_t>(j));
                merged = true;
            }
        }
    }

    std::vector<std::vector<std::string>> raw;
    raw.reserve(communities.size());
    for (const auto& community : communities) {
        std::vector<std::string> ids;
        ids.reserve(community.size());
        for (std::uint32_t m : community) ids.push_back(g.id_of(m));
        raw.push_back(std::move(ids));
    }
    return canonical_solution(std::move(raw));
}

}  // namespace colist
