#pragma once

#include "colist/cluster.hpp"

namespace colist {

struct LfmParams {
    /// Resolution exponent in the fitness k_in / (k_in + k_out)^alpha.
    double alpha = 1.0;
    /// Communities with Jaccard overlap >= this are merged.
    double merge_overlap = 0.8;
};

/// Greedy seed-and-expand local fitness optimization. Seeds are the
/// unassigned nodes of highest strength; a community grows by repeatedly
/// adding the neighbor with the best positive fitness gain. Nodes may join
/// several communities. All candidate scans run in a seed-shuffled node
/// order, which is the sole randomness source: exact ties go to the earliest
/// candidate in that order.
class LfmClusterer final : public Clusterer {
  public:
    explicit LfmClusterer(LfmParams params = {}) : params_(params) {}

    ClusterSolution cluster(const CoListGraph& g, std::uint64_t seed) const override;
    std::string name() const override { return "lfm"; }

    const LfmParams& params() const { return params_; }

  private:
    LfmParams params_;
};

}  // namespace colist
