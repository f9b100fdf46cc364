#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colist/cluster.hpp"
#include "colist/metadata.hpp"

namespace colist {

struct EnrichmentOptions {
    /// Movies missing an attribute count as non-matching in denominators.
    /// When false they are excluded from the denominator instead.
    bool include_missing = true;
};

/// Null model for the enrichment correction: per-(attribute, value) expected
/// fractions over a fixed universe of movies. Movies absent from the metadata
/// table are treated as missing every attribute.
class EnrichmentContext {
  public:
    EnrichmentContext(const MetadataTable& meta, std::vector<std::string> universe,
                      EnrichmentOptions options = {});

    std::size_t universe_size() const { return universe_.size(); }
    const std::vector<std::string>& universe() const { return universe_; }
    const MetadataTable& meta() const { return *meta_; }
    const EnrichmentOptions& options() const { return options_; }

    /// Expected fraction of the universe carrying the value; 0 for values
    /// no universe movie carries.
    double expected(Attribute a, std::string_view value) const;

    /// All values observed in the universe for an attribute, sorted.
    const std::map<std::string, std::size_t, std::less<>>& background_counts(Attribute a) const {
        return counts_[static_cast<std::size_t>(a)];
    }

  private:
    const MetadataTable* meta_;
    std::vector<std::string> universe_;  // sorted unique
    EnrichmentOptions options_;
    std::array<std::map<std::string, std::size_t, std::less<>>, kNumAttributes> counts_;
    std::array<std::size_t, kNumAttributes> present_;  // movies with the attribute non-missing
};

/// Fraction of cluster movies carrying the value. Set-valued attributes match
/// on containment. The cluster must be non-empty.
double enrichment(std::span<const std::string> cluster, const MetadataTable& meta, Attribute a,
                  std::string_view value, const EnrichmentOptions& options = {});

/// Fraction of the universe carrying the value (the null model).
double expected_enrichment(const MetadataTable& meta, std::span<const std::string> universe,
                           Attribute a, std::string_view value,
                           const EnrichmentOptions& options = {});

/// Chance-adjusted enrichment (e - expected) / (1 - expected); by convention
/// 0 when expected == 1 (a universal value is never evidence of structure).
double corrected_enrichment(double e, double expected);

struct MaxCorrected {
    std::optional<std::string> value;  // nullopt when nothing observed
    double corrected = 0.0;
    double raw = 0.0;
    double expected = 0.0;
};

/// Best corrected enrichment over all values of the attribute observed in the
/// cluster; exact ties go to the lexicographically smallest value. A cluster
/// observing no value of the attribute yields (nullopt, 0).
MaxCorrected max_corrected(std::span<const std::string> cluster, const EnrichmentContext& ctx,
                           Attribute a);

/// For each threshold t, the percentage (0..100) of clusters whose
/// max_corrected for the attribute is >= t. An empty cluster list raises
/// ContractError. Default thresholds are 0.1, 0.2, ..., 1.0.
std::vector<std::pair<double, double>> coverage_curve(const ClusterSolution& clusters,
                                                      const EnrichmentContext& ctx, Attribute a,
                                                      std::span<const double> thresholds = {});

/// For each X, the percentage of clusters with at least X attributes whose
/// max_corrected is >= t. Default X = 0..7.
std::vector<std::pair<std::size_t, double>> multi_attribute_curve(
    const ClusterSolution& clusters, const EnrichmentContext& ctx, double t,
    std::span<const std::size_t> attribute_counts = {});

/// One-sentence cluster description assembled from the values clearing t, in
/// fixed attribute order (genres, type, languages, countries, decade,
/// directors, actors). Empty when nothing clears t.
std::string summarize_cluster(std::span<const std::string> cluster, const EnrichmentContext& ctx,
                              double t = 0.8);

struct EnrichmentRow {
    std::string cluster_id;
    std::size_t cluster_size = 0;
    Attribute attribute = Attribute::type;
    std::optional<std::string> best_value;
    double raw = 0.0;
    double expected = 0.0;
    double corrected = 0.0;
};

/// Per-cluster, per-attribute best values and scores.
struct EnrichmentReport {
    std::vector<EnrichmentRow> rows;  // clusters in order, attributes in enum order
    std::size_t universe_size = 0;
};

EnrichmentReport build_enrichment_report(const ClusterSolution& clusters,
                                         const EnrichmentContext& ctx);

void write_enrichment_csv(const EnrichmentReport& report, const std::filesystem::path& path);

/// (threshold, percent) rows -> CSV.
void write_curve_csv(std::span<const std::pair<double, double>> curve,
                     const std::filesystem::path& path);
void write_multi_curve_csv(std::span<const std::pair<std::size_t, double>> curve,
                           const std::filesystem::path& path);

}  // namespace colist
