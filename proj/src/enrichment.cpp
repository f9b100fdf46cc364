#include "colist/enrichment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "colist/errors.hpp"

namespace colist {

EnrichmentContext::EnrichmentContext(const MetadataTable& meta, std::vector<std::string> universe,
                                     EnrichmentOptions options)
    : meta_(&meta), universe_(std::move(universe)), options_(options) {
    std::sort(universe_.begin(), universe_.end());
    universe_.erase(std::unique(universe_.begin(), universe_.end()), universe_.end());
    if (universe_.empty()) throw ContractError("enrichment universe is empty");

    present_.fill(0);
    for (const auto& id : universe_) {
        const MovieMetadata* record = meta_->find(id);
        if (!record) continue;  // unknown movie: missing everything
        for (auto a : kAttributes) {
            auto i = static_cast<std::size_t>(a);
            auto values = record->values(a);
            if (values.empty()) continue;
            ++present_[i];
            for (const auto& value : values) ++counts_[i][value];
        }
    }
}

double EnrichmentContext::expected(Attribute a, std::string_view value) const {
    auto i = static_cast<std::size_t>(a);
    std::size_t denom = options_.include_missing ? universe_.size() : present_[i];
    if (denom == 0) return 0.0;
    auto it = counts_[i].find(value);
    std::size_t hits = it == counts_[i].end() ? 0 : it->second;
    return static_cast<double>(hits) / static_cast<double>(denom);
}

double enrichment(std::span<const std::string> cluster, const MetadataTable& meta, Attribute a,
                  std::string_view value, const EnrichmentOptions& options) {
    if (cluster.empty()) throw ContractError("enrichment over an empty cluster");
    std::size_t hits = 0, present = 0;
    for (const auto& id : cluster) {
        const MovieMetadata* record = meta.find(id);
        if (!record || record->missing(a)) continue;
        ++present;
        if (record->has(a, value)) ++hits;
    }
    std::size_t denom = options.include_missing ? cluster.size() : present;
    if (denom == 0) return 0.0;
    return static_cast<double>(hits) / static_cast<double>(denom);
}

double expected_enrichment(const MetadataTable& meta, std::span<const std::string> universe,
                           Attribute a, std::string_view value,
                           const EnrichmentOptions& options) {
    if (universe.empty()) throw ContractError("enrichment universe is empty");
    return enrichment(universe, meta, a, value, options);
}

double corrected_enrichment(double e, double expected) {
    if (!(e >= 0.0 && e <= 1.0)) throw ContractError("enrichment outside [0,1]");
    if (!(expected >= 0.0 && expected <= 1.0)) {
        throw ContractError("expected enrichment outside [0,1]");
    }
    if (expected == 1.0) return 0.0;  // a universal value is never evidence of structure
    return (e - expected) / (1.0 - expected);
}

MaxCorrected max_corrected(std::span<const std::string> cluster, const EnrichmentContext& ctx,
                           Attribute a) {
    if (cluster.empty()) throw ContractError("enrichment over an empty cluster");

    // Observed values with their in-cluster match counts; the map keeps them
    // sorted so exact score ties resolve to the lexicographically smallest.
    std::map<std::string, std::size_t, std::less<>> observed;
    std::size_t present = 0;
    for (const auto& id : cluster) {
        const MovieMetadata* record = ctx.meta().find(id);
        if (!record || record->missing(a)) continue;
        ++present;
        for (const auto& value : record->values(a)) ++observed[value];
    }
    MaxCorrected best;
    if (observed.empty()) return best;

    std::size_t denom = ctx.options().include_missing ? cluster.size() : present;
    for (const auto& [value, hits] : observed) {
        double raw = static_cast<double>(hits) / static_cast<double>(denom);
        double expected = ctx.expected(a, value);
        double corrected = corrected_enrichment(raw, expected);
        if (!best.value || corrected > best.corrected) {
            best = MaxCorrected{value, corrected, raw, expected};
        }
    }
    return best;
}

std::vector<std::pair<double, double>> coverage_curve(const ClusterSolution& clusters,
                                                      const EnrichmentContext& ctx, Attribute a,
                                                      std::span<const double> thresholds) {
    if (clusters.empty()) throw ContractError("coverage curve needs at least one cluster");
    static constexpr double kDefault[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    if (thresholds.empty()) thresholds = kDefault;
    for (double t : thresholds) {
        if (!(t >= 0.0 && t <= 1.0)) throw ContractError("threshold outside [0,1]");
    }

    std::vector<double> scores;
    scores.reserve(clusters.num_clusters());
    for (const auto& cluster : clusters.clusters) {
        scores.push_back(max_corrected(cluster, ctx, a).corrected);
    }

    std::vector<std::pair<double, double>> curve;
    curve.reserve(thresholds.size());
    for (double t : thresholds) {
        auto hits = static_cast<double>(
            std::count_if(scores.begin(), scores.end(), [t](double s) { return s >= t; }));
        curve.emplace_back(t, 100.0 * hits / static_cast<double>(scores.size()));
    }
    return curve;
}

std::vector<std::pair<std::size_t, double>> multi_attribute_curve(
    const ClusterSolution& clusters, const EnrichmentContext& ctx, double t,
    std::span<const std::size_t> attribute_counts) {
    if (!(t >= 0.0 && t <= 1.0)) throw ContractError("threshold outside [0,1]");
    static constexpr std::size_t kDefault[] = {0, 1, 2, 3, 4, 5, 6, 7};
    if (attribute_counts.empty()) attribute_counts = kDefault;

    std::vector<std::size_t> enriched;  // per cluster: attributes clearing t
    enriched.reserve(clusters.num_clusters());
    for (const auto& cluster : clusters.clusters) {
        std::size_t n = 0;
        for (auto a : kAttributes) {
            if (max_corrected(cluster, ctx, a).corrected >= t) ++n;
        }
        enriched.push_back(n);
    }

    std::vector<std::pair<std::size_t, double>> curve;
    curve.reserve(attribute_counts.size());
    for (std::size_t x : attribute_counts) {
        double percent = 0.0;
        if (!enriched.empty()) {
            auto hits = static_cast<double>(std::count_if(
                enriched.begin(), enriched.end(), [x](std::size_t n) { return n >= x; }));
            percent = 100.0 * hits / static_cast<double>(enriched.size());
        }
        curve.emplace_back(x, percent);
    }
    return curve;
}

namespace {

std::string plural_type(const std::string& type) {
    // The nine item types, pluralized for summaries.
    static const std::map<std::string, std::string, std::less<>> kPlural = {
        {"TV movie", "TV movies"},         {"feature film", "feature films"},
        {"short film", "short films"},     {"TV episode", "TV episodes"},
        {"TV series", "TV series"},        {"mini-series", "mini-series"},
        {"video", "videos"},               {"documentary", "documentaries"},
        {"TV special", "TV specials"},
    };
    auto it = kPlural.find(type);
    return it == kPlural.end() ? type + "s" : it->second;
}

}  // namespace

std::string summarize_cluster(std::span<const std::string> cluster, const EnrichmentContext& ctx,
                              double t) {
    std::array<std::optional<std::string>, kNumAttributes> cleared;
    bool any = false;
    for (auto a : kAttributes) {
        MaxCorrected mc = max_corrected(cluster, ctx, a);
        if (mc.value && mc.corrected >= t) {
            cleared[static_cast<std::size_t>(a)] = *mc.value;
            any = true;
        }
    }
    if (!any) return "";

    auto value_of = [&](Attribute a) -> const std::optional<std::string>& {
        return cleared[static_cast<std::size_t>(a)];
    };

    // "<Genre> <types> in <Language> from <Country> from the <Decade>
    //  directed by <Director> featuring <Actor>"
    std::vector<std::string> parts;
    if (value_of(Attribute::genres)) parts.push_back(*value_of(Attribute::genres));
    parts.push_back(value_of(Attribute::type) ? plural_type(*value_of(Attribute::type))
                                              : "movies");
    if (value_of(Attribute::languages)) parts.push_back("in " + *value_of(Attribute::languages));
    if (value_of(Attribute::countries)) parts.push_back("from " + *value_of(Attribute::countries));
    if (value_of(Attribute::decade)) parts.push_back("from the " + *value_of(Attribute::decade));
    if (value_of(Attribute::directors)) {
        parts.push_back("directed by " + *value_of(Attribute::directors));
    }
    if (value_of(Attribute::actors)) parts.push_back("featuring " + *value_of(Attribute::actors));

    std::string summary;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) summary += ' ';
        summary += parts[i];
    }
    if (!summary.empty() && summary[0] >= 'a' && summary[0] <= 'z') {
        summary[0] = static_cast<char>(summary[0] - 'a' + 'A');
    }
    return summary;
}

EnrichmentReport build_enrichment_report(const ClusterSolution& clusters,
                                         const EnrichmentContext& ctx) {
    EnrichmentReport report;
    report.universe_size = ctx.universe_size();
    report.rows.reserve(clusters.num_clusters() * kNumAttributes);
    for (std::size_t c = 0; c < clusters.num_clusters(); ++c) {
        for (auto a : kAttributes) {
            MaxCorrected mc = max_corrected(clusters.clusters[c], ctx, a);
            report.rows.push_back(EnrichmentRow{cluster_label(c), clusters.clusters[c].size(), a,
                                                mc.value, mc.raw, mc.expected, mc.corrected});
        }
    }
    return report;
}

namespace {

std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\n") == std::string_view::npos) return std::string(value);
    std::string quoted = "\"";
    for (char c : value) {
        quoted += c;
        if (c == '"') quoted += '"';
    }
    quoted += '"';
    return quoted;
}

std::string fmt6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

}  // namespace

void write_enrichment_csv(const EnrichmentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "cluster_id,size,attribute,best_value,raw_enrichment,expected,corrected\n";
    for (const auto& row : report.rows) {
        out << row.cluster_id << ',' << row.cluster_size << ',' << attribute_name(row.attribute)
            << ',' << (row.best_value ? csv_field(*row.best_value) : "") << ',' << fmt6(row.raw)
            << ',' << fmt6(row.expected) << ',' << fmt6(row.corrected) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_curve_csv(std::span<const std::pair<double, double>> curve,
                     const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "threshold,percent\n";
    for (const auto& [t, percent] : curve) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", t);
        out << buf << ',' << fmt6(percent) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_multi_curve_csv(std::span<const std::pair<std::size_t, double>> curve,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "min_attributes,percent\n";
    for (const auto& [x, percent] : curve) {
        out << x << ',' << fmt6(percent) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace colist
