#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colist/format.hpp"

namespace colist {

/// The seven categorical movie attributes, in file-column order.
enum class Attribute : std::uint8_t {
    type = 0,
    decade,
    genres,
    countries,
    languages,
    directors,
    actors,
};

inline constexpr std::size_t kNumAttributes = 7;

inline constexpr std::array<Attribute, kNumAttributes> kAttributes{
    Attribute::type,      Attribute::decade,    Attribute::genres,
    Attribute::countries, Attribute::languages, Attribute::directors,
    Attribute::actors,
};

std::string_view attribute_name(Attribute a);
std::optional<Attribute> attribute_from_name(std::string_view name);

/// type and decade hold at most one value; the rest are sets.
inline bool attribute_is_multi(Attribute a) {
    return a != Attribute::type && a != Attribute::decade;
}

/// Per-movie categorical attributes plus the optional numeric rating.
/// Attribute values are stored sorted and unique; single-valued attributes
/// hold zero (missing) or one value.
struct MovieMetadata {
    std::array<std::vector<std::string>, kNumAttributes> attrs;
    std::optional<double> rating;

    std::span<const std::string> values(Attribute a) const {
        return attrs[static_cast<std::size_t>(a)];
    }
    bool has(Attribute a, std::string_view value) const;
    bool missing(Attribute a) const { return values(a).empty(); }

    std::string_view type() const;
    std::string_view decade() const;

    bool operator==(const MovieMetadata&) const = default;
};

/// Immutable movie_id -> MovieMetadata mapping, ids kept sorted.
class MetadataTable {
  public:
    MetadataTable() = default;

    /// Duplicate movie ids raise ValidationError.
    static MetadataTable from_entries(std::vector<std::pair<std::string, MovieMetadata>> entries);

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    const std::vector<std::string>& movie_ids() const { return ids_; }

    /// nullptr when the movie is unknown (treated as all-missing downstream).
    const MovieMetadata* find(std::string_view movie_id) const;
    const MovieMetadata& at(std::size_t idx) const { return records_[idx]; }
    const std::string& id_at(std::size_t idx) const { return ids_[idx]; }

    bool operator==(const MetadataTable&) const = default;

  private:
    std::vector<std::string> ids_;
    std::vector<MovieMetadata> records_;
};

/// Parse a metadata file. Multi-valued cells split on '|'; empty cells are
/// missing. Ratings outside [1,10] and duplicate movie ids raise
/// ValidationError; malformed rows raise ParseError naming the line.
MetadataTable parse_metadata(const std::filesystem::path& path, Format format);

void write_metadata(const MetadataTable& table, const std::filesystem::path& path, Format format);

}  // namespace colist
