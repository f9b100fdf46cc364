#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colist/format.hpp"

namespace colist {

/// One raw membership record as it appears in an input file.
struct MembershipRow {
    std::string list_id;
    std::string user_id;  // empty = unknown owner
    std::string movie_id;
};

/// Immutable bipartite record of which list contains which movie, with an
/// optional owner per list. Both id vectors are kept lexicographically
/// sorted, so indices order the same way as ids. Duplicate (list, movie)
/// pairs collapse at construction; the first non-empty user_id seen for a
/// list wins. Safe to share read-only across threads once built.
class MembershipTable {
  public:
    MembershipTable() = default;

    static MembershipTable from_rows(const std::vector<MembershipRow>& rows);

    std::size_t num_lists() const { return lists_.size(); }
    std::size_t num_movies() const { return movies_.size(); }
    std::size_t num_memberships() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    /// Lexicographically sorted list ids.
    const std::vector<std::string>& lists() const { return lists_; }
    /// Lexicographically sorted movie ids.
    const std::vector<std::string>& movies() const { return movies_; }

    /// Owner of a list, "" when unknown.
    const std::string& owner(std::uint32_t list_idx) const { return owners_[list_idx]; }

    /// Movies on a list, as sorted movie indices.
    std::span<const std::uint32_t> list_members(std::uint32_t list_idx) const;
    /// Lists containing a movie, as sorted list indices (the movie's list set).
    std::span<const std::uint32_t> movie_lists(std::uint32_t movie_idx) const;

    std::optional<std::uint32_t> list_index(std::string_view list_id) const;
    std::optional<std::uint32_t> movie_index(std::string_view movie_id) const;

    bool operator==(const MembershipTable&) const = default;

  private:
    friend MembershipTable filter_memberships_impl(const MembershipTable&,
                                                   const std::vector<bool>&,
                                                   const std::vector<bool>&);

    std::vector<std::string> lists_;
    std::vector<std::string> owners_;
    std::vector<std::string> movies_;
    // list -> movie indices (CSR)
    std::vector<std::uint32_t> member_offsets_;
    std::vector<std::uint32_t> members_;
    // movie -> list indices (CSR)
    std::vector<std::uint32_t> list_set_offsets_;
    std::vector<std::uint32_t> list_sets_;

    void build_indexes(std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs);
};

inline constexpr std::size_t kNoListSizeCap = std::numeric_limits<std::size_t>::max();

/// Parse a membership file. Duplicate rows collapse silently; malformed rows
/// raise ParseError naming the line; unreadable files raise IoError.
MembershipTable parse_memberships(const std::filesystem::path& path, Format format);

/// Write a table back out, rows sorted by (list_id, movie_id).
void write_memberships(const MembershipTable& table, const std::filesystem::path& path,
                       Format format);

/// Keep only lists whose size s satisfies min_size <= s <= max_size.
MembershipTable filter_lists(const MembershipTable& table, std::size_t min_size = 5,
                             std::size_t max_size = 100);

/// Keep only movies appearing in at least min_lists lists of the given table.
/// Lists left empty by the removal disappear.
MembershipTable filter_movies(const MembershipTable& table, std::size_t min_lists = 5);

}  // namespace colist
