#include "colist/membership.hpp"

#include <algorithm>
#include <fstream>
#include <utility>

#include <json.hpp>

#include "colist/errors.hpp"

namespace colist {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            cells.emplace_back(line.substr(start));
            break;
        }
        cells.emplace_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return cells;
}

std::string loc(const std::filesystem::path& path, std::size_t line_no) {
    return path.string() + ":" + std::to_string(line_no);
}

std::vector<MembershipRow> read_membership_rows_tsv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<MembershipRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        if (cells.size() != 3) {
            throw ParseError(loc(path, line_no) + ": expected 3 tab-separated columns, got " +
                             std::to_string(cells.size()));
        }
        if (cells[0].empty()) throw ParseError(loc(path, line_no) + ": empty list_id");
        if (cells[2].empty()) throw ParseError(loc(path, line_no) + ": empty movie_id");
        rows.push_back({std::move(cells[0]), std::move(cells[1]), std::move(cells[2])});
    }
    return rows;
}

std::vector<MembershipRow> read_membership_rows_jsonl(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<MembershipRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(loc(path, line_no) + ": invalid JSON: " + e.what());
        }
        if (!obj.is_object()) throw ParseError(loc(path, line_no) + ": expected a JSON object");
        MembershipRow row;
        auto get_string = [&](const char* key, bool required) -> std::string {
            auto it = obj.find(key);
            if (it == obj.end() || it->is_null()) {
                if (required) throw ParseError(loc(path, line_no) + ": missing field " + key);
                return "";
            }
            if (!it->is_string())
                throw ParseError(loc(path, line_no) + ": field " + key + " must be a string");
            return it->get<std::string>();
        };
        row.list_id = get_string("list_id", true);
        row.user_id = get_string("user_id", false);
        row.movie_id = get_string("movie_id", true);
        if (row.list_id.empty()) throw ParseError(loc(path, line_no) + ": empty list_id");
        if (row.movie_id.empty()) throw ParseError(loc(path, line_no) + ": empty movie_id");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<std::uint32_t> index_in_sorted(const std::vector<std::string>& ids,
                                             std::string_view id) {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - ids.begin());
}

}  // namespace

MembershipTable MembershipTable::from_rows(const std::vector<MembershipRow>& rows) {
    MembershipTable table;
    table.lists_.reserve(rows.size());
    table.movies_.reserve(rows.size());
    for (const auto& row : rows) {
        table.lists_.push_back(row.list_id);
        table.movies_.push_back(row.movie_id);
    }
    std::sort(table.lists_.begin(), table.lists_.end());
    table.lists_.erase(std::unique(table.lists_.begin(), table.lists_.end()), table.lists_.end());
    std::sort(table.movies_.begin(), table.movies_.end());
    table.movies_.erase(std::unique(table.movies_.begin(), table.movies_.end()),
                        table.movies_.end());

    table.owners_.assign(table.lists_.size(), "");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(rows.size());
    for (const auto& row : rows) {
        auto list_idx = *index_in_sorted(table.lists_, row.list_id);
        auto movie_idx = *index_in_sorted(table.movies_, row.movie_id);
        pairs.emplace_back(list_idx, movie_idx);
        // first non-empty owner wins
        if (!row.user_id.empty() && table.owners_[list_idx].empty()) {
            table.owners_[list_idx] = row.user_id;
        }
    }
    table.build_indexes(std::move(pairs));
    return table;
}

void MembershipTable::build_indexes(std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    member_offsets_.assign(lists_.size() + 1, 0);
    members_.resize(pairs.size());
    for (const auto& [l, m] : pairs) member_offsets_[l + 1]++;
    for (std::size_t i = 1; i < member_offsets_.size(); ++i)
        member_offsets_[i] += member_offsets_[i - 1];
    {
        std::vector<std::uint32_t> cursor(member_offsets_.begin(), member_offsets_.end() - 1);
        for (const auto& [l, m] : pairs) members_[cursor[l]++] = m;
    }

    list_set_offsets_.assign(movies_.size() + 1, 0);
    list_sets_.resize(pairs.size());
    for (const auto& [l, m] : pairs) list_set_offsets_[m + 1]++;
    for (std::size_t i = 1; i < list_set_offsets_.size(); ++i)
        list_set_offsets_[i] += list_set_offsets_[i - 1];
    {
        std::vector<std::uint32_t> cursor(list_set_offsets_.begin(), list_set_offsets_.end() - 1);
        for (const auto& [l, m] : pairs) list_sets_[cursor[m]++] = l;
    }
}

std::span<const std::uint32_t> MembershipTable::list_members(std::uint32_t list_idx) const {
    return {members_.data() + member_offsets_[list_idx],
            members_.data() + member_offsets_[list_idx + 1]};
}

std::span<const std::uint32_t> MembershipTable::movie_lists(std::uint32_t movie_idx) const {
    return {list_sets_.data() + list_set_offsets_[movie_idx],
            list_sets_.data() + list_set_offsets_[movie_idx + 1]};
}

std::optional<std::uint32_t> MembershipTable::list_index(std::string_view list_id) const {
    return index_in_sorted(lists_, list_id);
}

std::optional<std::uint32_t> MembershipTable::movie_index(std::string_view movie_id) const {
    return index_in_sorted(movies_, movie_id);
}

MembershipTable parse_memberships(const std::filesystem::path& path, Format format) {
    auto rows = format == Format::tsv ? read_membership_rows_tsv(path)
                                      : read_membership_rows_jsonl(path);
    return MembershipTable::from_rows(rows);
}

void write_memberships(const MembershipTable& table, const std::filesystem::path& path,
                       Format format) {
    auto out = open_output(path);
    for (std::uint32_t l = 0; l < table.num_lists(); ++l) {
        for (std::uint32_t m : table.list_members(l)) {
            if (format == Format::tsv) {
                out << table.lists()[l] << '\t' << table.owner(l) << '\t' << table.movies()[m]
                    << '\n';
            } else {
                nlohmann::json obj;
                obj["list_id"] = table.lists()[l];
                if (!table.owner(l).empty()) obj["user_id"] = table.owner(l);
                obj["movie_id"] = table.movies()[m];
                out << obj.dump() << '\n';
            }
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

/// Shared filter machinery: keep the memberships whose list and movie are
/// both flagged, then drop lists and movies left without memberships.
MembershipTable filter_memberships_impl(const MembershipTable& table,
                                        const std::vector<bool>& keep_list,
                                        const std::vector<bool>& keep_movie) {
    std::vector<bool> list_alive(table.num_lists(), false);
    std::vector<bool> movie_alive(table.num_movies(), false);
    for (std::uint32_t l = 0; l < table.num_lists(); ++l) {
        if (!keep_list[l]) continue;
        for (std::uint32_t m : table.list_members(l)) {
            if (keep_movie[m]) {
                list_alive[l] = true;
                movie_alive[m] = true;
            }
        }
    }

    MembershipTable out;
    std::vector<std::uint32_t> list_remap(table.num_lists(), 0);
    std::vector<std::uint32_t> movie_remap(table.num_movies(), 0);
    for (std::uint32_t l = 0; l < table.num_lists(); ++l) {
        if (list_alive[l]) {
            list_remap[l] = static_cast<std::uint32_t>(out.lists_.size());
            out.lists_.push_back(table.lists()[l]);
            out.owners_.push_back(table.owner(l));
        }
    }
    for (std::uint32_t m = 0; m < table.num_movies(); ++m) {
        if (movie_alive[m]) {
            movie_remap[m] = static_cast<std::uint32_t>(out.movies_.size());
            out.movies_.push_back(table.movies()[m]);
        }
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t l = 0; l < table.num_lists(); ++l) {
        if (!list_alive[l]) continue;
        for (std::uint32_t m : table.list_members(l)) {
            if (movie_alive[m] && keep_movie[m]) pairs.emplace_back(list_remap[l], movie_remap[m]);
        }
    }
    out.build_indexes(std::move(pairs));
    return out;
}

MembershipTable filter_lists(const MembershipTable& table, std::size_t min_size,
                             std::size_t max_size) {
    if (min_size < 1) throw ContractError("filter_lists: min_size must be >= 1");
    if (max_size < min_size) throw ContractError("filter_lists: max_size must be >= min_size");
    std::vector<bool> keep_list(table.num_lists());
    for (std::uint32_t l = 0; l < table.num_lists(); ++l) {
        std::size_t size = table.list_members(l).size();
        keep_list[l] = size >= min_size && size <= max_size;
    }
    return filter_memberships_impl(table, keep_list, std::vector<bool>(table.num_movies(), true));
}

MembershipTable filter_movies(const MembershipTable& table, std::size_t min_lists) {
    if (min_lists < 1) throw ContractError("filter_movies: min_lists must be >= 1");
    std::vector<bool> keep_movie(table.num_movies());
    for (std::uint32_t m = 0; m < table.num_movies(); ++m) {
        keep_movie[m] = table.movie_lists(m).size() >= min_lists;
    }
    return filter_memberships_impl(table, std::vector<bool>(table.num_lists(), true), keep_movie);
}

}  // namespace colist
