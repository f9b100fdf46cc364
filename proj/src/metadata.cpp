#include "colist/metadata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "colist/errors.hpp"

namespace colist {

namespace {

constexpr std::array<std::string_view, kNumAttributes> kAttributeNames{
    "type", "decade", "genres", "countries", "languages", "directors", "actors"};

std::string loc(const std::filesystem::path& path, std::size_t line_no) {
    return path.string() + ":" + std::to_string(line_no);
}

// shortest round-trip representation
std::string rating_to_string(double rating) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, rating);
    return std::string(buf, end);
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.emplace_back(text.substr(start));
            break;
        }
        parts.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::vector<std::string> split_values(const std::string& cell) {
    std::vector<std::string> values;
    for (auto& part : split_on(cell, '|')) {
        if (!part.empty()) values.push_back(std::move(part));
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

void validate_rating(double rating, const std::string& where) {
    if (!(rating >= 1.0 && rating <= 10.0)) {
        throw ValidationError(where + ": rating " + std::to_string(rating) +
                              " outside [1,10]");
    }
}

double parse_rating(const std::string& cell, const std::string& where) {
    std::size_t consumed = 0;
    double rating = 0.0;
    try {
        rating = std::stod(cell, &consumed);
    } catch (const std::exception&) {
        throw ParseError(where + ": cannot parse rating '" + cell + "'");
    }
    if (consumed != cell.size() || !std::isfinite(rating)) {
        throw ParseError(where + ": cannot parse rating '" + cell + "'");
    }
    validate_rating(rating, where);
    return rating;
}

std::vector<std::pair<std::string, MovieMetadata>> read_entries_tsv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::pair<std::string, MovieMetadata>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto cells = split_on(line, '\t');
        if (cells.size() != 2 + kNumAttributes) {
            throw ParseError(loc(path, line_no) + ": expected " +
                             std::to_string(2 + kNumAttributes) + " tab-separated columns, got " +
                             std::to_string(cells.size()));
        }
        if (cells[0].empty()) throw ParseError(loc(path, line_no) + ": empty movie_id");
        MovieMetadata meta;
        for (std::size_t a = 0; a < kNumAttributes; ++a) {
            const std::string& cell = cells[1 + a];
            if (cell.empty()) continue;
            if (attribute_is_multi(static_cast<Attribute>(a))) {
                meta.attrs[a] = split_values(cell);
            } else {
                meta.attrs[a] = {cell};
            }
        }
        const std::string& rating_cell = cells[1 + kNumAttributes];
        if (!rating_cell.empty()) meta.rating = parse_rating(rating_cell, loc(path, line_no));
        entries.emplace_back(std::move(cells[0]), std::move(meta));
    }
    return entries;
}

std::vector<std::pair<std::string, MovieMetadata>> read_entries_jsonl(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::pair<std::string, MovieMetadata>> entries;
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
        auto id_it = obj.find("movie_id");
        if (id_it == obj.end() || !id_it->is_string() || id_it->get<std::string>().empty()) {
            throw ParseError(loc(path, line_no) + ": missing movie_id");
        }
        MovieMetadata meta;
        for (std::size_t a = 0; a < kNumAttributes; ++a) {
            auto attr = static_cast<Attribute>(a);
            auto it = obj.find(std::string(attribute_name(attr)));
            if (it == obj.end() || it->is_null()) continue;
            if (attribute_is_multi(attr)) {
                if (!it->is_array()) {
                    throw ParseError(loc(path, line_no) + ": field " +
                                     std::string(attribute_name(attr)) + " must be an array");
                }
                std::vector<std::string> values;
                for (const auto& v : *it) {
                    if (!v.is_string()) {
                        throw ParseError(loc(path, line_no) + ": field " +
                                         std::string(attribute_name(attr)) +
                                         " must contain strings");
                    }
                    if (!v.get<std::string>().empty()) values.push_back(v.get<std::string>());
                }
                std::sort(values.begin(), values.end());
                values.erase(std::unique(values.begin(), values.end()), values.end());
                meta.attrs[a] = std::move(values);
            } else {
                if (!it->is_string()) {
                    throw ParseError(loc(path, line_no) + ": field " +
                                     std::string(attribute_name(attr)) + " must be a string");
                }
                if (!it->get<std::string>().empty()) meta.attrs[a] = {it->get<std::string>()};
            }
        }
        auto rating_it = obj.find("rating");
        if (rating_it != obj.end() && !rating_it->is_null()) {
            if (!rating_it->is_number()) {
                throw ParseError(loc(path, line_no) + ": rating must be a number");
            }
            double rating = rating_it->get<double>();
            validate_rating(rating, loc(path, line_no));
            meta.rating = rating;
        }
        entries.emplace_back(id_it->get<std::string>(), std::move(meta));
    }
    return entries;
}

}  // namespace

std::string_view attribute_name(Attribute a) {
    return kAttributeNames[static_cast<std::size_t>(a)];
}

std::optional<Attribute> attribute_from_name(std::string_view name) {
    for (std::size_t a = 0; a < kNumAttributes; ++a) {
        if (kAttributeNames[a] == name) return static_cast<Attribute>(a);
    }
    return std::nullopt;
}

bool MovieMetadata::has(Attribute a, std::string_view value) const {
    auto vals = values(a);
    return std::binary_search(vals.begin(), vals.end(), value,
                              [](std::string_view x, std::string_view y) { return x < y; });
}

std::string_view MovieMetadata::type() const {
    auto vals = values(Attribute::type);
    return vals.empty() ? std::string_view{} : std::string_view{vals.front()};
}

std::string_view MovieMetadata::decade() const {
    auto vals = values(Attribute::decade);
    return vals.empty() ? std::string_view{} : std::string_view{vals.front()};
}

MetadataTable MetadataTable::from_entries(
    std::vector<std::pair<std::string, MovieMetadata>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].first == entries[i - 1].first) {
            throw ValidationError("duplicate movie_id: " + entries[i].first);
        }
    }
    MetadataTable table;
    table.ids_.reserve(entries.size());
    table.records_.reserve(entries.size());
    for (auto& [id, meta] : entries) {
        table.ids_.push_back(std::move(id));
        table.records_.push_back(std::move(meta));
    }
    return table;
}

const MovieMetadata* MetadataTable::find(std::string_view movie_id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), movie_id);
    if (it == ids_.end() || *it != movie_id) return nullptr;
    return &records_[static_cast<std::size_t>(it - ids_.begin())];
}

MetadataTable parse_metadata(const std::filesystem::path& path, Format format) {
    auto entries = format == Format::tsv ? read_entries_tsv(path) : read_entries_jsonl(path);
    return MetadataTable::from_entries(std::move(entries));
}

void write_metadata(const MetadataTable& table, const std::filesystem::path& path, Format format) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& meta = table.at(i);
        if (format == Format::tsv) {
            out << table.id_at(i);
            for (std::size_t a = 0; a < kNumAttributes; ++a) {
                out << '\t';
                const auto& values = meta.attrs[a];
                for (std::size_t v = 0; v < values.size(); ++v) {
                    if (v) out << '|';
                    out << values[v];
                }
            }
            out << '\t';
            if (meta.rating) out << rating_to_string(*meta.rating);
            out << '\n';
        } else {
            nlohmann::json obj;
            obj["movie_id"] = table.id_at(i);
            for (std::size_t a = 0; a < kNumAttributes; ++a) {
                auto attr = static_cast<Attribute>(a);
                const auto& values = meta.attrs[a];
                if (values.empty()) continue;
                if (attribute_is_multi(attr)) {
                    obj[std::string(attribute_name(attr))] = values;
                } else {
                    obj[std::string(attribute_name(attr))] = values.front();
                }
            }
            if (meta.rating) obj["rating"] = *meta.rating;
            out << obj.dump() << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace colist
