#pragma once

#include <optional>
#include <string_view>

namespace colist {

/// On-disk table encodings accepted by the ingest parsers.
enum class Format { tsv, jsonl };

inline std::optional<Format> format_from_name(std::string_view name) {
    if (name == "tsv") return Format::tsv;
    if (name == "jsonl") return Format::jsonl;
    return std::nullopt;
}

inline const char* format_name(Format f) {
    return f == Format::tsv ? "tsv" : "jsonl";
}

}  // namespace colist
