#include "colist/graph_io.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "colist/errors.hpp"

namespace colist {

namespace {

std::string fmt6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

const char* kind_name(WeightKind kind) {
    return kind == WeightKind::raw_count ? "raw_count" : "normalized";
}

std::optional<WeightKind> kind_from_name(std::string_view name) {
    if (name == "raw_count") return WeightKind::raw_count;
    if (name == "normalized") return WeightKind::normalized;
    return std::nullopt;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_edge_list(const CoListGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "# weight_kind: " << kind_name(g.weight_kind()) << '\n';
    g.for_each_edge([&](std::uint32_t a, std::uint32_t b, double w) {
        out << g.id_of(a) << '\t' << g.id_of(b) << '\t' << fmt6(w) << '\n';
    });
    if (!out) throw IoError("write failed: " + path.string());
}

CoListGraph read_edge_list(const std::filesystem::path& path,
                           std::optional<WeightKind> kind_override) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::optional<WeightKind> kind = kind_override;
    struct Edge {
        std::string a, b;
        double w;
    };
    std::vector<Edge> edges;
    std::vector<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto pos = line.find("weight_kind:");
            if (pos != std::string::npos && !kind_override) {
                std::string name = line.substr(pos + 12);
                name.erase(0, name.find_first_not_of(" \t"));
                name.erase(name.find_last_not_of(" \t") + 1);
                kind = kind_from_name(name);
            }
            continue;
        }
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected id\\tid\\tweight");
        }
        Edge e;
        e.a = line.substr(0, t1);
        e.b = line.substr(t1 + 1, t2 - t1 - 1);
        try {
            e.w = std::stod(line.substr(t2 + 1));
        } catch (const std::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad weight");
        }
        if (e.a.empty() || e.b.empty() || e.a == e.b) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad edge ids");
        }
        ids.push_back(e.a);
        ids.push_back(e.b);
        edges.push_back(std::move(e));
    }
    if (!kind) {
        throw ParseError(path.string() +
                         ": weight kind unknown (no '# weight_kind:' header and no override)");
    }
    CoListGraph g(std::move(ids), *kind);
    for (const auto& e : edges) g.add_edge(e.a, e.b, e.w);
    g.finalize();
    return g;
}

CoListGraph quantize_weights(const CoListGraph& g) {
    CoListGraph out(g.node_ids(), g.weight_kind());
    g.for_each_edge([&](std::uint32_t a, std::uint32_t b, double w) {
        // the double nearest the printed 6-decimal form, exactly what a
        // reader of the file would see; weights below the format's
        // resolution vanish
        double q = std::stod(fmt6(w));
        if (q > 0.0) out.add_edge(a, b, q);
    });
    out.finalize();
    return out;
}

void write_graphml(const CoListGraph& g, const std::filesystem::path& path,
                   const MetadataTable* meta,
                   const std::map<std::string, std::vector<std::string>>* node_clusters) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
    out << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
    if (meta) {
        for (auto attr : kAttributes) {
            out << "  <key id=\"" << attribute_name(attr) << "\" for=\"node\" attr.name=\""
                << attribute_name(attr) << "\" attr.type=\"string\"/>\n";
        }
        out << "  <key id=\"rating\" for=\"node\" attr.name=\"rating\" attr.type=\"double\"/>\n";
    }
    if (node_clusters) {
        out << "  <key id=\"clusters\" for=\"node\" attr.name=\"clusters\""
            << " attr.type=\"string\"/>\n";
        out << "  <key id=\"multi\" for=\"node\" attr.name=\"multi\" attr.type=\"boolean\"/>\n";
    }
    out << "  <graph id=\"G\" edgedefault=\"undirected\">\n";

    for (std::uint32_t i = 0; i < g.num_nodes(); ++i) {
        const std::string& id = g.id_of(i);
        out << "    <node id=\"" << xml_escape(id) << "\">";
        bool has_data = false;
        if (meta) {
            if (const MovieMetadata* record = meta->find(id)) {
                for (auto attr : kAttributes) {
                    auto values = record->values(attr);
                    if (values.empty()) continue;
                    std::string joined;
                    for (std::size_t v = 0; v < values.size(); ++v) {
                        if (v) joined += '|';
                        joined += values[v];
                    }
                    out << "\n      <data key=\"" << attribute_name(attr) << "\">"
                        << xml_escape(joined) << "</data>";
                    has_data = true;
                }
                if (record->rating) {
                    out << "\n      <data key=\"rating\">" << *record->rating << "</data>";
                    has_data = true;
                }
            }
        }
        if (node_clusters) {
            auto it = node_clusters->find(id);
            if (it != node_clusters->end() && !it->second.empty()) {
                std::string joined;
                for (std::size_t v = 0; v < it->second.size(); ++v) {
                    if (v) joined += ' ';
                    joined += it->second[v];
                }
                out << "\n      <data key=\"clusters\">" << xml_escape(joined) << "</data>";
                out << "\n      <data key=\"multi\">" << (it->second.size() > 1 ? "true" : "false")
                    << "</data>";
                has_data = true;
            }
        }
        if (has_data) out << "\n    ";
        out << "</node>\n";
    }
    g.for_each_edge([&](std::uint32_t a, std::uint32_t b, double w) {
        out << "    <edge source=\"" << xml_escape(g.id_of(a)) << "\" target=\""
            << xml_escape(g.id_of(b)) << "\">  <data key=\"weight\">" << fmt6(w)
            << "</data></edge>\n";
    });
    out << "  </graph>\n</graphml>\n";
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace colist
