#include "rigid/interchange.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rigid::io {

std::string canonical_text(const Digraph& g)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& r = g.role(vertex(i));
        out << "v " << i << ' ' << to_string(r.tag) << ' ' << r.payload << '\n';
    }
    for (const auto& a : g.arrows())
        out << "a " << index(a.from) << ' ' << index(a.to) << '\n';
    return out.str();
}

std::string content_hash(const Digraph& g)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text(g)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json graph_to_json(const Digraph& g)
{
    nlohmann::json vs = nlohmann::json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& r = g.role(vertex(i));
        vs.push_back({{"id", i}, {"tag", std::string(to_string(r.tag))}, {"payload", r.payload}});
    }
    nlohmann::json as = nlohmann::json::array();
    for (const auto& a : g.arrows())
        as.push_back({index(a.from), index(a.to)});
    return {{"version", kFormatVersion}, {"vertices", std::move(vs)}, {"arrows", std::move(as)}};
}

Digraph graph_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("version").get<int>() != kFormatVersion)
            throw GraphError("unsupported graph format version");
        DigraphBuilder b;
        const auto& vs = j.at("vertices");
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const auto& v = vs[i];
            if (v.at("id").get<std::size_t>() != i)
                throw GraphError("vertex ids must be 0..n-1 in order");
            auto tag = role_tag_from_string(v.at("tag").get<std::string>());
            if (!tag)
                throw GraphError("unknown role tag " + v.at("tag").get<std::string>());
            b.add_vertex({*tag, v.at("payload").get<std::string>()});
        }
        for (const auto& a : j.at("arrows")) {
            if (!a.is_array() || a.size() != 2)
                throw GraphError("arrow must be a pair of ids");
            b.add_arrow(vertex(a[0].get<std::size_t>()), vertex(a[1].get<std::size_t>()));
        }
        return std::move(b).build();
    } catch (const nlohmann::json::exception& e) {
        throw GraphError(std::string("malformed graph document: ") + e.what());
    }
}

namespace {

std::string dot_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string to_dot(const Digraph& g, const std::string& name)
{
    std::ostringstream out;
    out << "digraph \"" << dot_escape(name) << "\" {\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        out << "  " << i << " [label=\"" << dot_escape(g.role(vertex(i)).to_string()) << "\"];\n";
    for (const auto& a : g.arrows())
        out << "  " << index(a.from) << " -> " << index(a.to) << ";\n";
    out << "}\n";
    return out.str();
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace rigid::io
