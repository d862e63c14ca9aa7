#include "girglab/graph_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace girglab::io {

std::string format_double(double x) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

void write_edge_list(std::ostream& os, const girg::Graph& g) {
    for (std::size_t u = 0; u < g.order(); ++u)
        for (girg::VertexId v : g.neighbors(static_cast<girg::VertexId>(u)))
            if (static_cast<std::size_t>(v) > u)
                os << u << ' ' << v << '\n';
}

void write_vertices(std::ostream& os, const girg::Graph& g) {
    for (std::size_t u = 0; u < g.order(); ++u) {
        const auto id = static_cast<girg::VertexId>(u);
        os << u << ' ' << format_double(g.weight(id));
        for (double c : g.position(id))
            os << ' ' << format_double(c);
        os << '\n';
    }
}

std::vector<std::pair<girg::VertexId, girg::VertexId>> read_edge_list(std::istream& is) {
    std::vector<std::pair<girg::VertexId, girg::VertexId>> edges;
    long long u = 0, v = 0;
    while (is >> u >> v)
        edges.emplace_back(static_cast<girg::VertexId>(u), static_cast<girg::VertexId>(v));
    if (!is.eof())
        throw std::runtime_error("read_edge_list: malformed line");
    return edges;
}

VertexRecord read_vertices(std::istream& is) {
    VertexRecord rec;
    std::string line;
    std::size_t expect = 0;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t)
            tok.push_back(t);
        if (tok.size() < 3)
            throw std::runtime_error("read_vertices: expected id, weight and coordinates");
        if (std::stoull(tok[0]) != expect)
            throw std::runtime_error("read_vertices: ids must be consecutive from 0");
        const int d = static_cast<int>(tok.size()) - 2;
        if (rec.d == 0)
            rec.d = d;
        else if (rec.d != d)
            throw std::runtime_error("read_vertices: inconsistent dimension");
        rec.weights.push_back(std::stod(tok[1]));
        for (int i = 0; i < d; ++i)
            rec.coords.push_back(std::stod(tok[2 + i]));
        ++expect;
    }
    return rec;
}

} // namespace girglab::io
