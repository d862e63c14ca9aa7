#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "girglab/girg.hpp"

namespace girglab::io {

// "u v" per line, 0-indexed, u < v
void write_edge_list(std::ostream& os, const girg::Graph& g);
// "id weight x0 ... x{d-1}", 17 significant digits
void write_vertices(std::ostream& os, const girg::Graph& g);

std::vector<std::pair<girg::VertexId, girg::VertexId>> read_edge_list(std::istream& is);

struct VertexRecord {
    std::vector<double> weights;
    std::vector<double> coords; // n * d
    int d = 0;
};
VertexRecord read_vertices(std::istream& is);

// "%.17g"
std::string format_double(double x);

} // namespace girglab::io
