#include "sepskel/graph_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "sepskel/errors.hpp"

namespace sepskel {

namespace {

bool skip_line(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

} // namespace

GraphFile read_sgraph(std::istream& in) {
    std::vector<Vec3> positions;
    std::vector<double> radius, weight;
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<std::size_t> edge_lines;
    int arity = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skip_line(line)) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            std::vector<double> vals;
            double x;
            while (ls >> x) vals.push_back(x);
            if (!ls.eof()) throw ParseError("bad number in vertex line", lineno);
            const int n = static_cast<int>(vals.size());
            if (n != 3 && n != 5) throw ParseError("vertex line needs 3 or 5 numbers", lineno);
            if (arity == 0) arity = n;
            if (n != arity) throw ParseError("mixed plain and skeleton vertex lines", lineno);
            positions.emplace_back(vals[0], vals[1], vals[2]);
            if (n == 5) {
                radius.push_back(vals[3]);
                weight.push_back(vals[4]);
            }
        } else if (tag == "e") {
            long long i, j;
            if (!(ls >> i >> j)) throw ParseError("edge line needs two indices", lineno);
            std::string rest;
            if (ls >> rest) throw ParseError("trailing tokens in edge line", lineno);
            if (i < 0 || j < 0) throw ParseError("negative vertex index", lineno);
            if (i == j) throw ParseError("self-loop edge", lineno);
            edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>(j));
            edge_lines.push_back(lineno);
        } else {
            throw ParseError("unknown record '" + tag + "'", lineno);
        }
    }
    for (std::size_t k = 0; k < edges.size(); ++k)
        if (edges[k].first >= positions.size() || edges[k].second >= positions.size())
            throw ParseError("edge references missing vertex", edge_lines[k]);

    GraphFile out;
    out.graph = SpatialGraph(std::move(positions), edges);
    out.radius = std::move(radius);
    out.weight = std::move(weight);
    return out;
}

GraphFile read_sgraph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_sgraph(in);
}

void write_sgraph(std::ostream& out, const SpatialGraph& graph) {
    write_sgraph(out, graph, {}, {});
}

void write_sgraph(std::ostream& out, const SpatialGraph& graph,
                  std::span<const double> radius, std::span<const double> weight) {
    const bool skeleton = !weight.empty();
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "# sgraph " << graph.vertex_count() << " vertices " << graph.edge_count()
        << " edges\n";
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
        const auto& p = graph.position(v);
        out << "v " << p.x() << ' ' << p.y() << ' ' << p.z();
        if (skeleton) out << ' ' << radius[v] << ' ' << weight[v];
        out << '\n';
    }
    for (auto [u, v] : graph.edges()) out << "e " << u << ' ' << v << '\n';
}

void write_sgraph(const std::filesystem::path& path, const GraphFile& file) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_sgraph(out, file.graph, file.radius, file.weight);
    if (!out) throw IoError("write failed for " + path.string());
}

void write_map(std::ostream& out, std::span<const VertexId> assignment) {
    for (VertexId v = 0; v < assignment.size(); ++v)
        out << "m " << v << ' ' << assignment[v] << '\n';
}

std::vector<VertexId> read_map(std::istream& in) {
    std::vector<VertexId> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skip_line(line)) continue;
        std::istringstream ls(line);
        std::string tag;
        long long i, node;
        if (!(ls >> tag >> i >> node) || tag != "m" || i < 0 || node < 0)
            throw ParseError("malformed map line", lineno);
        if (static_cast<std::size_t>(i) >= out.size()) out.resize(i + 1, 0);
        out[i] = static_cast<VertexId>(node);
    }
    return out;
}

} // namespace sepskel
