#include "sepskel/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "sepskel/errors.hpp"
#include "sepskel/graph_io.hpp"
#include "sepskel/ingest.hpp"

namespace sepskel {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::vector<VertexId> identity_mapping(std::size_t n) {
    std::vector<VertexId> m(n);
    std::iota(m.begin(), m.end(), VertexId{0});
    return m;
}

void contract_into(LoadedGraph& out, double fraction) {
    if (fraction >= 1.0 || out.graph.empty()) return;
    auto c = simplify_contract(out.graph, fraction);
    for (auto& m : out.mapping) m = c.mapping[m];
    out.graph = std::move(c.graph);
}

} // namespace

InputFormat infer_format(const std::filesystem::path& path, const std::string& format) {
    std::string key = lower(format.empty() ? path.extension().string() : format);
    if (!key.empty() && key.front() == '.') key.erase(0, 1);
    if (key == "sgraph" || key == "graph") return InputFormat::Graph;
    if (key == "obj" || key == "mesh") return InputFormat::Mesh;
    if (key == "vox" || key == "voxels") return InputFormat::Voxels;
    if (key == "xyz" || key == "pts" || key == "points") return InputFormat::Points;
    throw std::invalid_argument("cannot infer input format of '" + path.string() +
                                "'; pass --format");
}

void PipelineConfig::validate() const {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("--tau must lie in (0, 1)");
    if (smooth_iters < 0) throw std::invalid_argument("--smooth-iters must be >= 0");
    if (threads < 1) throw std::invalid_argument("--threads must be >= 1");
    if (knn < 1) throw std::invalid_argument("--knn must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("--radius must be positive");
    if (sat_l && *sat_l < 1) throw std::invalid_argument("--sat-l must be >= 1");
    if (sat_radius && !(*sat_radius > 0.0)) throw std::invalid_argument("--sat-radius must be positive");
    if (!(contract > 0.0 && contract <= 1.0)) throw std::invalid_argument("--contract must lie in (0, 1]");
}

LoadedGraph load_graph(const std::filesystem::path& path, InputFormat format,
                       const PipelineConfig& config) {
    LoadedGraph out;
    switch (format) {
    case InputFormat::Graph: {
        auto file = read_sgraph(path);
        out.graph = std::move(file.graph);
        out.mapping = identity_mapping(out.graph.vertex_count());
        if (config.sat_l) out.graph = saturate(out.graph, *config.sat_l, config.sat_radius);
        break;
    }
    case InputFormat::Mesh: {
        auto mg = mesh_to_graph(read_obj(path));
        out.skipped_faces = mg.skipped_faces;
        out.graph = saturate(mg.graph, config.sat_l.value_or(1), config.sat_radius);
        out.mapping = identity_mapping(out.graph.vertex_count());
        break;
    }
    case InputFormat::Voxels: {
        out.graph = voxels_to_graph(read_voxels(path), config.vox_threshold);
        if (config.sat_l) out.graph = saturate(out.graph, *config.sat_l, config.sat_radius);
        // Map over foreground voxels only, in scan order.
        out.mapping = identity_mapping(out.graph.vertex_count());
        break;
    }
    case InputFormat::Points: {
        PointGraphParams p;
        p.k = config.knn;
        p.radius = config.radius;
        p.l = config.sat_l.value_or(3);
        p.l_radius = config.sat_radius.value_or(2.0 * config.radius);
        auto pg = points_to_graph(read_points(path), p);
        out.graph = std::move(pg.graph);
        out.mapping = std::move(pg.mapping);
        break;
    }
    }
    contract_into(out, config.contract);
    return out;
}

SeparatorSet find_separators(const SpatialGraph& graph, const PipelineConfig& config) {
    if (config.deterministic || config.threads <= 1)
        return sample_separators_serial(graph, config.tau, config.optimize, config.seed);
    return sample_separators(graph, {config.tau, config.optimize, config.seed, config.threads});
}

void count_topology(const SpatialGraph& skeleton, PipelineStats& stats) {
    stats.skeleton_vertices = skeleton.vertex_count();
    stats.leaves = stats.branches = 0;
    for (VertexId v = 0; v < skeleton.vertex_count(); ++v) {
        if (skeleton.degree(v) == 1) ++stats.leaves;
        if (skeleton.degree(v) >= 3) ++stats.branches;
    }
}

PipelineResult run_pipeline(const SpatialGraph& graph, const PipelineConfig& config) {
    config.validate();
    if (graph.empty()) throw InputError("empty graph");

    PipelineResult result;
    auto& st = result.stats;
    st.input_vertices = graph.vertex_count();
    Stopwatch clock;

    const auto seps = find_separators(graph, config);
    st.separators_found = seps.separators.size();
    st.seconds.separators = clock.lap();

    const auto packed = pack_separators(seps);
    st.separators_packed = packed.chosen.size();
    st.seconds.packing = clock.lap();
    if (packed.chosen.empty())
        result.warnings.emplace_back("no separators found; one node per connected component");

    const auto assignment = maximize_separators(graph, packed);
    auto quotient = quotient_graph(graph, assignment, config.position_mode, &packed);
    auto collapsed = collapse_clique_complexes(quotient.graph, quotient.weight);
    Skeleton& skel = result.skeleton;
    skel.graph = std::move(collapsed.graph);
    skel.weight = std::move(collapsed.weight);
    skel.assignment = assignment.label;
    skel.class_nodes = assignment.class_count;
    st.seconds.extraction = clock.lap();

    skel = smooth_skeleton(std::move(skel), config.smooth_iters);
    annotate_radii(skel, graph);
    st.seconds.smoothing = clock.lap();

    count_topology(skel.graph, st);
    return result;
}

void print_stats(std::ostream& out, const PipelineStats& s) {
    out << "input vertices     " << s.input_vertices << '\n'
        << "separators found   " << s.separators_found << '\n'
        << "separators packed  " << s.separators_packed << '\n'
        << "skeleton vertices  " << s.skeleton_vertices << '\n'
        << "leaves             " << s.leaves << '\n'
        << "branches           " << s.branches << '\n';
    const auto old = out.precision(3);
    out << std::fixed << "time ingest        " << s.seconds.ingest << " s\n"
        << "time separators    " << s.seconds.separators << " s\n"
        << "time packing       " << s.seconds.packing << " s\n"
        << "time extraction    " << s.seconds.extraction << " s\n"
        << "time smoothing     " << s.seconds.smoothing << " s\n";
    out.unsetf(std::ios::fixed);
    out.precision(old);
}

} // namespace sepskel
