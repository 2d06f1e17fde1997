// sepskel: skeletons of meshes, voxel grids and point clouds from local separators.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sepskel/errors.hpp"
#include "sepskel/graph_io.hpp"
#include "sepskel/ingest.hpp"
#include "sepskel/packing.hpp"
#include "sepskel/pipeline.hpp"
#include "sepskel/reeb.hpp"
#include "sepskel/separators.hpp"
#include "sepskel/skeleton.hpp"

using namespace sepskel;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kInternal = 3 };

struct Options {
    PipelineConfig config;
    std::string format;
    std::string map_path;
    std::string position_mode = "class-average";
    std::string axes = "1,0,0;0,1,0;0,0,1;1,1,1";
    int sat_l = 0;
    double sat_radius = 0.0;
    int threads = 0;
    int height_smoothing = kDefaultHeightSmoothing;

    // bench
    std::string bench_mode = "subsample";
    int bench_steps = 6;
    double bench_ratio = 0.5;
    int bench_max_side = 48;
};

int default_threads() {
    if (const char* env = std::getenv("SEPSKEL_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t > 0) return t;
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring SEPSKEL_THREADS='" << env << "'\n";
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Copies the flat CLI values into the config once parsing is done.
void finalize(Options& o) {
    o.config.threads = o.threads > 0 ? o.threads : default_threads();
    if (o.sat_l > 0) o.config.sat_l = o.sat_l;
    if (o.sat_radius > 0.0) o.config.sat_radius = o.sat_radius;
    if (o.position_mode == "class-average") o.config.position_mode = PositionMode::ClassAverage;
    else if (o.position_mode == "separator-average") o.config.position_mode = PositionMode::SeparatorAverage;
    else throw std::invalid_argument("--position-mode must be class-average or separator-average");
    o.config.validate();
}

void add_sampling_flags(CLI::App* app, Options& o) {
    app->add_option("--tau", o.config.tau, "front balance threshold")->capture_default_str();
    app->add_option("--seed", o.config.seed, "random seed")->capture_default_str();
    app->add_option("--threads", o.threads, "worker threads (default: SEPSKEL_THREADS or all cores)");
    app->add_flag("--optimize", o.config.optimize, "energy-lowering vertex swaps");
    app->add_flag("--deterministic", o.config.deterministic, "serial, reproducible sampling");
}

void add_ingest_flags(CLI::App* app, Options& o) {
    app->add_option("--format", o.format, "sgraph, obj, vox or xyz (default: from extension)");
    app->add_option("--knn", o.config.knn, "neighbours per point")->capture_default_str();
    app->add_option("--radius", o.config.radius, "neighbour search radius")->capture_default_str();
    app->add_option("--sat-l", o.sat_l, "k-ring saturation (default 1 for meshes, 3 for points)");
    app->add_option("--sat-radius", o.sat_radius, "length limit for saturation edges");
    app->add_option("--contract", o.config.contract, "keep this fraction of vertices")
        ->capture_default_str();
    app->add_option("--vox-threshold", o.config.vox_threshold, "foreground is value > threshold")
        ->capture_default_str();
}

void add_extract_flags(CLI::App* app, Options& o) {
    app->add_option("--smooth-iters", o.config.smooth_iters, "skeleton smoothing rounds")
        ->capture_default_str();
    app->add_option("--position-mode", o.position_mode, "class-average or separator-average")
        ->capture_default_str();
    app->add_option("--map", o.map_path, "write input vertex -> node map here");
}

void write_skeleton(const fs::path& out, const Skeleton& s) {
    write_sgraph(out, GraphFile{s.graph, s.radius, s.weight});
}

void write_map_file(const std::string& path, const Skeleton& s, std::span<const VertexId> mapping) {
    if (path.empty()) return;
    std::vector<VertexId> nodes(mapping.size());
    for (std::size_t i = 0; i < mapping.size(); ++i) nodes[i] = s.assignment[mapping[i]];
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    write_map(out, nodes);
}

SpatialGraph read_graph_only(const fs::path& p) { return read_sgraph(p).graph; }

PackedSeparators as_packed(SeparatorSet set) {
    PackedSeparators p;
    p.source_graph_size = set.source_graph_size;
    for (std::size_t i = 0; i < set.separators.size(); ++i) p.chosen_index.push_back(i);
    p.chosen = std::move(set.separators);
    return p;
}

std::vector<Vec3> parse_axes(const std::string& text) {
    std::vector<Vec3> axes;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        std::replace(item.begin(), item.end(), ',', ' ');
        std::istringstream is(item);
        Vec3 a;
        if (!(is >> a.x() >> a.y() >> a.z()))
            throw std::invalid_argument("--axes expects x,y,z triples separated by ';'");
        if (a.norm() == 0.0) throw std::invalid_argument("--axes contains a zero axis");
        axes.push_back(a);
    }
    if (axes.empty()) throw std::invalid_argument("--axes is empty");
    return axes;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Least-squares slope of log(t) against log(n); r2 receives the fit quality.
double power_law(const std::vector<std::pair<double, double>>& pts, double& r2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double k = static_cast<double>(pts.size());
    for (auto [n, t] : pts) {
        const double x = std::log(n), y = std::log(t);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double cov = sxy - sx * sy / k, vx = sxx - sx * sx / k, vy = syy - sy * sy / k;
    r2 = vx > 0 && vy > 0 ? cov * cov / (vx * vy) : 0.0;
    return vx > 0 ? cov / vx : 0.0;
}

int bench(const fs::path& input, Options& o) {
    if (o.bench_steps < 2) throw std::invalid_argument("--steps must be >= 2");
    std::vector<SpatialGraph> graphs;
    if (o.bench_mode == "subsample") {
        auto base = load_graph(input, infer_format(input, o.format), o.config).graph;
        if (!(o.bench_ratio > 0.0 && o.bench_ratio < 1.0))
            throw std::invalid_argument("--ratio must lie in (0, 1)");
        double f = 1.0;
        for (int i = 0; i < o.bench_steps; ++i, f *= o.bench_ratio)
            graphs.push_back(i == 0 ? base : simplify_contract(base, f).graph);
        std::reverse(graphs.begin(), graphs.end());
    } else if (o.bench_mode == "voxel") {
        if (infer_format(input, o.format) != InputFormat::Mesh)
            throw std::invalid_argument("voxel benchmarking needs a mesh input");
        const auto mesh = read_obj(input);
        for (int i = o.bench_steps - 1; i >= 0; --i) {
            const int side = std::max(4, static_cast<int>(std::lround(
                                             o.bench_max_side * std::pow(o.bench_ratio, i / 2.0))));
            graphs.push_back(voxels_to_graph(voxelize_mesh(mesh, side), 0.5f));
        }
    } else {
        throw std::invalid_argument("--mode must be subsample or voxel");
    }

    std::cout << "n,seconds,separators\n";
    std::vector<std::pair<double, double>> pts;
    for (const auto& g : graphs) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto seps = find_separators(g, o.config);
        const double t = seconds_since(t0);
        std::cout << g.vertex_count() << ',' << t << ',' << seps.separators.size() << '\n';
        pts.emplace_back(static_cast<double>(g.vertex_count()), std::max(t, 1e-9));
    }
    double r2 = 0;
    const double slope = power_law(pts, r2);
    std::cerr << "# exponent " << slope << " r2 " << r2 << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curve skeletons from local separators"};
    app.require_subcommand(1);
    Options o;
    std::string in, out;
    std::vector<std::string> inputs;

    auto* mesh2graph = app.add_subcommand("mesh2graph", "polygon mesh (.obj) -> .sgraph");
    auto* vox2graph = app.add_subcommand("vox2graph", "voxel grid (.vox) -> .sgraph");
    auto* pts2graph = app.add_subcommand("pts2graph", "point cloud (.xyz) -> .sgraph");
    for (auto* c : {mesh2graph, vox2graph, pts2graph}) {
        c->add_option("input", in)->required()->check(CLI::ExistingFile);
        c->add_option("-o,--output", out)->required();
        add_ingest_flags(c, o);
    }

    auto* seps = app.add_subcommand("seps", "sample local separators of a graph");
    seps->add_option("input", in)->required()->check(CLI::ExistingFile);
    seps->add_option("-o,--output", out)->required();
    add_sampling_flags(seps, o);

    auto* reeb = app.add_subcommand("reeb", "level-set separators from axis sweeps");
    reeb->add_option("input", in)->required()->check(CLI::ExistingFile);
    reeb->add_option("-o,--output", out)->required();
    reeb->add_option("--axes", o.axes, "x,y,z[;x,y,z...]")->capture_default_str();
    reeb->add_option("--smooth-iters", o.height_smoothing, "height smoothing rounds")
        ->capture_default_str();
    reeb->add_option("--threads", o.threads, "worker threads");

    auto* pack = app.add_subcommand("pack", "disjoint subset of one or more .seps files");
    pack->add_option("inputs", inputs)->required()->check(CLI::ExistingFile);
    pack->add_option("-o,--output", out)->required();

    auto* extract = app.add_subcommand("extract", "skeleton from a graph and packed separators");
    std::string packed_path;
    extract->add_option("graph", in)->required()->check(CLI::ExistingFile);
    extract->add_option("packed", packed_path)->required()->check(CLI::ExistingFile);
    extract->add_option("-o,--output", out)->required();
    add_extract_flags(extract, o);

    auto* smooth = app.add_subcommand("smooth", "smooth a skeleton .sgraph");
    smooth->add_option("input", in)->required()->check(CLI::ExistingFile);
    smooth->add_option("-o,--output", out)->required();
    smooth->add_option("--smooth-iters", o.config.smooth_iters, "rounds")->capture_default_str();

    auto* run = app.add_subcommand("run", "full pipeline");
    run->add_option("input", in)->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", out)->required();
    add_ingest_flags(run, o);
    add_sampling_flags(run, o);
    add_extract_flags(run, o);

    auto* benchmark = app.add_subcommand("bench", "separator time over geometric size steps (CSV)");
    benchmark->add_option("input", in)->required()->check(CLI::ExistingFile);
    benchmark->add_option("--mode", o.bench_mode, "subsample or voxel")->capture_default_str();
    benchmark->add_option("--steps", o.bench_steps, "number of sizes")->capture_default_str();
    benchmark->add_option("--ratio", o.bench_ratio, "vertex fraction between steps")
        ->capture_default_str();
    benchmark->add_option("--max-side", o.bench_max_side, "voxels along the longest side")
        ->capture_default_str();
    add_ingest_flags(benchmark, o);
    add_sampling_flags(benchmark, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        finalize(o);
        if (mesh2graph->parsed() || vox2graph->parsed() || pts2graph->parsed()) {
            const InputFormat f = mesh2graph->parsed()  ? InputFormat::Mesh
                                  : vox2graph->parsed() ? InputFormat::Voxels
                                                        : InputFormat::Points;
            auto loaded = load_graph(in, f, o.config);
            if (loaded.skipped_faces)
                std::cerr << "warning: skipped " << loaded.skipped_faces << " degenerate faces\n";
            write_sgraph(out, GraphFile{loaded.graph, {}, {}});
        } else if (seps->parsed()) {
            write_seps(out, find_separators(read_graph_only(in), o.config));
        } else if (reeb->parsed()) {
            const auto g = read_graph_only(in);
            const auto axes = parse_axes(o.axes);
            std::vector<SeparatorSet> sweeps(axes.size());
#pragma omp parallel for num_threads(o.config.threads) schedule(dynamic, 1)
            for (std::size_t i = 0; i < axes.size(); ++i)
                sweeps[i] = sweep_separators(g, axis_height(g, axes[i], o.height_smoothing));
            SeparatorSet all;
            all.source_graph_size = g.vertex_count();
            for (auto& s : sweeps)
                for (auto& sep : s.separators) all.separators.push_back(std::move(sep));
            write_seps(out, all);
        } else if (pack->parsed()) {
            SeparatorSet all;
            for (const auto& p : inputs) {
                auto s = read_seps(fs::path(p));
                all.source_graph_size = std::max(all.source_graph_size, s.source_graph_size);
                for (auto& sep : s.separators) all.separators.push_back(std::move(sep));
            }
            auto packed = pack_separators(all);
            write_seps(out, SeparatorSet{packed.chosen, packed.source_graph_size});
            std::cerr << packed.chosen.size() << " of " << all.separators.size()
                      << " separators packed\n";
        } else if (extract->parsed()) {
            const auto g = read_graph_only(in);
            auto packed = as_packed(read_seps(fs::path(packed_path)));
            for (const auto& s : packed.chosen)
                for (VertexId v : s.vertices)
                    if (v >= g.vertex_count())
                        throw InputError("separator vertex " + std::to_string(v) +
                                         " is outside the graph");
            auto skel = extract_skeleton(g, packed, {o.config.position_mode, o.config.smooth_iters});
            write_skeleton(out, skel);
            std::vector<VertexId> identity(g.vertex_count());
            for (VertexId v = 0; v < identity.size(); ++v) identity[v] = v;
            write_map_file(o.map_path, skel, identity);
        } else if (smooth->parsed()) {
            auto file = read_sgraph(fs::path(in));
            if (!file.is_skeleton()) throw InputError("smooth needs a skeleton (.sgraph with radius and weight)");
            Skeleton s;
            s.graph = std::move(file.graph);
            s.weight = std::move(file.weight);
            s.radius = std::move(file.radius);
            s.class_nodes = s.graph.vertex_count();
            s = smooth_skeleton(std::move(s), o.config.smooth_iters);
            write_skeleton(out, s);
        } else if (run->parsed()) {
            const auto t0 = std::chrono::steady_clock::now();
            auto loaded = load_graph(in, infer_format(in, o.format), o.config);
            const double ingest = seconds_since(t0);
            if (loaded.skipped_faces)
                std::cerr << "warning: skipped " << loaded.skipped_faces << " degenerate faces\n";
            auto result = run_pipeline(loaded.graph, o.config);
            result.stats.seconds.ingest = ingest;
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
            write_skeleton(out, result.skeleton);
            write_map_file(o.map_path, result.skeleton, loaded.mapping);
            print_stats(std::cout, result.stats);
        } else if (benchmark->parsed()) {
            return bench(in, o);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << (in.empty() ? "" : in + ": ") << e.what() << '\n';
        return kIo;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const InvariantError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kOk;
}
