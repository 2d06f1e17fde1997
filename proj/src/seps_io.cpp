#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "sepskel/errors.hpp"
#include "sepskel/separators.hpp"

namespace sepskel {

void write_seps(std::ostream& out, const SeparatorSet& set) {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "# seps " << set.separators.size() << " separators over " << set.source_graph_size
        << " vertices\n";
    for (const auto& s : set.separators) {
        out << "s q= " << s.quality << " c= " << s.center.x() << ' ' << s.center.y() << ' '
            << s.center.z() << " r= " << s.radius << " :";
        for (VertexId v : s.vertices) out << ' ' << v;
        out << '\n';
    }
}

void write_seps(const std::filesystem::path& path, const SeparatorSet& set) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_seps(out, set);
}

SeparatorSet read_seps(std::istream& in) {
    SeparatorSet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] == '#') {
            // Header carries the source graph size.
            std::istringstream hs(line.substr(pos + 1));
            std::string w1, w2, w3, w4;
            std::size_t count = 0, size = 0;
            if (hs >> w1 >> count >> w2 >> w3 >> size && w1 == "seps")
                set.source_graph_size = std::max(set.source_graph_size, size);
            continue;
        }
        std::istringstream ls(line);
        std::string tag, kq, kc, kr, colon;
        Separator s;
        double x, y, z;
        if (!(ls >> tag >> kq >> s.quality >> kc >> x >> y >> z >> kr >> s.radius >> colon) ||
            tag != "s" || kq != "q=" || kc != "c=" || kr != "r=" || colon != ":")
            throw ParseError("malformed separator line", lineno);
        s.center = Vec3(x, y, z);
        long long v;
        while (ls >> v) {
            if (v < 0) throw ParseError("negative vertex id", lineno);
            s.vertices.push_back(static_cast<VertexId>(v));
        }
        if (!ls.eof()) throw ParseError("bad vertex id", lineno);
        std::sort(s.vertices.begin(), s.vertices.end());
        if (!s.vertices.empty())
            set.source_graph_size =
                std::max<std::size_t>(set.source_graph_size, s.vertices.back() + 1);
        set.separators.push_back(std::move(s));
    }
    return set;
}

SeparatorSet read_seps(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_seps(in);
}

} // namespace sepskel
