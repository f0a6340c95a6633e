#include "dsc/emit.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dsc {

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

}  // namespace

void write_csv(const BifurcationResult& result, std::ostream& out) {
    out << "epsilon,agent_id,proposition,limit_mass,cluster_id,cluster_count,consensus,iterations\n";
    const Frame frame(result.frame_size);
    std::string prop = frame.to_string(result.proposition);
    if (prop.find(',') != std::string::npos) prop = "\"" + prop + "\"";
    for (const auto& p : result.points) {
        for (std::size_t i = 0; i < p.limit.size(); ++i) {
            out << fmt("%.9g", p.epsilon) << ',' << i + 1 << ',' << prop << ',' << fmt("%.12f", p.limit[i]) << ','
                << p.cluster_of[i] + 1 << ',' << p.cluster_count << ',' << (p.consensus ? "true" : "false") << ','
                << p.iterations << '\n';
        }
    }
}

void emit_csv(const BifurcationResult& result, const std::string& path) {
    std::ostringstream s;
    write_csv(result, s);
    write_file(path, s.str());
}

void write_bifurcation_svg(const BifurcationResult& result, std::ostream& out) {
    constexpr double width = 640, height = 420, left = 60, right = 20, top = 30, bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    double lo = 0.0, hi = 1.0;
    if (!result.points.empty()) {
        lo = result.points.front().epsilon;
        hi = result.points.back().epsilon;
    }
    const double span = hi > lo ? hi - lo : 1.0;
    auto x = [&](double eps) { return left + (eps - lo) / span * pw; };
    auto y = [&](double m) { return top + (1.0 - m) * ph; };

    const std::string label = Frame(result.frame_size).to_string(result.proposition);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\">" << result.scenario << ": m({" << label
        << "}) limit vs epsilon</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 10; ++t) {
        const double v = t / 10.0;
        const double ex = lo + v * span;
        out << "<line x1=\"" << x(ex) << "\" y1=\"" << top + ph << "\" x2=\"" << x(ex) << "\" y2=\"" << top + ph + 4
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << x(ex) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << fmt("%.2f", ex)
            << "</text>\n";
        out << "<line x1=\"" << left - 4 << "\" y1=\"" << y(v) << "\" x2=\"" << left << "\" y2=\"" << y(v)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << y(v) + 4 << "\" text-anchor=\"end\">" << fmt("%.1f", v)
            << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">epsilon</text>\n";
    out << "<g fill=\"#1f4e9c\" fill-opacity=\"0.6\">\n";
    for (const auto& p : result.points)
        for (double m : p.limit)
            out << "<circle cx=\"" << fmt("%.2f", x(p.epsilon)) << "\" cy=\"" << fmt("%.2f", y(m)) << "\" r=\"2\"/>\n";
    out << "</g>\n</svg>\n";
}

void emit_bifurcation_svg(const BifurcationResult& result, const std::string& path) {
    std::ostringstream s;
    write_bifurcation_svg(result, s);
    write_file(path, s.str());
}

}  // namespace dsc
