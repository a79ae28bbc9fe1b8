#include "flatlab/serialize.hpp"

#include "flatlab/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace flatlab {

using nlohmann::json;

namespace {

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Table read_csv(std::string_view text)
{
    Table t;
    auto lines = split(text, '\n');
    std::size_t lineno = 0;
    for (auto line : lines) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split(line, ',');
        if (t.header.empty()) {
            for (auto f : fields) {
                t.header.emplace_back(f);
            }
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                              " fields, got " + std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) {
            try {
                row.push_back(parse_double(f));
            } catch (const FormatError& e) {
                throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) {
        throw FormatError("missing header row");
    }
    return t;
}

std::string join_row(const std::vector<double>& row)
{
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) {
            s += ',';
        }
        s += format_double(row[i]);
    }
    s += '\n';
    return s;
}

json parse_json(std::string_view text)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

// Grid and values from node rows (rho, theta) or (rho, u1..um).
SampledGraph graph_from_rows(int m, const std::vector<std::vector<double>>& nodes, const std::vector<double>& values)
{
    if (nodes.empty()) {
        throw FormatError("graph has no nodes");
    }
    std::vector<double> radii;
    for (const auto& nd : nodes) {
        if (radii.empty() || nd[0] != radii.back()) {
            radii.push_back(nd[0]);
        }
    }
    if (nodes.size() % radii.size() != 0) {
        throw FormatError("node rows do not form a radius x direction grid");
    }
    const std::size_t na = nodes.size() / radii.size();
    std::vector<double> dirs;
    dirs.reserve(na * static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < na; ++j) {
        const auto& nd = nodes[j];
        if (m == 2) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(na);
            if (std::abs(nd[1] - t) > 1e-12) {
                throw FormatError("m = 2 graphs need theta = 2*pi*j/N");
            }
            dirs.push_back(std::cos(t));
            dirs.push_back(std::sin(t));
        } else {
            dirs.insert(dirs.end(), nd.begin() + 1, nd.end());
        }
    }
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        const std::size_t i = r / na;
        const std::size_t j = r % na;
        if (nodes[r][0] != radii[i]) {
            throw FormatError("node row " + std::to_string(r) + " breaks the radius-major layout");
        }
        if (m == 2) {
            if (nodes[r][1] != nodes[j][1]) {
                throw FormatError("node row " + std::to_string(r) + " repeats a different angle set");
            }
        } else {
            for (int a = 0; a < m; ++a) {
                if (nodes[r][static_cast<std::size_t>(a) + 1] != dirs[j * static_cast<std::size_t>(m) + static_cast<std::size_t>(a)]) {
                    throw FormatError("node row " + std::to_string(r) + " repeats a different direction set");
                }
            }
        }
    }
    try {
        return SampledGraph(GraphGrid::from_nodes(m, std::move(radii), std::move(dirs)), values);
    } catch (const Error& e) {
        throw FormatError(e.what());
    }
}

std::vector<double> node_row(const GraphGrid& g, std::size_t i, std::size_t j)
{
    std::vector<double> row{g.radius(i)};
    if (g.base_dim() == 2) {
        row.push_back(g.angle(j));
    } else {
        auto d = g.direction(j);
        row.insert(row.end(), d.begin(), d.end());
    }
    return row;
}

}  // namespace

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
        throw FormatError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::string cloud_to_csv(const PointCloud& cloud)
{
    std::string s;
    for (int a = 0; a < cloud.ambient_dim(); ++a) {
        s += (a ? ",x" : "x") + std::to_string(a + 1);
    }
    s += '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        s += join_row(std::vector<double>(p.begin(), p.end()));
    }
    return s;
}

PointCloud cloud_from_csv(std::string_view text)
{
    const Table t = read_csv(text);
    for (std::size_t a = 0; a < t.header.size(); ++a) {
        if (t.header[a] != "x" + std::to_string(a + 1)) {
            throw FormatError("cloud header must be x1..xn");
        }
    }
    std::vector<double> coords;
    for (const auto& r : t.rows) {
        coords.insert(coords.end(), r.begin(), r.end());
    }
    return PointCloud(static_cast<int>(t.header.size()), std::move(coords));
}

std::string graph_to_csv(const SampledGraph& graph)
{
    const auto& g = graph.grid;
    std::string s = "rho";
    if (g.base_dim() == 2) {
        s += ",theta";
    } else {
        for (int a = 0; a < g.base_dim(); ++a) {
            s += ",u" + std::to_string(a + 1);
        }
    }
    s += ",f\n";
    for (std::size_t i = 0; i < g.radial_count(); ++i) {
        for (std::size_t j = 0; j < g.angular_count(); ++j) {
            auto row = node_row(g, i, j);
            row.push_back(graph.value(i, j));
            s += join_row(row);
        }
    }
    return s;
}

SampledGraph graph_from_csv(std::string_view text)
{
    const Table t = read_csv(text);
    const auto& h = t.header;
    if (h.size() < 3 || h.front() != "rho" || h.back() != "f") {
        throw FormatError("graph header must be rho,theta,f or rho,u1..um,f");
    }
    int m = 0;
    if (h.size() == 3 && h[1] == "theta") {
        m = 2;
    } else {
        m = static_cast<int>(h.size()) - 2;
        for (int a = 0; a < m; ++a) {
            if (h[static_cast<std::size_t>(a) + 1] != "u" + std::to_string(a + 1)) {
                throw FormatError("graph header must be rho,theta,f or rho,u1..um,f");
            }
        }
    }
    std::vector<std::vector<double>> nodes;
    std::vector<double> values;
    for (const auto& r : t.rows) {
        nodes.emplace_back(r.begin(), r.end() - 1);
        values.push_back(r.back());
    }
    return graph_from_rows(m, nodes, values);
}

std::string cloud_to_json(const PointCloud& cloud)
{
    json j;
    j["ambient_dim"] = cloud.ambient_dim();
    j["kind"] = "cloud";
    json nodes = json::array();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        nodes.push_back(std::vector<double>(p.begin(), p.end()));
    }
    j["nodes"] = std::move(nodes);
    j["values"] = json::array();
    return j.dump() + "\n";
}

PointCloud cloud_from_json(std::string_view text)
{
    const json j = parse_json(text);
    try {
        if (j.at("kind").get<std::string>() != "cloud") {
            throw FormatError("JSON document is not a cloud");
        }
        const int n = j.at("ambient_dim").get<int>();
        std::vector<double> coords;
        for (const auto& p : j.at("nodes")) {
            const auto v = p.get<std::vector<double>>();
            if (v.size() != static_cast<std::size_t>(n)) {
                throw FormatError("cloud node has the wrong dimension");
            }
            coords.insert(coords.end(), v.begin(), v.end());
        }
        return PointCloud(n, std::move(coords));
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed cloud JSON: ") + e.what());
    }
}

std::string graph_to_json(const SampledGraph& graph)
{
    const auto& g = graph.grid;
    json j;
    j["ambient_dim"] = g.base_dim() + 1;
    j["kind"] = "graph";
    json nodes = json::array();
    for (std::size_t i = 0; i < g.radial_count(); ++i) {
        for (std::size_t k = 0; k < g.angular_count(); ++k) {
            nodes.push_back(node_row(g, i, k));
        }
    }
    j["nodes"] = std::move(nodes);
    j["values"] = graph.values;
    return j.dump() + "\n";
}

SampledGraph graph_from_json(std::string_view text)
{
    const json j = parse_json(text);
    try {
        if (j.at("kind").get<std::string>() != "graph") {
            throw FormatError("JSON document is not a graph");
        }
        const int m = j.at("ambient_dim").get<int>() - 1;
        std::vector<std::vector<double>> nodes;
        for (const auto& p : j.at("nodes")) {
            nodes.push_back(p.get<std::vector<double>>());
            const std::size_t want = m == 2 ? 2 : static_cast<std::size_t>(m) + 1;
            if (nodes.back().size() != want) {
                throw FormatError("graph node has the wrong length");
            }
        }
        return graph_from_rows(m, nodes, j.at("values").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed graph JSON: ") + e.what());
    }
}

std::string modes_to_json(const std::vector<HarmonicMode>& modes)
{
    json arr = json::array();
    for (const auto& md : modes) {
        json j;
        j["m"] = md.m;
        j["k"] = md.k;
        j["kind"] = std::string(to_string(md.kind));
        j["axis"] = md.axis;
        j["coeff"] = md.coefficient;
        arr.push_back(std::move(j));
    }
    return arr.dump() + "\n";
}

std::vector<HarmonicMode> modes_from_json(std::string_view text)
{
    const json arr = parse_json(text);
    std::vector<HarmonicMode> out;
    try {
        for (const auto& j : arr) {
            HarmonicMode md;
            md.m = j.at("m").get<int>();
            md.k = j.at("k").get<int>();
            md.kind = mode_kind_from_string(j.at("kind").get<std::string>());
            md.axis = j.at("axis").get<std::vector<double>>();
            md.coefficient = j.at("coeff").get<double>();
            validate_mode(md);
            out.push_back(std::move(md));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed mode list: ") + e.what());
    }
    return out;
}

std::string trace_to_csv(const std::vector<double>& theta, const std::vector<double>& values)
{
    if (theta.size() != values.size()) {
        throw DimensionMismatch("trace angles and values differ in length");
    }
    std::string s = "theta,value\n";
    for (std::size_t i = 0; i < theta.size(); ++i) {
        s += join_row({theta[i], values[i]});
    }
    return s;
}

std::pair<std::vector<double>, std::vector<double>> trace_from_csv(std::string_view text)
{
    const Table t = read_csv(text);
    if (t.header != std::vector<std::string>{"theta", "value"}) {
        throw FormatError("trace header must be theta,value");
    }
    std::pair<std::vector<double>, std::vector<double>> out;
    for (const auto& r : t.rows) {
        out.first.push_back(r[0]);
        out.second.push_back(r[1]);
    }
    return out;
}

std::string solver_report_to_json(const SolverReport& report)
{
    json j;
    j["iters"] = report.iters;
    j["residuals"] = report.residuals;
    j["deviation"] = report.deviation;
    j["h"] = report.h;
    return j.dump(2) + "\n";
}

std::string profile_to_csv(const HeightProfile& profile)
{
    std::string s = "r,H,H_over_r";
    for (int a = 0; a < profile.n; ++a) {
        s += ",e" + std::to_string(a + 1);
    }
    s += ",b\n";
    for (const auto& rec : profile.records) {
        std::vector<double> row{rec.r, rec.H, rec.H / rec.r};
        for (int a = 0; a < rec.e.dim(); ++a) {
            row.push_back(rec.e[static_cast<std::size_t>(a)]);
        }
        row.push_back(rec.b);
        s += join_row(row);
    }
    return s;
}

}  // namespace flatlab
