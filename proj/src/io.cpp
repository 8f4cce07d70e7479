#include "lfcm/io.hpp"

#include "lfcm/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lfcm::io {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) throw ParseError("cannot parse number '" + s + "' " + where);
    return value;
}

std::uint64_t parse_uint(const std::string& s, const std::string& where) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError("cannot parse integer '" + s + "' " + where);
    return value;
}

std::string na_or(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

const char* kind_name(MetricKind k) { return k == MetricKind::ClusterPairs ? "cluster_pairs" : "edges"; }

template <typename T>
T field(const json& j, const char* name) {
    if (!j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad field '") + name + "': " + e.what());
    }
}

json index_list(const IndexList& v) { return json(v); }

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw Error("number formatting failed");
    return std::string(buf, ptr);
}

json lfcm_to_json(const Lfcm& g) {
    json edges = json::array();
    for (const auto& [x, l] : g.obs_to_latent()) edges.push_back({x, l});
    return json{{"num_latent", g.num_latent()},
                {"observed_names", g.observed_names()},
                {"cluster_of", g.cluster_of()},
                {"obs_to_latent", edges}};
}

Lfcm lfcm_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("LFCM JSON must be an object");
    const auto k = field<Index>(j, "num_latent");
    auto names = field<std::vector<std::string>>(j, "observed_names");
    auto cluster_of = field<std::vector<Index>>(j, "cluster_of");
    std::set<Edge> edges;
    for (const auto& e : field<std::vector<std::vector<Index>>>(j, "obs_to_latent")) {
        if (e.size() != 2) throw ParseError("obs_to_latent entries must be [observed, latent] pairs");
        edges.insert({e[0], e[1]});
    }
    return Lfcm(k, std::move(cluster_of), std::move(edges), std::move(names));
}

json scm_to_json(const LinearScm& scm) {
    json nodes = json::array();
    for (Index v = 0; v < scm.num_nodes(); ++v)
        nodes.push_back({{"name", scm.node_names()[v]}, {"kind", v < scm.num_latent() ? "latent" : "observed"}});
    json edges = json::array();
    for (const auto& [e, w] : scm.weights()) edges.push_back({e.first, e.second, w});
    return json{{"nodes", nodes}, {"edges", edges}, {"noise_var", scm.noise_var()}};
}

LinearScm scm_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("SCM JSON must be an object");
    std::vector<std::string> names;
    Index num_latent = 0;
    bool seen_observed = false;
    for (const auto& node : field<json>(j, "nodes")) {
        names.push_back(field<std::string>(node, "name"));
        const auto kind = field<std::string>(node, "kind");
        if (kind == "latent") {
            if (seen_observed) throw ParseError("latent nodes must precede observed nodes");
            ++num_latent;
        } else if (kind == "observed") {
            seen_observed = true;
        } else {
            throw ParseError("node kind must be 'latent' or 'observed'");
        }
    }
    std::vector<Edge> edges;
    std::map<Edge, double> weights;
    for (const auto& e : field<json>(j, "edges")) {
        if (!e.is_array() || e.size() != 3) throw ParseError("edges entries must be [parent, child, weight]");
        const Edge edge{e[0].get<Index>(), e[1].get<Index>()};
        edges.push_back(edge);
        weights[edge] = e[2].get<double>();
    }
    auto noise = field<std::vector<double>>(j, "noise_var");
    Dag dag(names.size(), std::move(edges));
    return LinearScm(std::move(dag), std::move(weights), std::move(noise), num_latent, std::move(names));
}

json trace_to_json(const DiscoveryTrace& trace) {
    json rounds = json::array();
    for (const auto& r : trace.rounds) {
        json tests = json::array();
        for (const auto& t : r.pair_tests)
            tests.push_back({{"pair", {t.i, t.j}},
                             {"num_tetrads", t.num_tetrads},
                             {"min_adjusted_p", t.min_adjusted_p},
                             {"reject", t.reject}});
        rounds.push_back({{"remaining", index_list(r.remaining)},
                          {"pair_tests", tests},
                          {"clique", index_list(r.clique)},
                          {"accepted", r.accepted}});
    }
    json merges = json::array();
    for (const auto& m : trace.merges)
        merges.push_back({{"first", index_list(m.first)},
                          {"second", index_list(m.second)},
                          {"num_tetrads", m.num_tetrads},
                          {"min_adjusted_p", m.min_adjusted_p},
                          {"merged", m.merged}});
    json edges = json::array();
    for (const auto& e : trace.edge_tests)
        edges.push_back({{"observed", e.observed},
                         {"latent", e.latent},
                         {"conditioning_size", e.conditioning.size()},
                         {"min_adjusted_p", e.min_adjusted_p},
                         {"edge", e.edge}});
    return json{{"rounds", rounds},
                {"residual", index_list(trace.residual)},
                {"stage1", trace.stage1.clusters},
                {"merges", merges},
                {"merged", trace.merged.clusters},
                {"edge_tests", edges}};
}

void write_csv(std::ostream& out, const DataMatrix& data) {
    const auto& names = data.column_names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c].find_first_of(",\n\r\"") != std::string::npos)
            throw InvalidData("column name '" + names[c] + "' cannot be written to CSV");
        out << (c ? "," : "") << names[c];
    }
    out << '\n';
    const auto& x = data.values();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) out << (c ? "," : "") << format_double(x(r, c));
        out << '\n';
    }
}

DataMatrix read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto names = split(line, ',');
    if (names.empty() || (names.size() == 1 && names[0].empty())) throw ParseError("CSV header has no columns");

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != names.size())
            throw ParseError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size())
                             + " fields, expected " + std::to_string(names.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) row.push_back(parse_double(cell, "on line " + std::to_string(line_no)));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("CSV has no data rows");
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < names.size(); ++c)
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return DataMatrix(std::move(values), names);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

DataMatrix read_csv_file(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    return read_csv(in);
}

void write_csv_file(const std::filesystem::path& path, const DataMatrix& data) {
    std::ostringstream out;
    write_csv(out, data);
    write_text(path, out.str());
}

json read_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string metrics_csv(const std::vector<MetricsRow>& rows, bool with_method) {
    std::ostringstream out;
    out << "alpha,seed,tp,fp,fn,tn,fpr,tpr,metric_kind" << (with_method ? ",method" : "") << '\n';
    for (const auto& r : rows) {
        const auto& c = r.confusion;
        out << na_or(r.alpha) << ',' << (r.seed ? std::to_string(*r.seed) : "NA") << ',' << c.tp << ',' << c.fp
            << ',' << c.fn << ',' << c.tn << ',' << na_or(c.fpr()) << ',' << na_or(c.tpr()) << ','
            << kind_name(r.kind);
        if (with_method) out << ',' << r.method;
        out << '\n';
    }
    return out.str();
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("metrics CSV is empty");
    const auto header = split(line, ',');
    const bool with_method = header.size() == 10;
    if (header.size() != 9 && !with_method) throw ParseError("unexpected metrics CSV header");
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) throw ParseError("metrics row has the wrong number of fields");
        MetricsRow r;
        if (f[0] != "NA") r.alpha = parse_double(f[0], "in alpha column");
        if (f[1] != "NA") r.seed = parse_uint(f[1], "in seed column");
        r.confusion = {parse_uint(f[2], "in tp"), parse_uint(f[3], "in fp"), parse_uint(f[4], "in fn"),
                       parse_uint(f[5], "in tn")};
        if (f[8] == "cluster_pairs") r.kind = MetricKind::ClusterPairs;
        else if (f[8] == "edges") r.kind = MetricKind::Edges;
        else throw ParseError("unknown metric_kind '" + f[8] + "'");
        if (with_method) r.method = f[9];
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace lfcm::io
