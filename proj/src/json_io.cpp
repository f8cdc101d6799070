#include "perclab/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace perclab {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(e.what());  // carries byte position
    }
}

std::string require_string(const json& j, const char* what) {
    if (!j.is_string()) throw parse_error(std::string(what) + " must be a string");
    return j.get<std::string>();
}

Rational prob_from(const json& j, const char* what) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<int64_t>()));
    throw parse_error(std::string(what) +
                      ": probability must be a string like \"1/2\" or \"0.325\"");
}

std::vector<std::string> names_from(const json& j, const char* what) {
    if (!j.is_array()) throw parse_error(std::string(what) + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(require_string(e, what));
    return out;
}

std::vector<int> resolve_terminals(const json& doc, const std::vector<std::string>& vertex_names) {
    if (!doc.contains("terminals")) throw parse_error("model needs a \"terminals\" array");
    std::vector<int> out;
    for (const auto& name : names_from(doc.at("terminals"), "terminals")) {
        int idx = -1;
        for (size_t i = 0; i < vertex_names.size(); ++i)
            if (vertex_names[i] == name) idx = static_cast<int>(i);
        if (idx < 0) throw parse_error("terminal '" + name + "' is not a declared vertex");
        out.push_back(idx);
    }
    return out;
}

}  // namespace

AnyModel parse_model_json(const std::string& text) {
    json doc = parse_json(text);
    if (!doc.is_object()) throw parse_error("model document must be a JSON object");
    if (!doc.contains("vertices")) throw parse_error("model needs a \"vertices\" array");
    auto vertex_names = names_from(doc.at("vertices"), "vertices");

    if (doc.contains("hyperedges")) {
        HyperModel h;
        h.vertex_names = vertex_names;
        h.terminals = resolve_terminals(doc, vertex_names);
        for (const auto& je : doc.at("hyperedges")) {
            HyperModel::HyperEdge he;
            const json& mem = je.contains("vertices") ? je.at("vertices") : je.at("vs");
            for (const auto& name : names_from(mem, "hyperedge vertices"))
                he.members.push_back(h.vertex_index(name));
            he.p = prob_from(je.at("p"), "hyperedge");
            h.hyperedges.push_back(std::move(he));
        }
        h.validate();
        return h;
    }

    if (doc.contains("sites")) {
        SiteModel m;
        m.vertex_names = vertex_names;
        m.terminals = resolve_terminals(doc, vertex_names);
        m.vertex_prob.assign(vertex_names.size(), Rational(-1));
        for (const auto& js : doc.at("sites")) {
            int v = m.vertex_index(require_string(js.at("v"), "site vertex"));
            m.vertex_prob[v] = prob_from(js.at("p"), "site");
        }
        for (size_t i = 0; i < m.vertex_prob.size(); ++i)
            if (m.vertex_prob[i] < 0)
                throw parse_error("vertex '" + vertex_names[i] + "' has no site probability");
        if (doc.contains("edges")) {
            for (const auto& je : doc.at("edges")) {
                int u = m.vertex_index(require_string(je.at("u"), "edge endpoint"));
                int v = m.vertex_index(require_string(je.at("v"), "edge endpoint"));
                m.edges.emplace_back(u, v);
            }
        }
        m.validate();
        return m;
    }

    Graph g;
    g.vertex_names = vertex_names;
    g.terminals = resolve_terminals(doc, vertex_names);
    if (doc.contains("edges")) {
        for (const auto& je : doc.at("edges")) {
            Graph::Edge e;
            e.u = g.vertex_index(require_string(je.at("u"), "edge endpoint"));
            e.v = g.vertex_index(require_string(je.at("v"), "edge endpoint"));
            e.p = prob_from(je.at("p"), "edge");
            g.edges.push_back(std::move(e));
        }
    }
    g.validate();
    return g;
}

AnyModel load_model(const std::string& path) { return parse_model_json(read_file(path)); }

namespace {

json model_header(const std::vector<std::string>& vertex_names,
                  const std::vector<std::string>& terminal_names, const char* kind) {
    json doc;
    doc["schema"] = 1;
    doc["kind"] = kind;
    doc["vertices"] = vertex_names;
    doc["terminals"] = terminal_names;
    return doc;
}

}  // namespace

std::string model_to_json(const Graph& g) {
    json doc = model_header(g.vertex_names, g.terminal_names(), "bond");
    doc["edges"] = json::array();
    for (const auto& e : g.edges)
        doc["edges"].push_back({{"u", g.vertex_names[e.u]},
                                {"v", g.vertex_names[e.v]},
                                {"p", rational_str(e.p)}});
    return doc.dump(2) + "\n";
}

std::string model_to_json(const SiteModel& m) {
    json doc = model_header(m.vertex_names, m.terminal_names(), "site");
    doc["edges"] = json::array();
    for (const auto& [u, v] : m.edges)
        doc["edges"].push_back({{"u", m.vertex_names[u]}, {"v", m.vertex_names[v]}});
    doc["sites"] = json::array();
    for (int i = 0; i < m.vertex_count(); ++i)
        doc["sites"].push_back({{"v", m.vertex_names[i]}, {"p", rational_str(m.vertex_prob[i])}});
    return doc.dump(2) + "\n";
}

std::string model_to_json(const HyperModel& h) {
    json doc = model_header(h.vertex_names, h.terminal_names(), "hyper");
    doc["hyperedges"] = json::array();
    for (const auto& he : h.hyperedges) {
        json names = json::array();
        for (int v : he.members) names.push_back(h.vertex_names[v]);
        doc["hyperedges"].push_back({{"vertices", names}, {"p", rational_str(he.p)}});
    }
    return doc.dump(2) + "\n";
}

int model_terminal_count(const AnyModel& m) {
    return std::visit([](const auto& x) { return x.terminal_count(); }, m);
}

std::vector<std::string> model_terminal_names(const AnyModel& m) {
    return std::visit([](const auto& x) { return x.terminal_names(); }, m);
}

std::string distribution_to_json(const DistributionDocument& doc) {
    const auto& table = partition_table(doc.rho.k);
    json j;
    j["schema"] = 1;
    j["terminals"] = doc.terminal_names;
    j["partitionOrder"] = "rgs-lex";
    json parts = json::array(), probs = json::array(), floats = json::array();
    for (int i = 0; i < table.size(); ++i) {
        parts.push_back(table.at(i).name(doc.terminal_names));
        probs.push_back(rational_str(doc.rho.probs[i]));
        floats.push_back(to_double(doc.rho.probs[i]));
    }
    j["partitions"] = parts;
    j["probs"] = probs;
    j["probsFloat"] = floats;
    j["mode"] = doc.mode;
    if (doc.samples) j["samples"] = *doc.samples;
    if (doc.counts) j["counts"] = *doc.counts;
    return j.dump(2) + "\n";
}

DistributionDocument parse_distribution_json(const std::string& text) {
    json j = parse_json(text);
    DistributionDocument doc;
    doc.terminal_names = names_from(j.at("terminals"), "terminals");
    doc.rho.k = static_cast<int>(doc.terminal_names.size());
    for (const auto& p : j.at("probs"))
        doc.rho.probs.push_back(parse_rational(require_string(p, "probs entry")));
    if (j.contains("mode")) doc.mode = j.at("mode").get<std::string>();
    doc.rho.validate();
    return doc;
}

DistributionDocument load_distribution(const std::string& path) {
    return parse_distribution_json(read_file(path));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw invalid_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace perclab
