#include "perclab/models.hpp"

#include <set>

namespace perclab {

namespace {

int index_of_name(const std::vector<std::string>& names, const std::string& name) {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw invalid_error("unknown vertex '" + name + "'");
}

std::vector<std::string> names_of(const std::vector<std::string>& names,
                                  const std::vector<int>& terminals) {
    std::vector<std::string> out;
    out.reserve(terminals.size());
    for (int t : terminals) out.push_back(names[t]);
    return out;
}

void check_vertices(const std::vector<std::string>& names) {
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty()) throw invalid_error("empty vertex name");
        if (!seen.insert(n).second) throw invalid_error("duplicate vertex '" + n + "'");
    }
}

void check_terminals(const std::vector<int>& terminals, int n) {
    if (terminals.empty()) throw invalid_error("no terminals declared");
    std::set<int> seen;
    for (int t : terminals) {
        if (t < 0 || t >= n) throw invalid_error("terminal is not a declared vertex");
        if (!seen.insert(t).second) throw invalid_error("terminals must be pairwise distinct");
    }
}

void check_prob(const Rational& p) {
    if (!is_probability(p)) throw invalid_error("probability " + rational_str(p) + " outside [0,1]");
}

}  // namespace

int Graph::vertex_index(const std::string& name) const { return index_of_name(vertex_names, name); }
int SiteModel::vertex_index(const std::string& name) const { return index_of_name(vertex_names, name); }
int HyperModel::vertex_index(const std::string& name) const { return index_of_name(vertex_names, name); }

std::vector<std::string> Graph::terminal_names() const { return names_of(vertex_names, terminals); }
std::vector<std::string> SiteModel::terminal_names() const { return names_of(vertex_names, terminals); }
std::vector<std::string> HyperModel::terminal_names() const { return names_of(vertex_names, terminals); }

void Graph::validate() const {
    check_vertices(vertex_names);
    check_terminals(terminals, vertex_count());
    for (const auto& e : edges) {
        if (e.u < 0 || e.u >= vertex_count() || e.v < 0 || e.v >= vertex_count())
            throw invalid_error("edge endpoint is not a declared vertex");
        if (e.u == e.v) throw invalid_error("self-loops are rejected");
        check_prob(e.p);
    }
}

void SiteModel::validate() const {
    check_vertices(vertex_names);
    check_terminals(terminals, vertex_count());
    if (static_cast<int>(vertex_prob.size()) != vertex_count())
        throw invalid_error("every vertex needs a probability");
    for (const auto& p : vertex_prob) check_prob(p);
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= vertex_count() || v < 0 || v >= vertex_count())
            throw invalid_error("edge endpoint is not a declared vertex");
        if (u == v) throw invalid_error("self-loops are rejected");
    }
}

void HyperModel::validate() const {
    check_vertices(vertex_names);
    check_terminals(terminals, vertex_count());
    for (const auto& he : hyperedges) {
        if (he.members.size() < 2) throw invalid_error("hyperedge must have at least 2 members");
        std::set<int> seen;
        for (int v : he.members) {
            if (v < 0 || v >= vertex_count())
                throw invalid_error("hyperedge member is not a declared vertex");
            if (!seen.insert(v).second) throw invalid_error("duplicate member in hyperedge");
        }
        check_prob(he.p);
    }
}

}  // namespace perclab
