#include "perclab/transforms.hpp"

#include <set>

namespace perclab {

namespace {

void reject_aux_collisions(const std::vector<std::string>& names, char prefix, size_t count) {
    std::set<std::string> reserved;
    for (size_t i = 0; i < count; ++i) reserved.insert(prefix + std::to_string(i));
    for (const auto& n : names)
        if (reserved.count(n))
            throw invalid_error("vertex name '" + n + "' collides with auxiliary naming");
}

TerminalMap identity_map(const std::vector<std::string>& terminal_names) {
    TerminalMap map;
    for (const auto& t : terminal_names) map.entries.emplace_back(t, t);
    return map;
}

}  // namespace

std::pair<SiteModel, TerminalMap> bond_to_site(const Graph& g) {
    g.validate();
    reject_aux_collisions(g.vertex_names, 'e', g.edges.size());

    SiteModel m;
    m.vertex_names = g.vertex_names;
    m.vertex_prob.assign(g.vertex_count(), Rational(1));
    m.terminals = g.terminals;
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        int aux = m.vertex_count();
        m.vertex_names.push_back("e" + std::to_string(i));
        m.vertex_prob.push_back(e.p);
        m.edges.emplace_back(e.u, aux);
        m.edges.emplace_back(aux, e.v);
    }
    m.validate();
    return {std::move(m), identity_map(g.terminal_names())};
}

std::pair<SiteModel, TerminalMap> hyper_to_site(const HyperModel& h) {
    h.validate();
    reject_aux_collisions(h.vertex_names, 'h', h.hyperedges.size());

    SiteModel m;
    m.vertex_names = h.vertex_names;
    m.vertex_prob.assign(h.vertex_count(), Rational(1));
    m.terminals = h.terminals;
    for (size_t i = 0; i < h.hyperedges.size(); ++i) {
        const auto& he = h.hyperedges[i];
        int aux = m.vertex_count();
        m.vertex_names.push_back("h" + std::to_string(i));
        m.vertex_prob.push_back(he.p);
        for (int v : he.members) m.edges.emplace_back(v, aux);
    }
    m.validate();
    return {std::move(m), identity_map(h.terminal_names())};
}

std::pair<HyperModel, TerminalMap> site_to_hyper(const SiteModel& m) {
    m.validate();
    reject_aux_collisions(m.vertex_names, 'e', m.edges.size());

    HyperModel h;
    h.vertex_names = m.vertex_names;
    h.terminals = m.terminals;

    // Subdivision auxiliaries, one per adjacency; they are always-open
    // passthroughs, so no hyperedge carries them alone.
    std::vector<std::vector<int>> incident_aux(m.vertex_count());
    for (size_t i = 0; i < m.edges.size(); ++i) {
        int aux = static_cast<int>(h.vertex_names.size());
        h.vertex_names.push_back("e" + std::to_string(i));
        incident_aux[m.edges[i].first].push_back(aux);
        incident_aux[m.edges[i].second].push_back(aux);
    }

    for (int v = 0; v < m.vertex_count(); ++v) {
        if (incident_aux[v].empty()) continue;  // size-1 hyperedge, dropped
        HyperModel::HyperEdge he;
        he.members.push_back(v);
        he.members.insert(he.members.end(), incident_aux[v].begin(), incident_aux[v].end());
        he.p = m.vertex_prob[v];
        h.hyperedges.push_back(std::move(he));
    }
    h.validate();
    return {std::move(h), identity_map(m.terminal_names())};
}

SimulationCheck verify_simulation(const PartitionDistribution& src,
                                  const PartitionDistribution& dst) {
    if (src.k != dst.k) throw invalid_error("terminal arity mismatch");
    src.validate();
    dst.validate();
    SimulationCheck res;
    res.max_residual = Rational(0);
    for (size_t i = 0; i < src.probs.size(); ++i) {
        Rational d = src.probs[i] - dst.probs[i];
        if (d < 0) d = -d;
        if (d > res.max_residual) res.max_residual = d;
    }
    res.equal = (res.max_residual == 0);
    return res;
}

}  // namespace perclab
