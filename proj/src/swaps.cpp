#include "perclab/swaps.hpp"

#include <algorithm>

#include "perclab/dsu.hpp"
#include "perclab/parallel.hpp"

namespace perclab {

namespace {

void require_three_terminals(const Graph& g) {
    if (g.terminal_count() != 3) throw invalid_error("this operation needs exactly 3 terminals");
}

void require_pair_cap(const Graph& g) {
    if (g.edge_count() > kPairEnumCap)
        throw cap_error("pair enumeration cap exceeded: " + std::to_string(g.edge_count()) +
                        " edges, cap " + std::to_string(kPairEnumCap));
}

// Per-vertex terminal masks for C1's components.
std::vector<uint8_t> vertex_terminal_masks(const Graph& g, uint64_t open_edges, Dsu& dsu) {
    dsu.init(g.vertex_count());
    for (int e = 0; e < g.edge_count(); ++e)
        if ((open_edges >> e) & 1) dsu.unite(g.edges[e].u, g.edges[e].v);
    int roots[3];
    for (int t = 0; t < 3; ++t) roots[t] = dsu.find(g.terminals[t]);
    std::vector<uint8_t> mask(g.vertex_count(), 0);
    for (int v = 0; v < g.vertex_count(); ++v) {
        int r = dsu.find(v);
        uint8_t m = 0;
        for (int t = 0; t < 3; ++t)
            if (r == roots[t]) m |= static_cast<uint8_t>(1u << t);
        mask[v] = m;
    }
    return mask;
}

// Integer configuration weights over the common denominator.
struct ConfigWeights {
    std::vector<BigInt> w;
    BigInt denom = 1;

    explicit ConfigWeights(const Graph& g) {
        int m = g.edge_count();
        for (const auto& e : g.edges) denom *= e.p.get_den();
        w.assign(1ull << m, BigInt(1));
        for (uint64_t cfg = 0; cfg < w.size(); ++cfg) {
            BigInt x(1);
            for (int e = 0; e < m; ++e) {
                const Rational& p = g.edges[e].p;
                if ((cfg >> e) & 1)
                    x *= p.get_num();
                else
                    x *= p.get_den() - p.get_num();
            }
            w[cfg] = x;
        }
    }
};

}  // namespace

SwapTables build_swap_tables(const Graph& g) {
    require_three_terminals(g);
    if (g.edge_count() > 20) throw cap_error("swap table cap (20 edges) exceeded");
    SwapTables tab;
    tab.edge_count = g.edge_count();
    uint64_t n = 1ull << tab.edge_count;
    tab.part.resize(n);
    tab.s.resize(n);
    Dsu dsu(g.vertex_count());
    const PartitionTable& table = partition_table(3);
    for (uint64_t cfg = 0; cfg < n; ++cfg) {
        auto vt = vertex_terminal_masks(g, cfg, dsu);
        int keys[3];
        for (int t = 0; t < 3; ++t) keys[t] = dsu.find(g.terminals[t]);
        tab.part[cfg] = static_cast<uint8_t>(table.index_from_keys(keys));
        std::array<uint64_t, 3> sets{0, 0, 0};
        for (int e = 0; e < tab.edge_count; ++e) {
            uint8_t u = static_cast<uint8_t>(vt[g.edges[e].u] | vt[g.edges[e].v]);
            for (int i = 0; i < 3; ++i)
                if (side_rule(i, u)) sets[i] |= 1ull << e;
        }
        tab.s[cfg] = sets;
    }
    return tab;
}

std::array<uint64_t, 3> terminal_components(const Graph& g, const Configuration& c) {
    require_three_terminals(g);
    if (c.size != g.edge_count()) throw invalid_error("configuration length mismatch");
    if (g.vertex_count() > 64) throw cap_error("vertex bitmask cap (64) exceeded");
    Dsu dsu(g.vertex_count());
    auto vt = vertex_terminal_masks(g, c.bits, dsu);
    std::array<uint64_t, 3> com{0, 0, 0};
    for (int v = 0; v < g.vertex_count(); ++v)
        for (int t = 0; t < 3; ++t)
            if ((vt[v] >> t) & 1) com[t] |= 1ull << v;
    return com;
}

STriple s_sets(const Graph& g, const Configuration& c1) {
    require_three_terminals(g);
    if (c1.size != g.edge_count()) throw invalid_error("configuration length mismatch");
    Dsu dsu(g.vertex_count());
    auto vt = vertex_terminal_masks(g, c1.bits, dsu);
    STriple out;
    for (int e = 0; e < g.edge_count(); ++e) {
        uint8_t u = static_cast<uint8_t>(vt[g.edges[e].u] | vt[g.edges[e].v]);
        if (side_rule(0, u)) out.s1 |= 1ull << e;
        if (side_rule(1, u)) out.s2 |= 1ull << e;
        if (side_rule(2, u)) out.s3 |= 1ull << e;
    }
    return out;
}

namespace {

// Grows vertex sets phase by phase; each phase assigns the frontier edges of
// its seed set (closure over revealed C1-open edges) to a fixed side, lowest
// edge index first. Remaining edges get the tail side.
class GrowthSchedule : public SwapSchedule {
public:
    struct Phase {
        std::vector<int> seed_terminals;  // indices into g.terminals
        bool side;
    };

    GrowthSchedule(std::string name, std::vector<Phase> phases, bool tail_side)
        : name_(std::move(name)), phases_(std::move(phases)), tail_side_(tail_side) {}

    std::string name() const override { return name_; }
    bool reads_c1_only() const override { return true; }
    void begin(const Graph& g) override { g_ = &g; }

    std::pair<int, bool> choose(const ScheduleView& view) override {
        const Graph& g = *g_;
        for (const auto& phase : phases_) {
            uint64_t reach = closure(g, view, phase.seed_terminals);
            for (int e = 0; e < g.edge_count(); ++e) {
                if ((view.revealed >> e) & 1) continue;
                uint64_t ends = (1ull << g.edges[e].u) | (1ull << g.edges[e].v);
                if (ends & reach) return {e, phase.side};
            }
        }
        for (int e = 0; e < g.edge_count(); ++e)
            if (!((view.revealed >> e) & 1)) return {e, tail_side_};
        throw std::logic_error("schedule asked to choose with all edges revealed");
    }

private:
    static uint64_t closure(const Graph& g, const ScheduleView& view,
                            const std::vector<int>& seeds) {
        uint64_t reach = 0;
        for (int t : seeds) reach |= 1ull << g.terminals[t];
        bool grew = true;
        while (grew) {
            grew = false;
            for (int e = 0; e < g.edge_count(); ++e) {
                if (!((view.revealed >> e) & 1) || !((view.c1_open >> e) & 1)) continue;
                uint64_t um = 1ull << g.edges[e].u, vm = 1ull << g.edges[e].v;
                if ((reach & um) && !(reach & vm)) reach |= vm, grew = true;
                else if ((reach & vm) && !(reach & um)) reach |= um, grew = true;
            }
        }
        return reach;
    }

    std::string name_;
    std::vector<Phase> phases_;
    bool tail_side_;
    const Graph* g_ = nullptr;
};

class ConstantSchedule : public SwapSchedule {
public:
    std::string name() const override { return "constant"; }
    bool reads_c1_only() const override { return true; }
    void begin(const Graph&) override {}
    std::pair<int, bool> choose(const ScheduleView& view) override {
        for (int e = 0; e < view.g->edge_count(); ++e)
            if (!((view.revealed >> e) & 1)) return {e, true};
        throw std::logic_error("schedule asked to choose with all edges revealed");
    }
};

}  // namespace

std::unique_ptr<SwapSchedule> make_schedule(const std::string& name) {
    using Phase = GrowthSchedule::Phase;
    if (name == "fig1")
        return std::make_unique<GrowthSchedule>("fig1", std::vector<Phase>{{{0}, true}}, false);
    if (name == "s1")
        return std::make_unique<GrowthSchedule>(
            "s1", std::vector<Phase>{{{2}, true}, {{0}, false}, {{1}, true}}, false);
    if (name == "s2")
        return std::make_unique<GrowthSchedule>(
            "s2", std::vector<Phase>{{{1}, true}, {{0}, false}, {{2}, true}}, false);
    if (name == "s3")
        return std::make_unique<GrowthSchedule>(
            "s3", std::vector<Phase>{{{0}, false}, {{1, 2}, true}}, false);
    if (name == "constant") return std::make_unique<ConstantSchedule>();
    throw invalid_error("unknown schedule '" + name + "'");
}

uint64_t run_schedule(const Graph& g, SwapSchedule& sched, const Configuration& c1,
                      const Configuration& c2) {
    require_three_terminals(g);
    if (c1.size != g.edge_count() || c2.size != g.edge_count())
        throw invalid_error("configuration length mismatch");
    sched.begin(g);
    ScheduleView view;
    view.g = &g;
    uint64_t s = 0;
    for (int step = 0; step < g.edge_count(); ++step) {
        auto [e, side] = sched.choose(view);
        if (e < 0 || e >= g.edge_count())
            throw std::logic_error("schedule chose an edge out of range");
        if ((view.revealed >> e) & 1)
            throw std::logic_error("schedule assigned an edge twice");
        view.revealed |= 1ull << e;
        if (side) s |= 1ull << e;
        view.c1_open |= c1.bits & (1ull << e);
        view.c2_open |= c2.bits & (1ull << e);
    }
    return s;
}

TreeLemmaResult verify_tree_lemma(const Graph& g, SwapSchedule& sched) {
    require_three_terminals(g);
    require_pair_cap(g);
    int m = g.edge_count();
    uint64_t n = 1ull << m;
    ConfigWeights cw(g);

    // For C1-only schedules the S-set is a function of C1 alone.
    std::vector<uint64_t> s_of_c1;
    if (sched.reads_c1_only()) {
        s_of_c1.resize(n);
        for (uint64_t c1 = 0; c1 < n; ++c1)
            s_of_c1[c1] = run_schedule(g, sched, {c1, m}, {0, m});
    }

    TreeLemmaResult res;
    res.max_deviation = Rational(0);
    BigInt denom2 = cw.denom * cw.denom;

    if (m <= 10) {
        // Dense accumulation of the joint law, then exact comparison.
        std::vector<BigInt> joint(n * n, BigInt(0));
        BigInt wprod;
        for (uint64_t c1 = 0; c1 < n; ++c1) {
            for (uint64_t c2 = 0; c2 < n; ++c2) {
                uint64_t s = sched.reads_c1_only() ? s_of_c1[c1]
                                                   : run_schedule(g, sched, {c1, m}, {c2, m});
                uint64_t d3 = (c1 & s) | (c2 & ~s);
                uint64_t d4 = (c2 & s) | (c1 & ~s);
                mpz_mul(wprod.get_mpz_t(), cw.w[c1].get_mpz_t(), cw.w[c2].get_mpz_t());
                joint[(d3 << m) | d4] += wprod;
            }
        }
        for (uint64_t d3 = 0; d3 < n; ++d3) {
            for (uint64_t d4 = 0; d4 < n; ++d4) {
                BigInt expect = cw.w[d3] * cw.w[d4];
                BigInt diff = joint[(d3 << m) | d4] - expect;
                if (diff < 0) diff = -diff;
                Rational dev = make_rational(diff, denom2);
                if (dev > res.max_deviation) res.max_deviation = dev;
            }
        }
    } else {
        // The pair map (C1,C2) -> (D3,D4) is a bijection for any conforming
        // schedule; checking image uniqueness plus pointwise weight equality
        // is an exact verdict without materializing 4^|E| cells.
        std::vector<uint64_t> seen((n * n + 63) / 64, 0);
        for (uint64_t c1 = 0; c1 < n; ++c1) {
            for (uint64_t c2 = 0; c2 < n; ++c2) {
                uint64_t s = sched.reads_c1_only() ? s_of_c1[c1]
                                                   : run_schedule(g, sched, {c1, m}, {c2, m});
                uint64_t d3 = (c1 & s) | (c2 & ~s);
                uint64_t d4 = (c2 & s) | (c1 & ~s);
                uint64_t cell = (d3 << m) | d4;
                if ((seen[cell >> 6] >> (cell & 63)) & 1)
                    throw std::logic_error("swap image collision: schedule protocol violated");
                seen[cell >> 6] |= 1ull << (cell & 63);
                BigInt diff = cw.w[c1] * cw.w[c2] - cw.w[d3] * cw.w[d4];
                if (diff < 0) diff = -diff;
                if (diff != 0) {
                    Rational dev = make_rational(diff, denom2);
                    if (dev > res.max_deviation) res.max_deviation = dev;
                }
            }
        }
    }

    res.pass = (res.max_deviation == 0);
    return res;
}

KeyObservationResult verify_key_observation(const Graph& g) {
    require_three_terminals(g);
    require_pair_cap(g);
    SwapTables tab = build_swap_tables(g);
    int m = g.edge_count();
    uint64_t n = 1ull << m;

    // Event masks over partition indices.
    auto in_ab = [](int p) { return p == p3::ABC || p == p3::AB_C; };
    auto in_ac = [](int p) { return p == p3::ABC || p == p3::AC_B; };
    auto a_alone = [](int p) { return p == p3::A_BC || p == p3::SPLIT; };

    KeyObservationResult res;
    for (uint64_t c1 = 0; c1 < n && res.pass; ++c1) {
        const auto& s = tab.s[c1];
        int pc1 = tab.part[c1];
        for (uint64_t c2 = 0; c2 < n; ++c2) {
            auto swap_part = [&](uint64_t set) -> int {
                return tab.part[(c1 & set) | (c2 & ~set)];
            };
            if (pc1 == p3::SPLIT) {
                int p1 = swap_part(s[0]);
                // (ii) swap1 keeps a and c apart
                if (in_ac(p1)) {
                    res.pass = false;
                    res.failed_check = "split C1 but swap1 joined a,c";
                    res.counterexample = {{Configuration{c1, m}, Configuration{c2, m}}};
                    break;
                }
                // (i) the key implication
                int p3v = swap_part(s[2]);
                if (in_ab(p3v) || in_ac(p3v)) {
                    int p2 = swap_part(s[1]);
                    if (!(in_ab(p1) || in_ac(p2))) {
                        res.pass = false;
                        res.failed_check = "key implication failed";
                        res.counterexample = {{Configuration{c1, m}, Configuration{c2, m}}};
                        break;
                    }
                }
            }
            // (iii) the cut property for the complement of set 3
            if (a_alone(pc1)) {
                int pbar = tab.part[(c1 & ~s[2]) | (c2 & s[2])];
                if (!a_alone(pbar)) {
                    res.pass = false;
                    res.failed_check = "complement of set 3 does not preserve a's isolation";
                    res.counterexample = {{Configuration{c1, m}, Configuration{c2, m}}};
                    break;
                }
            }
        }
    }
    return res;
}

SwapBoundReport final_inequality_report(const Graph& g, int workers) {
    require_three_terminals(g);
    require_pair_cap(g);
    SwapTables tab = build_swap_tables(g);
    ConfigWeights cw(g);
    int m = g.edge_count();
    uint64_t n = 1ull << m;

    struct Acc {
        BigInt t1{0}, t2{0}, t3{0};
    };
    std::vector<Acc> accs(static_cast<size_t>(std::max(1, workers)));
    parallel_chunks(n, std::max(1, workers), [&](int w, uint64_t begin, uint64_t end) {
        Acc& a = accs[w];
        BigInt wprod;
        for (uint64_t c1 = begin; c1 < end; ++c1) {
            if (tab.part[c1] != p3::SPLIT) continue;
            const auto& s = tab.s[c1];
            for (uint64_t c2 = 0; c2 < n; ++c2) {
                mpz_mul(wprod.get_mpz_t(), cw.w[c1].get_mpz_t(), cw.w[c2].get_mpz_t());
                int p1 = tab.part[(c1 & s[0]) | (c2 & ~s[0])];
                int p2 = tab.part[(c1 & s[1]) | (c2 & ~s[1])];
                int p3v = tab.part[(c1 & s[2]) | (c2 & ~s[2])];
                if (p1 == p3::ABC || p1 == p3::AB_C) a.t1 += wprod;
                if (p2 == p3::ABC || p2 == p3::AC_B) a.t2 += wprod;
                if (p3v == p3::ABC || p3v == p3::AB_C || p3v == p3::AC_B) a.t3 += wprod;
            }
        }
    });
    BigInt t1(0), t2(0), t3(0);
    for (const auto& a : accs) {
        t1 += a.t1;
        t2 += a.t2;
        t3 += a.t3;
    }
    BigInt denom2 = cw.denom * cw.denom;

    SwapBoundReport rep;
    rep.rho.k = 3;
    {
        std::vector<BigInt> acc(5, BigInt(0));
        for (uint64_t cfg = 0; cfg < n; ++cfg) acc[tab.part[cfg]] += cw.w[cfg];
        for (int i = 0; i < 5; ++i) rep.rho.probs.push_back(make_rational(acc[i], cw.denom));
        rep.rho.validate();
    }
    rep.joint_s1_ab = make_rational(t1, denom2);
    rep.joint_s2_ac = make_rational(t2, denom2);
    rep.joint_s3_ab_or_ac = make_rational(t3, denom2);
    rep.s1_bound_holds = rep.joint_s1_ab <= rep.rho.probs[p3::AB_C];
    rep.s2_bound_holds = rep.joint_s2_ac <= rep.rho.probs[p3::AC_B];
    rep.key_bound_holds = rep.joint_s3_ab_or_ac <= rep.joint_s1_ab + rep.joint_s2_ac;

    Rational a_isolated = rep.rho.probs[p3::A_BC] + rep.rho.probs[p3::SPLIT];
    Rational a_joined = rep.rho.probs[p3::ABC] + rep.rho.probs[p3::AB_C] + rep.rho.probs[p3::AC_B];
    rep.s3_lower = a_isolated * a_joined - rep.rho.probs[p3::A_BC];
    rep.s3_lower_holds = rep.s3_lower <= rep.joint_s3_ab_or_ac;

    rep.final_lhs = a_isolated * a_joined;
    rep.final_rhs =
        rep.rho.probs[p3::AB_C] + rep.rho.probs[p3::AC_B] + rep.rho.probs[p3::A_BC];
    rep.final_holds = rep.final_lhs <= rep.final_rhs;
    return rep;
}

}  // namespace perclab
