#include "perclab/engine.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "perclab/dsu.hpp"
#include "perclab/parallel.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

// Shared scaffolding for exact enumeration: elements with p in {0,1} are
// resolved up front, the rest are enumerated as a bitmask. Weights are
// integer numerators over the product of the uncertain denominators, split
// into two half-products so each configuration costs one multiply.
struct WeightPlan {
    std::vector<int> uncertain;   // element indices with 0 < p < 1
    uint64_t forced_open = 0;     // elements with p == 1, by element index
    BigInt denom = 1;
    std::vector<BigInt> open_num, closed_num;  // per uncertain slot

    int lo_bits = 0;
    std::vector<BigInt> lo_prod, hi_prod;

    void build(const std::vector<Rational>& probs, int cap) {
        int n = static_cast<int>(probs.size());
        for (int i = 0; i < n; ++i) {
            const Rational& p = probs[i];
            if (p == 1) {
                forced_open |= 1ull << i;
            } else if (p != 0) {
                uncertain.push_back(i);
                open_num.emplace_back(p.get_num());
                closed_num.emplace_back(p.get_den() - p.get_num());
                denom *= p.get_den();
            }
        }
        if (static_cast<int>(uncertain.size()) > cap)
            throw cap_error("exact mode cap exceeded: " + std::to_string(uncertain.size()) +
                            " uncertain elements, cap " + std::to_string(cap));

        int m = static_cast<int>(uncertain.size());
        lo_bits = m / 2;
        lo_prod.assign(1ull << lo_bits, BigInt(1));
        hi_prod.assign(1ull << (m - lo_bits), BigInt(1));
        fill_products(lo_prod, 0, lo_bits);
        fill_products(hi_prod, lo_bits, m - lo_bits);
    }

    void fill_products(std::vector<BigInt>& table, int base, int bits) {
        table[0] = 1;
        for (int b = 0; b < bits; ++b) table[0] *= closed_num[base + b];
        for (uint64_t mask = 1; mask < (1ull << bits); ++mask) {
            int b = __builtin_ctzll(mask);
            uint64_t prev = mask ^ (1ull << b);
            // swap one closed factor for the open one
            table[mask] = table[prev] / closed_num[base + b] * open_num[base + b];
        }
    }

    int count() const { return static_cast<int>(uncertain.size()); }
    uint64_t configs() const { return 1ull << count(); }

    /// Bitmask over *elements* for a bitmask over uncertain slots.
    uint64_t element_mask(uint64_t cfg) const {
        uint64_t m = forced_open;
        uint64_t bits = cfg;
        while (bits) {
            int b = __builtin_ctzll(bits);
            bits &= bits - 1;
            m |= 1ull << uncertain[b];
        }
        return m;
    }
};

// classify(cfg) -> partition/bucket index in [0, buckets).
template <typename Classify>
std::vector<Rational> enumerate_exact(const WeightPlan& plan, int buckets, int workers,
                                      const Classify& classify) {
    uint64_t total = plan.configs();
    int w = std::max(1, workers);
    std::vector<std::vector<BigInt>> acc(static_cast<size_t>(w), std::vector<BigInt>());

    parallel_chunks(total, w, [&](int worker, uint64_t begin, uint64_t end) {
        std::vector<BigInt>& local = acc[worker];
        local.assign(buckets, BigInt(0));
        uint64_t lo_mask = (1ull << plan.lo_bits) - 1;
        BigInt weight;
        Classify cls = classify;  // worker-private scratch state
        for (uint64_t cfg = begin; cfg < end; ++cfg) {
            int bucket = cls(cfg);
            if (bucket < 0) continue;
            mpz_mul(weight.get_mpz_t(), plan.lo_prod[cfg & lo_mask].get_mpz_t(),
                    plan.hi_prod[cfg >> plan.lo_bits].get_mpz_t());
            local[bucket] += weight;
        }
    });

    std::vector<Rational> out(buckets, Rational(0));
    for (int b = 0; b < buckets; ++b) {
        BigInt sum(0);
        for (int i = 0; i < w; ++i)
            if (!acc[i].empty()) sum += acc[i][b];
        out[b] = make_rational(sum, plan.denom);
    }
    return out;
}

template <typename Classify>
std::vector<uint64_t> enumerate_monte_carlo(const WeightPlan& plan,
                                            const std::vector<Rational>& probs, int buckets,
                                            const EngineOptions& opts, const Classify& classify) {
    if (opts.sample_count == 0) throw invalid_error("monte-carlo mode needs sampleCount > 0");
    std::vector<double> p_float(plan.count());
    for (int j = 0; j < plan.count(); ++j) p_float[j] = to_double(probs[plan.uncertain[j]]);

    int w = std::max(1, opts.worker_count);
    std::vector<std::vector<uint64_t>> acc(static_cast<size_t>(w), std::vector<uint64_t>());
    parallel_chunks(opts.sample_count, w, [&](int worker, uint64_t begin, uint64_t end) {
        std::vector<uint64_t>& local = acc[worker];
        local.assign(buckets, 0);
        Classify cls = classify;
        for (uint64_t s = begin; s < end; ++s) {
            uint64_t cfg = 0;
            for (int j = 0; j < plan.count(); ++j) {
                double u = to_unit_interval(counter_draw(opts.seed, s, j));
                if (u < p_float[j]) cfg |= 1ull << j;
            }
            int bucket = cls(cfg);
            if (bucket >= 0) local[bucket]++;
        }
    });

    std::vector<uint64_t> counts(buckets, 0);
    for (int b = 0; b < buckets; ++b)
        for (int i = 0; i < w; ++i)
            if (!acc[i].empty()) counts[b] += acc[i][b];
    return counts;
}

DistributionResult assemble(const WeightPlan& plan, const std::vector<Rational>& probs, int k,
                            const EngineOptions& opts,
                            const std::function<int(uint64_t)>& classify) {
    int buckets = bell_number(k);
    DistributionResult res;
    res.rho.k = k;
    if (opts.mode == EngineOptions::Mode::Exact) {
        res.rho.probs = enumerate_exact(plan, buckets, opts.worker_count, classify);
        res.rho.validate();
    } else {
        auto counts = enumerate_monte_carlo(plan, probs, buckets, opts, classify);
        res.rho.probs.assign(buckets, Rational(0));
        for (int b = 0; b < buckets; ++b)
            res.rho.probs[b] = make_rational(BigInt(static_cast<unsigned long>(counts[b])),
                                             BigInt(static_cast<unsigned long>(opts.sample_count)));
        res.counts = std::move(counts);
        res.samples = opts.sample_count;
    }
    return res;
}

}  // namespace

DistributionResult bond_distribution(const Graph& g, const EngineOptions& opts) {
    g.validate();
    int k = g.terminal_count();
    const PartitionTable& table = partition_table(k);

    std::vector<Rational> probs;
    probs.reserve(g.edge_count());
    for (const auto& e : g.edges) probs.push_back(e.p);
    WeightPlan plan;
    plan.build(probs, opts.exact_cap);

    // Baseline union-find with forced-open edges already merged.
    Dsu dsu(g.vertex_count());
    for (int i = 0; i < g.edge_count(); ++i)
        if ((plan.forced_open >> i) & 1) dsu.unite(g.edges[i].u, g.edges[i].v);
    std::vector<int32_t> base;
    dsu.snapshot(base);

    struct BondClassify {
        const Graph* g;
        const WeightPlan* plan;
        const PartitionTable* table;
        std::vector<int32_t> base;
        Dsu dsu;
        BondClassify(const Graph& gg, const WeightPlan& pl, const PartitionTable& tb,
                     std::vector<int32_t> b)
            : g(&gg), plan(&pl), table(&tb), base(std::move(b)), dsu(gg.vertex_count()) {}
        int operator()(uint64_t cfg) {
            dsu.restore(base);
            uint64_t bits = cfg;
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                const auto& e = g->edges[plan->uncertain[b]];
                dsu.unite(e.u, e.v);
            }
            int keys[kMaxTerminals];
            for (int i = 0; i < g->terminal_count(); ++i) keys[i] = dsu.find(g->terminals[i]);
            return table->index_from_keys(keys);
        }
    };

    return assemble(plan, probs, k, opts, BondClassify(g, plan, table, base));
}

DistributionResult site_distribution(const SiteModel& m, const EngineOptions& opts) {
    m.validate();
    int k = m.terminal_count();
    const PartitionTable& table = partition_table(k);
    WeightPlan plan;
    plan.build(m.vertex_prob, opts.exact_cap);

    struct SiteClassify {
        const SiteModel* m;
        const WeightPlan* plan;
        const PartitionTable* table;
        Dsu dsu;
        SiteClassify(const SiteModel& mm, const WeightPlan& pl, const PartitionTable& tb)
            : m(&mm), plan(&pl), table(&tb), dsu(mm.vertex_count()) {}
        int operator()(uint64_t cfg) {
            uint64_t open = plan->element_mask(cfg);
            dsu.init(m->vertex_count());
            for (const auto& [u, v] : m->edges)
                if (((open >> u) & 1) && ((open >> v) & 1)) dsu.unite(u, v);
            int keys[kMaxTerminals];
            for (int i = 0; i < m->terminal_count(); ++i) {
                int t = m->terminals[i];
                // A closed terminal sits in its own singleton class.
                keys[i] = ((open >> t) & 1) ? dsu.find(t) : -(i + 1);
            }
            return table->index_from_keys(keys);
        }
    };

    return assemble(plan, m.vertex_prob, k, opts, SiteClassify(m, plan, table));
}

DistributionResult hyper_distribution(const HyperModel& h, const EngineOptions& opts) {
    h.validate();
    int k = h.terminal_count();
    const PartitionTable& table = partition_table(k);
    std::vector<Rational> probs;
    probs.reserve(h.hyperedges.size());
    for (const auto& he : h.hyperedges) probs.push_back(he.p);
    WeightPlan plan;
    plan.build(probs, opts.exact_cap);

    struct HyperClassify {
        const HyperModel* h;
        const WeightPlan* plan;
        const PartitionTable* table;
        Dsu dsu;
        HyperClassify(const HyperModel& hh, const WeightPlan& pl, const PartitionTable& tb)
            : h(&hh), plan(&pl), table(&tb), dsu(hh.vertex_count()) {}
        int operator()(uint64_t cfg) {
            uint64_t open = plan->element_mask(cfg);
            dsu.init(h->vertex_count());
            uint64_t bits = open;
            while (bits) {
                int e = __builtin_ctzll(bits);
                bits &= bits - 1;
                const auto& mem = h->hyperedges[e].members;
                for (size_t i = 1; i < mem.size(); ++i) dsu.unite(mem[0], mem[i]);
            }
            int keys[kMaxTerminals];
            for (int i = 0; i < h->terminal_count(); ++i) keys[i] = dsu.find(h->terminals[i]);
            return table->index_from_keys(keys);
        }
    };

    return assemble(plan, probs, k, opts, HyperClassify(h, plan, table));
}

std::vector<double> bond_distribution_float(const Graph& g, const std::vector<double>& edge_probs) {
    int k = g.terminal_count();
    const PartitionTable& table = partition_table(k);
    int m = g.edge_count();
    if (static_cast<size_t>(m) != edge_probs.size())
        throw invalid_error("edge probability vector has wrong length");
    if (m > 26) throw cap_error("float enumeration cap exceeded");

    std::vector<double> out(bell_number(k), 0.0);
    Dsu dsu(g.vertex_count());
    for (uint64_t cfg = 0; cfg < (1ull << m); ++cfg) {
        double w = 1.0;
        dsu.init(g.vertex_count());
        for (int e = 0; e < m; ++e) {
            if ((cfg >> e) & 1) {
                w *= edge_probs[e];
                dsu.unite(g.edges[e].u, g.edges[e].v);
            } else {
                w *= 1.0 - edge_probs[e];
            }
        }
        if (w == 0.0) continue;
        int keys[kMaxTerminals];
        for (int i = 0; i < k; ++i) keys[i] = dsu.find(g.terminals[i]);
        out[table.index_from_keys(keys)] += w;
    }
    return out;
}

PreprocessResult preprocess(const Graph& g) {
    g.validate();
    PreprocessResult res;

    Dsu dsu(g.vertex_count());
    for (const auto& e : g.edges)
        if (e.p == 1) dsu.unite(e.u, e.v);

    // Representatives keep the smallest-index vertex's name.
    std::vector<int> rep(g.vertex_count());
    std::vector<int> new_index(g.vertex_count(), -1);
    Graph out;
    for (int v = 0; v < g.vertex_count(); ++v) {
        rep[v] = dsu.find(v);
        if (rep[v] == v) {
            new_index[v] = out.vertex_count();
            out.vertex_names.push_back(g.vertex_names[v]);
        }
    }

    for (const auto& e : g.edges) {
        if (e.p == 0 || e.p == 1) continue;
        int u = new_index[rep[e.u]], v = new_index[rep[e.v]];
        if (u == v) continue;  // contracted into a self-loop; cannot matter
        out.edges.push_back({u, v, e.p});
    }

    std::map<int, std::vector<std::string>> groups;
    for (int t : g.terminals) groups[new_index[rep[t]]].push_back(g.vertex_names[t]);
    for (auto& [idx, names] : groups) {
        out.terminals.push_back(idx);
        if (names.size() > 1) {
            res.terminals_merged = true;
            res.merged_terminal_groups.push_back(names);
        }
    }

    out.validate();
    res.graph = std::move(out);
    return res;
}

KmaxResult kmax_tail(const Graph& g, const KmaxQuery& q, const EngineOptions& opts) {
    g.validate();
    if (q.region.empty()) throw invalid_error("region must be non-empty");
    for (int v : q.region)
        if (v < 0 || v >= g.vertex_count()) throw invalid_error("region vertex out of range");
    if (q.threshold < 1) throw invalid_error("threshold must be >= 1");
    if (opts.mode != EngineOptions::Mode::Exact)
        throw invalid_error("cluster tails are exact-mode only");

    std::vector<Rational> probs;
    for (const auto& e : g.edges) probs.push_back(e.p);
    WeightPlan plan;
    plan.build(probs, opts.exact_cap);

    // Integer sizes against a rational threshold: size >= lambda iff
    // size >= ceil(lambda).
    BigInt lam_ceil = (q.threshold.get_num() + q.threshold.get_den() - 1) / q.threshold.get_den();
    long need = lam_ceil.get_si();

    // Buckets: bit0 = max tail hit, bit1 = focus tail hit.
    struct TailClassify {
        const Graph* g;
        const WeightPlan* plan;
        const KmaxQuery* q;
        long need;
        std::vector<int32_t> base;
        Dsu dsu;
        std::vector<int> count;
        TailClassify(const Graph& gg, const WeightPlan& pl, const KmaxQuery& qq, long n,
                     std::vector<int32_t> b)
            : g(&gg), plan(&pl), q(&qq), need(n), base(std::move(b)), dsu(gg.vertex_count()),
              count(gg.vertex_count()) {}
        int operator()(uint64_t cfg) {
            dsu.restore(base);
            uint64_t bits = cfg;
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                const auto& e = g->edges[plan->uncertain[b]];
                dsu.unite(e.u, e.v);
            }
            std::fill(count.begin(), count.end(), 0);
            int best = 0;
            for (int v : q->region) best = std::max(best, ++count[dsu.find(v)]);
            int bucket = (best >= need) ? 1 : 0;
            if (q->focus_vertex && count[dsu.find(*q->focus_vertex)] >= need) bucket |= 2;
            return bucket;
        }
    };

    Dsu dsu(g.vertex_count());
    for (int i = 0; i < g.edge_count(); ++i)
        if ((plan.forced_open >> i) & 1) dsu.unite(g.edges[i].u, g.edges[i].v);
    std::vector<int32_t> base;
    dsu.snapshot(base);

    auto buckets = enumerate_exact(plan, 4, opts.worker_count,
                                   TailClassify(g, plan, q, need, base));
    KmaxResult res;
    res.tail_max = buckets[1] + buckets[3];
    if (q.focus_vertex) res.tail_focus = buckets[2] + buckets[3];
    return res;
}

DichotomyReport dichotomy_scan(const Graph& g, const Rational& p, const EngineOptions& opts) {
    int k = g.terminal_count();
    if (k != 3 && k != 4) throw invalid_error("dichotomy scan supports 3 or 4 terminals");
    auto rho = bond_distribution(g, opts).rho;
    const PartitionTable& table = partition_table(k);

    DichotomyReport rep;
    rep.k = k;
    rep.target_p = p;
    rep.all_together = rho.probs.front();      // all-same is first in rgs-lex order
    rep.all_separate = rho.probs.back();       // all-distinct is last
    rep.margin_top = p - rep.all_together;
    rep.margin_bottom = (1 - p) - rep.all_separate;
    if (k == 4) {
        Rational pairwise = 1 - rep.all_separate;
        rep.pairwise_union = pairwise;
        rep.tail_inequality_holds = rep.all_together <= pairwise * pairwise;
    }
    (void)table;
    return rep;
}

}  // namespace perclab
