#include "perclab/tuple_enum.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <memory>

#include "perclab/parallel.hpp"
#include "perclab/swaps.hpp"

namespace perclab {

TupleIndex pack_tuple(const std::array<int, 8>& parts) {
    uint32_t idx = 0;
    for (int j = 0; j < 8; ++j) {
        if (parts[j] < 0 || parts[j] > 4) throw invalid_error("partition index out of range");
        idx = idx * 5 + static_cast<uint32_t>(parts[j]);
    }
    return idx;
}

std::array<int, 8> unpack_tuple(TupleIndex t) {
    if (t >= kTupleCount) throw invalid_error("tuple index out of range");
    std::array<int, 8> parts{};
    for (int j = 7; j >= 0; --j) {
        parts[j] = static_cast<int>(t % 5);
        t /= 5;
    }
    return parts;
}

uint64_t FeasibleSet::count() const {
    uint64_t c = 0;
    for (uint64_t w : bits) c += static_cast<uint64_t>(__builtin_popcountll(w));
    return c;
}

void FeasibleSet::merge(const FeasibleSet& o) {
    for (size_t i = 0; i < bits.size(); ++i) bits[i] |= o.bits[i];
}

std::array<uint64_t, 5> FeasibleSet::counts_by_first() const {
    std::array<uint64_t, 5> out{};
    constexpr uint32_t slice = kTupleCount / 5;  // 5^7
    for (uint32_t t = 0; t < kTupleCount; ++t)
        if (test(t)) out[t / slice]++;
    return out;
}

void FeasibleSet::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_error("cannot open '" + path + "' for writing");
    out.write("PLFS", 4);
    uint8_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), 1);
    uint64_t n = kTupleCount;
    uint8_t le[8];
    for (int i = 0; i < 8; ++i) le[i] = static_cast<uint8_t>((n >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(le), 8);
    for (uint64_t w : bits) {
        uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>((w >> (8 * i)) & 0xff);
        out.write(reinterpret_cast<const char*>(b), 8);
    }
    if (!out) throw invalid_error("failed writing '" + path + "'");
}

FeasibleSet FeasibleSet::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'");
    char magic[4];
    uint8_t version;
    uint8_t le[8];
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 1);
    in.read(reinterpret_cast<char*>(le), 8);
    if (!in || std::memcmp(magic, "PLFS", 4) != 0 || version != 1)
        throw parse_error("'" + path + "' is not a feasible-set bitset file");
    uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<uint64_t>(le[i]) << (8 * i);
    if (n != kTupleCount) throw parse_error("unexpected bit count in '" + path + "'");
    FeasibleSet fs;
    for (auto& w : fs.bits) {
        uint8_t b[8];
        in.read(reinterpret_cast<char*>(b), 8);
        if (!in) throw parse_error("truncated bitset file '" + path + "'");
        w = 0;
        for (int i = 0; i < 8; ++i) w |= static_cast<uint64_t>(b[i]) << (8 * i);
    }
    return fs;
}

bool side_predicate(int which, uint8_t class_u, uint8_t class_v, int c1_partition) {
    if (which < 0 || which > 2) throw invalid_error("side index must be 0, 1 or 2");
    const TerminalPartition& p = partition_table(3).at(c1_partition);
    auto valid_class = [&p](uint8_t m) {
        if (m == 0) return true;
        for (int t = 0; t < 3; ++t)
            if (p.block_mask(t) == m) return true;
        return false;
    };
    if (!valid_class(class_u) || !valid_class(class_v))
        throw invalid_error("class is not a block of the given partition");
    return side_rule(which, static_cast<uint8_t>(class_u | class_v));
}

namespace {

// Scratch arena reused across tuples; one per thread.
struct TupleWorkspace {
    static constexpr int kMaxCodes = 65536;  // 4^8
    std::vector<uint16_t> cls;   // packed 2-bit class digits, coordinate 0 first
    std::vector<uint8_t> alive;
    std::vector<uint8_t> kill;
    std::vector<int32_t> parent;
    // key -> representative tables with generation stamps (no per-pass clears)
    std::array<int32_t, 256> rep_a{};
    std::array<uint32_t, 256> stamp_a{};
    std::array<int32_t, 2560> first_lo{}, first_hi{};
    std::array<uint32_t, 2560> stamp_lo{}, stamp_hi{};
    uint32_t generation = 0;

    TupleWorkspace()
        : cls(kMaxCodes), alive(kMaxCodes), kill(kMaxCodes), parent(kMaxCodes) {
        stamp_a.fill(0);
        stamp_lo.fill(0);
        stamp_hi.fill(0);
    }

    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }
};

TupleWorkspace& workspace() {
    thread_local std::unique_ptr<TupleWorkspace> ws;
    if (!ws) ws = std::make_unique<TupleWorkspace>();
    return *ws;
}

int pair_id(int a, int b) {  // unordered pairs over 0..3
    if (a > b) std::swap(a, b);
    static constexpr int base[4] = {0, 4, 7, 9};
    return base[a] + (b - a);
}

struct TupleSetup {
    std::array<int, 8> parts;
    int radix[8];
    int stride[8];
    int code_count = 1;
    uint8_t class_mask[8][4];  // coordinate, class digit -> terminal bitmask
    int terminal_code[3];
    // coordinate-0 class pairs: which configs an edge is open in, and the
    // packing order of the equality coordinates (owner coordinate first).
    uint8_t cfg1[4];           // per gamma, bitmask over configs 0..7
    uint8_t coords1[4][4];
    uint8_t cfg2[10];          // per unordered gamma pair
    uint8_t coords2[10][4];

    explicit TupleSetup(TupleIndex t) {
        parts = unpack_tuple(t);
        const PartitionTable& table = partition_table(3);
        for (int j = 0; j < 8; ++j) {
            const TerminalPartition& p = table.at(parts[j]);
            int blocks = p.block_count();
            radix[j] = blocks + 1;
            class_mask[j][0] = 0;
            for (int b = 0; b < blocks; ++b) {
                uint8_t m = 0;
                for (int i = 0; i < 3; ++i)
                    if (p.labels[i] == b) m |= static_cast<uint8_t>(1u << i);
                class_mask[j][b + 1] = m;
            }
            for (int b = blocks + 1; b < 4; ++b) class_mask[j][b] = 0;
        }
        for (int j = 0; j < 8; ++j) {
            stride[j] = code_count;
            code_count *= radix[j];
        }
        for (int t3 = 0; t3 < 3; ++t3) {
            int code = 0;
            for (int j = 0; j < 8; ++j)
                code += (1 + table.at(parts[j]).labels[t3]) * stride[j];
            terminal_code[t3] = code;
        }
        for (int g = 0; g < radix[0]; ++g) {
            uint8_t m = class_mask[0][g];
            cfg1[g] = 1u << 0;
            coords1[g][0] = 0;
            for (int i = 0; i < 3; ++i) {
                int cfg = side_rule(i, m) ? (2 + 2 * i) : (3 + 2 * i);
                cfg1[g] |= static_cast<uint8_t>(1u << cfg);
                coords1[g][i + 1] = static_cast<uint8_t>(cfg);
            }
        }
        for (int g1 = 0; g1 < radix[0]; ++g1) {
            for (int g2 = g1; g2 < radix[0]; ++g2) {
                uint8_t m = static_cast<uint8_t>(class_mask[0][g1] | class_mask[0][g2]);
                int pid = pair_id(g1, g2);
                cfg2[pid] = 1u << 1;
                coords2[pid][0] = 1;
                for (int i = 0; i < 3; ++i) {
                    int cfg = side_rule(i, m) ? (3 + 2 * i) : (2 + 2 * i);
                    cfg2[pid] |= static_cast<uint8_t>(1u << cfg);
                    coords2[pid][i + 1] = static_cast<uint8_t>(cfg);
                }
            }
        }
    }
};

bool feasible_impl(TupleIndex t, TupleWorkspace& ws) {
    TupleSetup setup(t);
    const int n = setup.code_count;

    // Enumerate codes as a mixed-radix odometer; pack digits 2 bits each.
    {
        int digits[8] = {0};
        for (int x = 0; x < n; ++x) {
            uint16_t packed = 0;
            for (int j = 0; j < 8; ++j)
                packed |= static_cast<uint16_t>(digits[j] << (2 * j));
            ws.cls[x] = packed;
            ws.alive[x] = 1;
            ws.kill[x] = 0;
            for (int j = 0; j < 8; ++j) {
                if (++digits[j] < setup.radix[j]) break;
                digits[j] = 0;
            }
        }
    }

    auto digit = [&ws](int x, int j) { return (ws.cls[x] >> (2 * j)) & 3; };
    auto pack_key = [&ws](int x, const uint8_t* coords) {
        uint16_t c = ws.cls[x];
        return ((c >> (2 * coords[0])) & 3) | (((c >> (2 * coords[1])) & 3) << 2) |
               (((c >> (2 * coords[2])) & 3) << 4) | (((c >> (2 * coords[3])) & 3) << 6);
    };

    const int ta = setup.terminal_code[0], tb = setup.terminal_code[1],
              tc = setup.terminal_code[2];
    const int r0 = setup.radix[0];

    bool changed = true;
    while (changed) {
        changed = false;
        for (int k = 0; k < 8; ++k) {
            for (int x = 0; x < n; ++x) ws.parent[x] = x;

            // Edges open-from-C1: same coordinate-0 class, equality on the
            // coordinates the edge's status reaches.
            uint32_t gen = ++ws.generation;
            for (int x = 0; x < n; ++x) {
                if (!ws.alive[x]) continue;
                int g = digit(x, 0);
                if (!((setup.cfg1[g] >> k) & 1)) continue;
                int key = pack_key(x, setup.coords1[g]);
                if (ws.stamp_a[key] == gen)
                    ws.unite(x, ws.rep_a[key]);
                else {
                    ws.stamp_a[key] = gen;
                    ws.rep_a[key] = x;
                }
            }

            // Edges open-from-C2: same coordinate-1 class; the side decision
            // reads both endpoints' coordinate-0 classes, so classes pair up.
            gen = ++ws.generation;
            for (int x = 0; x < n; ++x) {
                if (!ws.alive[x]) continue;
                int g = digit(x, 0);
                for (int g2 = 0; g2 < r0; ++g2) {
                    int pid = pair_id(g, g2);
                    if (!((setup.cfg2[pid] >> k) & 1)) continue;
                    int key = pid * 256 + pack_key(x, setup.coords2[pid]);
                    if (g == g2) {  // clique within the class
                        if (ws.stamp_lo[key] == gen)
                            ws.unite(x, ws.first_lo[key]);
                        else {
                            ws.stamp_lo[key] = gen;
                            ws.first_lo[key] = x;
                        }
                    } else if (g < g2) {
                        if (ws.stamp_lo[key] != gen) {
                            ws.stamp_lo[key] = gen;
                            ws.first_lo[key] = x;
                        }
                    } else {
                        if (ws.stamp_hi[key] != gen) {
                            ws.stamp_hi[key] = gen;
                            ws.first_hi[key] = x;
                        }
                    }
                }
            }
            for (int x = 0; x < n; ++x) {
                if (!ws.alive[x]) continue;
                int g = digit(x, 0);
                for (int g2 = 0; g2 < r0; ++g2) {
                    if (g2 == g) continue;
                    int pid = pair_id(g, g2);
                    if (!((setup.cfg2[pid] >> k) & 1)) continue;
                    int key = pid * 256 + pack_key(x, setup.coords2[pid]);
                    if (ws.stamp_lo[key] == gen && ws.stamp_hi[key] == gen)
                        ws.unite(x, g < g2 ? ws.first_hi[key] : ws.first_lo[key]);
                }
            }

            // Terminal declarations are forced; an unmet one can never be
            // repaired by deletions, so fail fast.
            int ra = ws.find(ta), rb = ws.find(tb), rc = ws.find(tc);
            auto realized_of_root = [&](int r) {
                return static_cast<uint8_t>((r == ra ? 1 : 0) | (r == rb ? 2 : 0) |
                                            (r == rc ? 4 : 0));
            };
            if (realized_of_root(ra) != setup.class_mask[k][digit(ta, k)]) return false;
            if (realized_of_root(rb) != setup.class_mask[k][digit(tb, k)]) return false;
            if (realized_of_root(rc) != setup.class_mask[k][digit(tc, k)]) return false;

            for (int x = 0; x < n; ++x) {
                if (!ws.alive[x] || ws.kill[x]) continue;
                if (realized_of_root(ws.find(x)) != setup.class_mask[k][digit(x, k)])
                    ws.kill[x] = 1;
            }
        }

        for (int x = 0; x < n; ++x) {
            if (ws.kill[x]) {
                ws.alive[x] = 0;
                ws.kill[x] = 0;
                changed = true;
            }
        }
    }
    return true;
}

}  // namespace

bool feasible(TupleIndex t) { return feasible_impl(t, workspace()); }

FeasibleSet enumerate_feasible(const TupleSlice& slice, int workers) {
    int fixed_mask = 0;
    std::array<int, 8> fixed_val{};
    for (auto [coord, value] : slice.fixed) {
        if (coord < 0 || coord > 7) throw invalid_error("slice coordinate out of range");
        if (value < 0 || value > 4) throw invalid_error("slice partition index out of range");
        if ((fixed_mask >> coord) & 1) throw invalid_error("slice fixes a coordinate twice");
        fixed_mask |= 1 << coord;
        fixed_val[coord] = value;
    }
    std::vector<int> free_coords;
    for (int j = 0; j < 8; ++j)
        if (!((fixed_mask >> j) & 1)) free_coords.push_back(j);
    uint64_t total = 1;
    for (size_t i = 0; i < free_coords.size(); ++i) total *= 5;

    int w = std::max(1, workers);
    std::vector<FeasibleSet> partial(static_cast<size_t>(w));
    parallel_chunks(total, w, [&](int worker, uint64_t begin, uint64_t end) {
        TupleWorkspace& ws = workspace();
        FeasibleSet& out = partial[worker];
        std::array<int, 8> parts = fixed_val;
        for (uint64_t lin = begin; lin < end; ++lin) {
            uint64_t rest = lin;
            for (auto it = free_coords.rbegin(); it != free_coords.rend(); ++it) {
                parts[*it] = static_cast<int>(rest % 5);
                rest /= 5;
            }
            TupleIndex t = pack_tuple(parts);
            if (feasible_impl(t, ws)) out.set(t);
        }
    });
    FeasibleSet result;
    for (const auto& p : partial) result.merge(p);
    return result;
}

std::vector<TupleIndex> observed_tuples(const Graph& g, int workers) {
    if (g.edge_count() > kObservedEdgeCap)
        throw cap_error("observed-tuple cap exceeded: " + std::to_string(g.edge_count()) +
                        " edges, cap " + std::to_string(kObservedEdgeCap));
    SwapTables tab = build_swap_tables(g);
    int m = g.edge_count();
    uint64_t n = 1ull << m;

    int w = std::max(1, workers);
    std::vector<std::vector<uint64_t>> seen(static_cast<size_t>(w),
                                            std::vector<uint64_t>((kTupleCount + 63) / 64, 0));
    parallel_chunks(n, w, [&](int worker, uint64_t begin, uint64_t end) {
        auto& local = seen[worker];
        for (uint64_t c1 = begin; c1 < end; ++c1) {
            const auto& s = tab.s[c1];
            for (uint64_t c2 = 0; c2 < n; ++c2) {
                uint32_t idx = tab.part[c1];
                idx = idx * 5 + tab.part[c2];
                for (int i = 0; i < 3; ++i) {
                    idx = idx * 5 + tab.part[(c1 & s[i]) | (c2 & ~s[i])];
                    idx = idx * 5 + tab.part[(c1 & ~s[i]) | (c2 & s[i])];
                }
                local[idx >> 6] |= 1ull << (idx & 63);
            }
        }
    });

    std::vector<uint64_t> merged((kTupleCount + 63) / 64, 0);
    for (const auto& local : seen)
        for (size_t i = 0; i < merged.size(); ++i) merged[i] |= local[i];
    std::vector<TupleIndex> out;
    for (uint32_t t = 0; t < kTupleCount; ++t)
        if ((merged[t >> 6] >> (t & 63)) & 1) out.push_back(t);
    return out;
}

TupleIndex relabel_bc(TupleIndex t) {
    static constexpr int sigma[5] = {p3::ABC, p3::AC_B, p3::AB_C, p3::A_BC, p3::SPLIT};
    auto parts = unpack_tuple(t);
    std::array<int, 8> out;
    out[0] = sigma[parts[0]];
    out[1] = sigma[parts[1]];
    out[2] = sigma[parts[4]];
    out[3] = sigma[parts[5]];
    out[4] = sigma[parts[2]];
    out[5] = sigma[parts[3]];
    out[6] = sigma[parts[6]];
    out[7] = sigma[parts[7]];
    return pack_tuple(out);
}

}  // namespace perclab
