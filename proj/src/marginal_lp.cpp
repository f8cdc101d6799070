#include "perclab/marginal_lp.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "perclab/inequalities.hpp"
#include "perclab/parallel.hpp"

namespace perclab {

using nlohmann::json;

ProfileList aggregate_profiles(const FeasibleSet& f) {
    ProfileList out;
    for (uint32_t t = 0; t < kTupleCount; ++t) {
        if (!f.test(t)) continue;
        auto parts = unpack_tuple(t);
        std::array<uint16_t, 4> rows;
        for (int g = 0; g < 4; ++g)
            rows[g] = static_cast<uint16_t>(g * 25 + parts[2 * g] * 5 + parts[2 * g + 1]);
        out.profiles.push_back(t);
        out.rows.push_back(rows);
    }
    if (out.profiles.empty()) throw invalid_error("empty feasible set");
    return out;
}

std::vector<Rational> marginal_rhs(const PartitionDistribution& rho) {
    if (rho.k != 3) throw invalid_error("marginal program needs 3 terminals");
    rho.validate();
    std::vector<Rational> b(kLpRows);
    for (int g = 0; g < 4; ++g)
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y) b[g * 25 + x * 5 + y] = rho.probs[x] * rho.probs[y];
    return b;
}

namespace {

// Revised phase-1 simplex with an explicit basis inverse. Pricing runs on a
// float mirror of the exact duals with a sound error margin: columns priced
// clearly nonnegative in floats are exactly nonnegative, everything near the
// margin is re-checked in rationals.
class Phase1Simplex {
public:
    Phase1Simplex(const ProfileList& cols, std::vector<Rational> rhs)
        : cols_(cols), b_(std::move(rhs)), n_(static_cast<int>(cols.profiles.size())) {
        binv_.assign(kLpRows * kLpRows, Rational(0));
        for (int i = 0; i < kLpRows; ++i) binv_[i * kLpRows + i] = 1;
        xb_ = b_;
        basis_.resize(kLpRows);
        for (int i = 0; i < kLpRows; ++i) basis_[i] = n_ + i;  // artificials
    }

    SolveResult run() {
        SolveResult res;
        int degenerate_run = 0;
        bool bland = false;
        for (;;) {
            if (++res.pivots > 200000) throw std::logic_error("simplex pivot budget exhausted");
            compute_duals();
            if (objective_zero()) {
                res.feasible = true;
                collect_witness(res);
                return res;
            }
            int entering = price(bland);
            if (entering < 0) {
                res.feasible = false;
                res.certificate.dual.assign(y_.begin(), y_.end());
                return res;
            }
            int leaving = ratio_test(entering);
            if (leaving < 0) throw std::logic_error("phase-1 column unbounded");
            bool degenerate = (xb_[leaving] == 0);
            pivot(entering, leaving);
            if (degenerate) {
                if (++degenerate_run > 500) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

private:
    void column_rows(int j, std::array<uint16_t, 4>& rows, int& cnt) const {
        if (j < n_) {
            rows = cols_.rows[j];
            cnt = 4;
        } else {
            rows[0] = static_cast<uint16_t>(j - n_);
            cnt = 1;
        }
    }

    void compute_duals() {
        y_.assign(kLpRows, Rational(0));
        for (int i = 0; i < kLpRows; ++i) {
            if (basis_[i] < n_) continue;  // phase-1 cost 0
            const Rational* row = &binv_[i * kLpRows];
            for (int r = 0; r < kLpRows; ++r)
                if (row[r] != 0) y_[r] += row[r];
        }
        yf_.resize(kLpRows);
        double max_abs = 0.0;
        for (int r = 0; r < kLpRows; ++r) {
            yf_[r] = to_double(y_[r]);
            max_abs = std::max(max_abs, std::fabs(yf_[r]));
        }
        margin_ = max_abs * 1e-12 + 1e-300;
    }

    bool objective_zero() const {
        for (int i = 0; i < kLpRows; ++i)
            if (basis_[i] >= n_ && xb_[i] != 0) return false;
        return true;
    }

    Rational exact_rc(int j) const {
        Rational rc(0);
        if (j < n_) {
            for (uint16_t r : cols_.rows[j]) rc -= y_[r];
        } else {
            rc = Rational(1) - y_[j - n_];
        }
        return rc;
    }

    // Entering column index or -1 at optimality. Dantzig on the float mirror;
    // Bland (smallest index, exact) when anti-cycling is on.
    int price(bool bland) {
        if (bland) {
            for (int j = 0; j < n_; ++j) {
                const auto& rows = cols_.rows[j];
                double rcf = -(yf_[rows[0]] + yf_[rows[1]] + yf_[rows[2]] + yf_[rows[3]]);
                if (rcf < margin_ && exact_rc(j) < 0) return j;
            }
            for (int j = n_; j < n_ + kLpRows; ++j)
                if (exact_rc(j) < 0) return j;
            return -1;
        }
        int best = -1;
        double best_rcf = -margin_;
        for (int j = 0; j < n_; ++j) {
            const auto& rows = cols_.rows[j];
            double rcf = -(yf_[rows[0]] + yf_[rows[1]] + yf_[rows[2]] + yf_[rows[3]]);
            if (rcf < best_rcf) {
                best_rcf = rcf;
                best = j;
            }
        }
        if (best >= 0 && exact_rc(best) < 0) return best;
        // The float pick was not exactly negative (or nothing stood out):
        // fall back to an exact pass over the ambiguous band.
        for (int j = 0; j < n_; ++j) {
            const auto& rows = cols_.rows[j];
            double rcf = -(yf_[rows[0]] + yf_[rows[1]] + yf_[rows[2]] + yf_[rows[3]]);
            if (rcf < margin_ && exact_rc(j) < 0) return j;
        }
        for (int j = n_; j < n_ + kLpRows; ++j)
            if (exact_rc(j) < 0) return j;
        return -1;
    }

    int ratio_test(int entering) {
        std::array<uint16_t, 4> rows;
        int cnt;
        column_rows(entering, rows, cnt);
        d_.assign(kLpRows, Rational(0));
        for (int c = 0; c < cnt; ++c) {
            int r = rows[c];
            for (int i = 0; i < kLpRows; ++i) d_[i] += binv_[i * kLpRows + r];
        }
        int leaving = -1;
        Rational best;
        for (int i = 0; i < kLpRows; ++i) {
            if (d_[i] <= 0) continue;
            Rational ratio = xb_[i] / d_[i];
            if (leaving < 0 || ratio < best ||
                (ratio == best && basis_[i] < basis_[leaving])) {
                best = ratio;
                leaving = i;
            }
        }
        return leaving;
    }

    void pivot(int entering, int leaving) {
        Rational inv = 1 / d_[leaving];
        Rational* lrow = &binv_[leaving * kLpRows];
        if (inv != 1)
            for (int r = 0; r < kLpRows; ++r)
                if (lrow[r] != 0) lrow[r] *= inv;
        xb_[leaving] *= inv;
        for (int i = 0; i < kLpRows; ++i) {
            if (i == leaving || d_[i] == 0) continue;
            const Rational& f = d_[i];
            Rational* row = &binv_[i * kLpRows];
            for (int r = 0; r < kLpRows; ++r)
                if (lrow[r] != 0) row[r] -= f * lrow[r];
            xb_[i] -= f * xb_[leaving];
        }
        basis_[leaving] = entering;
    }

    void collect_witness(SolveResult& res) const {
        for (int i = 0; i < kLpRows; ++i)
            if (basis_[i] < n_ && xb_[i] != 0)
                res.witness.emplace_back(cols_.profiles[basis_[i]], xb_[i]);
        std::sort(res.witness.begin(), res.witness.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    const ProfileList& cols_;
    std::vector<Rational> b_, xb_, y_, d_;
    std::vector<double> yf_;
    double margin_ = 0.0;
    std::vector<Rational> binv_;
    std::vector<int> basis_;
    int n_;
};

}  // namespace

SolveResult solve_marginal_lp(const ProfileList& cols, const PartitionDistribution& rho) {
    Phase1Simplex simplex(cols, marginal_rhs(rho));
    SolveResult res = simplex.run();
    if (!res.feasible && !verify_certificate(cols, rho, res.certificate))
        throw std::logic_error("solver produced an invalid certificate");
    if (res.feasible && !verify_witness(cols, rho, res.witness))
        throw std::logic_error("solver produced an invalid witness");
    return res;
}

bool verify_certificate(const ProfileList& cols, const PartitionDistribution& rho,
                        const Certificate& cert) {
    if (static_cast<int>(cert.dual.size()) != kLpRows) return false;
    auto b = marginal_rhs(rho);
    Rational yb(0);
    for (int r = 0; r < kLpRows; ++r) yb += cert.dual[r] * b[r];
    if (yb <= 0) return false;
    for (const auto& rows : cols.rows) {
        Rational ya = cert.dual[rows[0]] + cert.dual[rows[1]] + cert.dual[rows[2]] +
                      cert.dual[rows[3]];
        if (ya > 0) return false;
    }
    return true;
}

bool verify_witness(const ProfileList& cols, const PartitionDistribution& rho,
                    const std::vector<std::pair<TupleIndex, Rational>>& witness) {
    auto b = marginal_rhs(rho);
    std::vector<Rational> lhs(kLpRows, Rational(0));
    for (const auto& [t, q] : witness) {
        if (q < 0) return false;
        auto it = std::lower_bound(cols.profiles.begin(), cols.profiles.end(), t);
        if (it == cols.profiles.end() || *it != t) return false;
        const auto& rows = cols.rows[it - cols.profiles.begin()];
        for (uint16_t r : rows) lhs[r] += q;
    }
    for (int r = 0; r < kLpRows; ++r)
        if (lhs[r] != b[r]) return false;
    return true;
}

std::string certificate_to_json(const Certificate& cert, const PartitionDistribution& rho) {
    json j;
    j["schema"] = 1;
    j["rowOrder"] = "group*25 + first*5 + second; groups: (1,2),(3,4),(5,6),(7,8)";
    json rho_j = json::array(), dual_j = json::array();
    for (const auto& q : rho.probs) rho_j.push_back(rational_str(q));
    for (const auto& q : cert.dual) dual_j.push_back(rational_str(q));
    j["rho"] = rho_j;
    j["dual"] = dual_j;
    return j.dump(2) + "\n";
}

std::pair<Certificate, PartitionDistribution> certificate_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(e.what());
    }
    Certificate cert;
    PartitionDistribution rho(3);
    auto& rj = j.at("rho");
    if (rj.size() != 5) throw parse_error("certificate rho must have 5 entries");
    for (int i = 0; i < 5; ++i) rho.probs[i] = parse_rational(rj.at(i).get<std::string>());
    for (const auto& d : j.at("dual")) cert.dual.push_back(parse_rational(d.get<std::string>()));
    if (static_cast<int>(cert.dual.size()) != kLpRows)
        throw parse_error("certificate dual must have 100 entries");
    return {std::move(cert), std::move(rho)};
}

namespace {

PartitionDistribution rho_from_coords(const std::array<int, 5>& coords, int denom) {
    PartitionDistribution rho(3);
    for (int i = 0; i < 5; ++i)
        rho.probs[i] = make_rational(BigInt(coords[i]), BigInt(denom));
    return rho;
}

// Certificates already column-verified; only the rho-dependent side needs
// checking per point. Float prefilter with exact confirmation.
struct CertificatePool {
    struct Entry {
        Certificate cert;
        std::array<double, kLpRows> dual_f;
    };
    std::vector<Entry> entries;

    void add(Certificate cert) {
        for (const auto& e : entries)
            if (e.cert.dual == cert.dual) return;
        Entry e;
        e.cert = std::move(cert);
        for (int r = 0; r < kLpRows; ++r) e.dual_f[r] = to_double(e.cert.dual[r]);
        entries.push_back(std::move(e));
    }

    // Index of a certificate refuting rho, or -1.
    int refutes(const PartitionDistribution& rho) const {
        std::array<double, 5> rf;
        for (int i = 0; i < 5; ++i) rf[i] = to_double(rho.probs[i]);
        for (size_t c = 0; c < entries.size(); ++c) {
            const auto& e = entries[c];
            double acc = 0.0, mag = 0.0;
            for (int g = 0; g < 4; ++g)
                for (int x = 0; x < 5; ++x)
                    for (int y = 0; y < 5; ++y) {
                        double term = e.dual_f[g * 25 + x * 5 + y] * rf[x] * rf[y];
                        acc += term;
                        mag += std::fabs(term);
                    }
            if (acc <= mag * 1e-9) continue;  // not clearly positive
            // exact confirmation of dual·rhs > 0
            Rational yb(0);
            for (int g = 0; g < 4; ++g)
                for (int x = 0; x < 5; ++x)
                    for (int y = 0; y < 5; ++y)
                        yb += e.cert.dual[g * 25 + x * 5 + y] * rho.probs[x] * rho.probs[y];
            if (yb > 0) return static_cast<int>(c);
        }
        return -1;
    }
};

std::vector<std::array<int, 5>> band_points(int denom, int level) {
    // All compositions with min(first, last) == level, deterministic order.
    std::vector<std::array<int, 5>> pts;
    auto emit_pair = [&](int n1, int n5) {
        int r = denom - n1 - n5;
        if (r < 0) return;
        for (int n2 = 0; n2 <= r; ++n2)
            for (int n3 = 0; n3 + n2 <= r; ++n3)
                pts.push_back({n1, n2, n3, r - n2 - n3, n5});
    };
    for (int n5 = level; n5 <= denom - level; ++n5) emit_pair(level, n5);
    for (int n1 = level + 1; n1 <= denom - level; ++n1) emit_pair(n1, level);
    return pts;
}

// Classifies `pts` deterministically: frozen-pool screening in parallel,
// then unsolved points in point order via batched parallel solves whose
// results (and new certificates) merge in point order. Returns the index of
// the first feasible point, or -1. With stop_at_feasible, points after the
// first feasible one are left unrecorded.
int classify_points(const ProfileList& cols, const std::vector<std::array<int, 5>>& pts,
                    int denom, int workers, bool stop_at_feasible, CertificatePool& pool,
                    BandStats& stats, std::vector<PointRecord>& out_points) {
    size_t count = pts.size();
    stats.total += count;
    std::vector<int8_t> status(count, -2);   // -2 unknown, -1 feasible, 0 infeasible
    std::vector<int8_t> via_solver(count, 0);
    std::vector<int> cert_of(count, -1);
    std::vector<Certificate> fresh(count);

    parallel_chunks(count, workers, [&](int, uint64_t begin, uint64_t end) {
        for (uint64_t i = begin; i < end; ++i) {
            int c = pool.refutes(rho_from_coords(pts[i], denom));
            if (c >= 0) {
                status[i] = 0;
                cert_of[i] = c;
            }
        }
    });

    std::vector<size_t> pending;
    for (size_t i = 0; i < count; ++i)
        if (status[i] == -2) pending.push_back(i);

    size_t next = 0;
    int first_feasible = -1;
    while (next < pending.size() && (first_feasible < 0 || !stop_at_feasible)) {
        size_t batch = std::min<size_t>(static_cast<size_t>(std::max(1, workers)) * 2,
                                        pending.size() - next);
        parallel_chunks(batch, workers, [&](int, uint64_t begin, uint64_t end) {
            for (uint64_t bi = begin; bi < end; ++bi) {
                size_t i = pending[next + bi];
                PartitionDistribution rho = rho_from_coords(pts[i], denom);
                int c = pool.refutes(rho);  // pool frozen during the batch
                if (c >= 0) {
                    status[i] = 0;
                    cert_of[i] = c;
                    continue;
                }
                via_solver[i] = 1;
                SolveResult sr = solve_marginal_lp(cols, rho);
                if (sr.feasible) {
                    status[i] = -1;
                } else {
                    status[i] = 0;
                    fresh[i] = std::move(sr.certificate);
                }
            }
        });
        bool stop = false;
        for (uint64_t bi = 0; bi < batch && !stop; ++bi) {
            size_t i = pending[next + bi];
            if (status[i] == -1) {
                if (first_feasible < 0) first_feasible = static_cast<int>(i);
                if (stop_at_feasible) stop = true;
            } else if (cert_of[i] < 0 && !fresh[i].dual.empty()) {
                pool.add(std::move(fresh[i]));
            }
        }
        next += batch;
        if (stop) break;
    }

    size_t limit = (first_feasible >= 0 && stop_at_feasible)
                       ? static_cast<size_t>(first_feasible) + 1
                       : count;
    for (size_t i = 0; i < limit; ++i) {
        if (status[i] == -2) continue;  // past the stop point, never classified
        PointRecord rec;
        rec.coords = pts[i];
        rec.lp_feasible = (status[i] == -1);
        if (via_solver[i]) stats.solved++;
        if (!rec.lp_feasible) {
            if (cert_of[i] < 0) cert_of[i] = pool.refutes(rho_from_coords(pts[i], denom));
            if (cert_of[i] < 0)
                throw std::logic_error("infeasible point left without certificate");
            rec.certificate_index = cert_of[i];
            stats.infeasible++;
        }
        stats.cached += via_solver[i] ? 0 : 1;
        out_points.push_back(rec);
    }
    if (first_feasible >= 0) stats.feasible_found = true;
    return first_feasible;
}

}  // namespace

ScanReport scan_grid(const FeasibleSet& f, const GridSpec& grid, int workers) {
    if (grid.denom < 1 || grid.denom > 200)
        throw invalid_error("grid step must be between 1 and 1/200");
    ProfileList cols = aggregate_profiles(f);

    ScanReport report;
    report.grid = grid;
    report.coord_denom = (grid.mode == GridSpec::Mode::SymmetricSlice) ? 3 * grid.denom
                                                                       : grid.denom;
    report.bound = Rational(0);
    CertificatePool pool;

    if (grid.mode == GridSpec::Mode::SymmetricSlice) {
        std::vector<std::array<int, 5>> pts;
        for (int x = 0; x * 2 <= grid.denom; ++x) {
            // rho = (x, s, s, s, x)/denom with 3s = denom - 2x: scale by 3.
            pts.push_back({3 * x, grid.denom - 2 * x, grid.denom - 2 * x, grid.denom - 2 * x,
                           3 * x});
        }
        BandStats stats;
        stats.level = -1;
        classify_points(cols, pts, 3 * grid.denom, workers, false, pool, stats, report.points);
        report.bands.push_back(stats);
        for (const auto& rec : report.points)
            if (rec.lp_feasible) {
                Rational v = make_rational(BigInt(std::min(rec.coords[0], rec.coords[4])),
                                           BigInt(3 * grid.denom));
                if (v > report.bound) report.bound = v;
            }
    } else if (grid.mode == GridSpec::Mode::Full) {
        std::vector<std::array<int, 5>> pts;
        for (int n1 = 0; n1 <= grid.denom; ++n1)
            for (int n2 = 0; n1 + n2 <= grid.denom; ++n2)
                for (int n3 = 0; n1 + n2 + n3 <= grid.denom; ++n3)
                    for (int n4 = 0; n1 + n2 + n3 + n4 <= grid.denom; ++n4)
                        pts.push_back({n1, n2, n3, n4, grid.denom - n1 - n2 - n3 - n4});
        BandStats stats;
        stats.level = -1;
        classify_points(cols, pts, grid.denom, workers, false, pool, stats, report.points);
        report.bands.push_back(stats);
        for (const auto& rec : report.points) {
            if (!rec.lp_feasible) continue;
            Rational v = make_rational(BigInt(std::min(rec.coords[0], rec.coords[4])),
                                       BigInt(grid.denom));
            if (!report.witness_point || v > report.bound) {
                report.bound = v;
                report.witness_point = rec.coords;
            }
        }
    } else {
        for (int level = grid.denom / 2; level >= 0; --level) {
            auto pts = band_points(grid.denom, level);
            BandStats stats;
            stats.level = level;
            int first = classify_points(cols, pts, grid.denom, workers, true, pool, stats,
                                        report.points);
            report.bands.push_back(stats);
            if (first >= 0) {
                report.bound = make_rational(BigInt(level), BigInt(grid.denom));
                report.witness_point = pts[first];
                break;
            }
        }
    }

    report.certificates.reserve(pool.entries.size());
    for (auto& e : pool.entries) report.certificates.push_back(std::move(e.cert));
    return report;
}

std::vector<SampleOutcome> check_derived_inequalities(const ProfileList& cols,
                                                      const std::vector<Sample>& samples) {
    std::vector<SampleOutcome> out;
    for (const auto& s : samples) {
        SampleOutcome o;
        o.label = s.label;
        auto report = evaluate_inequalities(s.rho);
        o.violates_strong_bound = !report.by_id("split_bound_strong").satisfied;
        o.violates_pair_product = !report.by_id("pair_product_bound").satisfied;
        o.lp_feasible = solve_marginal_lp(cols, s.rho).feasible;
        o.consistent = true;
        if ((o.violates_strong_bound || o.violates_pair_product) && o.lp_feasible)
            o.consistent = false;
        if (s.from_graph && !o.lp_feasible) o.consistent = false;
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace perclab
