#include "perclab/partitions.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>

namespace perclab {

int bell_number(int k) {
    if (k < 1 || k > kMaxTerminals) throw invalid_error("terminal count out of range [1,6]");
    return kBell[k];
}

int TerminalPartition::block_count() const {
    int m = 0;
    for (int i = 0; i < k; ++i) m = std::max(m, static_cast<int>(labels[i]));
    return m + 1;
}

uint8_t TerminalPartition::block_mask(int i) const {
    uint8_t m = 0;
    for (int j = 0; j < k; ++j)
        if (labels[j] == labels[i]) m |= static_cast<uint8_t>(1u << j);
    return m;
}

std::string TerminalPartition::name(const std::vector<std::string>& names) const {
    std::string out;
    for (int b = 0; b < block_count(); ++b) {
        if (b) out += '|';
        for (int i = 0; i < k; ++i)
            if (labels[i] == b) out += names[i];
    }
    return out;
}

namespace {

void gen_rgs(int k, int pos, int max_used, std::array<uint8_t, kMaxTerminals>& cur,
             std::vector<TerminalPartition>& out) {
    if (pos == k) {
        TerminalPartition p;
        p.k = k;
        p.labels = cur;
        p.index = static_cast<int>(out.size());
        out.push_back(p);
        return;
    }
    for (int label = 0; label <= max_used + 1; ++label) {
        cur[pos] = static_cast<uint8_t>(label);
        gen_rgs(k, pos + 1, std::max(max_used, label), cur, out);
    }
}

int pack_labels(int k, const uint8_t* labels) {
    int code = 0;
    for (int i = k - 1; i >= 0; --i) code = code * kMaxTerminals + labels[i];
    return code;
}

}  // namespace

PartitionTable::PartitionTable(int k) : k_(k) {
    bell_number(k);  // range check
    std::array<uint8_t, kMaxTerminals> cur{};
    gen_rgs(k, 1, 0, cur, partitions_);  // labels[0] is always 0
    int table_size = 1;
    for (int i = 0; i < k; ++i) table_size *= kMaxTerminals;
    rank_.assign(table_size, -1);
    for (const auto& p : partitions_)
        rank_[pack_labels(k_, p.labels.data())] = static_cast<int16_t>(p.index);
}

int PartitionTable::index_of(const uint8_t* labels) const {
    int idx = rank_[pack_labels(k_, labels)];
    if (idx < 0) throw invalid_error("labels are not a restricted-growth string");
    return idx;
}

int PartitionTable::index_from_keys(const int* keys) const {
    uint8_t labels[kMaxTerminals];
    int next = 0;
    for (int i = 0; i < k_; ++i) {
        int lab = -1;
        for (int j = 0; j < i; ++j) {
            if (keys[j] == keys[i]) {
                lab = labels[j];
                break;
            }
        }
        labels[i] = static_cast<uint8_t>(lab < 0 ? next++ : lab);
    }
    return rank_[pack_labels(k_, labels)];
}

const PartitionTable& partition_table(int k) {
    bell_number(k);
    static std::once_flag once;
    static std::vector<PartitionTable>* tables = nullptr;
    std::call_once(once, [] {
        tables = new std::vector<PartitionTable>;
        for (int kk = 1; kk <= kMaxTerminals; ++kk) tables->emplace_back(kk);
    });
    return (*tables)[k - 1];
}

std::vector<TerminalPartition> canonical_partitions(int k) { return partition_table(k).all(); }

EventSet EventSet::atom_together(int k, int a, int b) {
    const auto& table = partition_table(k);
    uint64_t m = 0;
    for (const auto& p : table.all())
        if (p.together(a, b)) m |= 1ull << p.index;
    return {k, m};
}

namespace {

struct EventParser {
    const std::string& s;
    const std::vector<std::string>& names;
    size_t pos = 0;
    int k;

    EventParser(const std::string& s_, const std::vector<std::string>& names_)
        : s(s_), names(names_), k(static_cast<int>(names_.size())) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(const std::string& tok) {
        skip_ws();
        if (s.compare(pos, tok.size(), tok) == 0) {
            pos += tok.size();
            return true;
        }
        return false;
    }

    bool eat_word(const std::string& word) {
        skip_ws();
        size_t n = word.size();
        if (s.size() - pos < n) return false;
        for (size_t i = 0; i < n; ++i)
            if (std::toupper(static_cast<unsigned char>(s[pos + i])) != word[i]) return false;
        // must not continue as an identifier
        if (pos + n < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos + n])) || s[pos + n] == '_'))
            return false;
        pos += n;
        return true;
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (pos == start) throw parse_error("expected terminal name at position " + std::to_string(start));
        return s.substr(start, pos - start);
    }

    int terminal(const std::string& name) {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        throw parse_error("unknown terminal '" + name + "' in event expression");
    }

    EventSet expr() {
        EventSet lhs = term();
        while (true) {
            if (eat_word("OR") || eat("||")) {
                lhs = lhs.unite(term());
                continue;
            }
            skip_ws();
            if (pos < s.size() && s[pos] == '|') {
                ++pos;
                lhs = lhs.unite(term());
                continue;
            }
            return lhs;
        }
    }

    EventSet term() {
        EventSet lhs = factor();
        while (true) {
            if (eat_word("AND") || eat("&&") || eat("&")) {
                lhs = lhs.intersect(factor());
                continue;
            }
            return lhs;
        }
    }

    EventSet factor() {
        if (eat_word("NOT") || eat("!")) {
            // '!' must not be the start of '!~' inside an atom; atoms start
            // with an identifier, so a bare '!' here is a negation.
            return factor().complement();
        }
        if (eat("(")) {
            EventSet e = expr();
            if (!eat(")")) throw parse_error("missing ')' in event expression");
            return e;
        }
        return atom();
    }

    EventSet atom() {
        int a = terminal(ident());
        skip_ws();
        bool separate;
        if (eat("!~") || eat("≁")) {
            separate = true;
        } else if (eat("~")) {
            separate = false;
        } else {
            throw parse_error("expected '~' or '!~' at position " + std::to_string(pos));
        }
        int b = terminal(ident());
        EventSet e = EventSet::atom_together(k, a, b);
        return separate ? e.complement() : e;
    }

    EventSet parse() {
        EventSet e = expr();
        skip_ws();
        if (pos != s.size())
            throw parse_error("trailing input in event expression at position " + std::to_string(pos));
        return e;
    }
};

}  // namespace

EventSet parse_event(const std::string& expr, const std::vector<std::string>& terminal_names) {
    if (terminal_names.empty() || terminal_names.size() > kMaxTerminals)
        throw invalid_error("terminal count out of range [1,6]");
    return EventParser(expr, terminal_names).parse();
}

void PartitionDistribution::validate() const {
    if (static_cast<int>(probs.size()) != bell_number(k))
        throw invalid_error("distribution has wrong dimension");
    Rational sum(0);
    for (const auto& q : probs) {
        if (q < 0) throw invalid_error("negative partition probability");
        sum += q;
    }
    if (sum != 1) throw invalid_error("partition probabilities do not sum to 1");
}

Rational PartitionDistribution::event_probability(const EventSet& e) const {
    if (e.k != k) throw invalid_error("event/distribution dimension mismatch");
    Rational sum(0);
    for (size_t i = 0; i < probs.size(); ++i)
        if ((e.mask >> i) & 1) sum += probs[i];
    return sum;
}

}  // namespace perclab
