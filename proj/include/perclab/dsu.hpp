#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

namespace perclab {

// Disjoint-set union sized once and rebuilt per configuration from a preset
// baseline (memcpy), as the enumeration loops require.
class Dsu {
public:
    explicit Dsu(int n = 0) { init(n); }

    void init(int n) {
        parent_.resize(n);
        for (int i = 0; i < n; ++i) parent_[i] = i;
    }

    int size() const { return static_cast<int>(parent_.size()); }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];  // path halving
            x = parent_[x];
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b)
            parent_[b] = a;
        else
            parent_[a] = b;
    }

    bool same(int a, int b) { return find(a) == find(b); }

    // Snapshot/restore support for the per-configuration rebuild pattern.
    void snapshot(std::vector<int32_t>& out) {
        for (size_t i = 0; i < parent_.size(); ++i) parent_[i] = find(static_cast<int>(i));
        out = parent_;
    }
    void restore(const std::vector<int32_t>& base) {
        std::memcpy(parent_.data(), base.data(), base.size() * sizeof(int32_t));
    }

private:
    std::vector<int32_t> parent_;
};

}  // namespace perclab
