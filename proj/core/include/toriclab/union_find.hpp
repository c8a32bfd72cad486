#pragma once

#include <cstdint>
#include <vector>

namespace toriclab {

// Union-find over nodes embedded on a torus, tracking the displacement of
// every node relative to its root. When a union closes a cycle whose two
// path displacements disagree, the mismatch is a nonzero multiple of the
// torus period: the cluster winds. This detects percolation homologically.
class TorusUnionFind {
public:
    explicit TorusUnionFind(int n)
        : parent_(n), dx_(n, 0), dy_(n, 0), size_(n, 1),
          wrap_x_(n, false), wrap_y_(n, false) {
        for (int i = 0; i < n; ++i) parent_[i] = i;
    }

    int find(int a) {
        if (parent_[a] == a) return a;
        int root = find(parent_[a]);
        dx_[a] += dx_[parent_[a]];
        dy_[a] += dy_[parent_[a]];
        parent_[a] = root;
        return root;
    }

    // Join a and b where b sits at (a_pos + (dx,dy)) in unwrapped coordinates.
    void unite(int a, int b, int dx, int dy) {
        int ra = find(a), rb = find(b);
        int want_x = dx_[a] + dx, want_y = dy_[a] + dy; // b's offset if same tree
        if (ra == rb) {
            // mismatch is always a multiple of the period on a torus
            int mx = want_x - dx_[b], my = want_y - dy_[b];
            if (mx != 0) wrap_x_[ra] = true;
            if (my != 0) wrap_y_[ra] = true;
            return;
        }
        // attach smaller tree under larger
        if (size_[ra] < size_[rb]) {
            parent_[ra] = rb;
            dx_[ra] = dx_[b] - want_x;
            dy_[ra] = dy_[b] - want_y;
            size_[rb] += size_[ra];
            wrap_x_[rb] = wrap_x_[rb] || wrap_x_[ra];
            wrap_y_[rb] = wrap_y_[rb] || wrap_y_[ra];
        } else {
            parent_[rb] = ra;
            dx_[rb] = want_x - dx_[b];
            dy_[rb] = want_y - dy_[b];
            size_[ra] += size_[rb];
            wrap_x_[ra] = wrap_x_[ra] || wrap_x_[rb];
            wrap_y_[ra] = wrap_y_[ra] || wrap_y_[rb];
        }
    }

    int component_size(int a) { return size_[find(a)]; }
    bool wraps_x(int a) { return wrap_x_[find(a)]; }
    bool wraps_y(int a) { return wrap_y_[find(a)]; }

private:
    std::vector<int> parent_, dx_, dy_, size_;
    std::vector<bool> wrap_x_, wrap_y_;
};

// Plain union-find for component counting on arbitrary graphs.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n), size_(n, 1) {
        for (int i = 0; i < n; ++i) parent_[i] = i;
    }
    int find(int a) {
        while (parent_[a] != a) { parent_[a] = parent_[parent_[a]]; a = parent_[a]; }
        return a;
    }
    void unite(int a, int b) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return;
        if (size_[ra] < size_[rb]) std::swap(ra, rb);
        parent_[rb] = ra;
        size_[ra] += size_[rb];
    }
    int component_size(int a) { return size_[find(a)]; }

private:
    std::vector<int> parent_, size_;
};

} // namespace toriclab
