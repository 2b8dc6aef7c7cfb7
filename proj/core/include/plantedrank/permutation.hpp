#pragma once

#include <numeric>
#include <vector>

#include "plantedrank/matrix.hpp"

namespace plantedrank {

// Bijection on {0..n-1} stored as an index array: map[i] = pi(i).
struct Permutation {
    std::vector<int> map;

    Permutation() = default;
    explicit Permutation(std::vector<int> m) : map(std::move(m)) {}

    static Permutation identity(int n) {
        std::vector<int> m(n);
        std::iota(m.begin(), m.end(), 0);
        return Permutation(std::move(m));
    }

    int size() const { return static_cast<int>(map.size()); }
    int operator()(int i) const { return map[i]; }

    bool is_valid() const {
        std::vector<char> seen(map.size(), 0);
        for (int v : map) {
            if (v < 0 || v >= size() || seen[v]) return false;
            seen[v] = 1;
        }
        return true;
    }

    Permutation inverse() const {
        std::vector<int> inv(map.size());
        for (int i = 0; i < size(); ++i) inv[map[i]] = i;
        return Permutation(std::move(inv));
    }
};

// compose(s, p) = s after p, i.e. (s o p)(i) = s(p(i)).
inline Permutation compose(const Permutation& s, const Permutation& p) {
    std::vector<int> m(p.map.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = s.map[p.map[i]];
    return Permutation(std::move(m));
}

// inverse=true  : returns B with B_i = M_{pi^{-1}(i)}  (the matrix M_{pi^{-1}})
// inverse=false : returns B with B_i = M_{pi(i)}       (undoes the above)
Matrix apply_row_permutation(const Matrix& m, const Permutation& pi, bool inverse);
ObservationMatrix apply_row_permutation(const ObservationMatrix& y, const Permutation& pi,
                                        bool inverse);

}  // namespace plantedrank
