#pragma once

#include <array>
#include <utility>

namespace kl {

// Octonion basis 1=e0, e1..e7 with e_i e_{i+1} = e_{i+3} (indices mod 7 in 1..7).
struct OctTable {
    std::array<std::array<int, 8>, 8> index{};
    std::array<std::array<int, 8>, 8> sign{};

    OctTable() {
        for (int i = 0; i < 8; ++i) {
            index[0][i] = index[i][0] = i;
            sign[0][i] = sign[i][0] = 1;
        }
        for (int i = 1; i < 8; ++i) {
            index[i][i] = 0;
            sign[i][i] = -1;
        }
        auto wrap = [](int k) { return (k - 1) % 7 + 1; };
        for (int i = 1; i < 8; ++i) {
            int a = i, b = wrap(i + 1), c = wrap(i + 3);
            const std::array<std::array<int, 3>, 3> cyc{{{a, b, c}, {b, c, a}, {c, a, b}}};
            for (const auto& t : cyc) {
                index[t[0]][t[1]] = t[2];
                sign[t[0]][t[1]] = 1;
                index[t[1]][t[0]] = t[2];
                sign[t[1]][t[0]] = -1;
            }
        }
    }
};

inline const OctTable& oct_table() {
    static const OctTable t;
    return t;
}

template <typename T>
using Oct = std::array<T, 8>;

template <typename T>
Oct<T> oct_mul(const Oct<T>& a, const Oct<T>& b) {
    const auto& tab = oct_table();
    Oct<T> r{};
    for (auto& v : r) v = T(0);
    for (int i = 0; i < 8; ++i) {
        if (a[i] == T(0)) continue;
        for (int j = 0; j < 8; ++j) {
            if (b[j] == T(0)) continue;
            T prod = a[i] * b[j];
            if (tab.sign[i][j] > 0) r[tab.index[i][j]] += prod;
            else r[tab.index[i][j]] -= prod;
        }
    }
    return r;
}

template <typename T>
Oct<T> oct_conj(Oct<T> a) {
    for (int i = 1; i < 8; ++i) a[i] = T(0) - a[i];
    return a;
}

template <typename T>
T oct_dot(const Oct<T>& a, const Oct<T>& b) {
    T s(0);
    for (int i = 0; i < 8; ++i) s += a[i] * b[i];
    return s;
}

template <typename T>
Oct<T> oct_unit(int i) {
    Oct<T> r{};
    for (auto& v : r) v = T(0);
    r[i] = T(1);
    return r;
}

}  // namespace kl
