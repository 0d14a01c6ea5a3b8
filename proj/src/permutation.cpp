#include "ocsp/permutation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace ocsp {

long long factorial(int m) {
    if (m < 0 || m > 20) throw BadParameter("factorial: m out of range [0,20]");
    long long f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

bool is_perm(const Perm& p) {
    std::vector<char> seen(p.size(), 0);
    for (int v : p) {
        if (v < 1 || v > static_cast<int>(p.size()) || seen[v - 1]) return false;
        seen[v - 1] = 1;
    }
    return true;
}

long long perm_rank(const Perm& p) {
    const int m = static_cast<int>(p.size());
    long long rank = 0;
    for (int i = 0; i < m; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < m; ++j)
            if (p[j] < p[i]) ++smaller;
        rank = rank * (m - i) + smaller;
    }
    return rank;
}

Perm perm_unrank(int m, long long rank) {
    std::vector<long long> digits(m, 0);
    for (int i = m - 1; i >= 0; --i) {
        digits[i] = rank % (m - i);
        rank /= (m - i);
    }
    std::vector<int> pool(m);
    std::iota(pool.begin(), pool.end(), 1);
    Perm p(m);
    for (int i = 0; i < m; ++i) {
        p[i] = pool[digits[i]];
        pool.erase(pool.begin() + digits[i]);
    }
    return p;
}

std::vector<Perm> all_perms(int m) {
    Perm p(m);
    std::iota(p.begin(), p.end(), 1);
    std::vector<Perm> out;
    out.reserve(factorial(m));
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

Perm natural_order_permutation(std::span<const long long> tuple) {
    const int m = static_cast<int>(tuple.size());
    Perm p(m);
    for (int i = 0; i < m; ++i) {
        int rank = 1;
        for (int j = 0; j < m; ++j) {
            if (tuple[j] < tuple[i]) ++rank;
            if (j != i && tuple[j] == tuple[i])
                throw DuplicateEntries("natural_order_permutation: repeated value " +
                                       std::to_string(tuple[i]));
        }
        p[i] = rank;
    }
    return p;
}

}  // namespace ocsp
