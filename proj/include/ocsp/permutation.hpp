#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ocsp/errors.hpp"

namespace ocsp {

// A permutation of {1..m}: perm[i] is the rank of position i.
// (sigma_1..sigma_m in one-based writing; storage is zero-based positions.)
using Perm = std::vector<int>;

long long factorial(int m);

bool is_perm(const Perm& p);

// Lexicographic rank of p among the m! permutations of {1..m}, in [0, m!).
long long perm_rank(const Perm& p);

// Inverse of perm_rank.
Perm perm_unrank(int m, long long rank);

std::vector<Perm> all_perms(int m);

// Ranks of the entries of a duplicate-free tuple: (10,30,20) -> (1,3,2).
// Throws DuplicateEntries on ties.
Perm natural_order_permutation(std::span<const long long> tuple);

}  // namespace ocsp
