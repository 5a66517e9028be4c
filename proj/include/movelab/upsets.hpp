#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "movelab/measure.hpp"

namespace movelab {

// Up-set of {0,1}^n: configurations closed under raising 0's to 1's.
struct UpSet {
  int n = 0;
  std::vector<Config> members;  // ascending bitmask order
};

bool up_set_is_closed(const UpSet& a);

// Raise-closure over a 2^n membership table, in place.
void up_close(std::vector<char>& member, int n);

// --- tiny-n exhaustive enumeration (oracles) ---------------------------------
// An up-set of {0,1}^n is encoded as a 2^n-bit mask: bit c set <=> config c in
// the set. Only meaningful for n <= 6 (mask fits in 64 bits).

UpSet up_set_from_mask(std::uint64_t mask, int n);
std::uint64_t mask_from_up_set(const UpSet& a);
bool up_set_mask_is_closed(std::uint64_t mask, int n);

// Visit every up-set of {0,1}^n exactly once (Dedekind-number many; n <= 6).
void for_each_up_set(int n, const std::function<void(std::uint64_t)>& fn);
std::vector<std::uint64_t> all_up_set_masks(int n);
std::uint64_t count_up_sets(int n);

}  // namespace movelab
