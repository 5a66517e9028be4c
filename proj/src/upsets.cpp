#include "movelab/upsets.hpp"

#include <algorithm>

namespace movelab {

bool up_set_is_closed(const UpSet& a) {
  std::vector<char> member(std::size_t{1} << a.n, 0);
  for (Config c : a.members) {
    if (c >= member.size()) return false;
    member[c] = 1;
  }
  for (Config c = 0; c < member.size(); ++c) {
    if (!member[c]) continue;
    for (int i = 0; i < a.n; ++i)
      if (!member[c | (Config{1} << i)]) return false;
  }
  return true;
}

void up_close(std::vector<char>& member, int n) {
  // One ascending pass per bit reaches every superset: any target is obtained
  // by raising its missing bits in increasing order.
  const std::size_t full = member.size();
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t c = 0; c < full; ++c)
      if (!(c & bit) && member[c]) member[c | bit] = 1;
  }
}

UpSet up_set_from_mask(std::uint64_t mask, int n) {
  UpSet a;
  a.n = n;
  for (Config c = 0; c < (Config{1} << n); ++c)
    if (mask >> c & 1u) a.members.push_back(c);
  return a;
}

std::uint64_t mask_from_up_set(const UpSet& a) {
  std::uint64_t m = 0;
  for (Config c : a.members) m |= std::uint64_t{1} << c;
  return m;
}

bool up_set_mask_is_closed(std::uint64_t mask, int n) {
  for (Config c = 0; c < (Config{1} << n); ++c) {
    if (!(mask >> c & 1u)) continue;
    for (int i = 0; i < n; ++i)
      if (!(mask >> (c | (Config{1} << i)) & 1u)) return false;
  }
  return true;
}

void for_each_up_set(int n, const std::function<void(std::uint64_t)>& fn) {
  if (n < 0 || n > limits().upset_sites)
    fail(ErrKind::SizeExceeded,
         "up-set enumeration capped at n=" + std::to_string(limits().upset_sites));
  if (n == 0) {
    fn(0b0);  // empty set
    fn(0b1);  // the single (empty) configuration
    return;
  }
  // Split on the top site: A = A0 ∪ (A1 + top bit) is an up-set iff A0, A1 are
  // up-sets of the (n-1)-cube with A0 ⊆ A1.
  std::vector<std::uint64_t> prev = all_up_set_masks(n - 1);
  const int half = 1 << (n - 1);
  for (std::uint64_t hi : prev)
    for (std::uint64_t lo : prev)
      if ((lo & ~hi) == 0) fn(lo | (hi << half));
}

std::vector<std::uint64_t> all_up_set_masks(int n) {
  std::vector<std::uint64_t> out;
  for_each_up_set(n, [&](std::uint64_t m) { out.push_back(m); });
  return out;
}

std::uint64_t count_up_sets(int n) {
  std::uint64_t k = 0;
  for_each_up_set(n, [&](std::uint64_t) { ++k; });
  return k;
}

}  // namespace movelab
