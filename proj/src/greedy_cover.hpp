#pragma once

// Lazy-heap greedy set cover shared by the translation-set searches.

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

namespace apx::detail {

struct CoverResult {
  std::vector<std::uint32_t> chosen;
  bool complete = true;
  std::uint32_t uncovered = 0;  // some element left uncovered when !complete
};

/// Elements 0..n_elem-1; element e may be covered by the candidates
/// list[list_start[e] .. list_start[e+1]). `better(a, b)` breaks ties between
/// candidates of equal remaining coverage. Stops after `max_chosen` picks.
template <class Better>
CoverResult greedy_cover(std::size_t n_elem, std::size_t n_cand, const std::vector<std::uint32_t>& list_start,
                         const std::vector<std::uint32_t>& list, Better better, std::size_t max_chosen) {
  std::vector<std::uint32_t> count(n_cand, 0);
  for (std::uint32_t id : list) ++count[id];
  std::vector<std::uint32_t> inv_start(n_cand + 1, 0);
  for (std::size_t c = 0; c < n_cand; ++c) inv_start[c + 1] = inv_start[c] + count[c];
  std::vector<std::uint32_t> inv(list.size()), fill(inv_start.begin(), inv_start.end() - 1);
  for (std::uint32_t e = 0; e < n_elem; ++e)
    for (std::uint32_t k = list_start[e]; k < list_start[e + 1]; ++k) inv[fill[list[k]]++] = e;

  struct Entry {
    std::uint32_t count;
    std::uint32_t id;
  };
  auto worse = [&](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count < b.count;
    return better(b.id, a.id);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (std::uint32_t c = 0; c < n_cand; ++c) heap.push({count[c], c});

  CoverResult res;
  std::vector<char> covered(n_elem, 0);
  std::size_t remaining = n_elem;
  while (remaining > 0) {
    if (heap.empty()) throw std::logic_error("greedy cover ran out of candidates");
    const Entry top = heap.top();
    heap.pop();
    if (top.count != count[top.id]) {
      if (count[top.id] > 0) heap.push({count[top.id], top.id});
      continue;
    }
    if (res.chosen.size() >= max_chosen) {
      res.complete = false;
      while (covered[res.uncovered]) ++res.uncovered;
      return res;
    }
    res.chosen.push_back(top.id);
    for (std::uint32_t k = inv_start[top.id]; k < inv_start[top.id + 1]; ++k) {
      const std::uint32_t e = inv[k];
      if (covered[e]) continue;
      covered[e] = 1;
      --remaining;
      for (std::uint32_t m = list_start[e]; m < list_start[e + 1]; ++m) --count[list[m]];
    }
  }
  return res;
}

}  // namespace apx::detail
