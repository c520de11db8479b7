#pragma once

// Internal helpers for hashing real vectors.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <unordered_map>
#include <vector>

namespace apx::detail {

inline std::uint64_t mix64(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

/// Assigns stable ids to vectors, identifying those within `tol`. With
/// tol == 0 only bit-identical vectors (after folding -0) are identified.
class VectorDedup {
 public:
  VectorDedup(int dim, double tol) : dim_(dim), tol_(tol) {}

  /// Returns (id, inserted).
  std::pair<std::uint32_t, bool> insert(const double* x) {
    Key key{};
    // axes whose coordinate sits within tol of a cell wall: -1 low wall, +1 high wall
    std::array<int, kAxes> edge{};
    for (int a = 0; a < dim_ && a < kAxes; ++a) key[a] = quantize(x[a], edge[a]);
    if (dim_ > kAxes) {
      std::uint64_t h = 0;
      int unused = 0;
      for (int a = kAxes; a < dim_; ++a) h = mix64(h ^ static_cast<std::uint64_t>(quantize(x[a], unused)));
      key[kAxes] = static_cast<std::int64_t>(h);
    }
    std::uint32_t found = kNone;
    Key probe = key;
    probe_cells(probe, key, edge, 0, x, found);
    if (found != kNone) return {found, false};
    const auto id = static_cast<std::uint32_t>(size());
    data_.insert(data_.end(), x, x + dim_);
    cells_[key].push_back(id);
    return {id, true};
  }

  std::size_t size() const { return data_.size() / static_cast<std::size_t>(dim_); }
  const double* at(std::uint32_t id) const { return data_.data() + static_cast<std::size_t>(id) * dim_; }
  const std::vector<double>& data() const { return data_; }

 private:
  static constexpr int kAxes = 8;
  static constexpr std::uint32_t kNone = 0xffffffffu;
  static constexpr double kCellsPerTol = 64.0;
  using Key = std::array<std::int64_t, kAxes + 1>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = 0x9e3779b97f4a7c15ULL;
      for (std::int64_t c : k) h = mix64(h ^ static_cast<std::uint64_t>(c)) + 0x9e3779b97f4a7c15ULL;
      return static_cast<std::size_t>(h);
    }
  };

  std::int64_t quantize(double v, int& edge) const {
    edge = 0;
    if (tol_ > 0) {
      const double cell = tol_ * kCellsPerTol;
      const double q = std::floor(v / cell);
      const double lo = q * cell;
      if (v - lo <= tol_) edge = -1;
      else if (lo + cell - v <= tol_) edge = 1;
      return static_cast<std::int64_t>(q);
    }
    if (v == 0.0) v = 0.0;
    std::int64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return bits;
  }

  bool same(std::uint32_t id, const double* x) const {
    const double* y = at(id);
    if (tol_ > 0) {
      double s = 0;
      for (int a = 0; a < dim_; ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
      return s <= tol_ * tol_;
    }
    for (int a = 0; a < dim_; ++a)
      if (!(x[a] == y[a])) return false;
    return true;
  }

  void probe_cells(Key& probe, const Key& key, const std::array<int, kAxes>& edge, int axis, const double* x,
                   std::uint32_t& found) const {
    if (found != kNone) return;
    if (axis == kAxes || axis == dim_) {
      auto it = cells_.find(probe);
      if (it == cells_.end()) return;
      for (std::uint32_t id : it->second)
        if (same(id, x)) {
          found = id;
          return;
        }
      return;
    }
    probe[axis] = key[axis];
    probe_cells(probe, key, edge, axis + 1, x, found);
    if (edge[axis] != 0) {
      probe[axis] = key[axis] + edge[axis];
      probe_cells(probe, key, edge, axis + 1, x, found);
      probe[axis] = key[axis];
    }
  }

  int dim_;
  double tol_;
  std::vector<double> data_;
  std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> cells_;
};

}  // namespace apx::detail
