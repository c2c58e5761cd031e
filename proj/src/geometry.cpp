#include "sausage/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sausage {
namespace {

constexpr std::uint64_t kMaxVoxels = 100000000;  // grid budget
constexpr std::uint64_t kMcBlock = 16384;        // hit-or-miss shard size

struct Box {
  std::vector<double> lo, hi;
};

Box bounding_box(const SausageSkeleton& s) {
  const auto d = static_cast<std::size_t>(s.d);
  Box box;
  box.lo.assign(d, 0.0);
  box.hi.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double lo = s.center(0)[i], hi = lo;
    for (std::size_t j = 1; j < s.count(); ++j) {
      lo = std::min(lo, s.center(j)[i]);
      hi = std::max(hi, s.center(j)[i]);
    }
    box.lo[i] = lo - s.radius;
    box.hi[i] = hi + s.radius;
  }
  return box;
}

Box intersect_boxes(const Box& a, const Box& b) {
  Box out;
  const std::size_t d = a.lo.size();
  out.lo.resize(d);
  out.hi.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.lo[i] = std::max(a.lo[i], b.lo[i]);
    out.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  return out;
}

bool box_empty(const Box& b) {
  for (std::size_t i = 0; i < b.lo.size(); ++i)
    if (!(b.lo[i] < b.hi[i])) return true;
  return false;
}

double box_volume(const Box& b) {
  double v = 1.0;
  for (std::size_t i = 0; i < b.lo.size(); ++i) v *= b.hi[i] - b.lo[i];
  return v;
}

// Origin-anchored voxel row covering [lo, hi]: centers (k + 0.5) * edge.
void voxel_range(double lo, double hi, double edge, long long& k_lo,
                 long long& k_hi) {
  k_lo = static_cast<long long>(std::ceil(lo / edge - 0.5));
  k_hi = static_cast<long long>(std::floor(hi / edge - 0.5));
}

std::vector<std::pair<double, double>> merged_intervals_1d(
    const SausageSkeleton& s) {
  std::vector<double> cs(s.centers);
  std::sort(cs.begin(), cs.end());
  std::vector<std::pair<double, double>> out;
  double lo = cs[0] - s.radius, hi = cs[0] + s.radius;
  for (std::size_t i = 1; i < cs.size(); ++i) {
    if (cs[i] - s.radius <= hi) {
      hi = cs[i] + s.radius;
    } else {
      out.emplace_back(lo, hi);
      lo = cs[i] - s.radius;
      hi = cs[i] + s.radius;
    }
  }
  out.emplace_back(lo, hi);
  return out;
}

void check_skeleton(const SausageSkeleton& s) {
  if (s.d < 1) throw std::domain_error("dimension must be a positive integer");
  if (!(s.radius > 0.0)) throw std::domain_error("radius must be positive");
  if (s.count() == 0) throw std::domain_error("skeleton has no centers");
}

void check_grid_edge(double edge, double radius) {
  if (!(edge > 0.0) || edge > radius / 2.0)
    throw std::domain_error("voxel edge must lie in (0, radius/2]");
}

// Counts voxel centers of the origin-anchored lattice inside `box` that pass
// `pred`; throws if the lattice would exceed the voxel budget.
template <class Pred>
std::pair<std::uint64_t, std::uint64_t> count_voxels(const Box& box, double edge,
                                                     const Pred& pred) {
  const std::size_t d = box.lo.size();
  std::vector<long long> k_lo(d), k_hi(d), k(d);
  double total = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    voxel_range(box.lo[i], box.hi[i], edge, k_lo[i], k_hi[i]);
    if (k_hi[i] < k_lo[i]) return {0, 0};
    total *= static_cast<double>(k_hi[i] - k_lo[i] + 1);
    if (total > static_cast<double>(kMaxVoxels))
      throw std::runtime_error("voxel budget exceeded; coarsen the grid");
  }
  k = k_lo;
  std::vector<double> p(d);
  std::uint64_t visited = 0, inside = 0;
  while (true) {
    for (std::size_t i = 0; i < d; ++i)
      p[i] = (static_cast<double>(k[i]) + 0.5) * edge;
    ++visited;
    if (pred(p.data())) ++inside;
    std::size_t axis = 0;
    while (axis < d && ++k[axis] > k_hi[axis]) {
      k[axis] = k_lo[axis];
      ++axis;
    }
    if (axis == d) break;
  }
  return {inside, visited};
}

// Uniform draws over `box`, sharded into fixed blocks keyed off `stream`.
template <class Pred>
std::uint64_t count_hits(const Box& box, std::uint64_t n,
                         const RandomStream& stream, const Pred& pred) {
  const std::size_t d = box.lo.size();
  std::vector<double> p(d);
  std::uint64_t hits = 0;
  const std::uint64_t blocks = (n + kMcBlock - 1) / kMcBlock;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    RandomStream sub = stream.substream(b);
    const std::uint64_t lo = b * kMcBlock;
    const std::uint64_t hi = std::min(n, lo + kMcBlock);
    for (std::uint64_t j = lo; j < hi; ++j) {
      for (std::size_t i = 0; i < d; ++i)
        p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * sub.uniform01();
      if (pred(p.data())) ++hits;
    }
  }
  return hits;
}

}  // namespace

std::string volume_method_name(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::exact1d: return "exact1d";
    case VolumeMethod::grid: return "grid";
    case VolumeMethod::hitmiss: return "hitmiss";
  }
  throw std::domain_error("unknown volume method");
}

VolumeMethod parse_volume_method(const std::string& name) {
  if (name == "exact1d") return VolumeMethod::exact1d;
  if (name == "grid") return VolumeMethod::grid;
  if (name == "hitmiss") return VolumeMethod::hitmiss;
  throw std::domain_error("unknown volume method: " + name);
}

SausageSkeleton make_sausage(const PathSkeleton& path, double radius) {
  if (path.size() == 0) throw std::domain_error("empty skeleton");
  return slice(path, path.times.front(), path.times.back(), radius);
}

SausageSkeleton slice(const PathSkeleton& path, double s, double t,
                      double radius) {
  if (path.size() == 0) throw std::domain_error("empty skeleton");
  if (!(radius > 0.0)) throw std::domain_error("radius must be positive");
  if (!(s <= t)) throw std::domain_error("window must satisfy s <= t");
  const double eps = 1e-9 * std::max({1.0, std::abs(s), std::abs(t)});
  SausageSkeleton out;
  out.d = path.params.d;
  out.radius = radius;
  out.window_s = s;
  out.window_t = t;
  const auto d = static_cast<std::size_t>(path.params.d);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path.times[i] >= s - eps && path.times[i] <= t + eps)
      out.centers.insert(out.centers.end(), path.position(i),
                         path.position(i) + d);
  }
  if (out.centers.empty())
    throw std::domain_error("window [s, t] contains no skeleton point");
  return out;
}

SpatialIndex::SpatialIndex(const SausageSkeleton& skeleton)
    : d_(skeleton.d),
      inv_cell_(1.0 / skeleton.radius),
      radius2_(skeleton.radius * skeleton.radius),
      count_(skeleton.count()),
      centers_(skeleton.centers) {
  check_skeleton(skeleton);
  cells_.reserve(count_ * 2);
  for (std::size_t i = 0; i < count_; ++i)
    cells_[cell_key(skeleton.center(i))].push_back(
        static_cast<std::uint32_t>(i));
}

std::uint64_t SpatialIndex::cell_key(const double* p) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (int i = 0; i < d_; ++i) {
    const auto c = static_cast<long long>(std::floor(p[i] * inv_cell_));
    h = mix64(h ^ mix64(static_cast<std::uint64_t>(c)));
  }
  return h;
}

bool SpatialIndex::contains(const double* p, std::uint32_t* hint) const {
  const auto d = static_cast<std::size_t>(d_);
  auto dist2_le = [&](std::uint32_t idx) {
    const double* c = centers_.data() + idx * d;
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double t = p[i] - c[i];
      s += t * t;
      if (s > radius2_) return false;
    }
    return s <= radius2_;
  };
  if (hint && *hint < count_ && dist2_le(*hint)) return true;

  std::vector<long long> base(d), off(d, -1);
  for (std::size_t i = 0; i < d; ++i)
    base[i] = static_cast<long long>(std::floor(p[i] * inv_cell_));
  std::vector<double> q(d);
  while (true) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::size_t i = 0; i < d; ++i)
      h = mix64(h ^ mix64(static_cast<std::uint64_t>(base[i] + off[i])));
    if (auto it = cells_.find(h); it != cells_.end()) {
      for (std::uint32_t idx : it->second) {
        if (dist2_le(idx)) {
          if (hint) *hint = idx;
          return true;
        }
      }
    }
    std::size_t axis = 0;
    while (axis < d && ++off[axis] > 1) {
      off[axis] = -1;
      ++axis;
    }
    if (axis == d) break;
  }
  return false;
}

VolumeEstimate volume_exact_1d(const SausageSkeleton& skeleton) {
  check_skeleton(skeleton);
  if (skeleton.d != 1)
    throw std::domain_error("exact merged-interval volume requires d = 1");
  double v = 0.0;
  for (const auto& [lo, hi] : merged_intervals_1d(skeleton)) v += hi - lo;
  VolumeEstimate est;
  est.value = v;
  est.method = VolumeMethod::exact1d;
  est.samples = skeleton.count();
  return est;
}

VolumeEstimate volume_grid(const SausageSkeleton& skeleton, double edge) {
  check_skeleton(skeleton);
  check_grid_edge(edge, skeleton.radius);
  const SpatialIndex index(skeleton);
  const Box box = bounding_box(skeleton);
  std::uint32_t hint = 0;
  const auto [inside, visited] = count_voxels(
      box, edge, [&](const double* p) { return index.contains(p, &hint); });
  VolumeEstimate est;
  est.value = static_cast<double>(inside) *
              std::pow(edge, static_cast<double>(skeleton.d));
  est.method = VolumeMethod::grid;
  est.resolution = edge;
  est.samples = visited;
  return est;
}

VolumeEstimate volume_hit_or_miss(const SausageSkeleton& skeleton,
                                  std::uint64_t n, const RandomStream& stream) {
  check_skeleton(skeleton);
  if (n < 100) throw std::domain_error("hit-or-miss needs at least 100 draws");
  const SpatialIndex index(skeleton);
  const Box box = bounding_box(skeleton);
  std::uint32_t hint = 0;
  const std::uint64_t hits = count_hits(
      box, n, stream, [&](const double* p) { return index.contains(p, &hint); });
  const double vol = box_volume(box);
  const double p_hat =
      static_cast<double>(hits) / static_cast<double>(n);
  VolumeEstimate est;
  est.value = vol * p_hat;
  est.stat_error =
      vol * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
  est.method = VolumeMethod::hitmiss;
  est.samples = n;
  return est;
}

VolumeEstimate sausage_volume(const SausageSkeleton& skeleton,
                              const VolumeOptions& opts,
                              const RandomStream* stream) {
  switch (opts.method) {
    case VolumeMethod::exact1d: return volume_exact_1d(skeleton);
    case VolumeMethod::grid: return volume_grid(skeleton, opts.grid_edge);
    case VolumeMethod::hitmiss:
      if (!stream)
        throw std::domain_error("hit-or-miss volume needs a random stream");
      return volume_hit_or_miss(skeleton, opts.mc_samples, *stream);
  }
  throw std::domain_error("unknown volume method");
}

VolumeEstimate intersection_volume(const SausageSkeleton& a,
                                   const SausageSkeleton& b,
                                   const VolumeOptions& opts,
                                   const RandomStream* stream) {
  check_skeleton(a);
  check_skeleton(b);
  if (a.d != b.d) throw std::domain_error("dimension mismatch");
  if (a.radius != b.radius) throw std::domain_error("radius mismatch");

  VolumeEstimate est;
  est.method = opts.method;

  const Box box = intersect_boxes(bounding_box(a), bounding_box(b));
  if (box_empty(box)) return est;  // exactly zero, no sampling

  switch (opts.method) {
    case VolumeMethod::exact1d: {
      if (a.d != 1)
        throw std::domain_error("exact merged-interval volume requires d = 1");
      const auto ia = merged_intervals_1d(a);
      const auto ib = merged_intervals_1d(b);
      double v = 0.0;
      std::size_t i = 0, j = 0;
      while (i < ia.size() && j < ib.size()) {
        const double lo = std::max(ia[i].first, ib[j].first);
        const double hi = std::min(ia[i].second, ib[j].second);
        if (hi > lo) v += hi - lo;
        if (ia[i].second < ib[j].second) ++i;
        else ++j;
      }
      est.value = v;
      est.samples = a.count() + b.count();
      return est;
    }
    case VolumeMethod::grid: {
      check_grid_edge(opts.grid_edge, a.radius);
      const SpatialIndex ixa(a), ixb(b);
      std::uint32_t ha = 0, hb = 0;
      const auto [inside, visited] =
          count_voxels(box, opts.grid_edge, [&](const double* p) {
            return ixa.contains(p, &ha) && ixb.contains(p, &hb);
          });
      est.value = static_cast<double>(inside) *
                  std::pow(opts.grid_edge, static_cast<double>(a.d));
      est.resolution = opts.grid_edge;
      est.samples = visited;
      return est;
    }
    case VolumeMethod::hitmiss: {
      if (!stream)
        throw std::domain_error("hit-or-miss volume needs a random stream");
      if (opts.mc_samples < 100)
        throw std::domain_error("hit-or-miss needs at least 100 draws");
      const SpatialIndex ixa(a), ixb(b);
      std::uint32_t ha = 0, hb = 0;
      const std::uint64_t hits =
          count_hits(box, opts.mc_samples, *stream, [&](const double* p) {
            return ixa.contains(p, &ha) && ixb.contains(p, &hb);
          });
      const double vol = box_volume(box);
      const double p_hat = static_cast<double>(hits) /
                           static_cast<double>(opts.mc_samples);
      est.value = vol * p_hat;
      est.stat_error = vol * std::sqrt(p_hat * (1.0 - p_hat) /
                                       static_cast<double>(opts.mc_samples));
      est.samples = opts.mc_samples;
      return est;
    }
  }
  throw std::domain_error("unknown volume method");
}

}  // namespace sausage
