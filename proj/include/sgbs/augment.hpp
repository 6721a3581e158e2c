#ifndef SGBS_AUGMENT_HPP
#define SGBS_AUGMENT_HPP

#include <array>
#include <vector>

#include "sgbs/cvrp.hpp"
#include "sgbs/tsp.hpp"

namespace sgbs {

/// The 8 dihedral symmetries of the unit square. Element 0 is the identity.
inline Vec2 dihedral_transform(const Vec2& p, int k) {
  switch (k) {
    case 0: return {p.x, p.y};
    case 1: return {p.y, p.x};
    case 2: return {1.0 - p.x, p.y};
    case 3: return {p.x, 1.0 - p.y};
    case 4: return {1.0 - p.y, p.x};
    case 5: return {p.y, 1.0 - p.x};
    case 6: return {1.0 - p.x, 1.0 - p.y};
    default: return {1.0 - p.y, 1.0 - p.x};
  }
}

/// x8 instance augmentation for routing problems: all coordinates mapped
/// through each square symmetry. Tour lengths are invariant (isometries).
inline std::vector<TspInstance> augment_x8(const TspInstance& inst) {
  std::vector<TspInstance> out;
  out.reserve(8);
  for (int k = 0; k < 8; ++k) {
    std::vector<Vec2> pts(inst.coords.size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = dihedral_transform(inst.coords[i], k);
    out.emplace_back(std::move(pts));
  }
  return out;
}

inline std::vector<CvrpInstance> augment_x8(const CvrpInstance& inst) {
  std::vector<CvrpInstance> out;
  out.reserve(8);
  for (int k = 0; k < 8; ++k) {
    std::vector<Vec2> pts(inst.coords.size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = dihedral_transform(inst.coords[i], k);
    out.emplace_back(dihedral_transform(inst.depot, k), std::move(pts),
                     inst.demands, inst.capacity);
  }
  return out;
}

}  // namespace sgbs

#endif  // SGBS_AUGMENT_HPP
