#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qpack/scene.hpp"
#include "qpack/vec3.hpp"

namespace qpack {

struct GridSpec {
  Vec3 h;       // cell size per axis (m)
  Index3 dims;  // cell counts
  Vec3 origin;  // position of cell (0,0,0)'s lower corner

  /// Smallest cell count per axis with h <= target, then h stretched to fit the domain exactly.
  static GridSpec for_domain(const Box& domain, Vec3 target_h);

  void validate() const;
  std::size_t cell_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  double cell_volume() const { return h.x * h.y * h.z; }
};

/// Stable explicit time step, dt = S / (c0 * sqrt(sum 1/h^2)).
double cfl_timestep(const GridSpec& spec, double safety = 0.99);

/// A lossy metal face: conductor (or enclosure wall) on one side, field region on the other.
struct WallFace {
  std::int8_t axis = 0;  // face normal
  std::int8_t side = 1;  // +1: field region lies at larger coordinate than the plane
  int plane = 0;         // grid plane index along `axis`
  int u = 0;             // cell index along the first remaining axis
  int v = 0;             // cell index along the second remaining axis
  double sigma = 0.0;
  double area = 0.0;
  bool enclosure = false;
};

struct MaterialGrid {
  GridSpec spec;
  std::vector<Material> materials;
  std::vector<std::uint16_t> cell_material;
  /// Perfect-conductor sheet faces, one mask per normal axis. Mask for axis a has dims[a]+1
  /// planes and is indexed like a cell array with that extent.
  std::array<std::vector<std::uint8_t>, 3> pec_faces;
  std::vector<WallFace> wall_faces;

  std::size_t cell_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * spec.dims[1] + j) * spec.dims[2] + k;
  }
  const Material& material_at(int i, int j, int k) const { return materials[cell_material[cell_index(i, j, k)]]; }
  bool is_conductor(int i, int j, int k) const { return material_at(i, j, k).is_conductor(); }
  Index3 face_dims(int axis) const {
    Index3 d = spec.dims;
    d[axis] += 1;
    return d;
  }
  bool pec_face(int axis, int i, int j, int k) const;
  std::size_t count_material(int material) const;
  std::size_t pec_face_count() const;
};

/// Cell-centre staircase voxelization with priority resolution and sheet faces.
MaterialGrid voxelize(const Scene& scene, const GridSpec& spec);

/// CSV of material indices on the z-plane of cell layer `k` (rows = y, columns = x).
std::string material_slice_csv(const MaterialGrid& grid, int k);

}  // namespace qpack
