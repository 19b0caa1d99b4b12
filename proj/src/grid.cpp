#include "qpack/grid.hpp"

#include <cmath>
#include <sstream>

#include "qpack/constants.hpp"
#include "qpack/error.hpp"

namespace qpack {

GridSpec GridSpec::for_domain(const Box& domain, Vec3 target_h) {
  GridSpec g;
  g.origin = domain.min_corner;
  const Vec3 e = domain.extent();
  for (int a = 0; a < 3; ++a) {
    if (!(target_h[a] > 0.0)) fail(ErrorKind::InvalidParameter, "grid cell size must be positive");
    const int n = static_cast<int>(std::ceil(e[a] / target_h[a] - 1e-9));
    g.dims[a] = n;
    g.h[a] = e[a] / n;
  }
  g.validate();
  return g;
}

void GridSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(h[a] > 0.0)) fail(ErrorKind::InvalidParameter, "grid cell size must be positive");
    if (dims[a] < 8) fail(ErrorKind::InvalidParameter, "grid needs at least 8 cells per axis");
  }
}

double cfl_timestep(const GridSpec& spec, double safety) {
  const double s = 1.0 / (spec.h.x * spec.h.x) + 1.0 / (spec.h.y * spec.h.y) + 1.0 / (spec.h.z * spec.h.z);
  return safety / (constants::c0 * std::sqrt(s));
}

bool MaterialGrid::pec_face(int axis, int i, int j, int k) const {
  const Index3 d = face_dims(axis);
  if (i < 0 || j < 0 || k < 0 || i >= d[0] || j >= d[1] || k >= d[2]) return false;
  return pec_faces[axis][(static_cast<std::size_t>(i) * d[1] + j) * d[2] + k] != 0;
}

std::size_t MaterialGrid::count_material(int material) const {
  std::size_t n = 0;
  for (auto m : cell_material) n += (m == material);
  return n;
}

std::size_t MaterialGrid::pec_face_count() const {
  std::size_t n = 0;
  for (const auto& mask : pec_faces)
    for (auto f : mask) n += f;
  return n;
}

MaterialGrid voxelize(const Scene& scene, const GridSpec& spec) {
  spec.validate();
  const Vec3 extent = scene.domain.extent();
  for (int a = 0; a < 3; ++a)
    if (std::abs(spec.h[a] * spec.dims[a] - extent[a]) > spec.h[a])
      fail(ErrorKind::InvalidParameter, "grid extent does not match the scene domain");
  if (scene.materials.empty()) fail(ErrorKind::InvalidParameter, "scene has no background material");

  std::vector<const Box*> volumes;
  std::vector<const Box*> sheets;
  const int n_mat = static_cast<int>(scene.materials.size());
  for (const Box& b : scene.shapes) {
    if (b.material < 0 || b.material >= n_mat)
      fail(ErrorKind::InvalidParameter, "shape '" + b.label + "' references a missing material");
    const int axis = b.sheet_axis();
    if (axis == -2) fail(ErrorKind::InvalidParameter, "shape '" + b.label + "' is degenerate");
    if (axis >= 0) {
      sheets.push_back(&b);
      continue;
    }
    if (scene.materials[b.material].is_pec)
      fail(ErrorKind::InvalidParameter, "perfect conductor '" + b.label + "' must be a sheet");
    for (int a = 0; a < 3; ++a)
      if (b.extent()[a] < spec.h[a] * (1.0 - 1e-9))
        fail(ErrorKind::UnderResolution, "shape '" + b.label + "' is thinner than one cell along axis " +
                                             std::to_string(a));
    volumes.push_back(&b);
  }

  MaterialGrid g;
  g.spec = spec;
  g.materials = scene.materials;
  const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
  g.cell_material.assign(spec.cell_count(), 0);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      for (int k = 0; k < nz; ++k) {
        const Vec3 c{spec.origin.x + (i + 0.5) * spec.h.x, spec.origin.y + (j + 0.5) * spec.h.y,
                     spec.origin.z + (k + 0.5) * spec.h.z};
        const Box* best = nullptr;
        for (const Box* b : volumes)
          if (b->contains(c) && (!best || b->priority >= best->priority)) best = b;
        if (best) g.cell_material[g.cell_index(i, j, k)] = static_cast<std::uint16_t>(best->material);
      }
    }
  }

  for (int axis = 0; axis < 3; ++axis) {
    const Index3 d = g.face_dims(axis);
    g.pec_faces[axis].assign(static_cast<std::size_t>(d[0]) * d[1] * d[2], 0);
  }
  // Sheets on the same plane compete by priority, face by face.
  for (int axis = 0; axis < 3; ++axis) {
    const Index3 d = g.face_dims(axis);
    for (int plane = 0; plane <= spec.dims[axis]; ++plane) {
      std::vector<const Box*> on_plane;
      for (const Box* b : sheets) {
        if (b->sheet_axis() != axis) continue;
        const int p = static_cast<int>(std::lround((b->min_corner[axis] - spec.origin[axis]) / spec.h[axis]));
        if (p == plane) on_plane.push_back(b);
      }
      if (on_plane.empty()) continue;
      const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
      for (int u = 0; u < spec.dims[a1]; ++u) {
        for (int v = 0; v < spec.dims[a2]; ++v) {
          Vec3 c;
          c[axis] = spec.origin[axis] + plane * spec.h[axis];
          c[a1] = spec.origin[a1] + (u + 0.5) * spec.h[a1];
          c[a2] = spec.origin[a2] + (v + 0.5) * spec.h[a2];
          const Box* best = nullptr;
          for (const Box* b : on_plane)
            if (b->contains_in_plane(c, axis) && (!best || b->priority >= best->priority)) best = b;
          if (best && scene.materials[best->material].is_pec) {
            Index3 idx;
            idx[axis] = plane;
            idx[a1] = u;
            idx[a2] = v;
            g.pec_faces[axis][(static_cast<std::size_t>(idx[0]) * d[1] + idx[1]) * d[2] + idx[2]] = 1;
          }
        }
      }
    }
  }

  // Lossy faces: conductor or enclosure on one side, field region on the other.
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    const int lo_axis = std::min(a1, a2), hi_axis = std::max(a1, a2);
    const double area = spec.h[lo_axis] * spec.h[hi_axis];
    for (int plane = 0; plane <= spec.dims[axis]; ++plane) {
      for (int u = 0; u < spec.dims[lo_axis]; ++u) {
        for (int v = 0; v < spec.dims[hi_axis]; ++v) {
          auto cell_at = [&](int p, double& sigma, bool& outside) {
            outside = p < 0 || p >= spec.dims[axis];
            if (outside) {
              sigma = scene.wall_sigma;
              return true;
            }
            Index3 idx;
            idx[axis] = p;
            idx[lo_axis] = u;
            idx[hi_axis] = v;
            const Material& m = g.material_at(idx[0], idx[1], idx[2]);
            sigma = m.sigma;
            return m.is_conductor();
          };
          double s_lo, s_hi;
          bool out_lo, out_hi;
          const bool solid_lo = cell_at(plane - 1, s_lo, out_lo);
          const bool solid_hi = cell_at(plane, s_hi, out_hi);
          if (solid_lo == solid_hi) continue;
          WallFace f;
          f.axis = static_cast<std::int8_t>(axis);
          f.side = solid_lo ? 1 : -1;
          f.plane = plane;
          f.u = u;
          f.v = v;
          f.sigma = solid_lo ? s_lo : s_hi;
          f.area = area;
          f.enclosure = solid_lo ? out_lo : out_hi;
          g.wall_faces.push_back(f);
        }
      }
    }
  }
  return g;
}

std::string material_slice_csv(const MaterialGrid& grid, int k) {
  if (k < 0 || k >= grid.spec.dims[2]) fail(ErrorKind::InvalidParameter, "slice index out of range");
  std::ostringstream os;
  os << "# material indices, plane=xy, k=" << k << ", rows=y, cols=x\n";
  for (int j = 0; j < grid.spec.dims[1]; ++j) {
    for (int i = 0; i < grid.spec.dims[0]; ++i) {
      if (i) os << ',';
      os << grid.cell_material[grid.cell_index(i, j, k)];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace qpack
