#include "spectral/pseudospectrum.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include "spectral/parallel.hpp"

namespace spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

void normalize_corners(cdouble& z0, cdouble& z1) {
  cdouble lo(std::min(z0.real(), z1.real()), std::min(z0.imag(), z1.imag()));
  cdouble hi(std::max(z0.real(), z1.real()), std::max(z0.imag(), z1.imag()));
  z0 = lo;
  z1 = hi;
}

}  // namespace

double SminField::x_at(int ix) const {
  return z0.real() + (z1.real() - z0.real()) * ix / (nx - 1);
}

double SminField::y_at(int iy) const {
  return z0.imag() + (z1.imag() - z0.imag()) * iy / (ny - 1);
}

SminField smin_field(const CMatrix& m, cdouble z0, cdouble z1, int nx, int ny,
                     int workers) {
  if (m.n < 1 || !m.finite())
    throw std::invalid_argument("smin_field: bad matrix");
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("smin_field: nx and ny must be >= 2");
  normalize_corners(z0, z1);
  if (!(z1.real() > z0.real()) || !(z1.imag() > z0.imag()))
    throw std::invalid_argument("smin_field: region must have positive extent");
  if (static_cast<std::int64_t>(nx) * ny > kMaxFieldNodes)
    throw std::invalid_argument("smin_field: grid exceeds node budget");

  SminField f;
  f.z0 = z0;
  f.z1 = z1;
  f.nx = nx;
  f.ny = ny;
  f.values.resize(static_cast<std::size_t>(nx) * ny);
  parallel_for(static_cast<std::int64_t>(nx) * ny, workers, [&](std::int64_t k) {
    int iy = static_cast<int>(k / nx);
    int ix = static_cast<int>(k % nx);
    f.values[static_cast<std::size_t>(k)] =
        resolvent_smin(m, cdouble(f.x_at(ix), f.y_at(iy)));
  });
  return f;
}

SminField smin_field_serial(const CMatrix& m, cdouble z0, cdouble z1, int nx,
                            int ny) {
  return smin_field(m, z0, z1, nx, ny, 1);
}

namespace {

struct Segment {
  std::array<double, 2> pa;
  std::array<double, 2> pb;
  std::int64_t edge_a;
  std::int64_t edge_b;
};

// Marching squares for one level; "inside" means value < level.
std::vector<std::vector<std::array<double, 2>>> trace_level(
    const SminField& f, double level) {
  std::vector<Segment> segments;
  const int nx = f.nx;
  const int ny = f.ny;

  auto h_edge = [nx](int ix, int iy) {
    return 2 * (static_cast<std::int64_t>(iy) * nx + ix);
  };
  auto v_edge = [nx](int ix, int iy) {
    return 2 * (static_cast<std::int64_t>(iy) * nx + ix) + 1;
  };

  for (int iy = 0; iy + 1 < ny; ++iy) {
    for (int ix = 0; ix + 1 < nx; ++ix) {
      double vbl = f.at(ix, iy);
      double vbr = f.at(ix + 1, iy);
      double vtr = f.at(ix + 1, iy + 1);
      double vtl = f.at(ix, iy + 1);
      int code = (vbl < level ? 1 : 0) | (vbr < level ? 2 : 0) |
                 (vtr < level ? 4 : 0) | (vtl < level ? 8 : 0);
      if (code == 0 || code == 15) continue;

      double x0 = f.x_at(ix), x1 = f.x_at(ix + 1);
      double y0 = f.y_at(iy), y1 = f.y_at(iy + 1);
      auto lerp = [level](double a, double b, double va, double vb) {
        return a + (b - a) * ((level - va) / (vb - va));
      };
      // Crossing points on the four cell edges, by construction identical
      // when recomputed from the neighboring cell.
      auto pB = [&] { return std::array<double, 2>{lerp(x0, x1, vbl, vbr), y0}; };
      auto pT = [&] { return std::array<double, 2>{lerp(x0, x1, vtl, vtr), y1}; };
      auto pL = [&] { return std::array<double, 2>{x0, lerp(y0, y1, vbl, vtl)}; };
      auto pR = [&] { return std::array<double, 2>{x1, lerp(y0, y1, vbr, vtr)}; };
      std::int64_t eB = h_edge(ix, iy);
      std::int64_t eT = h_edge(ix, iy + 1);
      std::int64_t eL = v_edge(ix, iy);
      std::int64_t eR = v_edge(ix + 1, iy);

      auto emit = [&](std::array<double, 2> a, std::int64_t ea,
                      std::array<double, 2> b, std::int64_t eb) {
        segments.push_back({a, b, ea, eb});
      };
      switch (code) {
        case 1: case 14: emit(pL(), eL, pB(), eB); break;
        case 2: case 13: emit(pB(), eB, pR(), eR); break;
        case 3: case 12: emit(pL(), eL, pR(), eR); break;
        case 4: case 11: emit(pR(), eR, pT(), eT); break;
        case 6: case 9: emit(pB(), eB, pT(), eT); break;
        case 7: case 8: emit(pL(), eL, pT(), eT); break;
        case 5:
        case 10: {
          double center = 0.25 * (vbl + vbr + vtr + vtl);
          bool center_in = center < level;
          bool diag_bl = (code == 5);  // inside corners on the BL-TR diagonal
          if (diag_bl == center_in) {
            emit(pB(), eB, pR(), eR);
            emit(pL(), eL, pT(), eT);
          } else {
            emit(pL(), eL, pB(), eB);
            emit(pR(), eR, pT(), eT);
          }
          break;
        }
        default: break;
      }
    }
  }

  // Chain segments into polylines through shared edge crossings.
  std::map<std::int64_t, std::vector<std::pair<std::size_t, int>>> by_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_edge[segments[s].edge_a].push_back({s, 0});
    by_edge[segments[s].edge_b].push_back({s, 1});
  }

  std::vector<char> used(segments.size(), 0);
  std::vector<std::vector<std::array<double, 2>>> polylines;

  auto walk = [&](std::size_t start, int start_end) {
    std::vector<std::array<double, 2>> line;
    std::size_t seg = start;
    int entry = start_end;
    line.push_back(entry == 0 ? segments[seg].pa : segments[seg].pb);
    for (;;) {
      used[seg] = 1;
      int exit_end = 1 - entry;
      std::int64_t exit_edge =
          exit_end == 0 ? segments[seg].edge_a : segments[seg].edge_b;
      line.push_back(exit_end == 0 ? segments[seg].pa : segments[seg].pb);
      const auto& cand = by_edge[exit_edge];
      std::size_t next = segments.size();
      int next_end = 0;
      for (auto [s2, e2] : cand) {
        if (!used[s2]) {
          next = s2;
          next_end = e2;
          break;
        }
      }
      if (next == segments.size()) break;
      seg = next;
      entry = next_end;
    }
    return line;
  };

  // Open curves first (an endpoint edge carrying a single segment), then
  // whatever remains is a closed loop.
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    int open_end = -1;
    if (by_edge[segments[s].edge_a].size() == 1) open_end = 0;
    else if (by_edge[segments[s].edge_b].size() == 1) open_end = 1;
    if (open_end >= 0) polylines.push_back(walk(s, open_end));
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    auto line = walk(s, 0);
    line.push_back(line.front());  // close the loop
    polylines.push_back(line);
  }
  return polylines;
}

}  // namespace

ContourSet contours(const SminField& field, const std::vector<double>& levels) {
  if (levels.empty()) throw std::invalid_argument("contours: no levels");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k] > 0.0))
      throw std::invalid_argument("contours: levels must be positive");
    if (k > 0 && !(levels[k] < levels[k - 1]))
      throw std::invalid_argument("contours: levels must be strictly decreasing");
  }
  ContourSet cs;
  cs.levels = levels;
  for (double level : levels) cs.polylines.push_back(trace_level(field, level));
  return cs;
}

namespace {

struct CellGrid {
  double x0, y0;   // bbox lower-left
  double cw, ch;   // cell sizes
  std::int64_t res;

  double cx(std::int64_t i) const { return x0 + (i + 0.5) * cw; }
  double cy(std::int64_t j) const { return y0 + (j + 0.5) * ch; }
};

struct Block {
  std::int64_t i0, i1, j0, j1;  // half-open cell ranges
  std::int64_t cells() const { return (i1 - i0) * (j1 - j0); }
};

// Distance bounds from a point to the rectangle spanned by the block's cell
// centers.
void point_block_dist(const CellGrid& g, const Block& b, double px, double py,
                      double& dmin, double& dmax) {
  double xa = g.cx(b.i0), xb = g.cx(b.i1 - 1);
  double ya = g.cy(b.j0), yb = g.cy(b.j1 - 1);
  double dx_out = std::max({xa - px, px - xb, 0.0});
  double dy_out = std::max({ya - py, py - yb, 0.0});
  dmin = std::hypot(dx_out, dy_out);
  double dx_far = std::max(px - xa, xb - px);
  double dy_far = std::max(py - ya, yb - py);
  dmax = std::hypot(dx_far, dy_far);
}

enum class RegionCover { all_in, all_out, partial };

RegionCover classify_region(const RegionSpec& region, const CellGrid& g,
                            const Block& b, double margin) {
  if (region.kind == RegionSpec::Kind::disk) {
    double dmin, dmax;
    point_block_dist(g, b, region.center.real(), region.center.imag(), dmin,
                     dmax);
    if (dmax < region.radius - margin) return RegionCover::all_in;
    if (dmin >= region.radius + margin) return RegionCover::all_out;
    return RegionCover::partial;
  }
  double xa = g.cx(b.i0), xb = g.cx(b.i1 - 1);
  double ya = g.cy(b.j0), yb = g.cy(b.j1 - 1);
  if (xa > region.z0.real() + margin && xb < region.z1.real() - margin &&
      ya > region.z0.imag() + margin && yb < region.z1.imag() - margin)
    return RegionCover::all_in;
  if (xb <= region.z0.real() - margin || xa >= region.z1.real() + margin ||
      yb <= region.z0.imag() - margin || ya >= region.z1.imag() + margin)
    return RegionCover::all_out;
  return RegionCover::partial;
}

std::int64_t count_region_cells(const RegionSpec& region, const CellGrid& g,
                                const Block& b) {
  std::int64_t count = 0;
  for (std::int64_t j = b.j0; j < b.j1; ++j)
    for (std::int64_t i = b.i0; i < b.i1; ++i)
      if (region_contains(region, cdouble(g.cx(i), g.cy(j)))) ++count;
  return count;
}

struct AreaScan {
  const CMatrix* m;
  double eps;
  const RegionSpec* region;
  CellGrid grid;
  double sigma_margin;   // absorbs SVD roundoff in the Lipschitz prune
  double region_margin;  // keeps cells near the boundary on the exact path
  std::int64_t leaf_cells = 16;

  std::int64_t count_block(const Block& b) const {
    if (b.cells() <= 0) return 0;
    RegionCover cover = classify_region(*region, grid, b, region_margin);
    if (cover == RegionCover::all_out) return 0;

    double zx = 0.5 * (grid.cx(b.i0) + grid.cx(b.i1 - 1));
    double zy = 0.5 * (grid.cy(b.j0) + grid.cy(b.j1 - 1));
    double rho = std::hypot(0.5 * (b.i1 - b.i0 - 1) * grid.cw,
                            0.5 * (b.j1 - b.j0 - 1) * grid.ch);
    double smin_center = resolvent_smin(*m, cdouble(zx, zy));
    // 1-Lipschitz: every cell center in the block has smin within rho of the
    // center value, so the whole block can be decided when the margin holds.
    if (smin_center - rho >= eps + sigma_margin) return 0;
    if (smin_center + rho < eps - sigma_margin) {
      if (cover == RegionCover::all_in) return b.cells();
      return count_region_cells(*region, grid, b);
    }
    if (b.cells() <= leaf_cells) return count_leaf(b);

    std::int64_t im = b.i0 + std::max<std::int64_t>(1, (b.i1 - b.i0) / 2);
    std::int64_t jm = b.j0 + std::max<std::int64_t>(1, (b.j1 - b.j0) / 2);
    if (b.i1 - b.i0 == 1) im = b.i1;
    if (b.j1 - b.j0 == 1) jm = b.j1;
    std::int64_t total = 0;
    total += count_block({b.i0, im, b.j0, jm});
    if (im < b.i1) total += count_block({im, b.i1, b.j0, jm});
    if (jm < b.j1) total += count_block({b.i0, im, jm, b.j1});
    if (im < b.i1 && jm < b.j1) total += count_block({im, b.i1, jm, b.j1});
    return total;
  }

  std::int64_t count_leaf(const Block& b) const {
    std::int64_t count = 0;
    for (std::int64_t j = b.j0; j < b.j1; ++j)
      for (std::int64_t i = b.i0; i < b.i1; ++i) {
        cdouble z(grid.cx(i), grid.cy(j));
        if (!region_contains(*region, z)) continue;
        if (resolvent_smin(*m, z) < eps) ++count;
      }
    return count;
  }
};

CellGrid make_grid(const RegionSpec& region, std::int64_t resolution) {
  auto [lo, hi] = region_bbox(region);
  CellGrid g;
  g.x0 = lo.real();
  g.y0 = lo.imag();
  g.res = resolution;
  g.cw = (hi.real() - lo.real()) / static_cast<double>(resolution);
  g.ch = (hi.imag() - lo.imag()) / static_cast<double>(resolution);
  return g;
}

void validate_area_args(const CMatrix& m, double eps, std::int64_t resolution) {
  if (m.n < 1 || !m.finite())
    throw std::invalid_argument("pseudospectrum_area: bad matrix");
  if (!(eps > 0.0))
    throw std::invalid_argument("pseudospectrum_area: eps must be > 0");
  if (resolution < 2)
    throw std::invalid_argument("pseudospectrum_area: resolution must be >= 2");
}

}  // namespace

double pseudospectrum_area_reference(const CMatrix& m, double eps,
                                     const RegionSpec& region,
                                     std::int64_t resolution) {
  validate_area_args(m, eps, resolution);
  CellGrid g = make_grid(region, resolution);
  std::int64_t count = 0;
  for (std::int64_t j = 0; j < resolution; ++j)
    for (std::int64_t i = 0; i < resolution; ++i) {
      cdouble z(g.cx(i), g.cy(j));
      if (!region_contains(region, z)) continue;
      if (resolvent_smin(m, z) < eps) ++count;
    }
  return static_cast<double>(count) * g.cw * g.ch;
}

double pseudospectrum_area(const CMatrix& m, double eps,
                           const RegionSpec& region, std::int64_t resolution,
                           int workers) {
  validate_area_args(m, eps, resolution);
  AreaScan scan;
  scan.m = &m;
  scan.eps = eps;
  scan.region = &region;
  scan.grid = make_grid(region, resolution);
  double mat_scale = std::max(1.0, frobenius_norm(m));
  scan.sigma_margin = 1e-12 * std::max(mat_scale, eps);
  auto [lo, hi] = region_bbox(region);
  scan.region_margin =
      1e-12 * std::max({1.0, std::abs(lo.real()), std::abs(lo.imag()),
                        std::abs(hi.real()), std::abs(hi.imag())});

  // Fixed breadth-first split into a worker-independent block list, then
  // parallel pruned counting per block. Counts are exact integers, so the
  // total is independent of scheduling.
  std::deque<Block> queue{{0, resolution, 0, resolution}};
  constexpr std::size_t kTargetBlocks = 256;
  std::vector<Block> blocks;
  while (!queue.empty()) {
    Block b = queue.front();
    queue.pop_front();
    if (queue.size() + blocks.size() >= kTargetBlocks ||
        b.cells() <= scan.leaf_cells) {
      blocks.push_back(b);
      continue;
    }
    std::int64_t im = b.i0 + std::max<std::int64_t>(1, (b.i1 - b.i0) / 2);
    std::int64_t jm = b.j0 + std::max<std::int64_t>(1, (b.j1 - b.j0) / 2);
    if (b.i1 - b.i0 == 1) im = b.i1;
    if (b.j1 - b.j0 == 1) jm = b.j1;
    queue.push_back({b.i0, im, b.j0, jm});
    if (im < b.i1) queue.push_back({im, b.i1, b.j0, jm});
    if (jm < b.j1) queue.push_back({b.i0, im, jm, b.j1});
    if (im < b.i1 && jm < b.j1) queue.push_back({im, b.i1, jm, b.j1});
  }

  std::vector<std::int64_t> counts(blocks.size(), 0);
  parallel_for(static_cast<std::int64_t>(blocks.size()), workers,
               [&](std::int64_t k) {
                 counts[static_cast<std::size_t>(k)] =
                     scan.count_block(blocks[static_cast<std::size_t>(k)]);
               });
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  return static_cast<double>(total) * scan.grid.cw * scan.grid.ch;
}

std::vector<double> default_eps_schedule(const CMatrix& m) {
  SpectralData sd = eig(m);
  const int n = static_cast<int>(sd.eigenvalues.size());
  if (n < 2)
    throw std::invalid_argument(
        "default_eps_schedule: needs at least two eigenvalues; pass an "
        "explicit schedule");
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      min_gap = std::min(min_gap, std::abs(sd.eigenvalues[i] - sd.eigenvalues[j]));
  std::vector<double> schedule(5);
  schedule[0] = min_gap / 10.0;
  for (int k = 1; k < 5; ++k) schedule[k] = schedule[k - 1] * 0.5;
  return schedule;
}

LimitEstimate limiting_overlap_estimate(const CMatrix& m,
                                        const RegionSpec& region,
                                        std::vector<double> eps_schedule,
                                        int workers) {
  if (eps_schedule.empty()) eps_schedule = default_eps_schedule(m);
  if (eps_schedule.size() < 2)
    throw std::invalid_argument(
        "limiting_overlap_estimate: schedule needs at least two entries");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] > 0.0))
      throw std::invalid_argument(
          "limiting_overlap_estimate: schedule entries must be positive");
    if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1]))
      throw std::invalid_argument(
          "limiting_overlap_estimate: schedule must be strictly decreasing");
  }

  double eps_min = eps_schedule.back();
  auto [lo, hi] = region_bbox(region);
  double extent = std::max(hi.real() - lo.real(), hi.imag() - lo.imag());
  // At least 64 cells across the smallest epsilon, on one shared grid so the
  // counted sets are nested across the schedule.
  std::int64_t resolution =
      std::max<std::int64_t>(2, static_cast<std::int64_t>(
                                    std::ceil(extent * 64.0 / eps_min)));

  LimitEstimate est;
  est.eps_schedule = eps_schedule;
  for (double eps : eps_schedule) {
    double area = pseudospectrum_area(m, eps, region, resolution, workers);
    est.ratios.push_back(area / (kPi * eps * eps));
  }
  for (std::size_t k = 0; k + 1 < est.ratios.size(); ++k) {
    double r = eps_schedule[k + 1] / eps_schedule[k];
    est.extrapolants.push_back((est.ratios[k + 1] - r * est.ratios[k]) /
                               (1.0 - r));
  }
  est.value = est.extrapolants.back();
  if (est.extrapolants.size() >= 2) {
    double last = est.extrapolants[est.extrapolants.size() - 1];
    double prev = est.extrapolants[est.extrapolants.size() - 2];
    est.converged =
        std::abs(last - prev) <= 0.1 * std::max(std::abs(last), 1e-12);
  } else {
    est.converged = false;
  }
  return est;
}

}  // namespace spectral
