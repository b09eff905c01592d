#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spectral/linalg.hpp"
#include "spectral/region.hpp"

namespace spectral {

// smin(zI - M) sampled on an inclusive nx x ny node grid over the rectangle
// [z0, z1]. values[iy * nx + ix] is the node at
// (re(z0) + ix*dx, im(z0) + iy*dy). Adjacent nodes differ by at most the
// node spacing (1-Lipschitz field).
struct SminField {
  cdouble z0{0.0, 0.0};
  cdouble z1{0.0, 0.0};
  int nx = 0;
  int ny = 0;
  std::vector<double> values;

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
  double x_at(int ix) const;
  double y_at(int iy) const;
};

// Refuses grids above this many nodes (memory guard).
inline constexpr std::int64_t kMaxFieldNodes = 40'000'000;

SminField smin_field(const CMatrix& m, cdouble z0, cdouble z1, int nx, int ny,
                     int workers);
// Single-threaded reference; bitwise-identical to smin_field.
SminField smin_field_serial(const CMatrix& m, cdouble z0, cdouble z1, int nx,
                            int ny);

// Level curves by marching squares with linear interpolation along edges.
// Closed polylines repeat their first point at the end. Plotting fidelity
// only; vertices are not polished onto the exact level set.
struct ContourSet {
  std::vector<double> levels;
  // polylines[k] = polylines of levels[k]; each vertex is (re, im).
  std::vector<std::vector<std::vector<std::array<double, 2>>>> polylines;
};

// Levels must be positive and strictly decreasing.
ContourSet contours(const SminField& field, const std::vector<double>& levels);

// Area of {z in region : smin(zI - M) < eps}, measured by counting grid
// cells whose center satisfies both conditions (strict region membership).
// resolution = cell count along each bounding-box axis. The parallel version
// prunes whole blocks with the 1-Lipschitz bound plus a safety margin, so it
// counts exactly the same cells as the naive reference.
double pseudospectrum_area(const CMatrix& m, double eps,
                           const RegionSpec& region, std::int64_t resolution,
                           int workers);
double pseudospectrum_area_reference(const CMatrix& m, double eps,
                                     const RegionSpec& region,
                                     std::int64_t resolution);

// Richardson-extrapolated limit of area/(pi eps^2) along a strictly
// decreasing eps schedule; converges to the sum of squared eigenvalue
// condition numbers in the region.
struct LimitEstimate {
  double value = 0.0;
  bool converged = false;
  std::vector<double> eps_schedule;
  std::vector<double> ratios;        // area/(pi eps^2) per schedule entry
  std::vector<double> extrapolants;  // first-order Richardson sequence
};

// Five geometric steps of ratio 1/2 starting at (minimum eigenvalue gap)/10.
std::vector<double> default_eps_schedule(const CMatrix& m);

// Empty schedule selects default_eps_schedule(m). Grid resolution places at
// least 64 cells across the smallest eps. converged is false when the last
// two extrapolants disagree by more than 10%.
LimitEstimate limiting_overlap_estimate(const CMatrix& m,
                                        const RegionSpec& region,
                                        std::vector<double> eps_schedule,
                                        int workers);

}  // namespace spectral
