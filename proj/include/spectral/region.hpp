#pragma once

#include <complex>
#include <utility>

#include <json.hpp>

#include "spectral/complex_matrix.hpp"

namespace spectral {

// Open disk or open axis-aligned rectangle in the complex plane. Membership
// is strict: boundary points count as outside.
struct RegionSpec {
  enum class Kind { disk, rect };
  Kind kind = Kind::disk;
  cdouble center{0.0, 0.0};
  double radius = 0.0;
  cdouble z0{0.0, 0.0};  // rect corners, any orientation
  cdouble z1{0.0, 0.0};

  static RegionSpec disk(cdouble center, double radius);
  static RegionSpec rect(cdouble z0, cdouble z1);
};

bool region_contains(const RegionSpec& r, cdouble z);
// Two-dimensional Lebesgue volume (area).
double region_volume(const RegionSpec& r);
// Closed bounding box as (lower-left, upper-right).
std::pair<cdouble, cdouble> region_bbox(const RegionSpec& r);

// {"disk": {"center": [re, im], "radius": r}} or
// {"rect": {"z0": [re, im], "z1": [re, im]}}.
nlohmann::json region_to_json(const RegionSpec& r);
RegionSpec region_from_json(const nlohmann::json& j);

}  // namespace spectral
