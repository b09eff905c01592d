#include "spectral/region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectral {

RegionSpec RegionSpec::disk(cdouble center, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("region disk: radius must be finite and >= 0");
  RegionSpec r;
  r.kind = Kind::disk;
  r.center = center;
  r.radius = radius;
  return r;
}

RegionSpec RegionSpec::rect(cdouble z0, cdouble z1) {
  RegionSpec r;
  r.kind = Kind::rect;
  // Normalize so z0 is the lower-left corner.
  r.z0 = cdouble(std::min(z0.real(), z1.real()), std::min(z0.imag(), z1.imag()));
  r.z1 = cdouble(std::max(z0.real(), z1.real()), std::max(z0.imag(), z1.imag()));
  return r;
}

bool region_contains(const RegionSpec& r, cdouble z) {
  if (r.kind == RegionSpec::Kind::disk) return std::abs(z - r.center) < r.radius;
  return z.real() > r.z0.real() && z.real() < r.z1.real() &&
         z.imag() > r.z0.imag() && z.imag() < r.z1.imag();
}

double region_volume(const RegionSpec& r) {
  if (r.kind == RegionSpec::Kind::disk) {
    const double pi = 3.14159265358979323846;
    return pi * r.radius * r.radius;
  }
  return (r.z1.real() - r.z0.real()) * (r.z1.imag() - r.z0.imag());
}

std::pair<cdouble, cdouble> region_bbox(const RegionSpec& r) {
  if (r.kind == RegionSpec::Kind::disk)
    return {r.center - cdouble(r.radius, r.radius),
            r.center + cdouble(r.radius, r.radius)};
  return {r.z0, r.z1};
}

nlohmann::json region_to_json(const RegionSpec& r) {
  if (r.kind == RegionSpec::Kind::disk)
    return {{"disk",
             {{"center", {r.center.real(), r.center.imag()}},
              {"radius", r.radius}}}};
  return {{"rect",
           {{"z0", {r.z0.real(), r.z0.imag()}},
            {"z1", {r.z1.real(), r.z1.imag()}}}}};
}

namespace {

cdouble complex_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument(std::string("region: ") + what +
                                " must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

RegionSpec region_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1)
    throw std::invalid_argument(
        "region: expected exactly one of {\"disk\"} or {\"rect\"}");
  if (j.contains("disk")) {
    const auto& d = j["disk"];
    if (!d.is_object() || !d.contains("center") || !d.contains("radius") ||
        d.size() != 2)
      throw std::invalid_argument("region disk: expected {\"center\", \"radius\"}");
    if (!d["radius"].is_number())
      throw std::invalid_argument("region disk: radius must be a number");
    return RegionSpec::disk(complex_from_json(d["center"], "center"),
                            d["radius"].get<double>());
  }
  if (j.contains("rect")) {
    const auto& r = j["rect"];
    if (!r.is_object() || !r.contains("z0") || !r.contains("z1") || r.size() != 2)
      throw std::invalid_argument("region rect: expected {\"z0\", \"z1\"}");
    return RegionSpec::rect(complex_from_json(r["z0"], "z0"),
                            complex_from_json(r["z1"], "z1"));
  }
  throw std::invalid_argument("region: unknown kind (want \"disk\" or \"rect\")");
}

}  // namespace spectral
