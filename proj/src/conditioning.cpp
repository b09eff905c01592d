#include "spectral/conditioning.hpp"

#include <cmath>

namespace spectral {

ConditioningReport conditioning_report(const SpectralData& sd) {
  ConditioningReport r;
  for (double k : sd.overlaps) r.overlap_sum += k * k;
  const int n = static_cast<int>(sd.eigenvalues.size());
  r.lemma_bound = std::sqrt(n * r.overlap_sum);
  SvdResult s = svd(sd.right_vectors);
  r.kappa_V_unit_columns =
      s.singular_values.front() / s.singular_values.back();
  return r;
}

ConditioningReport kappa_V(const CMatrix& m) {
  return conditioning_report(eig(m));
}

double overlap_sum_in_region(const SpectralData& sd, const RegionSpec& region) {
  double sum = 0.0;
  for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i)
    if (region_contains(region, sd.eigenvalues[i]))
      sum += sd.overlaps[i] * sd.overlaps[i];
  return sum;
}

double overlap_sum_in_region(const CMatrix& m, const RegionSpec& region) {
  return overlap_sum_in_region(eig(m), region);
}

}  // namespace spectral
