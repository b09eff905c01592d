#pragma once

#include "spectral/linalg.hpp"
#include "spectral/region.hpp"

namespace spectral {

// kappa_V_unit_columns: condition number sigma_1/sigma_n of the unit-column
// right eigenvector matrix. overlap_sum: sum of squared eigenvalue condition
// numbers. lemma_bound = sqrt(n * overlap_sum) dominates
// kappa_V_unit_columns up to roundoff.
struct ConditioningReport {
  double kappa_V_unit_columns = 0.0;
  double overlap_sum = 0.0;
  double lemma_bound = 0.0;
};

ConditioningReport kappa_V(const CMatrix& m);
ConditioningReport conditioning_report(const SpectralData& sd);

// Sum of squared eigenvalue condition numbers over eigenvalues strictly
// inside the region.
double overlap_sum_in_region(const CMatrix& m, const RegionSpec& region);
double overlap_sum_in_region(const SpectralData& sd, const RegionSpec& region);

}  // namespace spectral
