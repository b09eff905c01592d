#pragma once

namespace spectral {

// Natural logarithm evaluated by a fixed polynomial kernel (the classical
// fdlibm reduction), so the result depends only on the input bits and not on
// the platform's libm. Used by the random number generator to keep Gaussian
// streams bit-identical everywhere. Accuracy is ~1 ulp.
// det_log(0) = -inf, det_log(x < 0) = NaN, det_log(inf) = inf.
double det_log(double x);

}  // namespace spectral
