#pragma once

#include <functional>

namespace fipriv {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 48;
  /// When false, running out of depth budget returns the best estimate
  /// instead of throwing QuadratureFailureError.
  bool strict = true;
};

/// Adaptive Simpson integration with Richardson correction.
/// Integrands are the smooth, bounded densities of this library.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 QuadratureOptions options = {});

}  // namespace fipriv
