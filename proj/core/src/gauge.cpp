#include "gifga/gauge.hpp"

#include <cmath>

namespace gifga {

cplx wilson_factor(const Eigen::VectorXcd& prev, const Eigen::VectorXcd& curr,
                   double* modulus) {
  // dot() conjugates its object, so this is <curr, prev> up to the 2*pi
  // coefficient scaling, which cancels in the normalization
  const cplx ov = curr.dot(prev);
  const double m = std::abs(ov);
  if (modulus) *modulus = 2.0 * std::numbers::pi * m;
  if (m == 0.0) return {1.0, 0.0};
  return ov / m;
}

void accumulate(WilsonChain& chain, cplx factor) {
  chain.value *= factor;
  chain.value /= std::abs(chain.value);
}

}  // namespace gifga
