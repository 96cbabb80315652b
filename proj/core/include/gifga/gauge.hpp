#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "gifga/bloch.hpp"

namespace gifga {

// Running product of normalized band-overlap factors; the gauge-invariant
// surrogate for the Berry-phase exponential along a momentum path.
struct WilsonChain {
  cplx value{1.0, 0.0};
  double last_overlap_modulus = 1.0;
  double min_overlap_modulus = 1.0;
};

// Thrown when a per-step overlap drops below the floor: the step is too
// large or the trajectory ran through a band crossing, and the first-order
// phase factor would be garbage.
struct GaugeError : std::runtime_error {
  int band, step;
  double modulus;
  GaugeError(int band_, int step_, double modulus_)
      : std::runtime_error("overlap modulus " + std::to_string(modulus_) +
                           " below floor at band " + std::to_string(band_) +
                           ", step " + std::to_string(step_)),
        band(band_),
        step(step_),
        modulus(modulus_) {}
};

constexpr double default_overlap_floor = 0.5;

// <u(t_k), u(t_{k-1})> / |...| with the newer state in the bra.  Coefficient
// vectors must come from diagonalizations at *unreduced* momentum so the
// overlap tracks the physical cell inner product across zone boundaries.
cplx wilson_factor(const Eigen::VectorXcd& prev, const Eigen::VectorXcd& curr,
                   double* modulus = nullptr);

// multiply in one factor and renormalize to exact unit modulus
void accumulate(WilsonChain& chain, cplx factor);

}  // namespace gifga
