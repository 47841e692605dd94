#pragma once

// Gluing compatible blocks into a pair on the product chart, and the
// pointwise splitting metric that undoes it.

#include <vector>

#include "geodeq/fields.hpp"

namespace geodeq {

// Axis-aligned box in the complex plane.
struct SpectralBox {
  double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;

  bool contains(cplx z, double pad = 0) const {
    return z.real() >= re_lo - pad && z.real() <= re_hi + pad && z.imag() >= im_lo - pad && z.imag() <= im_hi + pad;
  }
  bool overlaps(const SpectralBox& b, double pad = 0) const {
    return re_lo - pad <= b.re_hi && b.re_lo - pad <= re_hi && im_lo - pad <= b.im_hi && b.im_lo - pad <= im_hi;
  }
};

struct Block {
  MetricPair pair;
  // Region containing the spectrum of L at every chart point. Real
  // eigenvalues, upper and lower half-plane eigenvalues get separate boxes.
  std::vector<SpectralBox> region;
};

struct GlueOptions {
  std::size_t spectrum_samples = 32;  // per block when estimating a region
  std::size_t check_points = 16;      // product points checked after gluing
  double compat_tol = 1e-8;           // light check of each incoming block
  std::uint64_t seed = 7;
};

// Bounding boxes of the spectrum of L sampled over the chart, padded by
// a small relative margin.
std::vector<SpectralBox> estimate_region(const MetricPair& pair, const GlueOptions& opt = {});

// Wraps a pair as a block; estimates the region when none is given.
Block make_block(MetricPair pair, std::vector<SpectralBox> region = {}, const GlueOptions& opt = {});

// g block i = h_i * prod_{j != i} chi_j(L_i) with chi_j the characteristic
// polynomial of L_j at the other block's coordinates; L is the direct sum.
// The result is itself a block whose region is the union of the inputs'.
Block glue(const std::vector<Block>& blocks, const GlueOptions& opt = {});

struct SplitBlock {
  cplx eigenvalue;  // upper half-plane representative for conjugate pairs
  int multiplicity = 0;
  bool complex_pair = false;
  RMatrix projector;
  RMatrix h_block;  // P^T h P
  Poly<double> chi;
};

struct SplitResult {
  std::vector<SplitBlock> blocks;
  RMatrix h;
  double cross_term = 0;  // max over i != j of |P_i^T h P_j|
};

// h(u, v) = g(chi_hat(L)^{-1} u, v) with chi_hat = sum_i chi / chi_i over
// the eigenvalue clusters of L(p). Clusters must be separated by > 10 tol.
SplitResult split_pointwise(const MetricField& g, const EndoField& L, std::span<const double> p, double tol = 1e-6);
SplitResult split_pointwise(const RMatrix& g, const RMatrix& L, double tol = 1e-6);

}  // namespace geodeq
