#pragma once

// Generators for the explicit compatible pairs: diagonal (Dini, Levi-Civita)
// forms, real and complex Jordan blocks, the affine 3-D example, a 1-D
// interval block for gluing, and the Aminova non-example.

#include <map>
#include <optional>
#include <string>

#include "geodeq/fields.hpp"

namespace geodeq {

// Which coefficient the normalized Jordan forms put in the bottom-right
// corner: i(n-i-1) (as obtained from the general a_i) or i(n-i+1).
enum class CornerVariant { theorem, remark };

struct NormalFormSpec {
  std::string kind;
  std::size_t n = 0;  // block size for the Jordan kinds
  std::map<std::string, ParamFn> params;
  std::map<std::string, double> scalars;
  int epsilon = 1;
  CornerVariant corner = CornerVariant::theorem;
  std::optional<Chart> chart;
};

// Real dimension of the chart this normal form lives on.
std::size_t spec_dimension(const NormalFormSpec& spec);
Chart default_chart(const NormalFormSpec& spec);
MetricPair generate(const NormalFormSpec& spec);

MetricPair dini_pair(const ParamFn& X, const ParamFn& Y, const Chart& chart, int epsilon = 1);
MetricPair levicivita3_pair(const ParamFn& X, const ParamFn& Y, const ParamFn& Z, const Chart& chart,
                            int epsilon = 1);
// 1-D block: h = epsilon dx^2, L = X(x).
MetricPair interval_pair(const ParamFn& X, const Chart& chart, int epsilon = 1);
MetricPair real_jordan_pair(std::size_t n, const ParamFn& lambda, const Chart& chart, int epsilon = 1);
MetricPair real_jordan_normalized_pair(std::size_t n, const ParamFn& h, const Chart& chart, int epsilon = 1,
                                       CornerVariant corner = CornerVariant::theorem);
// Real dimension 2n, coordinates ordered (x1, y1, ..., xn, yn).
MetricPair complex_jordan_pair(std::size_t n, const ParamFn& lambda, const Chart& chart, int epsilon = 1);
MetricPair complex_jordan_normalized_pair(std::size_t n, const ParamFn& h, const Chart& chart, int epsilon = 1,
                                          CornerVariant corner = CornerVariant::theorem);
MetricPair affine_complex3_pair(double alpha, double beta, const ParamFn& lambda, const Chart& chart,
                                int epsilon = 1);
// Both matrices as printed; L is derived from them.
MetricPair aminova_pair(const ParamFn& omega, const Chart& chart);

// Min and max of a real parameter function over [lo, hi] (dense sampling
// plus endpoints).
std::pair<double, double> param_range(const ParamFn& f, double lo, double hi);

}  // namespace geodeq
