#pragma once

// Parameter functions, charts, and jet-valued metric / endomorphism fields,
// plus the two conversions between a metric pair (g, gbar) and the operator L.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "geodeq/jet.hpp"
#include "geodeq/linalg.hpp"

namespace geodeq {

using Point = std::vector<double>;
using JetCoords = std::span<const RJet>;

// Univariate polynomial in one chart coordinate (or one complex coordinate
// z_k = x_k + i y_k for holomorphic parameters).
class ParamFn {
 public:
  static constexpr std::size_t kMaxDegree = 12;

  ParamFn() = default;
  ParamFn(std::size_t var, std::vector<cplx> coeffs);
  static ParamFn real(std::size_t var, std::vector<double> coeffs);
  static ParamFn constant(double c, std::size_t var = 0) { return real(var, {c}); }

  std::size_t var() const { return var_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  bool is_complex() const;
  ParamFn derivative() const;
  ParamFn with_var(std::size_t var) const { return ParamFn(var, coeffs_); }

  double operator()(double x) const;
  cplx operator()(cplx z) const;
  RJet operator()(const RJet& x) const;
  CJet operator()(const CJet& z) const;

 private:
  std::size_t var_ = 0;
  std::vector<cplx> coeffs_{cplx(0)};
};

struct Exclusion {
  std::string name;
  std::function<double(std::span<const double>)> expr;
};

struct SampleSet {
  std::vector<Point> points;
  std::size_t attempted = 0;
  std::size_t rejected = 0;
};

// Deterministic uniform doubles in [0, 1) from std::mt19937_64, using the
// top 53 bits of each draw so the stream is identical on every platform.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : rng_(seed) {}
  double next() { return double(rng_() >> 11) * 0x1.0p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 rng_;
};

class Chart {
 public:
  Chart() = default;
  Chart(std::vector<std::pair<double, double>> box, double margin = 1e-3);

  std::size_t dim() const { return box_.size(); }
  const std::vector<std::pair<double, double>>& box() const { return box_; }
  double margin() const { return margin_; }
  const std::vector<Exclusion>& exclusions() const { return exclusions_; }

  void add_exclusion(Exclusion e) { exclusions_.push_back(std::move(e)); }
  Point center() const;
  double box_scale() const;
  // Exclusions fire when |expr| < margin * box_scale.
  double threshold() const { return margin_ * box_scale(); }
  bool in_box(std::span<const double> p) const;
  std::optional<std::string> excluded_by(std::span<const double> p) const;

  // Rejection sampling; throws DomainError once rejections exceed half of
  // the attempts needed (2n attempts without n acceptances).
  SampleSet sample(std::size_t n, std::uint64_t seed) const;

  // Concatenated chart of a product; exclusions are reindexed.
  static Chart product(const std::vector<Chart>& parts);

 private:
  std::vector<std::pair<double, double>> box_;
  double margin_ = 1e-3;
  std::vector<Exclusion> exclusions_;
};

using FieldFn = std::function<JetMatrix(JetCoords)>;

// A matrix-valued field evaluated on jet coordinates. The coordinates may
// carry gradients of a larger ambient chart; outputs inherit them.
class TensorField {
 public:
  TensorField() = default;
  TensorField(std::size_t dim, FieldFn fn) : dim_(dim), fn_(std::move(fn)) {}

  std::size_t dim() const { return dim_; }
  JetMatrix operator()(JetCoords x) const;
  JetMatrix at(std::span<const double> p) const;
  RMatrix value_at(std::span<const double> p) const { return values(at(p)); }
  explicit operator bool() const { return static_cast<bool>(fn_); }

 private:
  std::size_t dim_ = 0;
  FieldFn fn_;
};

// Symmetric by construction: evaluation symmetrizes the produced matrix.
class MetricField : public TensorField {
 public:
  MetricField() = default;
  MetricField(std::size_t dim, FieldFn fn);
};

class EndoField : public TensorField {
 public:
  using TensorField::TensorField;
};

// L = |det gbar / det g|^{1/(n+1)} gbar^{-1} g.
RMatrix projective_L(const MetricField& g, const MetricField& gbar, std::span<const double> p);
EndoField projective_L_field(const MetricField& g, const MetricField& gbar);

// gbar(u, v) = g(L^{-1} u, v) / |det L|.
MetricField companion_metric(const MetricField& g, const EndoField& L);

// Field evaluation that refuses points outside the chart or inside an exclusion.
JetMatrix eval_with_jets(const TensorField& field, const Chart& chart, std::span<const double> p);

// A metric g with operator L on a chart, and optionally an explicitly given
// second metric gbar.
struct MetricPair {
  std::string kind;
  MetricField g;
  EndoField L;
  std::optional<MetricField> gbar;
  Chart chart;

  std::size_t dim() const { return g.dim(); }
  MetricField second_metric() const { return gbar ? *gbar : companion_metric(g, L); }
};

}  // namespace geodeq
