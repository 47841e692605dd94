#include "geodeq/fields.hpp"

#include <cmath>
#include <sstream>

#include "geodeq/errors.hpp"

namespace geodeq {

ParamFn::ParamFn(std::size_t var, std::vector<cplx> coeffs) : var_(var), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0);
  if (coeffs_.size() > kMaxDegree + 1) throw SpecError("parameter function degree exceeds 12");
  for (const auto& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw SpecError("parameter function coefficients must be finite");
}

ParamFn ParamFn::real(std::size_t var, std::vector<double> coeffs) {
  return ParamFn(var, std::vector<cplx>(coeffs.begin(), coeffs.end()));
}

bool ParamFn::is_complex() const {
  for (const auto& c : coeffs_)
    if (c.imag() != 0.0) return true;
  return false;
}

ParamFn ParamFn::derivative() const {
  std::vector<cplx> d;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * double(k));
  return ParamFn(var_, d);
}

double ParamFn::operator()(double x) const {
  if (is_complex()) throw SpecError("complex parameter function evaluated on a real coordinate");
  double acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->real();
  return acc;
}

cplx ParamFn::operator()(cplx z) const {
  cplx acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

RJet ParamFn::operator()(const RJet& x) const {
  if (is_complex()) throw SpecError("complex parameter function evaluated on a real coordinate");
  RJet acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + RJet(it->real());
  return acc;
}

CJet ParamFn::operator()(const CJet& z) const {
  CJet acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + CJet(*it);
  return acc;
}

Chart::Chart(std::vector<std::pair<double, double>> box, double margin) : box_(std::move(box)), margin_(margin) {
  if (box_.empty() || box_.size() > kMaxDim) throw SpecError("chart dimension must be between 1 and 8");
  for (const auto& [lo, hi] : box_)
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw SpecError("chart box intervals must satisfy lo < hi");
  if (!(margin_ > 0)) throw SpecError("chart margin must be positive");
}

Point Chart::center() const {
  Point c;
  for (const auto& [lo, hi] : box_) c.push_back(0.5 * (lo + hi));
  return c;
}

double Chart::box_scale() const {
  double s = 0;
  for (const auto& [lo, hi] : box_) s = std::max(s, hi - lo);
  return s;
}

bool Chart::in_box(std::span<const double> p) const {
  if (p.size() != box_.size()) return false;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] < box_[k].first || p[k] > box_[k].second) return false;
  return true;
}

std::optional<std::string> Chart::excluded_by(std::span<const double> p) const {
  const double t = threshold();
  for (const auto& e : exclusions_) {
    const double v = e.expr(p);
    if (!std::isfinite(v) || std::abs(v) < t) return e.name;
  }
  return std::nullopt;
}

SampleSet Chart::sample(std::size_t n, std::uint64_t seed) const {
  SampleSet s;
  UniformStream rng(seed);
  Point p(dim());
  while (s.points.size() < n) {
    if (s.attempted >= 2 * n) {
      std::ostringstream msg;
      msg << "chart sampling rejected " << s.rejected << " of " << s.attempted
          << " points (over 50%); the chart box mostly lies inside exclusion zones";
      throw DomainError(msg.str());
    }
    for (std::size_t k = 0; k < dim(); ++k) p[k] = rng.next(box_[k].first, box_[k].second);
    ++s.attempted;
    if (excluded_by(p)) {
      ++s.rejected;
      continue;
    }
    s.points.push_back(p);
  }
  return s;
}

Chart Chart::product(const std::vector<Chart>& parts) {
  std::vector<std::pair<double, double>> box;
  double margin = 0;
  for (const auto& c : parts) {
    box.insert(box.end(), c.box_.begin(), c.box_.end());
    margin = std::max(margin, c.margin_);
  }
  Chart out(box, margin);
  std::size_t off = 0;
  for (const auto& c : parts) {
    const std::size_t len = c.dim();
    for (const auto& e : c.exclusions_) {
      auto expr = e.expr;
      out.exclusions_.push_back({e.name, [expr, off, len](std::span<const double> p) { return expr(p.subspan(off, len)); }});
    }
    off += len;
  }
  return out;
}

JetMatrix TensorField::operator()(JetCoords x) const {
  if (x.size() != dim_) throw std::logic_error("field evaluated with wrong number of coordinates");
  auto m = fn_(x);
  if (m.dim() != dim_) throw std::logic_error("field produced a matrix of the wrong dimension");
  return m;
}

JetMatrix TensorField::at(std::span<const double> p) const {
  const auto seeds = seed_point(p);
  return (*this)(JetCoords(seeds.data(), p.size()));
}

MetricField::MetricField(std::size_t dim, FieldFn fn)
    : TensorField(dim, [fn = std::move(fn)](JetCoords x) {
        auto m = fn(x);
        for (std::size_t i = 0; i < m.dim(); ++i)
          for (std::size_t j = i + 1; j < m.dim(); ++j) {
            const RJet s = (m(i, j) + m(j, i)) * RJet(0.5);
            m(i, j) = s;
            m(j, i) = s;
          }
        return m;
      }) {}

namespace {

JetMatrix projective_L_jets(const JetMatrix& g, const JetMatrix& gbar) {
  const std::size_t n = g.dim();
  const RJet ratio = det(gbar) / det(g);
  const RJet factor = pow_abs(ratio, 1.0 / double(n + 1));
  return (inverse(gbar) * g) * factor;
}

}  // namespace

RMatrix projective_L(const MetricField& g, const MetricField& gbar, std::span<const double> p) {
  if (g.dim() != gbar.dim()) throw std::invalid_argument("projective_L: dimension mismatch");
  const auto G = g.value_at(p);
  const auto Gb = gbar.value_at(p);
  const double ratio = det(Gb) / det(G);
  if (!std::isfinite(ratio) || ratio == 0.0) throw SingularError("projective_L: singular metric");
  return (inverse(Gb) * G) * std::pow(std::abs(ratio), 1.0 / double(G.dim() + 1));
}

EndoField projective_L_field(const MetricField& g, const MetricField& gbar) {
  if (g.dim() != gbar.dim()) throw std::invalid_argument("projective_L: dimension mismatch");
  return EndoField(g.dim(), [g, gbar](JetCoords x) { return projective_L_jets(g(x), gbar(x)); });
}

MetricField companion_metric(const MetricField& g, const EndoField& L) {
  if (g.dim() != L.dim()) throw std::invalid_argument("companion_metric: dimension mismatch");
  return MetricField(g.dim(), [g, L](JetCoords x) {
    const auto Lx = L(x);
    const RJet d = det(Lx);
    if (value_of(d) == 0.0) throw SingularError("companion_metric: L is singular");
    return (g(x) * inverse(Lx)) * (RJet(1.0) / abs(d));
  });
}

JetMatrix eval_with_jets(const TensorField& field, const Chart& chart, std::span<const double> p) {
  if (!chart.in_box(p)) throw DomainError("point lies outside the chart box");
  if (auto e = chart.excluded_by(p)) throw DomainError("point lies in exclusion zone '" + *e + "'");
  return field.at(p);
}

}  // namespace geodeq
