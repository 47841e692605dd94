#include "geodeq/glue.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "geodeq/errors.hpp"
#include "geodeq/verify.hpp"

namespace geodeq {

namespace {

std::vector<cplx> eigenvalues(const RMatrix& L) {
  std::vector<cplx> out;
  for (const auto& c : matrix_spectrum(L)) {
    out.push_back(c.value);
    if (c.kind == ClusterKind::conjugate_pair) out.push_back(std::conj(c.value));
  }
  return out;
}

double spectral_pad(cplx z) { return 1e-6 * (1.0 + std::abs(z)); }

}  // namespace

std::vector<SpectralBox> estimate_region(const MetricPair& pair, const GlueOptions& opt) {
  std::vector<Point> points{pair.chart.center()};
  for (auto& p : pair.chart.sample(opt.spectrum_samples, opt.seed).points) points.push_back(std::move(p));
  // Index 0: real axis, 1: upper half plane, 2: lower half plane.
  std::array<std::optional<SpectralBox>, 3> boxes;
  for (const auto& p : points) {
    for (const cplx z : eigenvalues(pair.L.value_at(p))) {
      const int slot = z.imag() == 0.0 ? 0 : (z.imag() > 0 ? 1 : 2);
      auto& b = boxes[slot];
      if (!b) {
        b = SpectralBox{z.real(), z.real(), z.imag(), z.imag()};
      } else {
        b->re_lo = std::min(b->re_lo, z.real());
        b->re_hi = std::max(b->re_hi, z.real());
        b->im_lo = std::min(b->im_lo, z.imag());
        b->im_hi = std::max(b->im_hi, z.imag());
      }
    }
  }
  std::vector<SpectralBox> out;
  for (int slot = 0; slot < 3; ++slot) {
    if (!boxes[slot]) continue;
    SpectralBox b = *boxes[slot];
    const double scale = 1.0 + std::max({std::abs(b.re_lo), std::abs(b.re_hi), std::abs(b.im_lo), std::abs(b.im_hi)});
    const double pr = 0.05 * (b.re_hi - b.re_lo) + 1e-6 * scale;
    b.re_lo -= pr;
    b.re_hi += pr;
    if (slot != 0) {
      const double pi = 0.05 * (b.im_hi - b.im_lo) + 1e-6 * scale;
      b.im_lo -= pi;
      b.im_hi += pi;
      // Keep the half-plane boxes off the real axis.
      if (slot == 1) b.im_lo = std::max(b.im_lo, 0.5 * boxes[slot]->im_lo);
      if (slot == 2) b.im_hi = std::min(b.im_hi, 0.5 * boxes[slot]->im_hi);
    }
    out.push_back(b);
  }
  return out;
}

Block make_block(MetricPair pair, std::vector<SpectralBox> region, const GlueOptions& opt) {
  if (region.empty()) region = estimate_region(pair, opt);
  return Block{std::move(pair), std::move(region)};
}

Block glue(const std::vector<Block>& blocks, const GlueOptions& opt) {
  if (blocks.empty()) throw SpecError("glue: no blocks");
  std::size_t total = 0;
  std::vector<std::size_t> offsets, dims;
  for (const auto& b : blocks) {
    offsets.push_back(total);
    dims.push_back(b.pair.dim());
    total += b.pair.dim();
  }
  if (total > kMaxDim) throw SpecError("glue: product dimension exceeds 8");

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& pr = blocks[i].pair;
    std::vector<Point> pts{pr.chart.center()};
    for (auto& p : pr.chart.sample(2, opt.seed + i).points) pts.push_back(std::move(p));
    for (const auto& p : pts) {
      if (pr.chart.excluded_by(p)) continue;
      const double r = compatibility_residual(pr.g, pr.L, p);
      if (!(r <= opt.compat_tol)) {
        std::ostringstream msg;
        msg << "glue: block " << i << " (" << pr.kind << ") is not compatible (residual " << r << ")";
        throw SpecError(msg.str());
      }
    }
  }

  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      for (const auto& a : blocks[i].region)
        for (const auto& b : blocks[j].region)
          if (a.overlaps(b)) {
            std::ostringstream msg;
            msg << "glue: spectral regions of blocks " << i << " and " << j << " overlap";
            throw SpectralError(msg.str());
          }

  std::vector<Chart> charts;
  for (const auto& b : blocks) charts.push_back(b.pair.chart);

  Block out;
  out.pair.kind = "glue";
  out.pair.chart = Chart::product(charts);
  for (const auto& b : blocks) out.region.insert(out.region.end(), b.region.begin(), b.region.end());

  std::vector<MetricField> hs;
  std::vector<EndoField> Ls;
  for (const auto& b : blocks) {
    hs.push_back(b.pair.g);
    Ls.push_back(b.pair.L);
  }
  out.pair.g = MetricField(total, [hs, Ls, offsets, dims](JetCoords x) {
    const std::size_t k = hs.size();
    std::vector<JetMatrix> L(k);
    std::vector<Poly<RJet>> chi(k);
    for (std::size_t j = 0; j < k; ++j) {
      L[j] = Ls[j](x.subspan(offsets[j], dims[j]));
      chi[j] = char_poly(L[j]);
    }
    std::vector<JetMatrix> parts;
    for (std::size_t i = 0; i < k; ++i) {
      JetMatrix gi = hs[i](x.subspan(offsets[i], dims[i]));
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) gi = gi * eval_matrix(chi[j], L[i]);
      parts.push_back(gi);
    }
    return direct_sum(parts);
  });
  out.pair.L = EndoField(total, [Ls, offsets, dims](JetCoords x) {
    std::vector<JetMatrix> parts;
    for (std::size_t j = 0; j < Ls.size(); ++j) parts.push_back(Ls[j](x.subspan(offsets[j], dims[j])));
    return direct_sum(parts);
  });

  // Spectra must stay inside their regions at product points too.
  for (const auto& p : out.pair.chart.sample(opt.check_points, opt.seed).points) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const std::span<const double> q(p.data() + offsets[i], dims[i]);
      for (const cplx z : eigenvalues(blocks[i].pair.L.value_at(q))) {
        bool inside = false;
        for (const auto& b : blocks[i].region) inside = inside || b.contains(z, spectral_pad(z));
        if (!inside) {
          std::ostringstream msg;
          msg << "glue: eigenvalue " << z << " of block " << i << " leaves its spectral region";
          throw SpectralError(msg.str());
        }
      }
    }
  }
  return out;
}

SplitResult split_pointwise(const RMatrix& g, const RMatrix& L, double tol) {
  const std::size_t n = L.dim();
  const auto clusters = matrix_spectrum(L);
  for (std::size_t i = 0; i < clusters.size(); ++i)
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      const cplx a = clusters[i].value, b = clusters[j].value;
      const double sep = std::min(std::abs(a - b), std::abs(a - std::conj(b)));
      if (sep <= 10.0 * tol * (1.0 + std::max(std::abs(a), std::abs(b))))
        throw SpectralError("split: eigenvalue clusters are not separated");
    }

  std::vector<Poly<double>> chis;
  for (const auto& c : clusters) {
    const Poly<double> factor = c.kind == ClusterKind::real
                                    ? Poly<double>{{-c.value.real(), 1.0}}
                                    : Poly<double>{{std::norm(c.value), -2.0 * c.value.real(), 1.0}};
    Poly<double> chi{{1.0}};
    for (int k = 0; k < c.multiplicity; ++k) chi = chi * factor;
    chis.push_back(chi);
  }
  Poly<double> chi_hat{{0.0}};
  for (std::size_t i = 0; i < chis.size(); ++i) {
    Poly<double> term{{1.0}};
    for (std::size_t j = 0; j < chis.size(); ++j)
      if (j != i) term = term * chis[j];
    chi_hat = chi_hat + term;
  }
  RMatrix M = eval_matrix(chi_hat, L);
  RMatrix Minv;
  try {
    Minv = inverse(M);
  } catch (const SingularError&) {
    throw SingularError("split: chi_hat(L) is singular (numerical degeneracy)");
  }

  SplitResult r;
  r.h = g * Minv;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& c = clusters[i];
    const cplx v = c.value;
    const bool pair = c.kind == ClusterKind::conjugate_pair;
    // Membership by nearest centroid, so raw roots of a split multiple
    // eigenvalue get the same target as their cluster.
    TargetFn f = [&clusters, i](cplx z, int order) -> cplx {
      if (order != 0) return 0.0;
      std::size_t best = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < clusters.size(); ++k) {
        const cplx c = clusters[k].value;
        const double d = std::min(std::abs(z - c), std::abs(z - std::conj(c)));
        if (d < dist) {
          dist = d;
          best = k;
        }
      }
      return best == i ? 1.0 : 0.0;
    };
    SplitBlock b;
    b.eigenvalue = v;
    b.multiplicity = c.multiplicity;
    b.complex_pair = pair;
    b.projector = clusters.size() == 1 ? RMatrix::identity(n) : real_part(matrix_function(L, f));
    b.h_block = b.projector.transpose() * r.h * b.projector;
    b.chi = chis[i];
    r.blocks.push_back(b);
  }
  for (std::size_t i = 0; i < r.blocks.size(); ++i)
    for (std::size_t j = 0; j < r.blocks.size(); ++j)
      if (i != j)
        r.cross_term =
            std::max(r.cross_term, max_abs(r.blocks[i].projector.transpose() * r.h * r.blocks[j].projector));
  return r;
}

SplitResult split_pointwise(const MetricField& g, const EndoField& L, std::span<const double> p, double tol) {
  return split_pointwise(g.value_at(p), L.value_at(p), tol);
}

}  // namespace geodeq
