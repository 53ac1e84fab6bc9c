#include "balayage/kernel.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "balayage/error.hpp"
#include "detail/vec.hpp"

namespace balayage {

namespace {

// kappa as a function of the squared distance.
struct Kappa {
  double s;
  double operator()(double d2) const {
    if (s == -1.0) return 1.0 / std::sqrt(d2);
    if (s == -2.0) return 1.0 / d2;
    return std::pow(d2, 0.5 * s);
  }
};

bool same_point(std::span<const double> a, std::span<const double> b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != b[k]) return false;
  }
  return true;
}

// Interval coordinates of two segment panels on a common line, or false if not collinear.
bool collinear_params(std::span<const double> p0, std::span<const double> p1, std::span<const double> q0,
                      std::span<const double> q1, double& a, double& b, double& c, double& d) {
  const std::size_t n = p0.size();
  double len = 0.0;
  for (std::size_t k = 0; k < n; ++k) len += (p1[k] - p0[k]) * (p1[k] - p0[k]);
  len = std::sqrt(len);
  if (len == 0.0) return false;
  auto param = [&](std::span<const double> q, double& t) {
    t = 0.0;
    for (std::size_t k = 0; k < n; ++k) t += (q[k] - p0[k]) * (p1[k] - p0[k]) / len;
    double off2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e = q[k] - p0[k] - t * (p1[k] - p0[k]) / len;
      off2 += e * e;
    }
    return std::sqrt(off2) <= 1e-12 * std::max(1.0, std::abs(t) + len);
  };
  double t0 = 0.0;
  double t1 = 0.0;
  if (!param(q0, t0) || !param(q1, t1)) return false;
  a = 0.0;
  b = len;
  c = std::min(t0, t1);
  d = std::max(t0, t1);
  const double slack = 1e-12 * (len + d - c);
  if (c >= b - slack) {
    c = std::max(c, b);
    return true;
  }
  if (d <= a + slack) {
    // second interval lies to the left: swap roles
    const double c0 = c;
    const double d0 = std::min(d, a);
    c = a;
    d = b;
    a = c0;
    b = d0;
    return true;
  }
  return false;
}

double equal_measure_radius(int idim, double measure) {
  if (idim == 1) return 0.5 * measure;
  if (idim == 2) return std::sqrt(measure / std::numbers::pi);
  return std::cbrt(3.0 * measure / (4.0 * std::numbers::pi));
}

}  // namespace

void validate(const KernelSpec& spec) {
  if (spec.dim < 2) throw ValidationError("kernel: dim must be an integer >= 2");
  if (!(spec.alpha > 0.0 && spec.alpha <= 2.0) || !(spec.alpha < spec.dim)) {
    std::ostringstream os;
    os << "kernel: alpha = " << spec.alpha << " with dim = " << spec.dim
       << " is outside the admitted range alpha in (0, 2], alpha < n";
    throw ValidationError(os.str());
  }
  if (spec.max_principle_constant != 1.0) {
    throw ValidationError("kernel: max_principle_constant must be 1 for Riesz kernels");
  }
  if (spec.diag_mode == DiagMode::monte_carlo && spec.mc_samples == 0) {
    throw ValidationError("kernel: monte_carlo diagonal mode needs samples > 0");
  }
  if (!(spec.near_factor >= 0.0) || !std::isfinite(spec.near_factor)) {
    throw ValidationError("kernel: near_factor must be finite and >= 0");
  }
}

std::string diag_mode_name(DiagMode m) {
  switch (m) {
    case DiagMode::analytic_segment:
      return "analytic_segment";
    case DiagMode::equivalent_disc:
      return "equivalent_disc";
    case DiagMode::monte_carlo:
      return "monte_carlo";
  }
  return "equivalent_disc";
}

DiagMode parse_diag_mode(const std::string& s) {
  if (s == "analytic_segment") return DiagMode::analytic_segment;
  if (s == "equivalent_disc") return DiagMode::equivalent_disc;
  if (s == "monte_carlo") return DiagMode::monte_carlo;
  throw ValidationError("kernel: unknown diag_mode '" + s + "'");
}

nlohmann::json to_json(const KernelSpec& spec) {
  nlohmann::json j{{"alpha", spec.alpha},
                   {"dim", spec.dim},
                   {"max_principle_constant", spec.max_principle_constant},
                   {"diag_mode", diag_mode_name(spec.diag_mode)},
                   {"near_factor", spec.near_factor}};
  if (spec.diag_mode == DiagMode::monte_carlo) {
    j["samples"] = spec.mc_samples;
    j["mc_seed"] = spec.mc_seed;
  }
  return j;
}

KernelSpec kernel_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("kernel: expected an object");
  KernelSpec k;
  try {
    k.alpha = j.at("alpha").get<double>();
    k.dim = j.at("dim").get<int>();
    if (j.contains("max_principle_constant")) k.max_principle_constant = j["max_principle_constant"].get<double>();
    if (j.contains("diag_mode")) k.diag_mode = parse_diag_mode(j["diag_mode"].get<std::string>());
    if (j.contains("samples")) k.mc_samples = j["samples"].get<std::uint64_t>();
    if (j.contains("mc_seed")) k.mc_seed = j["mc_seed"].get<std::uint64_t>();
    if (j.contains("near_factor")) k.near_factor = j["near_factor"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("kernel: ") + e.what());
  }
  return k;
}

double evaluate(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (static_cast<int>(x.size()) != spec.dim || static_cast<int>(y.size()) != spec.dim) {
    throw ValidationError("kernel: point dimension does not match kernel dim");
  }
  const double d2 = detail::distance2(x, y);
  if (d2 == 0.0) return std::numeric_limits<double>::infinity();
  return Kappa{spec.exponent()}(d2);
}

// ---------------------------------------------------------------------------

PanelKernel::PanelKernel(KernelSpec spec, std::shared_ptr<const DiscreteSet> set)
    : spec_(spec), set_(std::move(set)) {
  validate(spec_);
  if (!set_) throw ValidationError("kernel: null set");
  if (set_->dim() != spec_.dim) throw ValidationError("kernel: set dimension does not match kernel dim");
  const double s = spec_.exponent();
  const int n = spec_.dim;
  const std::size_t N = set_->size();
  for (std::size_t i = 0; i < N; ++i) {
    const PanelKind k = set_->kind(i);
    if (k != PanelKind::point && !(s > -intrinsic_dim(k, n))) ball_model_ = true;
  }
  diag_.resize(N);
  const auto nd = static_cast<std::size_t>(n);
  m1_.assign(N * nd, 0.0);
  m2_.assign(N * nd * nd, 0.0);
  flat_area_.assign(N, 0.0);
  q_off_.assign(1, 0);
  for (std::size_t i = 0; i < N; ++i) {
    if (const auto tri = set_->triangle(i); !tri.empty() && n == 3) {
      // triangular panels carry their mass uniformly on the flat triangle through the corners
      const detail::Vec3 p0{tri[0], tri[1], tri[2]};
      const detail::Vec3 e1 = detail::Vec3{tri[3], tri[4], tri[5]} - p0;
      const detail::Vec3 e2 = detail::Vec3{tri[6], tri[7], tri[8]} - p0;
      flat_area_[i] = 0.5 * detail::norm(detail::cross(e1, e2));
      const int f = kFlatSub;
      const double w = flat_area_[i] / (f * f);
      for (int u = 0; u < f; ++u) {
        for (int v = 0; v < f - u; ++v) {
          for (int up = 0; up < 2; ++up) {
            if (up == 1 && u + v >= f - 1) continue;
            const double cu = up == 0 ? (u + 1.0 / 3.0) / f : (u + 2.0 / 3.0) / f;
            const double cv = up == 0 ? (v + 1.0 / 3.0) / f : (v + 2.0 / 3.0) / f;
            const detail::Vec3 q = p0 + e1 * cu + e2 * cv;
            q_pts_.insert(q_pts_.end(), {q.x, q.y, q.z});
            q_w_.push_back(w);
          }
        }
      }
    } else {
      for (std::size_t k = 0; k < set_->sub_count(i); ++k) {
        const auto p = set_->sub_point(i, k);
        q_pts_.insert(q_pts_.end(), p.begin(), p.end());
        q_w_.push_back(set_->sub_weight(i, k));
      }
    }
    q_off_.push_back(q_w_.size());
    const auto c = set_->node(i);
    double total = 0.0;
    for (std::size_t k = 0; k < quad_count(i); ++k) {
      const double w = quad_weight(i, k);
      const auto p = quad_point(i, k);
      total += w;
      for (std::size_t a = 0; a < nd; ++a) {
        m1_[i * nd + a] += w * (p[a] - c[a]);
        for (std::size_t b = 0; b < nd; ++b) m2_[(i * nd + a) * nd + b] += w * (p[a] - c[a]) * (p[b] - c[b]);
      }
    }
    for (std::size_t a = 0; a < nd; ++a) m1_[i * nd + a] /= total;
    for (std::size_t a = 0; a < nd * nd; ++a) m2_[i * nd * nd + a] /= total;
  }
  if (ball_model_) {
    for (std::size_t i = 0; i < N; ++i) diag_[i] = ball_self_energy(n, s, set_->cell_radius(i));
    diag_note_ = "ball model: panel self-energy diverges for this kernel, each panel is a ball of radius "
                 "cell_radius; off-diagonal entries are point values";
    return;
  }
  const Kappa kap{s};
  switch (spec_.diag_mode) {
    case DiagMode::analytic_segment:
      for (std::size_t i = 0; i < N; ++i) {
        if (intrinsic_dim(set_->kind(i), n) != 1) {
          throw ValidationError("kernel: analytic_segment diagonal mode requires 1-D panels");
        }
        diag_[i] = segment_self_energy(s, set_->cell_measure(i));
      }
      diag_note_ = "analytic_segment: closed-form self-energy of a uniform segment of the panel length";
      break;
    case DiagMode::equivalent_disc: {
      const double disc_unit = s > -2.0 ? disc_self_energy(s, 1.0) : 0.0;
      const double ball_unit = s > -3.0 ? ball3_self_energy(s, 1.0) : 0.0;
      auto body = [&](int idim, double measure) {
        const double r = equal_measure_radius(idim, measure);
        if (idim == 1) return segment_self_energy(s, measure);
        return (idim == 2 ? disc_unit : ball_unit) * std::pow(r, s);
      };
      for (std::size_t i = 0; i < N; ++i) {
        const PanelKind kind = set_->kind(i);
        const int idim = intrinsic_dim(kind, n);
        if (idim == 1 || kind == PanelKind::point) {
          diag_[i] = body(idim, set_->cell_measure(i));
          continue;
        }
        if (const auto tri = set_->triangle(i); !tri.empty()) {
          diag_[i] = triangle_self_energy(s, tri, n);
          continue;
        }
        const std::size_t m = set_->sub_count(i);
        double sum = 0.0;
        double total = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          const double wk = set_->sub_weight(i, k);
          total += wk;
          for (std::size_t l = 0; l < m; ++l) {
            const double wl = set_->sub_weight(i, l);
            if (k == l) {
              sum += wk * wk * body(idim, wk);
            } else {
              sum += wk * wl * kap(detail::distance2(set_->sub_point(i, k), set_->sub_point(i, l)));
            }
          }
        }
        diag_[i] = sum / (total * total);
      }
      diag_note_ = "equivalent_disc: sub-cell double sum, each sub-cell replaced by a disc/ball of equal measure; "
                   "1-D panels use the closed-form segment self-energy";
      break;
    }
    case DiagMode::monte_carlo: {
      std::map<std::pair<int, double>, double> memo;
      for (std::size_t i = 0; i < N; ++i) {
        const int idim = intrinsic_dim(set_->kind(i), n);
        const auto key = std::make_pair(idim, set_->cell_measure(i));
        auto it = memo.find(key);
        if (it == memo.end()) {
          it = memo.emplace(key, monte_carlo_self_energy(s, idim, key.second, spec_.mc_samples, spec_.mc_seed)).first;
        }
        diag_[i] = it->second;
      }
      diag_note_ = "monte_carlo: mean kernel over " + std::to_string(spec_.mc_samples) +
                   " sampled pairs in a segment/disc/ball of equal measure";
      break;
    }
  }
}

std::span<const double> PanelKernel::first_moment(std::size_t i) const {
  const auto n = static_cast<std::size_t>(spec_.dim);
  return {m1_.data() + i * n, n};
}

std::span<const double> PanelKernel::second_moment(std::size_t i) const {
  const auto n = static_cast<std::size_t>(spec_.dim);
  return {m2_.data() + i * n * n, n * n};
}

namespace {

// Second-order Taylor correction of kappa(r + xi - eta) averaged over the two panels, given
// the mean offset m = E[xi - eta] and the second moment S = E[(xi - eta)(xi - eta)^T].
double taylor_mean(double s, std::span<const double> r, std::span<const double> m, std::span<const double> S) {
  const std::size_t n = r.size();
  double r2 = 0.0;
  for (std::size_t a = 0; a < n; ++a) r2 += r[a] * r[a];
  const double base = std::pow(r2, 0.5 * s);
  const double g = s * base / r2;
  double rm = 0.0;
  double tr = 0.0;
  double rsr = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    rm += r[a] * m[a];
    tr += S[a * n + a];
    for (std::size_t b = 0; b < n; ++b) rsr += r[a] * S[a * n + b] * r[b];
  }
  return base + g * rm + 0.5 * g * (tr + (s - 2.0) * rsr / r2);
}

}  // namespace

double PanelKernel::far_pair(std::size_t i, const PanelKernel& other, std::size_t j) const {
  const auto ni = set_->node(i);
  const auto nj = other.set().node(j);
  const std::size_t n = ni.size();
  if (ball_model_ || other.ball_model()) return Kappa{spec_.exponent()}(detail::distance2(ni, nj));
  const auto m1i = first_moment(i);
  const auto m1j = other.first_moment(j);
  const auto m2i = second_moment(i);
  const auto m2j = other.second_moment(j);
  double r[3];
  double m[3];
  double S[9];
  for (std::size_t a = 0; a < n; ++a) {
    r[a] = ni[a] - nj[a];
    m[a] = m1i[a] - m1j[a];
    for (std::size_t b = 0; b < n; ++b) {
      S[a * n + b] = m2i[a * n + b] + m2j[a * n + b] - m1i[a] * m1j[b] - m1j[a] * m1i[b];
    }
  }
  return taylor_mean(spec_.exponent(), {r, n}, {m, n}, {S, n * n});
}

double PanelKernel::far_probe(std::span<const double> x, std::size_t j) const {
  const auto nj = set_->node(j);
  const std::size_t n = nj.size();
  if (ball_model_) return Kappa{spec_.exponent()}(detail::distance2(x, nj));
  const auto m1 = first_moment(j);
  double r[3];
  double m[3];
  for (std::size_t a = 0; a < n; ++a) {
    r[a] = x[a] - nj[a];
    m[a] = -m1[a];
  }
  return taylor_mean(spec_.exponent(), {r, n}, {m, n}, second_moment(j));
}

double PanelKernel::near_pair(std::size_t i, const PanelKernel& other, std::size_t j) const {
  const DiscreteSet& a = *set_;
  const DiscreteSet& b = other.set();
  const double s = spec_.exponent();
  const Kappa kap{s};
  if (a.kind(i) == PanelKind::segment && b.kind(j) == PanelKind::segment) {
    double pa = 0.0, pb = 0.0, pc = 0.0, pd = 0.0;
    if (collinear_params(a.segment_start(i), a.segment_end(i), b.segment_start(j), b.segment_end(j), pa, pb, pc,
                         pd)) {
      return collinear_pair_energy(s, pa, pb, pc, pd);
    }
  }
  const std::size_t mi = quad_count(i);
  const std::size_t mj = other.quad_count(j);
  const auto tri = spec_.dim == 3 ? b.triangle(j) : std::span<const double>{};
  double sum = 0.0;
  double wi_total = 0.0;
  double wj_total = 0.0;
  for (std::size_t l = 0; l < mj; ++l) wj_total += other.quad_weight(j, l);
  for (std::size_t k = 0; k < mi; ++k) {
    const double wk = quad_weight(i, k);
    wi_total += wk;
    const auto pk = quad_point(i, k);
    if (!tri.empty()) {
      sum += wk * triangle_potential(s, tri, pk) / other.flat_area_[j];
      continue;
    }
    double row = 0.0;
    for (std::size_t l = 0; l < mj; ++l) {
      row += other.quad_weight(j, l) * kap(detail::distance2(pk, other.quad_point(j, l)));
    }
    sum += wk * row / wj_total;
  }
  return sum / wi_total;
}

double PanelKernel::entry(std::size_t i, std::size_t j) const {
  if (i == j) return diag_[i];
  if (i > j) std::swap(i, j);
  const DiscreteSet& a = *set_;
  const double d2 = detail::distance2(a.node(i), a.node(j));
  if (!ball_model_) {
    const double reach = spec_.near_factor * (a.cell_radius(i) + a.cell_radius(j));
    if (d2 < reach * reach) return near_pair(i, *this, j);
  }
  return far_pair(i, *this, j);
}

double PanelKernel::probe_entry(std::span<const double> x, std::size_t j) const {
  const DiscreteSet& a = *set_;
  if (same_point(x, a.node(j))) return diag_[j];
  const Kappa kap{spec_.exponent()};
  const double d2 = detail::distance2(x, a.node(j));
  if (!ball_model_) {
    const double reach = 2.0 * spec_.near_factor * a.cell_radius(j);
    if (d2 < reach * reach) {
      if (const auto tri = a.triangle(j); !tri.empty() && spec_.dim == 3) {
        return triangle_potential(spec_.exponent(), tri, x) / flat_area_[j];
      }
      double sum = 0.0;
      double total = 0.0;
      for (std::size_t k = 0; k < quad_count(j); ++k) {
        const double wk = quad_weight(j, k);
        sum += wk * kap(detail::distance2(x, quad_point(j, k)));
        total += wk;
      }
      return sum / total;
    }
  }
  return far_probe(x, j);
}

double PanelKernel::charge_entry(std::span<const double> z, std::size_t i) const {
  const DiscreteSet& a = *set_;
  if (same_point(z, a.node(i))) return std::numeric_limits<double>::infinity();
  return probe_entry(z, i);
}

double PanelKernel::cross_entry(std::size_t i, const PanelKernel& other, std::size_t j) const {
  const DiscreteSet& a = *set_;
  const DiscreteSet& b = other.set();
  if (same_point(a.node(i), b.node(j))) {
    if (a.cell_measure(i) == b.cell_measure(j) && a.cell_radius(i) == b.cell_radius(j) && a.kind(i) == b.kind(j)) {
      return diag_[i];
    }
  }
  const double d2 = detail::distance2(a.node(i), b.node(j));
  if (!ball_model_ && !other.ball_model()) {
    const double reach = spec_.near_factor * (a.cell_radius(i) + b.cell_radius(j));
    if (d2 < reach * reach) return near_pair(i, other, j);
  }
  return far_pair(i, other, j);
}

// ---------------------------------------------------------------------------

KernelMatrix::KernelMatrix(std::size_t n, std::vector<double> entries, KernelSpec spec,
                           std::shared_ptr<const DiscreteSet> set, std::string diag_note)
    : n_(n), a_(std::move(entries)), spec_(spec), set_(std::move(set)), diag_note_(std::move(diag_note)) {
  if (a_.size() != n_ * n_) throw ValidationError("kernel matrix: entry count does not match size");
}

KernelMatrix KernelMatrix::from_dense(std::size_t n, std::vector<double> entries) {
  if (entries.size() != n * n) throw ValidationError("kernel matrix: entry count does not match size");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (entries[i * n + j] != entries[j * n + i]) throw ValidationError("kernel matrix: not symmetric");
    }
  }
  return KernelMatrix(n, std::move(entries), KernelSpec{}, nullptr, "dense");
}

std::vector<double> KernelMatrix::apply(std::span<const double> w) const {
  if (w.size() != n_) throw ValidationError("kernel matrix: vector size does not match matrix");
  std::vector<double> out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = a_.data() + i * n_;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += row[j] * w[j];
    out[i] = s;
  }
  return out;
}

double KernelMatrix::quad(std::span<const double> w, std::span<const double> v) const {
  const auto kv = apply(v);
  if (w.size() != n_) throw ValidationError("kernel matrix: vector size does not match matrix");
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += w[i] * kv[i];
  return s;
}

KernelMatrix KernelMatrix::submatrix(std::span<const std::size_t> indices,
                                     std::shared_ptr<const DiscreteSet> subset) const {
  const std::size_t m = indices.size();
  std::vector<double> sub(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    if (indices[a] >= n_) throw ValidationError("kernel matrix: submatrix index out of range");
    for (std::size_t b = 0; b < m; ++b) sub[a * m + b] = a_[indices[a] * n_ + indices[b]];
  }
  if (subset && subset->size() != m) throw ValidationError("kernel matrix: subset size does not match indices");
  return KernelMatrix(m, std::move(sub), spec_, std::move(subset), diag_note_);
}

KernelMatrix assemble_matrix(const PanelKernel& pk) {
  const std::size_t n = pk.set().size();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = pk.entry(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = pk.entry(i, j);
      a[i * n + j] = v;
      a[j * n + i] = v;
    }
  }
  return KernelMatrix(n, std::move(a), pk.spec(), pk.set_ptr(), pk.diag_note());
}

KernelMatrix assemble_matrix(const KernelSpec& spec, std::shared_ptr<const DiscreteSet> set) {
  return assemble_matrix(PanelKernel(spec, std::move(set)));
}

double mutual_energy(const KernelMatrix& K, std::span<const double> w, std::span<const double> v) {
  if (w.size() != K.size() || v.size() != K.size()) {
    throw ValidationError("mutual_energy: vector sizes do not match the matrix");
  }
  return K.quad(w, v);
}

std::vector<double> potential(const PanelKernel& pk, std::span<const double> masses, std::span<const Point> probes) {
  const DiscreteSet& set = pk.set();
  if (masses.size() != set.size()) throw ValidationError("potential: mass vector does not match the set");
  std::map<std::vector<double>, std::size_t> node_index;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto nd = set.node(i);
    node_index.emplace(std::vector<double>(nd.begin(), nd.end()), i);
  }
  std::vector<double> out(probes.size(), 0.0);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Point& x = probes[p];
    if (static_cast<int>(x.size()) != set.dim()) throw ValidationError("potential: probe dimension mismatch");
    const auto it = node_index.find(x);
    double s = 0.0;
    if (it != node_index.end()) {
      const std::size_t i = it->second;
      for (std::size_t j = 0; j < set.size(); ++j) s += pk.entry(i, j) * masses[j];
    } else {
      for (std::size_t j = 0; j < set.size(); ++j) {
        if (masses[j] != 0.0) s += pk.probe_entry(x, j) * masses[j];
      }
    }
    out[p] = s;
  }
  return out;
}

std::vector<double> potential(const KernelSpec& spec, const DiscreteMeasure& mu, std::span<const Point> probes) {
  return potential(PanelKernel(spec, mu.set), mu.masses, probes);
}

std::vector<double> source_potential(const KernelSpec& spec, const Source& src, std::span<const Point> probes) {
  if (const auto* mu = std::get_if<DiscreteMeasure>(&src)) return potential(spec, *mu, probes);
  const auto& charges = std::get<std::vector<PointCharge>>(src);
  std::vector<double> out(probes.size(), 0.0);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    double s = 0.0;
    for (const auto& q : charges) s += q.mass * evaluate(spec, probes[p], q.location);
    out[p] = s;
  }
  return out;
}

std::vector<double> source_on_panels(const PanelKernel& pk, const Source& src) {
  const DiscreteSet& set = pk.set();
  const std::size_t n = set.size();
  std::vector<double> b(n, 0.0);
  if (const auto* mu = std::get_if<DiscreteMeasure>(&src)) {
    if (!mu->set || mu->set->dim() != set.dim()) throw ValidationError("source: measure dimension mismatch");
    const bool same = mu->set == pk.set_ptr() || mu->set->fingerprint() == set.fingerprint();
    if (same) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += pk.entry(i, j) * mu->masses[j];
        b[i] = s;
      }
      return b;
    }
    const PanelKernel other(pk.spec(), mu->set);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < mu->size(); ++j) {
        if (mu->masses[j] != 0.0) s += pk.cross_entry(i, other, j) * mu->masses[j];
      }
      b[i] = s;
    }
    return b;
  }
  const auto& charges = std::get<std::vector<PointCharge>>(src);
  for (const auto& q : charges) {
    if (static_cast<int>(q.location.size()) != set.dim()) throw ValidationError("source: charge dimension mismatch");
    const double tol2 = 1e-24 * std::max(1.0, detail::dot(q.location, q.location));
    for (std::size_t i = 0; i < n; ++i) {
      if (detail::distance2(q.location, set.node(i)) <= tol2) {
        throw ValidationError("source: a point charge lies on a node of the target set; U^omega must be bounded and "
                              "continuous on A");
      }
    }
    const double scale = std::sqrt(std::max(1.0, detail::dot(q.location, q.location)));
    bool near = false;
    for (std::size_t i = 0; i < n && !near; ++i) {
      near = detail::distance(q.location, set.node(i)) <= 1.000001 * set.cell_radius(i);
    }
    if (near && contains(set.spec(), q.location, 1e-9 * scale)) {
      throw ValidationError("source: a point charge lies on the target set; U^omega must be bounded and continuous on A");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& q : charges) {
      if (static_cast<int>(q.location.size()) != set.dim()) throw ValidationError("source: charge dimension mismatch");
      s += q.mass * pk.charge_entry(q.location, i);
    }
    if (!std::isfinite(s)) {
      throw ValidationError("source: a point charge lies on the target set; U^omega must be bounded and continuous on A");
    }
    b[i] = s;
  }
  return b;
}

std::pair<double, double> eigen_range(const KernelMatrix& K) {
  const auto n = static_cast<Eigen::Index>(K.size());
  if (n == 0) return {0.0, 0.0};
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
      K.entries().data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace balayage
