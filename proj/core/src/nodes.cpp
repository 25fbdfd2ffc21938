#include "qrelax/nodes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "farfield.hpp"
#include "qrelax/errors.hpp"
#include "qrelax/vorticity.hpp"
#include "winding.hpp"

namespace qrelax {

namespace {

constexpr double kMergeRadius = 1e-6;

// E = psi / chi00 with Cartesian gradient.  Polar route away from the origin;
// exact rescale of the Cartesian evaluator near it, where 1/eta is hopeless.
PsiCartesian envelope_at(const WaveFunction& wf, const CartesianWaveFunction& cwf,
                         const CartesianPoint& q, double T) {
  const PolarPoint p = to_polar(q);
  if (p.eta < 1e-8) {
    const PsiCartesian r = cwf.psi_and_grad(q, T);
    const double s = 1.0 / chi00(p.eta);
    return {r.psi * s, (r.d_x + q.x * r.psi) * s, (r.d_y + q.y * r.psi) * s};
  }
  const PsiPolar e = wf.envelope_and_grad(p, T);
  const double c = std::cos(p.phi), s = std::sin(p.phi);
  return {e.psi, c * e.d_eta - s * e.d_phi / p.eta, s * e.d_eta + c * e.d_phi / p.eta};
}

// The positive factor chi00 never winds, so the envelope carries the same
// circulation as psi and survives radii where the Gaussian underflows.
int circle_winding(const WaveFunction& wf, const CartesianPoint& c, double T, double radius) {
  const double cycles = detail::unwrap_cycles(
      [&](double t) {
        const double a = kTwoPi * t;
        return wf.envelope(to_polar({c.x + radius * std::cos(a), c.y + radius * std::sin(a)}), T);
      },
      32);
  const int n = static_cast<int>(std::lround(cycles));
  if (std::abs(cycles - n) > 1e-3)
    throw AmbiguousWindingError("node circle winding failed integer snap");
  return n;
}

// All roots of sum_i c[i] w^i by the Aberth--Ehrlich iteration.  Seeds for a
// Newton polish, so loose convergence is fine.
std::vector<Complex> aberth_roots(const std::vector<Complex>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  double rad = 0.0;  // Cauchy-style enclosing radius
  for (int i = 0; i < n; ++i)
    rad = std::max(rad, std::pow(std::abs(c[i] / c[n]), 1.0 / (n - i)));
  rad = std::max(2.0 * rad, 1e-12);
  std::vector<Complex> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::polar(rad, kTwoPi * (i + 0.5) / n + 0.4);
  for (int iter = 0; iter < 120; ++iter) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex p(c[n]), dp(0.0, 0.0);
      for (int d = n - 1; d >= 0; --d) {
        dp = dp * w[i] + p;
        p = p * w[i] + c[d];
      }
      if (std::abs(dp) < 1e-300) {  // stationary start: nudge off the symmetry
        w[i] *= Complex(1.0, 1e-6);
        moved = rad;
        continue;
      }
      const Complex ratio = p / dp;
      Complex sum(0.0, 0.0);
      for (int j = 0; j < n; ++j)
        if (j != i && std::abs(w[i] - w[j]) > 1e-300) sum += 1.0 / (w[i] - w[j]);
      const Complex denom = 1.0 - ratio * sum;
      const Complex shift = std::abs(denom) < 1e-300 ? ratio : ratio / denom;
      w[i] -= shift;
      moved = std::max(moved, std::abs(shift));
    }
    if (moved < 1e-13 * (1.0 + rad)) break;
  }
  return w;
}

// Sampled per-shell envelope tables on a square grid: E(point, T) =
// sum_s e^{-isT} E_s(point), one short complex dot product per point per
// frame.  The grid covers the bulk disk; beyond it, the restriction of E to
// a circle is a trigonometric polynomial of degree <= m whose roots near the
// unit modulus flag crossings, so a log-spaced ladder of circles out to the
// certified exclusion radius covers the far annulus.  Winding-sum closure
// against the vorticity theorem validates the combined set.
class NodeFinder {
 public:
  NodeFinder(const AngularState& state, SearchRegion region, int seed_density, double tol)
      : m_(state.m),
        density_(std::max(seed_density, 8)),
        tol_(tol),
        wf_(state),
        cwf_(angular_to_cartesian(state)) {
    double r_excl = 0.0;
    try {
      r_excl = detail::certified_exclusion_radius(detail::far_field(state), 1.0);
    } catch (const Error&) {
      // zero amplitude, or a top-shell zero pinned on the unit circle: no
      // finite certificate, search a wide disk best-effort
    }
    if (region.eta_max > 0.0) {
      r_report_ = region.eta_max;
      covers_all_ = r_excl > 0.0 && region.eta_max >= r_excl;
    } else {
      r_report_ = r_excl > 0.0 ? r_excl : std::max(m_ + 6.0, 100.0);
      covers_all_ = r_excl > 0.0;
    }
    r_grid_ = std::min({m_ + 6.0, 30.0, r_report_});
    far_hi_ = r_excl > 0.0 ? std::min(r_report_, r_excl) : r_report_;
    if (covers_all_) {
      try {
        n_theorem_ = total_vorticity_theorem(state).n;
      } catch (const Error&) {
        n_theorem_.reset();
      }
    }
    shell_wf_.resize(m_ + 1);
    for (int s = 0; s <= m_; ++s) {
      AngularState part(m_);
      bool any = false;
      for (int nd = 0; nd <= s; ++nd) {
        const Complex c = state.at(nd, s - nd);
        if (c != Complex(0.0, 0.0)) any = true;
        part.at(nd, s - nd) = c;
      }
      if (any) shell_wf_[s].emplace(part);
    }
    build_grid(density_);
    build_rings();
  }

  std::vector<Node> find(double T, NodeSearchStats* stats) {
    NodeSearchStats local;
    std::vector<Node> nodes = locate(T, &local);
    for (int round = 0; round < 2 && !closed(nodes); ++round) {
      ++local.densify_rounds;
      build_grid(density_ << (round + 1));
      NodeSearchStats retry;
      retry.densify_rounds = local.densify_rounds;
      nodes = locate(T, &retry);
      local = retry;
    }
    local.closure_checked = covers_all_ && n_theorem_.has_value();
    local.closure_passed = closed(nodes);
    if (stats) *stats = local;
    return nodes;
  }

 private:
  CartesianPoint grid_point(int i, int j) const {
    return {-r_grid_ + j * cell_, -r_grid_ + i * cell_};
  }

  Complex& ring_coef(std::size_t j, int s, int k) {
    return ring_[(j * (m_ + 1) + s) * (2 * m_ + 1) + (k + m_)];
  }

  // Shell-split angular coefficients of the envelope on each ladder circle:
  // E(r e^{i phi}, T) = sum_s e^{-isT} sum_k ring[r][s][k] e^{ik phi} with
  // |k| <= m, tabulated once and twisted per frame.
  void build_rings() {
    ladder_.clear();
    ring_.clear();
    if (!(far_hi_ > 1.01 * r_grid_)) return;
    const double lo = std::max(0.9 * r_grid_, 1.0);
    const int K = std::clamp(static_cast<int>(std::ceil(10.0 * std::log(far_hi_ / lo))), 24, 400);
    const int N = 8 * (m_ + 1);  // > 2m samples: the angular DFT is exact
    ladder_.resize(K + 1);
    ring_.assign(ladder_.size() * (m_ + 1) * (2 * m_ + 1), Complex(0.0, 0.0));
    std::vector<Complex> vals(N);
    for (std::size_t j = 0; j < ladder_.size(); ++j) {
      const double r = lo * std::pow(far_hi_ / lo, static_cast<double>(j) / K);
      ladder_[j] = r;
      for (int s = 0; s <= m_; ++s) {
        if (!shell_wf_[s]) continue;
        for (int a = 0; a < N; ++a) vals[a] = shell_wf_[s]->envelope({r, kTwoPi * a / N}, 0.0);
        for (int k = -s; k <= s; ++k) {
          Complex acc(0.0, 0.0);
          for (int a = 0; a < N; ++a) acc += vals[a] * std::polar(1.0, -k * (kTwoPi * a / N));
          ring_coef(j, s, k) = acc / static_cast<double>(N);
        }
      }
    }
  }

  void build_grid(int n) {
    grid_n_ = n + 1;  // points per side
    cell_ = 2.0 * r_grid_ / n;
    const std::size_t pts = static_cast<std::size_t>(grid_n_) * grid_n_;
    shells_.assign(pts * (m_ + 1), Complex(0.0, 0.0));
    values_.assign(pts, Complex(0.0, 0.0));
    weight_.assign(pts, 0.0);
    for (int i = 0; i < grid_n_; ++i)
      for (int j = 0; j < grid_n_; ++j) {
        const CartesianPoint q = grid_point(i, j);
        weight_[static_cast<std::size_t>(i) * grid_n_ + j] =
            std::pow(1.0 + std::hypot(q.x, q.y), -m_);
      }

    // envelope at T = 0, split by shell: evaluate each pure-shell restriction
    for (int s = 0; s <= m_; ++s) {
      if (!shell_wf_[s]) continue;
      for (int i = 0; i < grid_n_; ++i)
        for (int j = 0; j < grid_n_; ++j)
          shells_[(static_cast<std::size_t>(i) * grid_n_ + j) * (m_ + 1) + s] =
              shell_wf_[s]->envelope(to_polar(grid_point(i, j)), 0.0);
    }
  }

  void fill_frame(double T) {
    std::array<Complex, kMaxShell + 1> eiT;
    eiT[0] = Complex(1.0, 0.0);
    const Complex w = std::polar(1.0, -T);
    for (int s = 1; s <= m_; ++s) eiT[s] = eiT[s - 1] * w;
    scale_ = 0.0;
    for (std::size_t p = 0; p < values_.size(); ++p) {
      Complex acc(0.0, 0.0);
      for (int s = 0; s <= m_; ++s) acc += eiT[s] * shells_[p * (m_ + 1) + s];
      values_[p] = acc;
      scale_ = std::max(scale_, std::abs(acc) * weight_[p]);
    }
  }

  struct Root {
    CartesianPoint q;
    double env_residual;  // |E| at the converged point
  };

  // |E| target that tracks the envelope's own growth, holding far roots to
  // the same relative standard as central ones
  double local_tol(const CartesianPoint& q) const {
    return tol_ * scale_ * std::pow(1.0 + std::hypot(q.x, q.y), m_);
  }

  bool newton(CartesianPoint q, double T, double max_move, NodeSearchStats* stats,
              Root* out) const {
    Root best{q, std::numeric_limits<double>::infinity()};
    bool converged = false;
    int polish = 0;
    for (int iter = 0; iter < 80; ++iter) {
      const PsiCartesian r = envelope_at(wf_, cwf_, q, T);
      const double res = std::abs(r.psi);
      if (converged && res >= 0.5 * best.env_residual) break;  // roundoff floor
      if (res < best.env_residual) best = {q, res};
      if (res <= local_tol(q)) {
        // keep polishing toward the roundoff floor while it still pays
        converged = true;
        if (++polish > 6) break;
      }
      const double det = std::imag(std::conj(r.d_x) * r.d_y);
      if (std::abs(det) < 1e-300) {
        if (converged) break;
        if (stats) ++stats->singular_seeds;
        return false;
      }
      double dx = (-std::real(r.psi) * std::imag(r.d_y) + std::imag(r.psi) * std::real(r.d_y)) / det;
      double dy = (-std::imag(r.psi) * std::real(r.d_x) + std::real(r.psi) * std::imag(r.d_x)) / det;
      const double move = std::hypot(dx, dy);
      if (move > max_move) {
        dx *= max_move / move;
        dy *= max_move / move;
      }
      q.x += dx;
      q.y += dy;
      if (std::hypot(q.x, q.y) > 1.05 * r_report_ + 2.0 * cell_) {  // left the region
        if (converged) break;
        return false;
      }
    }
    if (converged) {
      *out = best;
      return true;
    }
    if (stats) ++stats->newton_failures;
    return false;
  }

  std::vector<Node> locate(double T, NodeSearchStats* stats) {
    fill_frame(T);
    if (stats) stats->amplitude_scale = scale_;
    if (scale_ <= 0.0) return {};  // no amplitude anywhere

    const auto value = [&](int i, int j) -> const Complex& {
      return values_[static_cast<std::size_t>(i) * grid_n_ + j];
    };
    const auto normed = [&](int i, int j) {
      return std::abs(value(i, j)) * weight_[static_cast<std::size_t>(i) * grid_n_ + j];
    };

    std::vector<CartesianPoint> seeds;
    for (int i = 0; i + 1 < grid_n_; ++i) {
      for (int j = 0; j + 1 < grid_n_; ++j) {
        const Complex v00 = value(i, j), v01 = value(i, j + 1), v10 = value(i + 1, j),
                      v11 = value(i + 1, j + 1);
        const bool re_mixed = !((v00.real() > 0) == (v01.real() > 0) &&
                                (v00.real() > 0) == (v10.real() > 0) &&
                                (v00.real() > 0) == (v11.real() > 0));
        const bool im_mixed = !((v00.imag() > 0) == (v01.imag() > 0) &&
                                (v00.imag() > 0) == (v10.imag() > 0) &&
                                (v00.imag() > 0) == (v11.imag() > 0));
        if (re_mixed && im_mixed) {
          const CartesianPoint p = grid_point(i, j);
          seeds.push_back({p.x + 0.5 * cell_, p.y + 0.5 * cell_});
          if (stats) ++stats->candidate_cells;
        }
      }
    }
    // normalized-|E| dips that never cross zero on the coarse lattice
    const double dip = 0.08 * scale_;
    for (int i = 1; i + 1 < grid_n_; ++i) {
      for (int j = 1; j + 1 < grid_n_; ++j) {
        const double v = normed(i, j);
        if (v >= dip) continue;
        bool is_min = true;
        for (int a = -1; a <= 1 && is_min; ++a)
          for (int b = -1; b <= 1; ++b)
            if ((a || b) && normed(i + a, j + b) < v) {
              is_min = false;
              break;
            }
        if (is_min) seeds.push_back(grid_point(i, j));
      }
    }

    std::vector<Root> roots;
    const auto absorb = [&](const Root& r) {
      if (std::hypot(r.q.x, r.q.y) > r_report_) return;
      for (Root& have : roots) {
        if (std::hypot(have.q.x - r.q.x, have.q.y - r.q.y) < kMergeRadius) {
          if (r.env_residual < have.env_residual) have = r;
          if (stats) ++stats->merged;
          return;
        }
      }
      roots.push_back(r);
    };

    Root root;
    for (const CartesianPoint& s : seeds)
      if (newton(s, T, cell_, stats, &root)) absorb(root);

    // far sweep: roots of the per-circle trigonometric polynomial that sit
    // near the unit modulus mark zero crossings of E close to that circle
    if (!ladder_.empty()) {
      std::array<Complex, kMaxShell + 1> eiT;
      eiT[0] = Complex(1.0, 0.0);
      const Complex tw = std::polar(1.0, -T);
      for (int s = 1; s <= m_; ++s) eiT[s] = eiT[s - 1] * tw;
      std::vector<Complex> c(2 * m_ + 1);
      for (std::size_t j = 0; j < ladder_.size(); ++j) {
        std::fill(c.begin(), c.end(), Complex(0.0, 0.0));
        for (int s = 0; s <= m_; ++s) {
          if (!shell_wf_[s]) continue;
          for (int k = -s; k <= s; ++k) c[k + m_] += eiT[s] * ring_coef(j, s, k);
        }
        double top = 0.0;
        for (const Complex& v : c) top = std::max(top, std::abs(v));
        if (top <= 0.0) continue;
        int hi = 2 * m_, lo = 0;
        while (hi > 0 && std::abs(c[hi]) < 1e-13 * top) --hi;
        while (lo < hi && std::abs(c[lo]) < 1e-13 * top) ++lo;  // w = 0 factors
        if (hi <= lo) continue;
        const std::vector<Complex> poly(c.begin() + lo, c.begin() + hi + 1);
        for (const Complex& w : aberth_roots(poly)) {
          const double a = std::abs(w);
          if (a < 0.70 || a > 1.42) continue;  // crossing is not near this circle
          const double r = ladder_[j] * std::clamp(a, 0.8, 1.25);
          const CartesianPoint s = {r * std::cos(std::arg(w)), r * std::sin(std::arg(w))};
          if (newton(s, T, 0.45 * ladder_[j] + cell_, stats, &root)) absorb(root);
        }
      }
    }

    // probe around each root for a missed close partner
    const std::size_t primary = roots.size();
    for (std::size_t r = 0; r < primary; ++r) {
      for (int k = 0; k < 6; ++k) {
        const double a = kTwoPi * (k + 0.5) / 6.0;
        const CartesianPoint s = {roots[r].q.x + 0.45 * cell_ * std::cos(a),
                                  roots[r].q.y + 0.45 * cell_ * std::sin(a)};
        if (newton(s, T, cell_, stats, &root)) absorb(root);
      }
    }

    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
      return a.q.x != b.q.x ? a.q.x < b.q.x : a.q.y < b.q.y;
    });

    std::vector<Node> nodes;
    nodes.reserve(roots.size());
    for (std::size_t a = 0; a < roots.size(); ++a) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < roots.size(); ++b)
        if (b != a)
          nearest = std::min(nearest, std::hypot(roots[a].q.x - roots[b].q.x,
                                                 roots[a].q.y - roots[b].q.y));
      const double wr = std::min(1e-3, 0.5 * nearest);
      const double eta = std::hypot(roots[a].q.x, roots[a].q.y);
      nodes.push_back({roots[a].q, T, circle_winding(wf_, roots[a].q, T, wr),
                       roots[a].env_residual * chi00(eta)});
    }
    return nodes;
  }

  bool closed(const std::vector<Node>& nodes) const {
    if (static_cast<int>(nodes.size()) > m_ * m_) return false;
    if (!covers_all_ || !n_theorem_) return true;
    int sum = 0;
    bool simple = true;
    for (const Node& n : nodes) {
      sum += n.winding;
      simple = simple && std::abs(n.winding) == 1;
    }
    if (sum != *n_theorem_) return false;
    // the count >= |n| floor assumes simple nodes; finely tuned states stack
    // their circulation on fewer points
    return !simple || static_cast<int>(nodes.size()) >= std::abs(*n_theorem_);
  }

  int m_;
  int density_;
  double tol_;
  WaveFunction wf_;
  CartesianWaveFunction cwf_;
  double r_report_ = 0.0;  // report nodes out to this radius
  double r_grid_ = 0.0;    // seed-grid half-width
  double far_hi_ = 0.0;    // outer rim of the circle ladder
  bool covers_all_ = false;
  std::optional<int> n_theorem_;
  std::vector<std::optional<WaveFunction>> shell_wf_;  // pure-shell restrictions

  int grid_n_ = 0;
  double cell_ = 0.0;
  double scale_ = 0.0;
  std::vector<Complex> shells_;  // [point][shell]
  std::vector<Complex> values_;  // per point, current frame
  std::vector<double> weight_;   // (1 + eta)^-m per point
  std::vector<double> ladder_;   // far-annulus circle radii, log spaced
  std::vector<Complex> ring_;    // [circle][shell][m + k] angular coefficients
};

}  // namespace

std::vector<Node> find_nodes(const AngularState& state, double T, SearchRegion region,
                             int seed_density, double tol, NodeSearchStats* stats) {
  NodeFinder finder(state, region, seed_density, tol);
  return finder.find(T, stats);
}

int node_winding(const AngularState& state, const CartesianPoint& node, double T, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("winding radius must be > 0");
  return circle_winding(WaveFunction(state), node, T, radius);
}

int node_winding_sign_linearized(const AngularState& state, const CartesianPoint& node, double T) {
  // chi00 > 0 scales both derivatives of psi equally, so the envelope carries
  // the orientation of the linearization even where psi itself underflows
  const WaveFunction wf(state);
  const CartesianWaveFunction cwf(angular_to_cartesian(state));
  const PsiCartesian r = envelope_at(wf, cwf, node, T);
  const double ax = std::abs(r.d_x), ay = std::abs(r.d_y);
  const double hi = std::max(ax, ay);
  if (hi < 1e-250)
    throw FineTunedError("node is not transversal: spatial derivatives vanish");
  if (std::min(ax, ay) <= 1e-10 * hi)
    throw FineTunedError("node linearization degenerate: derivative magnitudes differ by > 10 decades");
  const double s = std::imag(std::conj(r.d_x) * r.d_y);  // |ax||ay| sin(Arg ay - Arg ax)
  if (std::abs(s) <= 1e-12 * ax * ay)
    throw FineTunedError("node linearization degenerate: collinear derivatives");
  return s > 0.0 ? 1 : -1;
}

CartesianPoint node_path_m3(const AngularState& state, double T) {
  if (state.m != 1)
    throw std::invalid_argument("node_path_m3 requires an m = 1 (three-state) superposition");
  const CartesianState cs = angular_to_cartesian(state);
  const Complex d10 = cs.at(1, 0), d01 = cs.at(0, 1);
  // sqrt(2) (d10 Qx + d01 Qy) = -d00 e^{iT}
  const double det = std::imag(std::conj(d10) * d01);
  const double scale = std::max(std::abs(d10), std::abs(d01));
  if (std::abs(det) <= 1e-9 * scale * scale)
    throw FineTunedError("excited amplitudes are collinear; node path is not a closed orbit");
  const Complex rhs = -cs.at(0, 0) * std::polar(1.0, T) / std::sqrt(2.0);
  return {(rhs.real() * d01.imag() - rhs.imag() * d01.real()) / det,
          (rhs.imag() * d10.real() - rhs.real() * d10.imag()) / det};
}

EllipseM3 node_ellipse_m3(const AngularState& state) {
  if (state.m != 1)
    throw std::invalid_argument("node_ellipse_m3 requires an m = 1 (three-state) superposition");
  const double c00 = std::abs(state.at(0, 0));
  const double c10 = std::abs(state.at(1, 0));
  const double c01 = std::abs(state.at(0, 1));

  EllipseM3 out;
  if (std::abs(c10 - c01) < 1e-12) {
    out.kind = EllipseKind::Degenerate;
    return out;
  }
  if (std::min(c10, c01) < 1e-12) {
    out.kind = EllipseKind::Circle;
    const double r = c00 / std::max(c10, c01);
    out.semi_major = out.semi_minor = r;
    out.orientation = 0.0;
    out.area = kPi * r * r;
    return out;
  }
  out.kind = EllipseKind::Ellipse;
  out.semi_minor = c00 / (c10 + c01);
  out.semi_major = c00 / std::abs(c10 - c01);
  out.orientation = wrap_axis(0.5 * (std::arg(state.at(0, 1)) - std::arg(state.at(1, 0)) + kPi));
  out.area = kPi * out.semi_minor * out.semi_major;
  return out;
}

namespace {

struct Frame {
  double T;
  std::vector<Node> nodes;
};

struct Live {
  int id;
  int winding;
  CartesianPoint pos;
};

double dist(const CartesianPoint& a, const CartesianPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double min_separation(const std::vector<Node>& nodes) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      sep = std::min(sep, dist(nodes[a].position, nodes[b].position));
  return sep;
}

}  // namespace

std::vector<NodeTrack> track_nodes(const AngularState& state, double T0, double T1, double dt,
                                   SearchRegion region, int seed_density) {
  if (!(dt > 0.0)) throw std::invalid_argument("frame step dt must be > 0");
  if (!(T1 > T0)) throw std::invalid_argument("tracking requires T1 > T0");

  NodeFinder finder(state, region, seed_density, 1e-12);
  std::vector<NodeTrack> tracks;
  std::vector<Live> live;

  // a frame that fails winding closure is wrong, not ambiguous: bisecting
  // cannot repair it, so fail loudly instead of associating against it
  const auto checked_find = [&](double T) {
    NodeSearchStats st;
    std::vector<Node> nodes = finder.find(T, &st);
    if (st.closure_checked && !st.closure_passed)
      throw TrackingAmbiguityError("node snapshot failed winding-sum closure at T = " +
                                   std::to_string(T));
    return nodes;
  };

  const auto start_track = [&](const Node& n, double T,
                               std::optional<NodeEvent> birth) -> int {
    const int id = static_cast<int>(tracks.size());
    NodeTrack t;
    t.id = id;
    t.winding = n.winding;
    t.birth = birth;
    t.samples.push_back({T, n.position});
    tracks.push_back(std::move(t));
    live.push_back({id, n.winding, n.position});
    return id;
  };

  {
    const std::vector<Node> first = checked_find(T0);
    for (const Node& n : first) start_track(n, T0, std::nullopt);
  }

  // Associate the live set with the nodes of frame T; on ambiguity the caller
  // splits the interval.  Updates live/tracks only when it returns true.
  const auto associate = [&](double T, const std::vector<Node>& nodes) -> bool {
    const std::size_t n_live = live.size(), n_new = nodes.size();
    std::vector<int> pick_live(n_live, -1), pick_new(n_new, -1);

    struct Cand {
      double d;
      std::size_t i, j;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < n_live; ++i)
      for (std::size_t j = 0; j < n_new; ++j)
        cands.push_back({dist(live[i].pos, nodes[j].position), i, j});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d < b.d; });

    const double sep = std::min(min_separation(nodes), 1.0);
    const double gate = 0.45 * sep;
    for (const Cand& c : cands) {
      if (pick_live[c.i] >= 0 || pick_new[c.j] >= 0) continue;
      if (c.d > gate) break;  // remaining candidates are ambiguous or unrelated
      if (live[c.i].winding != nodes[c.j].winding) return false;  // mismatch: refine
      pick_live[c.i] = static_cast<int>(c.j);
      pick_new[c.j] = static_cast<int>(c.i);
    }

    // unmatched live tracks must die in opposite-winding pairs
    std::vector<std::size_t> dying;
    for (std::size_t i = 0; i < n_live; ++i)
      if (pick_live[i] < 0) dying.push_back(i);
    std::vector<std::pair<std::size_t, std::size_t>> deaths;
    {
      std::vector<bool> used(dying.size(), false);
      for (std::size_t a = 0; a < dying.size(); ++a) {
        if (used[a]) continue;
        int best = -1;
        double best_d = 0.5;  // annihilating partners must be close by now
        for (std::size_t b = a + 1; b < dying.size(); ++b) {
          if (used[b] || live[dying[a]].winding + live[dying[b]].winding != 0) continue;
          const double d = dist(live[dying[a]].pos, live[dying[b]].pos);
          if (d < best_d) {
            best_d = d;
            best = static_cast<int>(b);
          }
        }
        if (best < 0) return false;  // orphan disappearance: refine
        used[a] = used[best] = true;
        deaths.push_back({dying[a], dying[best]});
      }
    }

    // unmatched new nodes must appear in opposite-winding pairs
    std::vector<std::size_t> born;
    for (std::size_t j = 0; j < n_new; ++j)
      if (pick_new[j] < 0) born.push_back(j);
    std::vector<std::pair<std::size_t, std::size_t>> births;
    {
      std::vector<bool> used(born.size(), false);
      for (std::size_t a = 0; a < born.size(); ++a) {
        if (used[a]) continue;
        int best = -1;
        double best_d = 0.5;
        for (std::size_t b = a + 1; b < born.size(); ++b) {
          if (used[b] || nodes[born[a]].winding + nodes[born[b]].winding != 0) continue;
          const double d = dist(nodes[born[a]].position, nodes[born[b]].position);
          if (d < best_d) {
            best_d = d;
            best = static_cast<int>(b);
          }
        }
        if (best < 0) return false;  // orphan appearance: refine
        used[a] = used[best] = true;
        births.push_back({born[a], born[best]});
      }
    }

    // commit
    for (std::size_t i = 0; i < n_live; ++i) {
      if (pick_live[i] < 0) continue;
      const Node& n = nodes[pick_live[i]];
      live[i].pos = n.position;
      tracks[live[i].id].samples.push_back({T, n.position});
    }
    std::vector<std::size_t> dead;
    for (const auto& [a, b] : deaths) {
      tracks[live[a].id].death = NodeEvent{T, live[b].id};
      tracks[live[b].id].death = NodeEvent{T, live[a].id};
      dead.push_back(a);
      dead.push_back(b);
    }
    std::sort(dead.begin(), dead.end(), std::greater<>());
    for (std::size_t idx : dead) live.erase(live.begin() + idx);
    for (const auto& [a, b] : births) {
      const int ida = start_track(nodes[a], T, NodeEvent{T, -1});
      const int idb = start_track(nodes[b], T, NodeEvent{T, ida});
      tracks[ida].birth = NodeEvent{T, idb};
    }
    return true;
  };

  // advance from T_prev to T_target, bisecting on ambiguity
  const std::function<void(double, double, int)> advance = [&](double T_prev, double T_target,
                                                               int depth) {
    const std::vector<Node> nodes = checked_find(T_target);
    if (associate(T_target, nodes)) return;
    if (depth >= 24)
      throw TrackingAmbiguityError("node association unresolved at minimal frame spacing");
    const double mid = 0.5 * (T_prev + T_target);
    advance(T_prev, mid, depth + 1);
    advance(mid, T_target, depth + 1);
  };

  double T = T0;
  while (T < T1) {
    const double next = std::min(T + dt, T1);
    advance(T, next, 0);
    T = next;
  }
  return tracks;
}

}  // namespace qrelax
