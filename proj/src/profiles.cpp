#include "wsym/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "wsym/measure.hpp"
#include "wsym/rearrangement.hpp"
#include "wsym/sets.hpp"

namespace wsym {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kTableNodes = 8192;

double normal_tail(double r) { return 0.5 * boost::math::erfc(r / std::numbers::sqrt2); }

double normal_tail_inverse(double p) {
  if (p <= 0.0) return kInfinity;
  if (p >= 1.0) return -kInfinity;
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_density(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi); }

double unit_ball_volume(std::size_t n) {
  const double d = static_cast<double>(n);
  return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double ball_shape(double t) { return 1.0 / (1.0 + t * t); }
double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Half-space family with M(t) = Z * tail(s t).
void set_gaussian_halfspace(IsoperimetricProfile& p, double Z, double s) {
  p.family = ProfileFamily::HalfSpaces;
  p.total_mass = Z;
  p.cumulative = [Z, s](double t) { return Z * normal_tail(s * t); };
  p.cumulative_inverse = [Z, s](double m) { return normal_tail_inverse(m / Z) / s; };
  p.boundary_density = [Z, s](double t) { return Z * s * normal_density(s * t); };
  p.shape = logistic;
}

Point unit_vector(Point theta, std::size_t dim) {
  if (theta.size() != dim) throw InvalidArgument("theta has wrong dimension");
  const double n = norm(theta);
  if (!(std::abs(n - 1.0) <= 1e-9)) throw InvalidArgument("theta must be a unit vector");
  for (double& v : theta) v /= n;
  return theta;
}

void fix_sign(Point& v) {
  for (double c : v) {
    if (std::abs(c) > 1e-12) {
      if (c < 0) {
        for (double& x : v) x = -x;
      }
      return;
    }
  }
}

}  // namespace

double IsoperimetricProfile::param(std::span<const double> x) const {
  if (family == ProfileFamily::Balls) return norm(x);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * theta[k];
  return s;
}

double IsoperimetricProfile::q(double m) const { return boundary_density(M_inverse(m)); }

std::pair<double, double> IsoperimetricProfile::param_range() const {
  if (family == ProfileFamily::Balls) return {0.0, kInfinity};
  return {-kInfinity, kInfinity};
}

std::vector<std::pair<double, double>> IsoperimetricProfile::table(double t0, double t1,
                                                                   std::size_t nodes) const {
  if (nodes < 2 || !(t1 > t0)) throw InvalidArgument("table needs t0 < t1 and at least 2 nodes");
  std::vector<std::pair<double, double>> out;
  out.reserve(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double t = t0 + (t1 - t0) * static_cast<double>(j) / static_cast<double>(nodes - 1);
    out.emplace_back(t, M(t));
  }
  return out;
}

MonotoneTable::MonotoneTable(std::vector<double> t, std::vector<double> m)
    : t_(std::move(t)), m_(std::move(m)) {
  if (t_.size() < 2 || t_.size() != m_.size()) throw InvalidArgument("table needs matching nodes");
  for (std::size_t k = 1; k < t_.size(); ++k) {
    if (!(t_[k] > t_[k - 1]) || m_[k] < m_[k - 1]) throw InvalidArgument("table is not monotone");
  }
}

double MonotoneTable::operator()(double t) const {
  const std::size_t n = t_.size();
  std::size_t k;
  if (t <= t_.front()) k = 0;
  else if (t >= t_.back()) k = n - 2;
  else k = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
  const double a = (t - t_[k]) / (t_[k + 1] - t_[k]);
  return m_[k] + a * (m_[k + 1] - m_[k]);
}

double MonotoneTable::inverse(double m) const {
  const std::size_t n = m_.size();
  std::size_t lo = 0, hi = n - 1;
  if (m <= m_.front()) {
    hi = 1;
  } else if (m >= m_.back()) {
    lo = n - 2;
    hi = n - 1;
  } else {
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (m_[mid] <= m) lo = mid;
      else hi = mid;
    }
  }
  const double dm = m_[hi] - m_[lo];
  if (dm <= 0.0) return t_[lo];
  return t_[lo] + (m - m_[lo]) / dm * (t_[hi] - t_[lo]);
}

IsoperimetricProfile euclidean_ball_profile(std::size_t dim) {
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  IsoperimetricProfile p;
  p.id = "euclidean";
  p.family = ProfileFamily::Balls;
  p.domain = DomainSpec::full_space(dim);
  p.potential = Potential::zero();
  p.default_box = Box::cube(dim, -1.0, 1.0);
  p.total_mass = kInfinity;
  const double w = unit_ball_volume(dim);
  const double n = static_cast<double>(dim);
  p.cumulative = [w, n](double r) { return r <= 0.0 ? 0.0 : w * std::pow(r, n); };
  p.cumulative_inverse = [w, n](double m) { return m <= 0.0 ? 0.0 : std::pow(m / w, 1.0 / n); };
  p.boundary_density = [w, n](double r) { return n == 1.0 ? 2.0 : n * w * std::pow(std::max(r, 0.0), n - 1.0); };
  p.shape = ball_shape;
  p.notes.push_back("infinite mass: explicit box required");
  return p;
}

IsoperimetricProfile radial_logconvex_profile(std::function<double(double)> w, std::size_t dim,
                                             double r_max, std::string description) {
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  if (!(r_max > 0.0)) throw InvalidArgument("radial table needs r_max > 0");
  // convexity of w by second differences
  const std::size_t checks = 2048;
  const double d = r_max / static_cast<double>(checks);
  for (std::size_t j = 1; j < checks; ++j) {
    const double s = d * static_cast<double>(j);
    const double a = w(s - d), b = w(s), c = w(s + d);
    const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
    if (a - 2.0 * b + c < -1e-9 * scale) throw InvalidArgument("radial log-convexity violated");
  }
  const double n = static_cast<double>(dim);
  const double surf = n * unit_ball_volume(dim);
  auto integrand = [w, n, surf](double s) { return surf * std::pow(s, n - 1.0) * std::exp(w(s)); };
  std::vector<double> t(kTableNodes + 1), m(kTableNodes + 1, 0.0);
  for (std::size_t j = 0; j <= kTableNodes; ++j) {
    t[j] = r_max * static_cast<double>(j) / static_cast<double>(kTableNodes);
  }
  for (std::size_t j = 1; j <= kTableNodes; ++j) {
    m[j] = m[j - 1] + boost::math::quadrature::gauss<double, 10>::integrate(integrand, t[j - 1], t[j]);
  }
  auto table = std::make_shared<MonotoneTable>(std::move(t), std::move(m));

  IsoperimetricProfile p;
  p.id = "radial";
  p.family = ProfileFamily::Balls;
  p.domain = DomainSpec::full_space(dim);
  p.potential = Potential{
      [w](std::span<const double> x) { return w(norm(x)); },
      [w](std::span<const double> x, std::span<double> g) {
        const double r = norm(x);
        const double e = 1e-6 * std::max(1.0, r);
        const double dw = r > e ? (w(r + e) - w(r - e)) / (2.0 * e) : 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) g[k] = r > 0.0 ? dw * x[k] / r : 0.0;
      },
      std::move(description)};
  p.default_box = Box::cube(dim, -1.0, 1.0);
  p.total_mass = kInfinity;
  p.closed_form = false;
  p.cumulative = [table](double r) { return (*table)(std::max(r, 0.0)); };
  p.cumulative_inverse = [table](double m) { return table->inverse(std::max(m, 0.0)); };
  p.boundary_density = [w, n, surf](double r) {
    if (n == 1.0) return 2.0 * std::exp(w(r));
    return surf * std::pow(std::max(r, 0.0), n - 1.0) * std::exp(w(r));
  };
  p.shape = ball_shape;
  p.notes.push_back("M tabulated on " + std::to_string(kTableNodes + 1) + " nodes");
  return p;
}

IsoperimetricProfile radial_logconvex_profile(const Potential& radial, std::size_t dim,
                                             const WeightedGrid& grid) {
  if (grid.dim() != dim) throw InvalidArgument("profile/grid mismatch");
  auto eval = radial.evaluate;
  auto w = [eval, dim](double s) {
    Point x(dim, 0.0);
    x[0] = std::abs(s);
    return eval(x);
  };
  double r2 = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double a = std::max(std::abs(grid.box().lo[k]), std::abs(grid.box().hi[k]));
    r2 += a * a;
  }
  IsoperimetricProfile p = radial_logconvex_profile(w, dim, 1.01 * std::sqrt(r2), radial.description);
  p.potential = radial;
  p.default_box = grid.box();
  return p;
}

IsoperimetricProfile cone_monomial_profile(const std::vector<double>& alphas, std::size_t dim) {
  const std::size_t k = alphas.size();
  if (k < 1 || k > dim) throw InvalidArgument("cone monomial needs 1 <= k <= dim");
  double alpha = 0.0;
  for (double a : alphas) {
    if (!(a > 0.0)) throw InvalidArgument("cone monomial exponents must be positive");
    alpha += a;
  }
  const double n = static_cast<double>(dim);
  const double a_tot = n + alpha;
  // integral of prod x_i^alpha_i over the unit sphere inside the cone
  double log_s = std::log(2.0) - static_cast<double>(k) * std::log(2.0) - std::lgamma(0.5 * a_tot);
  for (std::size_t i = 0; i < dim; ++i) {
    const double ai = i < k ? alphas[i] : 0.0;
    log_s += std::lgamma(0.5 * (ai + 1.0));
  }
  const double C = std::exp(log_s) / a_tot;

  IsoperimetricProfile p;
  p.id = "cone";
  p.family = ProfileFamily::Balls;
  p.domain = DomainSpec::orthant(dim, k);
  p.potential = Potential{
      [alphas](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t i = 0; i < alphas.size(); ++i) v += alphas[i] * std::log(x[i]);
        return v;
      },
      [alphas](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < alphas.size(); ++i) g[i] = alphas[i] / x[i];
      },
      "W=sum alpha_i log x_i"};
  Box box = Box::cube(dim, -1.0, 1.0);
  for (std::size_t i = 0; i < k; ++i) box.lo[i] = 0.0;
  p.default_box = box;
  p.total_mass = kInfinity;
  p.cumulative = [C, a_tot](double r) { return r <= 0.0 ? 0.0 : C * std::pow(r, a_tot); };
  p.cumulative_inverse = [C, a_tot](double m) { return m <= 0.0 ? 0.0 : std::pow(m / C, 1.0 / a_tot); };
  p.boundary_density = [C, a_tot](double r) { return a_tot * C * std::pow(std::max(r, 0.0), a_tot - 1.0); };
  p.shape = ball_shape;
  std::ostringstream os;
  os.precision(17);
  os << "C=" << C << " exponent=" << a_tot;
  p.notes.push_back(os.str());
  return p;
}

IsoperimetricProfile gaussian_halfspace_profile(const Point& theta, std::size_t dim) {
  IsoperimetricProfile p;
  p.id = "gaussian";
  p.theta = unit_vector(theta, dim);
  p.domain = DomainSpec::full_space(dim);
  p.potential = Potential::standard_gaussian();
  set_gaussian_halfspace(p, std::pow(2.0 * kPi, 0.5 * static_cast<double>(dim)), 1.0);
  return p;
}

IsoperimetricProfile anisotropic_gaussian_profile(const std::vector<double>& A, std::size_t dim) {
  if (dim < 1 || A.size() != dim * dim) throw InvalidArgument("matrix must be dim x dim");
  Eigen::MatrixXd m(dim, dim);
  double scale = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      m(i, j) = A[i * dim + j];
      scale = std::max(scale, std::abs(m(i, j)));
    }
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw InvalidArgument("matrix is not symmetric positive definite");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues();
  if (!(ev(0) > 0.0)) throw InvalidArgument("matrix is not symmetric positive definite");
  const double lmin = ev(0);
  std::size_t mult = 0;
  while (mult < dim && ev(mult) - lmin <= 1e-10 * ev(dim - 1)) ++mult;
  Eigen::MatrixXd basis = es.eigenvectors().leftCols(mult);
  Point theta(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e(j) = 1.0;
    Eigen::VectorXd v = basis * (basis.transpose() * e);
    if (v.norm() > 1e-8) {
      v.normalize();
      for (std::size_t k = 0; k < dim; ++k) theta[k] = v(k);
      break;
    }
  }
  fix_sign(theta);
  const double det = ev.prod();
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());

  IsoperimetricProfile p;
  p.id = "anisotropic";
  p.theta = theta;
  p.domain = DomainSpec::full_space(dim);
  p.potential = Potential{
      [sym](std::span<const double> x) {
        Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
        return -0.5 * v.dot(sym * v);
      },
      [sym](std::span<const double> x, std::span<double> g) {
        Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Eigen::VectorXd> out(g.data(), static_cast<Eigen::Index>(g.size()));
        out = -(sym * v);
      },
      "W=-<Ax,x>/2"};
  set_gaussian_halfspace(p, std::pow(2.0 * kPi, 0.5 * static_cast<double>(dim)) / std::sqrt(det),
                         std::sqrt(lmin));
  if (mult > 1) {
    p.notes.push_back("degenerate smallest eigenspace (multiplicity " + std::to_string(mult) +
                      "); direction chosen deterministically");
  }
  return p;
}

IsoperimetricProfile perturbed_gaussian_profile(const ConcaveFunction& phi, double c, double a,
                                               double b, std::size_t dim,
                                               std::optional<Point> theta) {
  if (!(c > 0.0)) throw InvalidArgument("perturbed gaussian needs c > 0");
  if (!(a < b)) throw InvalidArgument("slab needs a < b");
  if (dim < 2) throw InvalidArgument("perturbed gaussian needs dim >= 2");
  if (!phi.value) throw InvalidArgument("phi has no evaluator");
  // concavity and affinity on a window carrying essentially all the mass
  const double reach = 12.0 / std::sqrt(c);
  const double lo = std::isfinite(a) ? a : -reach;
  const double hi = std::isfinite(b) ? b : reach;
  const std::size_t checks = 2048;
  const double d = (hi - lo) / static_cast<double>(checks + 2);
  double worst_dev = 0.0;
  for (std::size_t j = 1; j <= checks; ++j) {
    const double t = lo + d * static_cast<double>(j + 1) - 0.5 * d;
    const double u = phi.value(t - d), v = phi.value(t), w = phi.value(t + d);
    const double scale = std::max({1.0, std::abs(u), std::abs(v), std::abs(w)});
    const double second = u - 2.0 * v + w;
    if (second > 1e-9 * scale) throw InvalidArgument("concavity violated");
    worst_dev = std::max(worst_dev, std::abs(second) / scale);
  }
  const bool affine = worst_dev <= 1e-9;

  Point th(dim, 0.0);
  th[0] = 1.0;
  if (theta) th = unit_vector(*theta, dim);
  if (std::abs(th[dim - 1]) > 1e-12) {
    throw InvalidArgument("perturbed gaussian requires a horizontal direction");
  }
  auto value = phi.value;
  auto vertical = [value, c](double t) { return std::exp(value(t) - c * t * t); };
  const double V =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(vertical, a, b, 15, 1e-14);
  const double Z = V * std::pow(kPi / c, 0.5 * static_cast<double>(dim - 1));

  auto deriv = phi.derivative;
  if (!deriv) {
    deriv = [value](double t) {
      const double e = 1e-6 * std::max(1.0, std::abs(t));
      return (value(t + e) - value(t - e)) / (2.0 * e);
    };
  }
  IsoperimetricProfile p;
  p.id = "perturbed";
  p.theta = th;
  p.domain = std::isinf(a) && std::isinf(b) ? DomainSpec::full_space(dim) : DomainSpec::slab(dim, a, b);
  p.potential = Potential{
      [value, c](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return value(x.back()) - c * r2;
      },
      [deriv, c](std::span<const double> x, std::span<double> g) {
        for (std::size_t k = 0; k < x.size(); ++k) g[k] = -2.0 * c * x[k];
        g[x.size() - 1] += deriv(x.back());
      },
      "W=phi(x_N)-c|x|^2 (" + phi.description + ")"};
  set_gaussian_halfspace(p, Z, std::sqrt(2.0 * c));
  if (affine) p.notes.push_back("phi affine: any direction admissible");
  else p.notes.push_back("phi not affine: vertical half-spaces only");
  std::ostringstream os;
  os.precision(17);
  os << "vertical factor=" << V;
  p.notes.push_back(os.str());
  return p;
}

void require_profile_grid(const IsoperimetricProfile& profile, const WeightedGrid& grid) {
  if (grid.dim() != profile.domain.dim || grid.domain().kind != profile.domain.kind) {
    throw InvalidArgument("profile/grid mismatch");
  }
  if (profile.family == ProfileFamily::HalfSpaces && profile.theta.size() != grid.dim()) {
    throw InvalidArgument("profile/grid mismatch");
  }
}

GridPtr profile_grid(const IsoperimetricProfile& profile, std::size_t resolution,
                     double tail_tolerance) {
  return make_grid(profile.domain, profile.potential, resolution, tail_tolerance, profile.default_box);
}

double inscribed_mass(const IsoperimetricProfile& profile, const WeightedGrid& grid) {
  if (profile.family == ProfileFamily::HalfSpaces) {
    return std::isfinite(profile.total_mass) ? std::min(profile.total_mass, grid.total_mass())
                                             : grid.total_mass();
  }
  double r = kInfinity;
  Point probe(grid.dim(), 0.0);
  for (std::size_t k = 0; k < grid.dim(); ++k) {
    for (double face : {grid.box().lo[k], grid.box().hi[k]}) {
      // faces lying on the boundary of X do not bound the family
      probe.assign(grid.dim(), 0.0);
      probe[k] = face + (face > 0 ? 1e-9 : -1e-9);
      for (std::size_t j = 0; j < grid.dim(); ++j) {
        if (j != k) probe[j] = 0.5 * (grid.box().lo[j] + grid.box().hi[j]);
      }
      if (!grid.domain().contains(probe)) continue;
      r = std::min(r, std::abs(face));
    }
  }
  if (!std::isfinite(r)) return grid.total_mass();
  return std::min(profile.M(r), grid.total_mass());
}

bool ProfileValidation::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

ProfileValidation validate_profile(const IsoperimetricProfile& profile, const GridPtr& grid_ptr,
                                   std::size_t samples, std::uint64_t seed) {
  const WeightedGrid& grid = *grid_ptr;
  require_profile_grid(profile, grid);
  ProfileValidation rep;

  // (H1): limits of h along the parameter range, and f on the grid
  const auto [tlo, thi] = profile.param_range();
  const double far = 1e6;
  const double f_lo = profile.shape(std::isfinite(tlo) ? tlo : -far);
  const double f_hi = profile.shape(std::isfinite(thi) ? thi : far);
  rep.f_inf = std::min(f_lo, f_hi);
  rep.f_sup = std::max(f_lo, f_hi);
  rep.grid_f_min = kInfinity;
  rep.grid_f_max = -kInfinity;
  rep.min_grad_f_band = kInfinity;
  const double eps = 0.01;
  bool h2 = true;
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.inside(i)) continue;
    grid.center(i, x);
    const double t = profile.param(x);
    const double f = profile.shape(t);
    rep.grid_f_min = std::min(rep.grid_f_min, f);
    rep.grid_f_max = std::max(rep.grid_f_max, f);
    if (!std::isfinite(profile.M(t))) h2 = false;
    if (f > eps && f < 1.0 - eps) {
      const double e = 1e-6 * std::max(1.0, std::abs(t));
      const double g = std::abs(profile.shape(t + e) - profile.shape(t - e)) / (2.0 * e);
      rep.min_grad_f_band = std::min(rep.min_grad_f_band, g);
    }
  }
  {
    CheckResult c{"H1", std::abs(rep.f_inf) <= 1e-6 && std::abs(rep.f_sup - 1.0) <= 1e-6 &&
                            rep.min_grad_f_band > 0.0,
                  true, rep.f_sup, ""};
    std::ostringstream os;
    os << "inf f=" << rep.f_inf << " sup f=" << rep.f_sup << " min|grad f| on band=" << rep.min_grad_f_band;
    c.detail = os.str();
    rep.checks.push_back(c);
  }
  rep.checks.push_back({"H2", h2, true, 0.0, "M finite at every grid level"});

  // (ii): saturation by the family on mid-range masses
  const double ref = inscribed_mass(profile, grid);
  const std::vector<double> sigma = sigma_field(profile, grid);
  const std::size_t levels = 5;
  for (std::size_t j = 0; j < levels; ++j) {
    const double m = ref * (0.2 + 0.6 * static_cast<double>(j) / static_cast<double>(levels - 1));
    BorelSet s(grid_ptr);
    for (std::size_t i = 0; i < grid.size(); ++i) s.mask[i] = grid.inside(i) && sigma[i] < m;
    const double per = weighted_perimeter(s, grid);
    const double expect = profile.q(measure_of(s, grid));
    rep.saturation_gap = std::max(rep.saturation_gap, std::abs(per - expect) / expect);
  }
  rep.checks.push_back({"ii", rep.saturation_gap <= 0.03, true, rep.saturation_gap,
                        "relative perimeter gap of family members"});

  // (i): isoperimetric spot-check on random sets
  rep.isoperimetric_worst_ratio = kInfinity;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> frac(0.1, 0.9);
  for (std::size_t j = 0; j < samples; ++j) {
    const double target = frac(rng) * ref;
    const BorelSet s = random_borel_set(grid_ptr, target, seed + j);
    const double m = measure_of(s, grid);
    if (!(m > 0.0)) continue;
    const double ratio = weighted_perimeter(s, grid) / profile.q(m);
    rep.isoperimetric_worst_ratio = std::min(rep.isoperimetric_worst_ratio, ratio);
  }
  rep.checks.push_back({"i", samples == 0 || rep.isoperimetric_worst_ratio >= 0.95, samples > 0,
                        rep.isoperimetric_worst_ratio, "perimeter / q(mass), worst sample"});
  rep.checks.push_back({"iii", true, false, 0.0,
                        profile.family == ProfileFamily::Balls
                            ? "parameter is radial: steepest-descent lines are rays"
                            : "parameter is linear: steepest-descent lines are parallel"});
  return rep;
}

}  // namespace wsym
