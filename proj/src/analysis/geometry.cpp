#include "tpekit/analysis/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "tpekit/error.hpp"

namespace tpekit::analysis {

namespace {

constexpr double kPi = std::numbers::pi;

struct Normalized {
  Point mean;
  double scale = 1.0;
  std::vector<Point> pts;
};

// Centre on the mean and scale to unit rms radius.
Normalized normalize(const std::vector<Point>& points) {
  Normalized n;
  for (const auto& p : points) {
    n.mean.x += p.x;
    n.mean.y += p.y;
  }
  n.mean.x /= points.size();
  n.mean.y /= points.size();
  double ss = 0.0;
  for (const auto& p : points)
    ss += (p.x - n.mean.x) * (p.x - n.mean.x) + (p.y - n.mean.y) * (p.y - n.mean.y);
  n.scale = std::sqrt(ss / points.size());
  if (!(n.scale > 0.0)) n.scale = 1.0;
  for (const auto& p : points)
    n.pts.push_back({(p.x - n.mean.x) / n.scale, (p.y - n.mean.y) / n.scale});
  return n;
}

// Singular values of the centred point cloud, largest first.
Eigen::Vector2d spread(const std::vector<Point>& pts) {
  Eigen::MatrixX2d m(pts.size(), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) << pts[i].x, pts[i].y;
  return Eigen::JacobiSVD<Eigen::MatrixX2d>(m).singularValues();
}

}  // namespace

void MembraneProfile::validate() const {
  if (points.size() < 6) throw ArgumentError("membrane profile needs at least 6 points");
  if (!(base_diameter_l0_mm > 0.0)) throw ArgumentError("base diameter L0 must be > 0");
  for (const auto& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw ArgumentError("profile points must be finite");
}

ConicFit fit_ellipse(const std::vector<Point>& points) {
  if (points.size() < 5) throw ArgumentError("ellipse fit needs at least 5 points");
  const Normalized n = normalize(points);
  const std::size_t m = n.pts.size();
  Eigen::MatrixX3d d1(m, 3), d2(m, 3);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = n.pts[i].x, y = n.pts[i].y;
    d1.row(i) << x * x, x * y, y * y;
    d2.row(i) << x, y, 1.0;
  }
  const Eigen::Matrix3d s1 = d1.transpose() * d1;
  const Eigen::Matrix3d s2 = d1.transpose() * d2;
  const Eigen::Matrix3d s3 = d2.transpose() * d2;
  const auto s3_lu = s3.fullPivLu();
  if (!s3_lu.isInvertible()) throw GeometryError("degenerate point set for an ellipse fit");
  const Eigen::Matrix3d t = -s3_lu.solve(s2.transpose());
  const Eigen::Matrix3d mm = s1 + s2 * t;
  Eigen::Matrix3d reduced;
  reduced.row(0) = mm.row(2) / 2.0;
  reduced.row(1) = -mm.row(1);
  reduced.row(2) = mm.row(0) / 2.0;

  Eigen::EigenSolver<Eigen::Matrix3d> es(reduced);
  int best = -1;
  double best_cond = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d v = es.eigenvectors().col(k).real();
    const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
    if (cond > best_cond) {
      best_cond = cond;
      best = k;
    }
  }
  if (best < 0) throw GeometryError("best-fit conic is not an ellipse");
  const Eigen::Vector3d a1 = es.eigenvectors().col(best).real();
  const Eigen::Vector3d a2 = t * a1;
  const double A = a1(0), B = a1(1), C = a1(2), D = a2(0), E = a2(1), F = a2(2);

  Eigen::Matrix2d h;
  h << 2 * A, B, B, 2 * C;
  const Eigen::Vector2d c = h.fullPivLu().solve(Eigen::Vector2d(-D, -E));
  const double f0 = F + (D * c(0) + E * c(1)) / 2.0;
  Eigen::Matrix2d q;
  q << A, B / 2, B / 2, C;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> qs(q);
  const double ax0 = -f0 / qs.eigenvalues()(0), ax1 = -f0 / qs.eigenvalues()(1);
  if (!(ax0 > 0.0) || !(ax1 > 0.0) || !std::isfinite(ax0) || !std::isfinite(ax1))
    throw GeometryError("best-fit conic is not a real ellipse");
  const int mj = ax0 >= ax1 ? 0 : 1;
  const Eigen::Vector2d major = qs.eigenvectors().col(mj);

  ConicFit fit;
  fit.ellipse.center = {n.mean.x + n.scale * c(0), n.mean.y + n.scale * c(1)};
  fit.ellipse.semi_major_mm = n.scale * std::sqrt(std::max(ax0, ax1));
  fit.ellipse.semi_minor_mm = n.scale * std::sqrt(std::min(ax0, ax1));
  fit.ellipse.rotation_rad = std::atan2(major(1), major(0));

  const double cr = std::cos(fit.ellipse.rotation_rad), sr = std::sin(fit.ellipse.rotation_rad);
  std::vector<double> phis;
  for (const auto& p : points) {
    const double dx = p.x - fit.ellipse.center.x, dy = p.y - fit.ellipse.center.y;
    const double u = cr * dx + sr * dy, v = -sr * dx + cr * dy;
    phis.push_back(std::atan2(v / fit.ellipse.semi_minor_mm, u / fit.ellipse.semi_major_mm));
  }
  std::sort(phis.begin(), phis.end());
  // the profile covers everything except the widest angular gap
  double gap = phis.front() + 2 * kPi - phis.back();
  std::size_t after = 0;
  for (std::size_t k = 1; k < phis.size(); ++k)
    if (phis[k] - phis[k - 1] > gap) {
      gap = phis[k] - phis[k - 1];
      after = k;
    }
  fit.phi_start = phis[after];
  fit.phi_end = phis[after] + 2 * kPi - gap;
  return fit;
}

double ellipse_arc_length(double a, double b, double phi0, double phi1, double rel_tol) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("ellipse semi-axes must be > 0");
  auto speed = [a, b](double phi) {
    const double s = std::sin(phi), c = std::cos(phi);
    return std::sqrt(a * a * s * s + b * b * c * c);
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(speed, phi0, phi1, 20,
                                                                       rel_tol);
}

StretchEstimate stretch_from_profile(const MembraneProfile& profile) {
  profile.validate();
  StretchEstimate est;
  const Normalized n = normalize(profile.points);
  const Eigen::Vector2d sv = spread(n.pts);
  if (!(sv(0) > 0.0)) throw GeometryError("profile points all coincide");
  if (sv(1) <= 1e-6 * sv(0)) {
    // straight profile: extent along the principal direction
    Eigen::MatrixX2d m(n.pts.size(), 2);
    for (std::size_t i = 0; i < n.pts.size(); ++i) m.row(i) << n.pts[i].x, n.pts[i].y;
    const Eigen::Vector2d dir = Eigen::JacobiSVD<Eigen::MatrixX2d>(m, Eigen::ComputeThinV).matrixV().col(0);
    const Eigen::VectorXd proj = m * dir;
    est.flat = true;
    est.arc_length_mm = n.scale * (proj.maxCoeff() - proj.minCoeff());
  } else {
    const ConicFit fit = fit_ellipse(profile.points);
    est.ellipse = fit.ellipse;
    est.arc_length_mm = ellipse_arc_length(fit.ellipse.semi_major_mm, fit.ellipse.semi_minor_mm,
                                           fit.phi_start, fit.phi_end);
  }
  est.stretch = est.arc_length_mm / profile.base_diameter_l0_mm;
  est.stretch_percent = est.stretch * 100.0;
  est.strain_percent = (est.stretch - 1.0) * 100.0;
  return est;
}

CurvatureEstimate curvature_from_markers(const std::vector<Point>& points) {
  if (points.size() < 3) throw ArgumentError("curvature needs at least 3 markers");
  for (const auto& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw ArgumentError("marker coordinates must be finite");
  const Normalized n = normalize(points);
  CurvatureEstimate est;
  const Eigen::Vector2d sv = spread(n.pts);
  if (sv(1) <= 1e-9 * sv(0)) {
    est.collinear = true;
    est.radius_mm = INFINITY;
    return est;
  }
  const std::size_t m = n.pts.size();
  Eigen::MatrixX3d a(m, 3);
  Eigen::VectorXd rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = n.pts[i].x, y = n.pts[i].y;
    a.row(i) << x, y, 1.0;
    rhs(i) = -(x * x + y * y);
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(rhs);
  const double cx = -sol(0) / 2, cy = -sol(1) / 2;
  const double r2 = cx * cx + cy * cy - sol(2);
  if (!(r2 > 0.0)) throw GeometryError("circle fit produced no real circle");
  est.center = {n.mean.x + n.scale * cx, n.mean.y + n.scale * cy};
  est.radius_mm = n.scale * std::sqrt(r2);
  est.curvature_per_mm = 1.0 / est.radius_mm;

  double swept = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const double ux = n.pts[i - 1].x - cx, uy = n.pts[i - 1].y - cy;
    const double vx = n.pts[i].x - cx, vy = n.pts[i].y - cy;
    swept += std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
  }
  est.bend_angle_deg = std::abs(swept) * 180.0 / kPi;
  return est;
}

}  // namespace tpekit::analysis
