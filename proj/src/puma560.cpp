#include "rafs/puma560.hpp"

#include <cmath>
#include <utility>

#include "rafs/errors.hpp"

namespace rafs::puma560 {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 mul(const Mat3& m, const Vec3& v) {
  return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

Mat3 transpose(const Mat3& m) {
  return {{{m[0][0], m[1][0], m[2][0]}, {m[0][1], m[1][1], m[2][1]}, {m[0][2], m[1][2], m[2][2]}}};
}

Mat3 identity() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

// Rotation of frame j relative to frame j-1: Rz(theta) Rx(alpha).
Mat3 link_rotation(double theta, double alpha) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  return {{{ct, -st * ca, st * sa}, {st, ct * ca, -ct * sa}, {0.0, sa, ca}}};
}

Vec3 inertia_times(const Vec3& diag, const Vec3& v) {
  return {diag[0] * v[0], diag[1] * v[1], diag[2] * v[2]};
}

}  // namespace

Vec3 inverse_dynamics(const Vec3& q, const Vec3& qd, const Vec3& qdd, double gravity) {
  constexpr std::size_t n = kLinks.size();
  const Vec3 z0{0.0, 0.0, 1.0};
  std::array<Mat3, n> rot;
  std::array<Vec3, n> pstar, force, moment;

  // Outward recursion: link velocities and accelerations in link frames.
  // Gravity enters as an upward acceleration of the base.
  Vec3 w{0, 0, 0}, wd{0, 0, 0}, vd{0, 0, gravity};
  for (std::size_t j = 0; j < n; ++j) {
    const Link& link = kLinks[j];
    rot[j] = link_rotation(q[j], link.alpha);
    pstar[j] = {link.a, link.d * std::sin(link.alpha), link.d * std::cos(link.alpha)};
    const Mat3 rt = transpose(rot[j]);
    wd = mul(rt, add(add(wd, scale(z0, qdd[j])), cross(w, scale(z0, qd[j]))));
    w = mul(rt, add(w, scale(z0, qd[j])));
    vd = add(add(cross(wd, pstar[j]), cross(w, cross(w, pstar[j]))), mul(rt, vd));
    const Vec3 vcom = add(add(cross(wd, link.com), cross(w, cross(w, link.com))), vd);
    force[j] = scale(vcom, link.mass);
    moment[j] = add(inertia_times(link.inertia, wd), cross(w, inertia_times(link.inertia, w)));
  }

  // Inward recursion: forces and moments transmitted through the joints.
  Vec3 f{0, 0, 0}, nn{0, 0, 0}, tau{0, 0, 0};
  for (std::size_t j = n; j-- > 0;) {
    const Mat3 r = j + 1 == n ? identity() : rot[j + 1];
    nn = add(add(mul(r, add(nn, cross(mul(transpose(r), pstar[j]), f))),
                 cross(add(pstar[j], kLinks[j].com), force[j])),
             moment[j]);
    f = add(mul(r, f), force[j]);
    tau[j] = dot(nn, mul(transpose(rot[j]), z0));
  }
  return tau;
}

Mat3 inertia_matrix(const Vec3& q) {
  Mat3 a{};
  for (std::size_t c = 0; c < 3; ++c) {
    Vec3 e{0, 0, 0};
    e[c] = 1.0;
    const Vec3 col = inverse_dynamics(q, {0, 0, 0}, e, 0.0);
    for (std::size_t r = 0; r < 3; ++r) a[r][c] = col[r];
  }
  return a;
}

Vec3 bias_torques(const Vec3& q, const Vec3& qd) {
  return inverse_dynamics(q, qd, {0, 0, 0}, kGravity);
}

Vec3 forward_dynamics(const Vec3& q, const Vec3& qd, const Vec3& tau) {
  Mat3 a = inertia_matrix(q);
  const Vec3 bias = bias_torques(q, qd);
  Vec3 rhs{tau[0] - bias[0], tau[1] - bias[1], tau[2] - bias[2]};
  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < 3; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-14) throw NumericError("puma560: singular inertia matrix");
    std::swap(a[col], a[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < 3; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t k = col; k < 3; ++k) a[r][k] -= factor * a[col][k];
      rhs[r] -= factor * rhs[col];
    }
  }
  Vec3 x{};
  for (std::size_t r = 3; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t k = r + 1; k < 3; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace rafs::puma560
