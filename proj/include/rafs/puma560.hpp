#pragma once

#include <array>

namespace rafs::puma560 {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// Standard Denavit-Hartenberg parameters and link-side inertial parameters of
// the first three links of the PUMA 560 (Armstrong/Corke model). Motor
// inertia and friction are not modelled.
struct Link {
  double d;
  double a;
  double alpha;
  double mass;
  Vec3 com;      // centre of mass in the link frame
  Vec3 inertia;  // principal moments about the COM in the link frame
};

inline constexpr std::array<Link, 3> kLinks = {{
    {0.0, 0.0, 1.5707963267948966, 0.0, {0.0, 0.0, 0.0}, {0.0, 0.35, 0.0}},
    {0.0, 0.4318, 0.0, 17.4, {-0.3638, 0.006, 0.2275}, {0.13, 0.524, 0.539}},
    {0.15005, 0.0203, -1.5707963267948966, 4.8, {-0.0203, -0.0141, 0.070}, {0.066, 0.086, 0.0125}},
}};

inline constexpr double kGravity = 9.81;

// Joint torques of the inverse dynamics (recursive Newton-Euler).
Vec3 inverse_dynamics(const Vec3& q, const Vec3& qd, const Vec3& qdd, double gravity = kGravity);

// Joint-space inertia matrix A(q).
Mat3 inertia_matrix(const Vec3& q);

// Coriolis/centrifugal plus gravity torques n(q, qd) + g(q).
Vec3 bias_torques(const Vec3& q, const Vec3& qd);

// qdd = A(q)^{-1} (tau - n(q, qd) - g(q)).
Vec3 forward_dynamics(const Vec3& q, const Vec3& qd, const Vec3& tau);

}  // namespace rafs::puma560
