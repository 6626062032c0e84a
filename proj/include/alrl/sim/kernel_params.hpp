#pragma once

namespace alrl {

/// Coefficients of the Beta shape functions g1 and g2.
///
///   g1(theta, a=1) = g1_a1.c0 + g1_a1.theta1 * t1 + g1_a1.theta2 * t2
///   g1(theta, a=3) = g1_a3.c0 + g1_a3.theta1 * t1 + g1_a3.theta2 * t2
///   g2(theta, a=2) = g2_a2.c0 + g2_a2.theta1 * t1 + g2_a2.theta2 * t2
///   g2(d1, theta, a=3) = c0 + bump * t1 * exp(-(t1 - center)^2 / width)
///                        + theta2 * t2 + delta1 * d1
struct LinearShape {
  double c0 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;

  friend bool operator==(const LinearShape&, const LinearShape&) = default;
};

struct BumpShape {
  double c0 = 20.0;
  double bump = -28.0;
  double center = 0.6;
  double width = 0.3;
  double theta2 = 30.0;
  double delta1 = -0.3;

  friend bool operator==(const BumpShape&, const BumpShape&) = default;
};

struct KernelParams {
  LinearShape g1_a1{3.0, 8.0, -0.2};
  LinearShape g1_a3{15.0, 15.0, -0.4};
  LinearShape g2_a2{10.0, -1.0, 5.0};
  BumpShape g2_a3{};

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

}  // namespace alrl
