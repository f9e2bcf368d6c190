#include "stp/kinematics.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace stp {
namespace {

VehicleParams default_params() { return VehicleParams{}; }

MotionPrimitive random_primitive(std::mt19937_64& rng, const VehicleParams& params) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> heading(-M_PI, M_PI);
  std::uniform_real_distribution<double> speed(0.0, params.v_max);
  std::uniform_real_distribution<double> steer(-params.max_steer, params.max_steer);
  std::uniform_real_distribution<double> accel(params.a_min, params.a_max);
  std::uniform_real_distribution<double> tau(0.2, 1.0);

  RobotState start;
  start.pos = {pos(rng), pos(rng)};
  start.heading = heading(rng);
  start.speed = speed(rng);
  start.t = 0.0;
  return integrate_primitive(start, {steer(rng), accel(rng)}, tau(rng), params);
}

TEST(VehicleParamsTest, ValidatesLimits) {
  EXPECT_NO_THROW(default_params().validate());
  VehicleParams bad = default_params();
  bad.v_max = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = default_params();
  bad.a_min = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = default_params();
  bad.max_steer = M_PI / 2.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(TransformControlTest, NullControlKeepsSpeed) {
  const auto [v, omega] = transform_control({0.0, 0.0}, 1.0, 5.0, default_params());
  EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_DOUBLE_EQ(omega, 0.0);
}

TEST(TransformControlTest, FullSteerYawRate) {
  VehicleParams params = default_params();
  params.wheelbase = 1.0;
  const auto [v, omega] =
      transform_control({params.max_steer, 0.0}, 1.0, 0.3, params);
  EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_DOUBLE_EQ(omega, std::tan(params.max_steer));
}

TEST(TransformControlTest, AcceleratedArc) {
  const auto [v, omega] = transform_control({0.2, 0.5}, 1.0, 1.0, default_params());
  EXPECT_DOUBLE_EQ(v, 1.5);
  EXPECT_DOUBLE_EQ(omega, std::tan(0.2) / 0.5 * 1.5);
}

TEST(TransformControlTest, SpeedClampsAtLimits) {
  const auto [vhi, o1] = transform_control({0.0, 2.0}, 1.0, 10.0, default_params());
  EXPECT_DOUBLE_EQ(vhi, default_params().v_max);
  const auto [vlo, o2] = transform_control({0.0, -2.0}, 1.0, 10.0, default_params());
  EXPECT_DOUBLE_EQ(vlo, 0.0);
  (void)o1;
  (void)o2;
}

TEST(PrimitiveCostTest, NullControlPaysBaseRate) {
  EXPECT_DOUBLE_EQ(primitive_cost({0.0, 0.0}, 0.5, CostWeights{}), 1.0);
}

TEST(PrimitiveCostTest, FrozenExample) {
  // (2 * 0.5^2 + 2 * 0.2^2 + 2) * 0.5
  EXPECT_NEAR(primitive_cost({0.2, 0.5}, 0.5, CostWeights{}), 1.29, 1e-12);
}

TEST(PrimitiveCostTest, AnyNonNullControlCostsMore) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> steer(-0.6, 0.6);
  std::uniform_real_distribution<double> accel(-2.0, 2.0);
  const double base = primitive_cost({0.0, 0.0}, 0.5, CostWeights{});
  for (int i = 0; i < 200; ++i) {
    ControlInput u{steer(rng), accel(rng)};
    if (u.steer == 0.0 && u.accel == 0.0) continue;
    EXPECT_GT(primitive_cost(u, 0.5, CostWeights{}), base);
  }
}

TEST(SampleControlSetTest, FullGridAtCruisingSpeed) {
  const auto controls = sample_control_set(default_params(), 9, {0.0}, 1.0);
  ASSERT_EQ(controls.size(), 9u);
  for (const ControlInput& u : controls) EXPECT_DOUBLE_EQ(u.accel, 0.0);
  EXPECT_DOUBLE_EQ(controls.front().steer, -default_params().max_steer);
  EXPECT_DOUBLE_EQ(controls.back().steer, default_params().max_steer);
}

TEST(SampleControlSetTest, SingleNullControl) {
  const auto controls = sample_control_set(default_params(), 1, {0.0}, 1.0);
  ASSERT_EQ(controls.size(), 1u);
  EXPECT_DOUBLE_EQ(controls[0].steer, 0.0);
  EXPECT_DOUBLE_EQ(controls[0].accel, 0.0);
}

TEST(SampleControlSetTest, RestDropsNonPositiveAccel) {
  const auto controls = sample_control_set(default_params(), 3, {-1.0, 0.0, 1.0}, 0.0);
  ASSERT_EQ(controls.size(), 3u);
  for (const ControlInput& u : controls) EXPECT_DOUBLE_EQ(u.accel, 1.0);
}

TEST(SampleControlSetTest, RestWithOnlyBrakingIsEmpty) {
  EXPECT_TRUE(sample_control_set(default_params(), 3, {-1.0, 0.0}, 0.0).empty());
}

TEST(SampleControlSetTest, RejectsBadArguments) {
  EXPECT_THROW(sample_control_set(default_params(), 2, {0.0}, 1.0),
               std::invalid_argument);
  EXPECT_THROW(sample_control_set(default_params(), 3, {}, 1.0), std::invalid_argument);
  EXPECT_THROW(sample_control_set(default_params(), 3, {5.0}, 1.0),
               std::invalid_argument);
}

TEST(IntegratePrimitiveTest, StraightConstantSpeed) {
  RobotState start;
  start.speed = 1.0;
  const MotionPrimitive prim = integrate_primitive(start, {0.0, 0.0}, 0.5,
                                                   default_params());
  EXPECT_DOUBLE_EQ(prim.end.pos.x, 0.5);
  EXPECT_DOUBLE_EQ(prim.end.pos.y, 0.0);
  EXPECT_DOUBLE_EQ(prim.end.heading, 0.0);
  EXPECT_DOUBLE_EQ(prim.end.speed, 1.0);
  EXPECT_DOUBLE_EQ(prim.end.t, 0.5);
  EXPECT_TRUE(std::isinf(prim.turn_radius));
}

TEST(IntegratePrimitiveTest, SaturatesAtSpeedLimit) {
  RobotState start;
  start.speed = 1.0;
  const MotionPrimitive prim = integrate_primitive(start, {0.0, 2.0}, 0.5,
                                                   default_params());
  EXPECT_DOUBLE_EQ(prim.saturation_time, 0.4);
  EXPECT_DOUBLE_EQ(prim.saturated_speed, 1.8);
  // 1.0 * 0.4 + 0.5 * 2 * 0.4^2 + 1.8 * 0.1
  EXPECT_NEAR(prim.end.pos.x, 0.74, 1e-12);
  EXPECT_DOUBLE_EQ(prim.end.speed, 1.8);
}

TEST(IntegratePrimitiveTest, BrakesToRestAndHolds) {
  RobotState start;
  start.speed = 1.0;
  const MotionPrimitive prim = integrate_primitive(start, {0.0, -2.0}, 2.0,
                                                   default_params());
  EXPECT_DOUBLE_EQ(prim.saturation_time, 0.5);
  EXPECT_DOUBLE_EQ(prim.saturated_speed, 0.0);
  EXPECT_NEAR(prim.end.pos.x, 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(prim.end.speed, 0.0);
}

TEST(EvalPrimitiveTest, EndpointsMatchStartAndEnd) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const MotionPrimitive prim = random_primitive(rng, default_params());
    const RobotState at0 = eval_primitive(prim, 0.0);
    EXPECT_DOUBLE_EQ(at0.pos.x, prim.start.pos.x);
    EXPECT_DOUBLE_EQ(at0.pos.y, prim.start.pos.y);
    EXPECT_DOUBLE_EQ(at0.speed, prim.start.speed);
    const RobotState at1 = eval_primitive(prim, prim.duration);
    EXPECT_DOUBLE_EQ(at1.pos.x, prim.end.pos.x);
    EXPECT_DOUBLE_EQ(at1.pos.y, prim.end.pos.y);
    EXPECT_DOUBLE_EQ(at1.heading, prim.end.heading);
    EXPECT_DOUBLE_EQ(at1.speed, prim.end.speed);
  }
}

TEST(EvalPrimitiveTest, StraightMidpoint) {
  RobotState start;
  start.speed = 1.0;
  const MotionPrimitive prim = integrate_primitive(start, {0.0, 0.0}, 0.5,
                                                   default_params());
  EXPECT_DOUBLE_EQ(eval_primitive(prim, 0.25).pos.x, 0.25);
}

TEST(EvalPrimitiveTest, RejectsTimeOutsideDuration) {
  RobotState start;
  start.speed = 1.0;
  const MotionPrimitive prim = integrate_primitive(start, {0.0, 0.0}, 0.5,
                                                   default_params());
  EXPECT_THROW(eval_primitive(prim, -0.01), std::out_of_range);
  EXPECT_THROW(eval_primitive(prim, 0.51), std::out_of_range);
  EXPECT_NO_THROW(eval_primitive(prim, 0.5 + 5e-10));
}

TEST(EvalPrimitiveTest, SpeedStaysWithinPlatformLimits) {
  std::mt19937_64 rng(13);
  const VehicleParams params = default_params();
  std::uniform_real_distribution<double> local(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const MotionPrimitive prim = random_primitive(rng, params);
    for (int k = 0; k < 20; ++k) {
      const RobotState s = eval_primitive(prim, local(rng) * prim.duration);
      EXPECT_LE(s.speed, params.v_max + 1e-12);
      EXPECT_GE(s.speed, 0.0);
    }
  }
}

TEST(EvalPrimitiveTest, ArcSamplesStayOnTheCircle) {
  std::mt19937_64 rng(17);
  const VehicleParams params = default_params();
  std::uniform_real_distribution<double> local(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const MotionPrimitive prim = random_primitive(rng, params);
    if (std::isinf(prim.turn_radius)) continue;
    const double r = prim.turn_radius;
    const Vec2 center{prim.start.pos.x - r * std::sin(prim.start.heading),
                      prim.start.pos.y + r * std::cos(prim.start.heading)};
    for (int k = 0; k < 20; ++k) {
      const RobotState s = eval_primitive(prim, local(rng) * prim.duration);
      EXPECT_NEAR((s.pos - center).norm(), std::abs(r), 1e-9);
    }
  }
}

TEST(EvalPrimitiveTest, NearStraightSteerLimitIsContinuous) {
  // Just above the straight cutoff the arc must still be indistinguishable
  // from the straight branch at the scale of the workspace.
  RobotState start;
  start.speed = 1.0;
  const MotionPrimitive straight = integrate_primitive(start, {0.0, 0.0}, 0.5,
                                                       default_params());
  const MotionPrimitive arc = integrate_primitive(start, {2e-6, 0.0}, 0.5,
                                                  default_params());
  EXPECT_LT((arc.end.pos - straight.end.pos).norm(), 1e-6);
  EXPECT_LT(std::abs(arc.end.heading - straight.end.heading), 1e-5);
}

TEST(EvalPrimitiveTest, ChainingIsExact) {
  std::mt19937_64 rng(19);
  const VehicleParams params = default_params();
  std::uniform_real_distribution<double> steer(-params.max_steer, params.max_steer);
  std::uniform_real_distribution<double> accel(params.a_min, params.a_max);
  for (int i = 0; i < 100; ++i) {
    RobotState state;
    state.speed = 1.0;
    double expected_t = 0.0;
    for (int k = 0; k < 4; ++k) {
      const MotionPrimitive prim =
          integrate_primitive(state, {steer(rng), accel(rng)}, 0.5, params);
      EXPECT_DOUBLE_EQ(prim.start.t, expected_t);
      expected_t += prim.duration;
      EXPECT_DOUBLE_EQ(prim.end.t, expected_t);
      state = prim.end;
    }
  }
}

TEST(EvalPrimitiveTest, MatchesNumericIntegration) {
  std::mt19937_64 rng(23);
  const VehicleParams params = default_params();
  std::uniform_real_distribution<double> local(0.1, 0.9);
  for (int i = 0; i < 1000; ++i) {
    const MotionPrimitive prim = random_primitive(rng, params);
    const RobotState reference =
        oracles::rk4_propagate(prim.start, prim.control, prim.duration, params);
    EXPECT_NEAR(prim.end.pos.x, reference.pos.x, 1e-4);
    EXPECT_NEAR(prim.end.pos.y, reference.pos.y, 1e-4);
    EXPECT_NEAR(wrap_angle(prim.end.heading - reference.heading), 0.0, 1e-4);
    EXPECT_NEAR(prim.end.speed,
                oracles::speed_at(prim.start, prim.control, prim.duration, params),
                1e-12);

    const double mid = local(rng) * prim.duration;
    const RobotState inner = eval_primitive(prim, mid);
    const RobotState inner_ref =
        oracles::rk4_propagate(prim.start, prim.control, mid, params);
    EXPECT_NEAR(inner.pos.x, inner_ref.pos.x, 1e-4);
    EXPECT_NEAR(inner.pos.y, inner_ref.pos.y, 1e-4);
    EXPECT_NEAR(inner.speed, oracles::speed_at(prim.start, prim.control, mid, params),
                1e-12);
  }
}

TEST(ArcLengthTest, MatchesSpeedIntegral) {
  std::mt19937_64 rng(29);
  const VehicleParams params = default_params();
  for (int i = 0; i < 200; ++i) {
    const MotionPrimitive prim = random_primitive(rng, params);
    // Riemann sum of the closed-form speed profile.
    const int n = 20000;
    double len = 0.0;
    const double h = prim.duration / n;
    for (int k = 0; k < n; ++k) {
      len += oracles::speed_at(prim.start, prim.control, (k + 0.5) * h, params) * h;
    }
    EXPECT_NEAR(primitive_arc_length(prim, prim.duration), len, 1e-6);
  }
}

TEST(SteeringAnglesTest, UniformSymmetricSpanIncludesZero) {
  const auto steers = steering_angles(default_params(), 5);
  ASSERT_EQ(steers.size(), 5u);
  EXPECT_DOUBLE_EQ(steers[2], 0.0);
  EXPECT_DOUBLE_EQ(steers[0], -0.6);
  EXPECT_DOUBLE_EQ(steers[4], 0.6);
  EXPECT_NEAR(steers[1], -0.3, 1e-12);
}

}  // namespace
}  // namespace stp
