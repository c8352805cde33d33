#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "odefilter/error.hpp"
#include "odefilter/noise.hpp"

using namespace odefilter;

TEST(Noise, Evaluate) {
  EXPECT_DOUBLE_EQ(NoiseModel::power_law(1.0, 1.0).evaluate(0.1), 0.1);
  EXPECT_NEAR(NoiseModel::power_law(5e3, 1.0).evaluate(0.01), 50.0, 1e-12);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(NoiseModel::power_law(7.0, inf).evaluate(0.5), 0.0);
  EXPECT_EQ(NoiseModel::power_law(7.0, inf).evaluate(3.0), 0.0);
  EXPECT_EQ(NoiseModel::zero().evaluate(0.3), 0.0);
  EXPECT_EQ(NoiseModel::constant(0.25).evaluate(1e-6), 0.25);
  EXPECT_THROW((void)NoiseModel::zero().evaluate(0.0), Error);
}

TEST(Noise, Permissible) {
  EXPECT_FALSE(NoiseModel::power_law(1.0, 0.5).is_permissible(1));
  EXPECT_TRUE(NoiseModel::power_law(1.0, 1.0).is_permissible(1));
  EXPECT_FALSE(NoiseModel::power_law(1.0, 1.0).is_permissible(2));
  EXPECT_TRUE(NoiseModel::zero().is_permissible(3));
  EXPECT_TRUE(NoiseModel::constant(0.0).is_permissible(2));
  EXPECT_FALSE(NoiseModel::constant(0.1).is_permissible(1));
  EXPECT_TRUE(NoiseModel::power_law(0.0, 0.5).is_permissible(1));
}

TEST(Noise, ParseAndPrint) {
  EXPECT_EQ(NoiseModel::parse("zero"), NoiseModel::zero());
  EXPECT_EQ(NoiseModel::parse("const:0.5"), NoiseModel::constant(0.5));
  EXPECT_EQ(NoiseModel::parse("power:1:5e3"), NoiseModel::power_law(5e3, 1.0));
  const NoiseModel inf = NoiseModel::parse("power:inf:2");
  EXPECT_TRUE(std::isinf(inf.order()));
  EXPECT_EQ(inf.evaluate(0.1), 0.0);
  for (const char* text : {"zero", "const:0.25", "power:0.5:3730", "power:inf:1"}) {
    EXPECT_EQ(NoiseModel::parse(NoiseModel::parse(text).to_string()), NoiseModel::parse(text));
  }
  for (const char* bad : {"", "loud", "const:", "const:-1", "power:1", "power:-1:1", "power:1:x",
                          "power:1:-2"}) {
    EXPECT_THROW((void)NoiseModel::parse(bad), Error) << bad;
  }
}

TEST(Noise, OrderAndFactor) {
  EXPECT_TRUE(std::isinf(NoiseModel::zero().order()));
  EXPECT_EQ(NoiseModel::constant(2.0).order(), 0.0);
  EXPECT_EQ(NoiseModel::constant(2.0).constant_factor(), 2.0);
  EXPECT_EQ(NoiseModel::power_law(3.0, 1.5).order(), 1.5);
  EXPECT_EQ(NoiseModel::power_law(3.0, 1.5).constant_factor(), 3.0);
}

TEST(Noise, MonotoneAndLinear) {
  for (double p : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const NoiseModel m = NoiseModel::power_law(2.0, p);
    double previous = 0.0;
    for (double h = 1e-4; h <= 2.0; h *= 1.7) {
      const double v = m.evaluate(h);
      EXPECT_GE(v, previous);
      EXPECT_GE(v, 0.0);
      previous = v;
      EXPECT_NEAR(NoiseModel::power_law(6.0, p).evaluate(h), 3.0 * v, 1e-14 * v + 1e-300);
    }
  }
}
