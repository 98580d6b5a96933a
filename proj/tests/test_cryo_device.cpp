#include <catch2/catch_amalgamated.hpp>

#include <cryochain/cryo_device.hpp>

using namespace cryochain;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("mobility factor is exactly 1 at the 300 K reference") {
  DeviceEnvironment env;
  env.temperature = 300.0;
  CHECK(mobility_factor(env) == 1.0);
}

TEST_CASE("mobility gain at 4 K is limited by the configured ceiling") {
  DeviceEnvironment env;  // defaults: 4 K, alpha 1.5, cap 5.0
  CHECK(mobility_factor(env) == 5.0);

  // The bare power law would give (300/4)^1.5 ~ 650x, so any permitted
  // ceiling binds and the result tracks the ceiling exactly.
  for (double cap : {3.0, 3.7, 4.2, 5.0}) {
    env.mobility_cap = cap;
    CHECK(mobility_factor(env) == cap);
  }
}

TEST_CASE("mobility at 150 K with quadratic scattering stays under the cap") {
  DeviceEnvironment env;
  env.temperature = 150.0;
  env.alpha = 2.0;
  CHECK_THAT(mobility_factor(env), WithinRel(4.0, 1e-15));
}

TEST_CASE("mobility factor never increases with temperature") {
  DeviceEnvironment env;
  double previous = 1e9;
  for (double t : {2.0, 4.0, 20.0, 77.0, 150.0, 300.0, 350.0}) {
    env.temperature = t;
    const double f = mobility_factor(env);
    CHECK(f <= previous);
    previous = f;
  }
}

TEST_CASE("device environment rejects out-of-model parameters") {
  DeviceEnvironment env;
  env.temperature = 0.0;
  CHECK_THROWS_AS(mobility_factor(env), std::domain_error);
  env = DeviceEnvironment{};
  env.alpha = 1.2;
  CHECK_THROWS_AS(mobility_factor(env), std::domain_error);
  env.alpha = 2.3;
  CHECK_THROWS_AS(mobility_factor(env), std::domain_error);
  env = DeviceEnvironment{};
  env.mobility_cap = 2.0;
  CHECK_THROWS_AS(mobility_factor(env), std::domain_error);
  env.mobility_cap = 6.0;
  CHECK_THROWS_AS(mobility_factor(env), std::domain_error);
  env = DeviceEnvironment{};
  env.phi_f = -0.1;
  CHECK_THROWS_AS(threshold_voltage(env), std::domain_error);
}

TEST_CASE("threshold voltage adds the body-effect shift") {
  DeviceEnvironment env;  // 0.45 V + 0.3 * sqrt(0.25)
  CHECK_THAT(threshold_voltage(env), WithinRel(0.60, 1e-15));

  env.gamma = 0.2;
  env.phi_f = 0.36;
  CHECK_THAT(threshold_voltage(env), WithinRel(0.57, 1e-12));
}

TEST_CASE("zero body-effect coefficient leaves the threshold at its reference") {
  DeviceEnvironment env;
  env.gamma = 0.0;
  for (double phi : {0.0, 0.1, 0.25, 0.9}) {
    env.phi_f = phi;
    CHECK(threshold_voltage(env) == env.vth_300k);
  }
}

TEST_CASE("subthreshold swing values at the two working temperatures") {
  CHECK_THAT(subthreshold_swing(300.0), WithinRel(0.05952642933233172, 1e-13));
  CHECK_THAT(subthreshold_swing(4.0), WithinRel(0.0007936857244310897, 1e-13));
}

TEST_CASE("subthreshold swing is linear in temperature") {
  for (double t : {1.0, 4.0, 77.0, 150.0}) {
    CHECK_THAT(subthreshold_swing(2.0 * t), WithinRel(2.0 * subthreshold_swing(t), 1e-12));
  }
  CHECK_THROWS_AS(subthreshold_swing(0.0), std::domain_error);
  CHECK_THROWS_AS(subthreshold_swing(-4.0), std::domain_error);
}

TEST_CASE("thermal noise density at 290 K and 4 K into 50 ohms") {
  CHECK_THAT(thermal_noise_density(290.0, 50.0), WithinRel(8.948611177160397e-10, 1e-13));
  CHECK_THAT(thermal_noise_density(4.0, 50.0), WithinRel(1.0509610839607717e-10, 1e-13));
  CHECK(thermal_noise_density(4.0, 0.0) == 0.0);
  CHECK_THROWS_AS(thermal_noise_density(0.0, 50.0), std::domain_error);
  CHECK_THROWS_AS(thermal_noise_density(290.0, -1.0), std::domain_error);
}

TEST_CASE("thermal noise density scales as the square root of temperature") {
  for (double t : {1.0, 4.0, 72.5, 300.0}) {
    CHECK_THAT(thermal_noise_density(4.0 * t, 50.0),
               WithinRel(2.0 * thermal_noise_density(t, 50.0), 1e-12));
  }
}

TEST_CASE("cooling from 300 K to 4 K buys a 75x noise power reduction") {
  CHECK(noise_power_reduction(300.0, 4.0) == 75.0);
  CHECK(noise_power_reduction(300.0, 300.0) == 1.0);
  CHECK_THAT(noise_power_reduction(290.0, 4.0), WithinRel(72.5, 1e-15));
}

TEST_CASE("noise power reduction equals the squared density ratio at any resistance") {
  for (double r : {1.0, 50.0, 4000.0}) {
    const double ratio = thermal_noise_density(300.0, r) / thermal_noise_density(4.0, r);
    CHECK_THAT(noise_power_reduction(300.0, 4.0), WithinRel(ratio * ratio, 1e-12));
  }
}

TEST_CASE("noise density records reject negative entries") {
  NoiseDensity nd;
  nd.voltage_density = 0.9e-9;
  nd.current_density = 1e-12;
  CHECK_NOTHROW(nd.validate());
  nd.current_density = -1e-12;
  CHECK_THROWS_AS(nd.validate(), std::domain_error);
}
