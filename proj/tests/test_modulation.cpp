#include <catch2/catch_amalgamated.hpp>

#include <cryochain/modulation.hpp>

#include "oracles.hpp"

using namespace cryochain;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("3-bit DAC walks an exact 125 mV staircase") {
  const DacConfig cfg;  // 3 bits, 1 V reference
  CHECK(cfg.level_count() == 8);
  CHECK(cfg.v_lsb() == 0.125);
  for (std::uint32_t code = 0; code < 8; ++code)
    CHECK(dac_output(code, cfg) == 0.125 * static_cast<double>(code));
  for (std::uint32_t code = 0; code + 1 < 8; ++code)
    CHECK(dac_output(code + 1, cfg) - dac_output(code, cfg) == cfg.v_lsb());
}

TEST_CASE("DAC rejects out-of-range codes and silly configurations") {
  const DacConfig cfg;
  CHECK_THROWS_AS(dac_output(8, cfg), std::invalid_argument);
  DacConfig bad = cfg;
  bad.n_bits = 0;
  CHECK_THROWS_AS(dac_output(0, bad), std::domain_error);
  bad.n_bits = 31;
  CHECK_THROWS_AS(dac_output(0, bad), std::domain_error);
  bad = cfg;
  bad.v_ref = 0.0;
  CHECK_THROWS_AS(dac_output(0, bad), std::domain_error);
}

TEST_CASE("an ideal staircase has zero DNL and INL everywhere") {
  const DacConfig cfg;
  std::vector<double> levels(8);
  for (std::uint32_t code = 0; code < 8; ++code) levels[code] = dac_output(code, cfg);
  const DacLinearity lin = dac_linearity(levels, cfg);
  for (double d : lin.dnl) CHECK(d == 0.0);
  for (double d : lin.inl) CHECK(d == 0.0);
}

TEST_CASE("a repeated level reads as a missing code") {
  const DacConfig cfg;
  std::vector<double> levels(8);
  for (std::uint32_t code = 0; code < 8; ++code) levels[code] = dac_output(code, cfg);
  levels[3] = levels[2];
  const DacLinearity lin = dac_linearity(levels, cfg);
  CHECK(lin.dnl[3] == -1.0);
  CHECK_THAT(lin.dnl[4], WithinRel(1.0, 1e-12));  // the next step spans two LSBs
  CHECK_THAT(lin.inl[3], WithinRel(-1.0, 1e-12));
  CHECK_THAT(lin.inl.back(), WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(dac_linearity(std::vector<double>(7, 0.0), cfg), std::invalid_argument);
}

TEST_CASE("gaussian envelope peaks at center with a quiet Q arm") {
  PulseSpec spec;  // gaussian, 20 ns, sigma 4 ns, unit peak
  const double fs = 1.6e11;
  const IQEnvelope env = make_envelope(spec, fs);
  REQUIRE(env.i.size() == 3201);
  REQUIRE(env.q.size() == 3201);
  CHECK(env.i[1600] == 1.0);  // center sample sits exactly on t = T/2
  CHECK_THAT(env.i[0], WithinAbs(std::exp(-0.5 * 2.5 * 2.5), 1e-12));
  for (double v : env.q.samples()) CHECK(v == 0.0);
}

TEST_CASE("drag correction rides the derivative of the main lobe") {
  PulseSpec spec;
  spec.shape = PulseShape::drag;
  spec.drag_coefficient = 0.5;
  const double fs = 1.6e11;
  const IQEnvelope env = make_envelope(spec, fs);

  // Q extrema sit one sigma off center at coeff * A / sqrt(e).
  const double q_peak = 0.5 / std::sqrt(std::exp(1.0));
  CHECK_THAT(env.q[1600 - 640], WithinRel(q_peak, 1e-9));
  CHECK_THAT(env.q[1600 + 640], WithinRel(-q_peak, 1e-9));
  CHECK(env.q[1600] == 0.0);

  // Antisymmetric correction integrates away to nothing.
  double area = oracle::trapezoid(env.q.samples(), 1.0 / fs);
  CHECK(std::abs(area) < 1e-6 * spec.peak_amplitude * spec.duration);
  for (std::size_t m : {100u, 640u, 1500u})
    CHECK_THAT(env.q[1600 + m] + env.q[1600 - m], WithinAbs(0.0, 1e-12));
}

TEST_CASE("cosine envelope starts and ends on zero") {
  PulseSpec spec;
  spec.shape = PulseShape::cosine;
  const IQEnvelope env = make_envelope(spec, 1.6e11);
  CHECK(env.i[0] == 0.0);
  CHECK_THAT(env.i[1600], WithinRel(1.0, 1e-12));
  CHECK_THAT(env.i.samples().back(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("envelopes need a workable grid") {
  PulseSpec spec;
  CHECK_THROWS_AS(make_envelope(spec, 7.0e8), precondition_error);  // 14 intervals
  CHECK_THROWS_AS(make_envelope(spec, 0.0), std::domain_error);
  spec.duration = 0.0;
  CHECK_THROWS_AS(make_envelope(spec, 1.6e11), std::domain_error);
  spec = PulseSpec{};
  spec.sigma = 0.0;
  CHECK_THROWS_AS(make_envelope(spec, 1.6e11), std::domain_error);
}

TEST_CASE("upconversion spreads the envelope power evenly onto the carrier") {
  PulseSpec spec;
  const double fs = 2.5e10;
  const IQEnvelope env = make_envelope(spec, fs);
  const SampledSignal rf = iq_upconvert(env, 5.0e9);
  REQUIRE(rf.size() == env.i.size());
  // 100 carrier cycles under the pulse: cos^2 averages to one half.
  CHECK_THAT(rf.mean_power(), WithinRel(0.5 * env.i.mean_power(), 1e-2));
}

TEST_CASE("a pure Q envelope lands on the negative sine") {
  const double fs = 4.0e10, fc = 5.0e9;  // 8 samples per carrier period
  std::vector<double> zeros(64, 0.0), ones(64, 1.0);
  IQEnvelope env{SampledSignal(zeros, fs), SampledSignal(ones, fs)};
  const SampledSignal rf = iq_upconvert(env, fc);
  CHECK(rf[0] == 0.0);
  CHECK_THAT(rf[2], WithinRel(-1.0, 1e-12));  // quarter period in
  CHECK_THAT(rf[6], WithinRel(1.0, 1e-12));   // three quarters in
}

TEST_CASE("upconversion insists on margin above the carrier") {
  PulseSpec spec;
  const IQEnvelope env = make_envelope(spec, 2.0e10);
  CHECK_THROWS_AS(iq_upconvert(env, 5.0e9), precondition_error);
  CHECK_THROWS_AS(iq_upconvert(env, 0.0), std::domain_error);
}

TEST_CASE("image rejection of a slightly skewed modulator") {
  CHECK_THAT(image_rejection_ratio(1.0, deg_to_rad(1.8)),
             WithinRel(36.07688803247703, 1e-12));
  const double eps = db_to_amplitude_ratio(-0.3);
  CHECK_THAT(eps, WithinRel(0.9660508789898133, 1e-13));
  CHECK_THAT(image_rejection_ratio(eps, 0.0), WithinRel(35.25532436750495, 1e-12));
  CHECK_THAT(image_rejection_ratio(eps, deg_to_rad(1.8)),
             WithinRel(32.6364083537288, 1e-12));
}

TEST_CASE("perfect balance pegs the rejection at the cap") {
  CHECK(image_rejection_ratio(1.0, 0.0) == 200.0);
  CHECK(image_rejection_ratio(1.0, kPi) == -200.0);
}

TEST_CASE("rejection only cares about the imbalance, not its direction") {
  for (double eps : {0.9, 0.95, 1.05, 1.2})
    for (double phi_deg : {0.0, 1.0, 5.0}) {
      const double phi = deg_to_rad(phi_deg);
      CHECK_THAT(image_rejection_ratio(eps, phi),
                 WithinAbs(image_rejection_ratio(1.0 / eps, phi), 1e-9));
    }
}

TEST_CASE("image rejection rejects unphysical arguments") {
  CHECK_THROWS_AS(image_rejection_ratio(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(image_rejection_ratio(-1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(image_rejection_ratio(1.0, std::nan("")), std::domain_error);
}

TEST_CASE("power stage applies clean gain when nothing clips") {
  std::vector<double> v(256);
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = 0.1 * std::sin(kTwoPi * static_cast<double>(k) / 32.0);
  const SampledSignal in(v, 1.0e9);
  const PowerStageResult res = power_stage(in, 13.979400086720377, 10.0);
  CHECK(res.clipped_fraction == 0.0);
  CHECK_THAT(res.output.mean_power(), WithinRel(25.0 * in.mean_power(), 1e-9));
}

TEST_CASE("power stage reports exactly which samples hit the rails") {
  const SampledSignal in({0.1, 1.0, -1.0, 0.2}, 1.0e9);
  const PowerStageResult res = power_stage(in, 0.0, 0.5);
  CHECK(res.clipped_fraction == 0.5);
  CHECK(res.output[0] == 0.1);
  CHECK(res.output[1] == 0.5);
  CHECK(res.output[2] == -0.5);
  CHECK(res.output[3] == 0.2);
  CHECK_THROWS_AS(power_stage(in, 0.0, 0.0), std::domain_error);
  CHECK(power_stage(SampledSignal({}, 1.0), 0.0, 1.0).clipped_fraction == 0.0);
}

TEST_CASE("pulse shape names round-trip") {
  for (PulseShape s : {PulseShape::gaussian, PulseShape::drag, PulseShape::cosine})
    CHECK(pulse_shape_from_name(pulse_shape_name(s)) == s);
  CHECK_THROWS_AS(pulse_shape_from_name("triangle"), std::invalid_argument);
}
