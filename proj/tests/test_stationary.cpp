#include <doctest.h>

#include <cmath>
#include <string>

#include "ebsim/polarizer.hpp"
#include "ebsim/random_stream.hpp"
#include "ebsim/stationary.hpp"
#include "oracles.hpp"

using namespace ebsim;

namespace {

std::string least_rotation_by_brute_force(const std::string& s) {
  std::string best = s;
  for (std::size_t k = 1; k < s.size(); ++k) best = std::min(best, s.substr(k) + s.substr(0, k));
  return best;
}

}  // namespace

TEST_CASE("bit sequences") {
  const auto s = BitSequence::parse("10100");
  CHECK(s.size() == 5);
  CHECK(s.ones() == 2);
  CHECK(s.density() == doctest::Approx(0.4));
  CHECK(s.rotated(1).to_string() == "01001");
  CHECK_THROWS_AS(BitSequence::parse("1021"), std::invalid_argument);
}

TEST_CASE("canonical rotation is the least rotation with leading zeros moved back") {
  RandomStream rng(2);
  for (int i = 0; i < 2000; ++i) {
    const auto len = 1 + static_cast<std::size_t>(rng.uniform() * 16);
    std::string s;
    for (std::size_t k = 0; k < len; ++k) s.push_back(rng.uniform() < 0.4 ? '1' : '0');
    const std::string least = least_rotation_by_brute_force(s);
    const auto lead = least.find('1');
    const std::string expected = lead == std::string::npos ? least : least.substr(lead) + least.substr(0, lead);
    const auto canon = canonical_rotation(BitSequence::parse(s));
    REQUIRE(canon.to_string() == expected);
    CHECK(same_necklace(canon, BitSequence::parse(s)));
    CHECK(oracle::is_rotation(canon.to_string(), s));
  }
  CHECK(canonical_rotation(BitSequence::parse("00101")).to_string() == "10100");
  CHECK(canonical_rotation(BitSequence::parse("0010010100")).to_string() == "1001010000");
  CHECK_FALSE(same_necklace(BitSequence::parse("11000"), BitSequence::parse("10100")));
}

TEST_CASE("circle map arithmetic") {
  CHECK(circle_map_step(0.5, 0, 0.99) == doctest::Approx(0.49005).epsilon(1e-14));
  CHECK(circle_map_step(0.5, 1, 0.99) == doctest::Approx(0.50995).epsilon(1e-14));
  CHECK(circle_map_step(1.0, 1, 0.7) == 1.0);
  CHECK_THROWS_AS(circle_map_step(1.2, 0, 0.9), std::domain_error);
  CHECK_THROWS_AS(circle_map_step(0.3, 2, 0.9), std::domain_error);
}

TEST_CASE("start point of K zeros then a one") {
  CHECK(k_sequence_fixed_point(0, 0.93) == doctest::Approx(1.0).epsilon(1e-15));
  // "10": the value before the zero equals the orbit point before bit 1.
  const double a = 0.99;
  CHECK(k_sequence_fixed_point(1, a) == doctest::Approx(1.0 / (1.0 + a * a)).epsilon(1e-14));
  CHECK(k_sequence_fixed_point(1, a) == doctest::Approx(0.50502499).epsilon(1e-8));
  CHECK(k_sequence_fixed_point(5000, 0.9) == doctest::Approx(1.0 - 0.81).epsilon(1e-12));
  for (std::uint64_t k : {1u, 3u, 9u}) {
    std::string bits = "1" + std::string(k, '0');
    // Right after the one fires the state is the K-sequence start point.
    const auto orbit = oracle::orbit_by_iteration(bits, a);
    CHECK(k_sequence_fixed_point(k, a) == doctest::Approx(orbit[1]).epsilon(1e-12));
  }
}

TEST_CASE("orbit fixed points match closed forms and the iteration oracle") {
  for (double a : {0.9, 0.99, 0.999}) {
    const double a2 = a * a;
    CHECK(orbit_fixed_points(BitSequence::parse("10"), a).fixed_points[0] ==
          doctest::Approx(a2 / (1 + a2)).epsilon(1e-13));
    CHECK(orbit_fixed_points(BitSequence::parse("100"), a).fixed_points[0] ==
          doctest::Approx(a2 * a2 / (1 + a2 + a2 * a2)).epsilon(1e-13));
    const double a4 = a2 * a2;
    CHECK(orbit_fixed_points(BitSequence::parse("10100"), a).fixed_points[0] ==
          doctest::Approx(a4 * (1 + a4) * (1 - a2) / (1 - std::pow(a, 10))).epsilon(1e-12));
  }
  RandomStream rng(6);
  for (int i = 0; i < 200; ++i) {
    std::string bits;
    const auto len = 1 + static_cast<std::size_t>(rng.uniform() * 12);
    for (std::size_t k = 0; k < len; ++k) bits.push_back(rng.uniform() < 0.5 ? '1' : '0');
    const double a = 0.85 + 0.14 * rng.uniform();
    const auto orbit = orbit_fixed_points(BitSequence::parse(bits), a);
    const auto ref = oracle::orbit_by_iteration(bits, a);
    for (std::size_t k = 0; k < bits.size(); ++k) CHECK(orbit.fixed_points[k] == doctest::Approx(ref[k]).epsilon(1e-11));
    CHECK(orbit.mean == doctest::Approx(BitSequence::parse(bits).density()).epsilon(1e-12));
    const double ref_var = oracle::orbit_variance(bits, a);
    CHECK(std::abs(orbit.variance - ref_var) <= 1e-13 + 1e-9 * ref_var);
  }
}

TEST_CASE("orbit closes and attracts at rate alpha^(2 period)") {
  for (const char* bits : {"1", "10", "1000", "10100", "1101000", "1001010000"}) {
    const auto seq = BitSequence::parse(bits);
    const double a = 0.97;
    const auto orbit = orbit_fixed_points(seq, a);
    double x = orbit.fixed_points[0];
    for (std::size_t k = 0; k < seq.size(); ++k) x = circle_map_step(x, seq[k], a);
    CHECK(std::abs(x - orbit.fixed_points[0]) < 1e-12);

    const double eps = 0.1;
    double y = std::min(1.0, orbit.fixed_points[0] + eps);
    const double start_dev = y - orbit.fixed_points[0];
    for (int periods = 1; periods <= 20; ++periods) {
      for (std::size_t k = 0; k < seq.size(); ++k) y = circle_map_step(y, seq[k], a);
      const double expected = std::pow(a, 2.0 * periods * static_cast<double>(seq.size())) * start_dev;
      CHECK(y - orbit.fixed_points[0] == doctest::Approx(expected).epsilon(1e-9).scale(1e-13));
    }
  }
}

TEST_CASE("variance routes agree and order as expected") {
  for (double a : {0.9, 0.99, 0.999}) {
    const double a2 = a * a;
    CHECK(orbit_variance(BitSequence::parse("10"), a) ==
          doctest::Approx((1 - a2) * (1 - a2) / (4 * (1 + a2) * (1 + a2))).epsilon(1e-10));
    CHECK(orbit_variance(BitSequence::parse("10001000"), a) ==
          doctest::Approx(orbit_variance(BitSequence::parse("1000"), a)).epsilon(1e-10));
  }
  CHECK(orbit_variance(BitSequence::parse("10100"), 0.99) < orbit_variance(BitSequence::parse("11000"), 0.99));
  RandomStream rng(12);
  for (int i = 0; i < 300; ++i) {
    std::string bits;
    const auto len = 1 + static_cast<std::size_t>(rng.uniform() * 14);
    for (std::size_t k = 0; k < len; ++k) bits.push_back(rng.uniform() < 0.3 ? '1' : '0');
    const auto seq = BitSequence::parse(bits);
    const double a = 0.9 + 0.099 * rng.uniform();
    CHECK(std::abs(orbit_variance_direct(orbit_fixed_points(seq, a)) - orbit_variance_double_sum(seq, a)) < 1e-12);
  }
}

TEST_CASE("theta_min") {
  CHECK(rad_to_deg(theta_min(0.99)) == doctest::Approx(4.05).epsilon(0.01 / 4.05));
  CHECK(rad_to_deg(theta_min(0.999)) == doctest::Approx(1.28).epsilon(0.01 / 1.28));
  CHECK(theta_min(1.0 - 1e-12) < 1e-5);
  for (double a : {0.5, 0.9, 0.99, 0.9995}) CHECK(theta_min(a) == doctest::Approx(oracle::theta_min_by_bisection(a)).epsilon(1e-12));
}

TEST_CASE("continuation criterion agrees with the DLM decision") {
  // At z = 0 it reduces to tan²θ > (1−α)/(1+α).
  CHECK(continuation_bound(0.0, 0.99) == doctest::Approx(std::sqrt(0.01 / 1.99)).epsilon(1e-13));
  CHECK(continuation_bound(1.0, 0.9) >= 1.0);
  CHECK_FALSE(continuation_criterion(1.0, 0.9, 0.7));

  RandomStream rng(13);
  int tested = 0;
  for (int i = 0; i < 5000; ++i) {
    const double z = rng.uniform();
    const double a = 0.8 + 0.199 * rng.uniform();
    const double theta = (std::numbers::pi / 2) * rng.uniform();
    if (std::abs(std::tan(theta) - continuation_bound(z, a)) < 1e-9) continue;
    DlmState s({std::sqrt(1 - z * z), z}, a);
    const bool fires = dlm_step(s, UnitVector2::from_angle(theta)).second.theta_bit == 1;
    REQUIRE(fires == continuation_criterion(z, a, theta));
    ++tested;
  }
  CHECK(tested > 4900);
}

TEST_CASE("repetition thresholds") {
  CHECK(repetition_threshold(57) == doctest::Approx(0.9967).epsilon(0.0002 / 0.9967));
  CHECK(repetition_threshold(80) == doctest::Approx(0.9983).epsilon(0.0002 / 0.9983));
  double prev = 0.0;
  for (std::uint64_t k = 10; k <= 200; k += 5) {
    const double t = repetition_threshold(k);
    CHECK(t > prev);
    CHECK(repetition_margin(t + 1e-5, k) > 0.0);
    prev = t;
  }
  CHECK(repetition_threshold(3) < 0.9);
  CHECK_THROWS_AS(repetition_threshold(1), std::invalid_argument);
}

TEST_CASE("delta steps") {
  const auto d = delta_steps(std::numbers::pi / 4, 0.99);
  CHECK(d.delta0 == doctest::Approx(-(1 - 0.9801) / 2).epsilon(1e-13));
  CHECK(d.delta1 == doctest::Approx(-d.delta0).epsilon(1e-13));
  for (double theta : {0.2, 0.7, std::numbers::pi / 3, 1.4}) {
    const auto s = delta_steps(theta, 0.97);
    CHECK(s.delta1 / std::abs(s.delta0) == doctest::Approx(1 / std::pow(std::tan(theta), 2)).epsilon(1e-12));
  }
  const auto third = delta_steps(std::numbers::pi / 3, 0.99);
  CHECK(third.delta0 == doctest::Approx(-0.00995 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(delta_steps(0.0, 0.99), std::domain_error);
}

TEST_CASE("wigner ground states") {
  CHECK(wigner_ground_state(1, 3).occupation.to_string() == "100");
  CHECK(wigner_ground_state(2, 5).occupation.to_string() == "10100");
  CHECK(wigner_ground_state(3, 8).occupation.to_string() == "10010100");
  const auto reduced = wigner_ground_state(4, 10);
  CHECK(reduced.p == 2);
  CHECK(reduced.q == 5);
  for (int q = 2; q <= 16; ++q) {
    for (int p = 1; p < q; ++p) {
      CHECK(same_necklace(wigner_ground_state(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(q)).occupation,
                          canonical_rotation(BitSequence::parse(oracle::hubbard(p / oracle::gcd(p, q), q / oracle::gcd(p, q))))));
    }
  }
  CHECK_THROWS_AS(wigner_ground_state(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(wigner_ground_state(0, 3), std::invalid_argument);
}

TEST_CASE("lattice energy") {
  CHECK(lattice_energy(BitSequence::parse("00000"), 0.99) == 0.0);
  CHECK(lattice_energy(BitSequence::parse("10100"), 0.99) < lattice_energy(BitSequence::parse("11000"), 0.99));
  // At fixed density the energy orders necklaces exactly as the variance does.
  const double a = 0.99;
  for (const auto& [x, y] : std::vector<std::pair<const char*, const char*>>{
           {"10010100", "11010000"}, {"10010100", "10101000"}, {"100010000", "101000000"}}) {
    const bool by_energy = lattice_energy(BitSequence::parse(x), a) < lattice_energy(BitSequence::parse(y), a);
    const bool by_variance = orbit_variance(BitSequence::parse(x), a) < orbit_variance(BitSequence::parse(y), a);
    CHECK(by_energy == by_variance);
  }
}

TEST_CASE("brute force minimum variance") {
  CHECK(brute_force_min_variance(2, 8, 0.99).to_string() == "10001000");
  CHECK(brute_force_min_variance(3, 8, 0.99).to_string() == "10010100");
  CHECK(brute_force_min_variance(2, 9, 0.99).to_string() == "100010000");
  for (int q = 2; q <= 12; ++q) {
    for (int p = 1; p < q; ++p) {
      const auto mine = brute_force_min_variance(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(q), 0.99);
      CHECK(oracle::is_rotation(mine.to_string(), oracle::min_variance_by_enumeration(p, q, 0.99)));
    }
  }
  CHECK_THROWS_AS(brute_force_min_variance(3, 23, 0.99), std::invalid_argument);
}

TEST_CASE("stationary sequences extracted from the DLM") {
  const auto half = extract_stationary_sequence(std::asin(std::sqrt(0.5)), 0.99, 20000, 256, 1);
  REQUIRE(half);
  CHECK(half->to_string() == "10");
  const auto quarter = extract_stationary_sequence(deg_to_rad(30.0), 0.99, 20000, 256, 2);
  REQUIRE(quarter);
  CHECK(quarter->to_string() == "1000");
  const auto three_eighths = extract_stationary_sequence(std::asin(std::sqrt(3.0 / 8.0)), 0.99, 20000, 256, 3);
  REQUIRE(three_eighths);
  CHECK(same_necklace(*three_eighths, wigner_ground_state(3, 8).occupation));
  CHECK_FALSE(extract_stationary_sequence(0.3, 0.99, 0, 2, 4).has_value());
}
