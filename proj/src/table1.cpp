#include "ebsim/table1.hpp"

#include <cmath>
#include <ostream>

#include "ebsim/io.hpp"
#include "ebsim/stationary.hpp"

namespace ebsim {
namespace {

// Powers of α² keep the formulas readable: e(k) = α^{2k}.
struct Pw {
  double a2;
  double operator()(int k) const { return std::pow(a2, k); }
};

double sq(double v) { return v * v; }

// Σ_{k=0}^{n-1} α^{2k}
double geom(double alpha, int n) {
  const Pw e{alpha * alpha};
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += e(k);
  return s;
}

}  // namespace

const std::vector<Table1Row>& table1_rows() {
  // clang-format off
  static const std::vector<Table1Row> rows = {
    {1, 2, "10", true,
     [](double a) { const Pw e{a * a}; return e(1) / (1 + e(1)); },
     [](double a) { const Pw e{a * a}; return sq(1 - e(1)) / (4 * sq(1 + e(1))); }},
    {1, 3, "100", true,
     [](double a) { const Pw e{a * a}; return e(2) / (1 + e(1) + e(2)); },
     [](double a) { const Pw e{a * a}; return 2 * sq(1 - e(1)) / (9 * (1 + e(1) + e(2))); }},
    {1, 4, "1000", true,
     [](double a) { const Pw e{a * a}; return e(3) / ((1 + e(1)) * (1 + e(2))); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (3 + 4 * e(1) + 3 * e(2)) / (16 * sq(1 + e(1)) * (1 + e(2))); }},
    {2, 5, "11000", false,
     [](double a) { const Pw e{a * a}; return e(3) * (1 - e(2)) / (1 - e(5)); },
     [](double a) { const Pw e{a * a};
       return 2 * sq(1 - e(1)) * (3 + 4 * e(1) + 3 * e(2)) / (25 * geom(a, 5)); }},
    // α⁴ prefactor: the start point of 10100 from the orbit sum.
    {2, 5, "10100", true,
     [](double a) { const Pw e{a * a}; return e(2) * (1 + e(2)) * (1 - e(1)) / (1 - e(5)); },
     [](double a) { const Pw e{a * a};
       return 2 * sq(1 - e(1)) * (3 - e(1) + 3 * e(2)) / (25 * geom(a, 5)); }},
    {2, 8, "11000000", false,
     [](double a) { const Pw e{a * a}; return e(6) * (1 - e(2)) / (1 - e(8)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (3 + 2 * e(1) + 4 * e(2) + 2 * e(3) + 3 * e(4)) / (16 * (1 + e(2) + e(4) + e(6))); }},
    {2, 8, "10100000", false,
     [](double a) { const Pw e{a * a}; return e(5) / (1 + e(1) + e(4) + e(5)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (3 + 4 * e(1) + 4 * e(2) + 4 * e(3) + 3 * e(4)) / (16 * sq(1 + e(1)) * (1 + e(4))); }},
    {2, 8, "10010000", false,
     [](double a) { const Pw e{a * a}; return e(4) * (1 - e(1) + e(2)) / (1 + e(2) + e(4) + e(6)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (3 - 2 * e(1) + 4 * e(2) - 2 * e(3) + 3 * e(4)) / (16 * (1 + e(2) + e(4) + e(6))); }},
    {2, 8, "10001000", true,
     [](double a) { const Pw e{a * a}; return e(3) * (1 - e(1)) / (1 - e(4)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (3 + 4 * e(1) + 3 * e(2)) / (16 * sq(1 + e(1)) * (1 + e(2))); }},
    {3, 8, "11100000", false,
     [](double a) { const Pw e{a * a}; return e(5) * (1 - e(3)) / (1 - e(8)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (15 + 44 * e(1) + 71 * e(2) + 80 * e(3) + 71 * e(4) + 44 * e(5) + 15 * e(6)) /
              (64 * sq(1 + e(1)) * (1 + e(2) + e(4) + e(6))); }},
    {3, 8, "10110000", false,
     [](double a) { const Pw e{a * a}; return e(4) * (1 - e(2) + e(3) - e(4)) / (1 - e(8)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (15 + 28 * e(1) + 39 * e(2) + 48 * e(3) + 39 * e(4) + 28 * e(5) + 15 * e(6)) /
              (64 * sq(1 + e(1)) * (1 + e(2) + e(4) + e(6))); }},
    {3, 8, "10011000", false,
     [](double a) { const Pw e{a * a}; return e(3) * (1 - e(2) + e(4) - e(5)) / (1 - e(8)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (15 + 28 * e(1) + 23 * e(2) + 16 * e(3) + 23 * e(4) + 28 * e(5) + 15 * e(6)) /
              (64 * sq(1 + e(1)) * (1 + e(2) + e(4) + e(6))); }},
    {3, 8, "11010000", false,
     [](double a) { const Pw e{a * a}; return e(4) * (1 - e(1) + e(2) - e(4)) / (1 - e(8)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (15 + 28 * e(1) + 39 * e(2) + 48 * e(3) + 39 * e(4) + 28 * e(5) + 15 * e(6)) /
              (64 * sq(1 + e(1)) * (1 + e(2) + e(4) + e(6))); }},
    {3, 8, "10101000", false,
     [](double a) { const Pw e{a * a}; return e(3) * (1 - e(1)) * (1 + e(2) + e(4)) / (1 - e(8)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (15 + 12 * e(1) + 23 * e(2) + 16 * e(3) + 23 * e(4) + 12 * e(5) + 15 * e(6)) /
              (64 * sq(1 + e(1)) * (1 + e(2) + e(4) + e(6))); }},
    {3, 8, "10010100", true,
     [](double a) { const Pw e{a * a}; return e(2) * (1 - e(1)) * (1 + e(2) + e(5)) / (1 - e(8)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (15 + 12 * e(1) + 7 * e(2) + 16 * e(3) + 7 * e(4) + 12 * e(5) + 15 * e(6)) /
              (64 * sq(1 + e(1)) * (1 + e(2) + e(4) + e(6))); }},
    {3, 8, "11001000", false,
     [](double a) { const Pw e{a * a}; return e(3) * (1 - e(1) + e(3) - e(5)) / (1 - e(8)); },
     [](double a) { const Pw e{a * a};
       return sq(1 - e(1)) * (15 + 28 * e(1) + 23 * e(2) + 16 * e(3) + 23 * e(4) + 28 * e(5) + 15 * e(6)) /
              (64 * sq(1 + e(1)) * (1 + e(2) + e(4) + e(6))); }},
    {2, 9, "110000000", false,
     [](double a) { const Pw e{a * a}; return e(7) * (1 - e(2)) / (1 - e(9)); },
     [](double a) { const Pw e{a * a};
       return 2 * sq(1 - e(1)) * (7 + 12 * e(1) + 15 * e(2) + 16 * e(3) + 15 * e(4) + 12 * e(5) + 7 * e(6)) /
              (81 * (1 + e(1) + e(2)) * (1 + e(3) + e(6))); }},
    {2, 9, "101000000", false,
     [](double a) { const Pw e{a * a}; return e(6) * (1 - e(1) + e(2) - e(3)) / (1 - e(9)); },
     [](double a) { const Pw e{a * a};
       return 2 * sq(1 - e(1)) * (7 + 3 * e(1) + 15 * e(2) + 7 * e(3) + 15 * e(4) + 3 * e(5) + 7 * e(6)) /
              (81 * geom(a, 9)); }},
    {2, 9, "100100000", false,
     [](double a) { const Pw e{a * a}; return e(5) * (1 - e(1) + e(3) - e(4)) / (1 - e(9)); },
     [](double a) { const Pw e{a * a};
       return 2 * sq(1 - e(1)) * (7 + 3 * e(1) + 6 * e(2) + 7 * e(3) + 6 * e(4) + 3 * e(5) + 7 * e(6)) /
              (81 * geom(a, 9)); }},
    {2, 9, "100010000", true,
     [](double a) { const Pw e{a * a}; return e(4) * (1 - e(1) + e(4) - e(5)) / (1 - e(9)); },
     [](double a) { const Pw e{a * a};
       return 2 * sq(1 - e(1)) * (7 + 3 * e(1) + 6 * e(2) - 2 * e(3) + 6 * e(4) + 3 * e(5) + 7 * e(6)) /
              (81 * geom(a, 9)); }},
  };
  // clang-format on
  return rows;
}

std::vector<Table1Check> verify_table1(double alpha) {
  std::vector<Table1Check> out;
  for (const auto& row : table1_rows()) {
    const BitSequence seq = BitSequence::parse(row.sequence);
    const StationaryOrbit orbit = orbit_fixed_points(seq, alpha);
    const BitSequence best = brute_force_min_variance(row.p, row.q, alpha);
    out.push_back({row.p, row.q, row.sequence, alpha, row.xhat(alpha), orbit.fixed_points.front(),
                   row.variance(alpha), orbit_variance(seq, alpha), same_necklace(best, seq)});
  }
  return out;
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Check>& checks) {
  out << "p,q,sequence,xhat_formula_value,xhat_numeric,variance_formula_value,variance_numeric,is_minimum\n";
  for (const auto& c : checks) {
    out << c.p << ',' << c.q << ',' << c.sequence << ',' << fmt_real(c.xhat_formula) << ','
        << fmt_real(c.xhat_numeric) << ',' << fmt_real(c.variance_formula) << ',' << fmt_real(c.variance_numeric)
        << ',' << (c.is_minimum ? 1 : 0) << '\n';
  }
}

}  // namespace ebsim
