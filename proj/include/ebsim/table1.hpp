#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ebsim {

/// One row of the closed-form table of periodic patterns: the start point
/// x̂²_{2,0} (state before the first bit) and the variance Δ², both as
/// functions of α.
struct Table1Row {
  std::uint64_t p;
  std::uint64_t q;
  std::string sequence;
  bool starred;  // smallest Δ² for its density
  double (*xhat)(double alpha);
  double (*variance)(double alpha);
};

const std::vector<Table1Row>& table1_rows();

struct Table1Check {
  std::uint64_t p;
  std::uint64_t q;
  std::string sequence;
  double alpha;
  double xhat_formula;
  double xhat_numeric;
  double variance_formula;
  double variance_numeric;
  /// The row's necklace is the brute-force minimum-variance necklace.
  bool is_minimum;
};

/// Evaluates every row at `alpha` against the orbit computed from the bits.
std::vector<Table1Check> verify_table1(double alpha);

/// CSV with header p,q,sequence,xhat_formula_value,xhat_numeric,
/// variance_formula_value,variance_numeric,is_minimum.
void write_table1_csv(std::ostream& out, const std::vector<Table1Check>& checks);

}  // namespace ebsim
