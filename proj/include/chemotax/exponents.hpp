#pragma once

#include <optional>
#include <string>
#include <utility>

namespace chemotax {

// Quadrant of the (m1, m2) plane split at 2 - 2/n.
enum class RegionClass { S1, S2, S3, S4 };

// Position relative to the critical curve
// m1 + m2 = max{m1 m2 + 2 m1/n, m1 m2 + 2 m2/n}.
enum class PointClass { Blowup, Bounded, Critical };

std::string to_string(RegionClass r);
std::string to_string(PointClass c);

// m1 + m2 > max{m1 m2 + 2 m1/n, m1 m2 + 2 m2/n}
bool blowup_condition(double m1, double m2, int n);
// strict reverse; equality satisfies neither predicate
bool bounded_condition(double m1, double m2, int n);

RegionClass classify_region(double m1, double m2, int n);
PointClass classify_point(double m1, double m2, int n, double tol = 1e-12);

// Decay exponents of the comparison pair together with how they were chosen.
struct Exponents {
  double alpha = 0, beta = 0, delta = 0;  // all in (0, 1)
  RegionClass provenance = RegionClass::S1;
  std::optional<std::pair<double, double>> star_pair;  // auxiliary pair, S3/S4
};

// Closed-form pair making both coupling identities vanish at (m1s, m2s).
std::pair<double, double> case3_exponents(double m1s, double m2s, int n);

// Constructive selection: region dispatch, margin-driven halving in S1,
// eta-shrink auxiliary pair in S3/S4, delta = min{0.45, (1-alpha)/2, (1-beta)/2}.
Exponents select_exponents(double m1, double m2, int n);

// Throws unless alpha+delta<1, beta+delta<1 and both coupling inequalities
// hold strictly.
void check_exponents(const Exponents& e, double m1, double m2, int n);

}  // namespace chemotax
