#pragma once

// Exact GUE mixed trace moments by Wick pairing enumeration, the 1/N^2
// expansion of the perturbed ratio, and colored map counts.

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mme/master.hpp"
#include "mme/rational.hpp"

namespace mme::gauss {

/// Color word of one vertex; half-edge 0 is the distinguished one.
struct Star {
  std::vector<int> colors;

  int degree() const { return static_cast<int>(colors.size()); }
  friend bool operator==(const Star&, const Star&) = default;
  friend auto operator<=>(const Star&, const Star&) = default;
};

Star star_from_word(const std::string& colors);  // "1212" -> X1X2X1X2
std::string to_string(const Star& s);             // "X1*X2*X1*X2"

/// Half-edges are numbered consecutively star after star.
struct PairingDiagram {
  std::vector<Star> stars;
  std::vector<std::pair<int, int>> matching;
};

int faces(const PairingDiagram& d);
int components(const PairingDiagram& d);
/// Sum of the genera of the connected components.
int genus(const PairingDiagram& d);

/// Laurent polynomial in N with rational coefficients.
class LaurentN {
 public:
  LaurentN() = default;
  LaurentN(const Rational& c);  // NOLINT(google-explicit-constructor)
  static LaurentN monomial(int exponent, const Rational& c = 1);

  const std::map<int, Rational>& terms() const { return terms_; }
  Rational coefficient(int exponent) const;
  bool is_zero() const { return terms_.empty(); }
  void add(int exponent, const Rational& c);

  LaurentN& operator+=(const LaurentN& o);
  LaurentN& operator-=(const LaurentN& o);
  LaurentN& operator*=(const Rational& c);
  LaurentN shifted(int by) const;
  friend LaurentN operator+(LaurentN a, const LaurentN& b) { return a += b; }
  friend LaurentN operator-(LaurentN a, const LaurentN& b) { return a -= b; }
  friend LaurentN operator*(const LaurentN& a, const LaurentN& b);
  friend bool operator==(const LaurentN&, const LaurentN&) = default;

 private:
  std::map<int, Rational> terms_;
};

std::string to_string(const LaurentN& p);  // "2*N^2 + 1"

class OddPowerDetected : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct DiagramStats {
  int faces = 0;
  int edges = 0;
  int vertices = 0;
  int components = 0;
  int genus() const { return (2 * components - vertices + edges - faces) / 2; }
};

struct WickOptions {
  int max_half_edges = 20;
  unsigned threads = 1;
};

/// Calls visit for every color-respecting perfect matching of the stars.
void for_each_pairing(const std::vector<Star>& stars,
                      const std::function<void(const DiagramStats&)>& visit,
                      const WickOptions& options = {});

/// E[prod_i tr q_i(X)] for independent GUE matrices of variance 1/N.
LaurentN gue_mixed_moment(const std::vector<Star>& stars, const WickOptions& options = {});

/// Coefficients of lambda^k, k = 0..K, of E[ts P e^{-lambda N tr V}] / E[e^{-lambda N tr V}].
std::vector<LaurentN> ratio_series(const Star& p, const master::Potential& v, int K,
                                   const WickOptions& options = {});

/// Coefficient of N^{-2g} at each lambda-order.
master::LambdaSeries genus_coefficient(const std::vector<LaurentN>& series, int g);

/// Connected color-respecting pairings of root + vertices with genus g.
BigInt map_count(int g, const std::vector<Star>& vertices, const Star& root,
                 const WickOptions& options = {});

struct MapRow {
  int genus = 0;
  std::vector<Star> vertices;
  BigInt count;
};

/// map_count for every vertex multiset of V of size <= K and genus <= g_max.
std::vector<MapRow> map_count_table(const master::Potential& v, const Star& root, int g_max,
                                    int K, const WickOptions& options = {});
std::string map_table_csv(const std::vector<MapRow>& rows);
std::string map_table_json(const std::vector<MapRow>& rows);

struct CorollaryReport {
  bool ok = true;
  /// Per lambda-order: oracle coefficient, map-sum coefficient.
  std::vector<std::pair<Rational, Rational>> orders;
  std::string message;
};

CorollaryReport corollary13_check(const master::Potential& v, const Star& root, int g, int K,
                                  const WickOptions& options = {});

/// Monomials of V as (coefficient, star).
std::vector<std::pair<Rational, Star>> potential_stars(const master::Potential& v);

/// Every multiset of size k drawn from n kinds, as multiplicity vectors.
std::vector<std::vector<int>> multisets(int n, int k);

}  // namespace mme::gauss
