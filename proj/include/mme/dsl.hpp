#pragma once

// Text syntax for potentials and observables.
//
//   expr   ::= term (('+' | '-') term)*
//   term   ::= coeff? '*'? factor ('*' factor)*
//   coeff  ::= number ('/' number)? 'i'? | 'i'
//   factor ::= 'X' digits ('^' int)?
//
// Whitespace is ignored. Decimals become exact rationals. A trailing 'i'
// marks an imaginary coefficient, which only the self-adjointness check
// accepts as input.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mme/master.hpp"
#include "mme/rational.hpp"

namespace mme::dsl {

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class SelfAdjointError : public std::invalid_argument {
 public:
  SelfAdjointError(const std::string& monomial);
  const std::string& monomial() const { return monomial_; }

 private:
  std::string monomial_;
};

struct Term {
  Rational coeff;
  bool imaginary = false;
  std::vector<int> colors;  // powers expanded

  friend bool operator==(const Term&, const Term&) = default;
};

struct PotentialSpec {
  std::vector<Term> terms;
  int d = 0;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

/// d = 0 infers the arity from the largest color used.
PotentialSpec parse(std::string_view src, int d = 0);

/// Parses and requires tr P to be real for Hermitian arguments.
PotentialSpec parse_potential(std::string_view src, int d = 0);

/// Inverse of parse on the term list.
std::string print(const PotentialSpec& spec);

/// Throws SelfAdjointError naming the first unmatched monomial.
void check_self_adjoint(const PotentialSpec& spec);

/// Real coefficients only (std::invalid_argument otherwise).
nc::NCPoly to_ncpoly(const PotentialSpec& spec);
master::Potential to_potential(const PotentialSpec& spec);

std::string word_text(const std::vector<int>& colors);  // "X1^2*X2"

}  // namespace mme::dsl
