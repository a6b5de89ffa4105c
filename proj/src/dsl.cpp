#include "mme/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace mme::dsl {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::invalid_argument(what + " at byte " + std::to_string(offset)), offset_(offset) {}

SelfAdjointError::SelfAdjointError(const std::string& monomial)
    : std::invalid_argument("not trace self-adjoint: unmatched monomial " + monomial),
      monomial_(monomial) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::vector<Term> expr() {
    std::vector<Term> out;
    skip();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = peek() == '-';
      ++pos_;
    }
    out.push_back(term(negate));
    while (true) {
      skip();
      if (pos_ == src_.size()) break;
      const char op = peek();
      if (op != '+' && op != '-') throw ParseError(std::string("unexpected '") + op + "'", pos_);
      ++pos_;
      out.push_back(term(op == '-'));
    }
    return out;
  }

 private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool number_start() const {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  Rational number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
      ++pos_;
    }
    // exponent part of a decimal such as 1e-3
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    try {
      return parse_rational(src_.substr(start, pos_ - start));
    } catch (const std::invalid_argument&) {
      throw ParseError("malformed number", start);
    }
  }

  Term term(bool negate) {
    skip();
    Term t;
    t.coeff = 1;
    bool have_coeff = false;
    if (number_start()) {
      t.coeff = number();
      skip();
      if (peek() == '/') {
        ++pos_;
        skip();
        const std::size_t at = pos_;
        if (!number_start()) throw ParseError("expected denominator", pos_);
        const Rational den = number();
        if (den == 0) throw ParseError("zero denominator", at);
        t.coeff /= den;
      }
      have_coeff = true;
      skip();
    }
    if (peek() == 'i') {
      ++pos_;
      t.imaginary = true;
      have_coeff = true;
      skip();
    }
    if (have_coeff && peek() == '*') {
      ++pos_;
      skip();
      if (peek() == 'i' && !t.imaginary) {
        ++pos_;
        t.imaginary = true;
        skip();
        if (peek() == '*') {
          ++pos_;
          skip();
        } else {
          if (negate) t.coeff = -t.coeff;
          return t;
        }
      }
      if (peek() != 'X') throw ParseError("expected variable", pos_);
    }
    if (peek() == 'X') {
      factor(t.colors);
      while (true) {
        skip();
        if (peek() != '*') break;
        ++pos_;
        skip();
        factor(t.colors);
      }
    } else if (!have_coeff) {
      throw ParseError("expected term", pos_);
    }
    if (negate) t.coeff = -t.coeff;
    return t;
  }

  void factor(std::vector<int>& colors) {
    if (peek() != 'X') throw ParseError("expected variable", pos_);
    ++pos_;
    const std::size_t at = pos_;
    long color = 0;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      color = color * 10 + (src_[pos_] - '0');
      if (color > 1000) throw ParseError("color index too large", at);
      ++pos_;
    }
    if (pos_ == at) throw ParseError("expected color index after X", at);
    if (color < 1) throw ParseError("color index must be positive", at);
    skip();
    long power = 1;
    if (peek() == '^') {
      ++pos_;
      skip();
      const std::size_t pat = pos_;
      power = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        power = power * 10 + (src_[pos_] - '0');
        if (power > 64) throw ParseError("exponent too large", pat);
        ++pos_;
      }
      if (pos_ == pat) throw ParseError("expected exponent", pat);
      if (power < 1) throw ParseError("exponent must be positive", pat);
    }
    colors.insert(colors.end(), static_cast<std::size_t>(power), static_cast<int>(color));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::vector<int> min_rotation(const std::vector<int>& w) {
  std::vector<int> best = w;
  std::vector<int> cur = w;
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    best = std::min(best, cur);
  }
  return best;
}

}  // namespace

PotentialSpec parse(std::string_view src, int d) {
  PotentialSpec spec;
  spec.terms = Parser(src).expr();
  int max_color = 0;
  for (const auto& t : spec.terms) {
    for (int c : t.colors) max_color = std::max(max_color, c);
  }
  if (d > 0 && max_color > d) {
    throw std::invalid_argument("variable X" + std::to_string(max_color) +
                                " exceeds the declared arity " + std::to_string(d));
  }
  spec.d = d > 0 ? d : std::max(max_color, 1);
  return spec;
}

void check_self_adjoint(const PotentialSpec& spec) {
  // tr P is real iff each cyclic class total equals the conjugate of the
  // total of the reversed class.
  std::map<std::vector<int>, std::pair<Rational, Rational>> sums;
  for (const auto& t : spec.terms) {
    auto& s = sums[min_rotation(t.colors)];
    (t.imaginary ? s.second : s.first) += t.coeff;
  }
  for (const auto& t : spec.terms) {
    const auto mine = sums[min_rotation(t.colors)];
    const auto theirs = sums[min_rotation(std::vector<int>(t.colors.rbegin(), t.colors.rend()))];
    if (mine.first != theirs.first || mine.second != -theirs.second) {
      throw SelfAdjointError(word_text(t.colors));
    }
  }
}

PotentialSpec parse_potential(std::string_view src, int d) {
  PotentialSpec spec = parse(src, d);
  check_self_adjoint(spec);
  return spec;
}

std::string word_text(const std::vector<int>& colors) {
  if (colors.empty()) return "1";
  std::string out;
  for (std::size_t k = 0; k < colors.size();) {
    std::size_t run = 1;
    while (k + run < colors.size() && colors[k + run] == colors[k]) ++run;
    if (!out.empty()) out += '*';
    out += "X" + std::to_string(colors[k]);
    if (run > 1) out += "^" + std::to_string(run);
    k += run;
  }
  return out;
}

std::string print(const PotentialSpec& spec) {
  std::string out;
  for (const auto& t : spec.terms) {
    const bool negative = t.coeff < 0;
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    out += to_string(Rational(abs(t.coeff)));
    if (t.imaginary) out += "i";
    if (!t.colors.empty()) out += "*" + word_text(t.colors);
  }
  return out;
}

nc::NCPoly to_ncpoly(const PotentialSpec& spec) {
  nc::NCPoly out;
  for (const auto& t : spec.terms) {
    if (t.imaginary) throw std::invalid_argument("complex coefficients are not supported");
    nc::Monomial w;
    for (int c : t.colors) w.push_back(nc::base_label(c));
    out.add_term(w, expalg::ExpPoly(t.coeff));
  }
  return out;
}

master::Potential to_potential(const PotentialSpec& spec) {
  check_self_adjoint(spec);
  return master::Potential(to_ncpoly(spec), spec.d);
}

}  // namespace mme::dsl
