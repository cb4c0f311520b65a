#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lagr {

/// Exponent vector of a monomial, one entry per variable.
using Exponents = std::vector<std::uint16_t>;

/// Closed real interval used for range bounds of polynomials over boxes.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double magnitude() const { return std::max(std::abs(lo), std::abs(hi)); }
};

inline Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }

inline Interval operator*(Interval a, Interval b) {
  const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

/// Exact range of t^k for t in [lo, hi].
inline Interval pow(Interval x, int k) {
  if (k == 0) return {1.0, 1.0};
  const double a = std::pow(x.lo, k);
  const double b = std::pow(x.hi, k);
  if (k % 2 == 0 && x.lo < 0.0 && x.hi > 0.0) return {0.0, std::max(a, b)};
  return {std::min(a, b), std::max(a, b)};
}

/// Sparse multivariate polynomial over `nvars` real variables.
///
/// Terms are kept in an ordered map from exponent vector to coefficient;
/// zero coefficients are never stored, so two polynomials are equal iff
/// their term maps are equal.
template <typename Scalar = double>
class Polynomial {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using TermMap = std::map<Exponents, Scalar>;

  Polynomial() = default;

  explicit Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 0) throw std::invalid_argument("Polynomial: negative variable count");
  }

  static Polynomial constant(int nvars, Scalar value) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), value);
    return p;
  }

  /// The coordinate function x_i.
  static Polynomial variable(int nvars, int i) {
    Polynomial p(nvars);
    p.add_term(unit_exponent(nvars, i, 1), Scalar(1));
    return p;
  }

  /// a^T x + c.
  static Polynomial affine(const Vector& a, Scalar c) {
    Polynomial p(static_cast<int>(a.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i)
      p.add_term(unit_exponent(p.nvars_, static_cast<int>(i), 1), a(i));
    p.add_term(Exponents(p.nvars_, 0), c);
    return p;
  }

  /// x^T Q x + c^T x.
  static Polynomial quadratic_form(const Matrix& Q, const Vector& c) {
    const int n = static_cast<int>(c.size());
    if (Q.rows() != n || Q.cols() != n)
      throw std::invalid_argument("Polynomial::quadratic_form: dimension mismatch");
    Polynomial p(n);
    for (int i = 0; i < n; ++i) {
      p.add_term(unit_exponent(n, i, 1), c(i));
      for (int j = 0; j < n; ++j) {
        Exponents e(n, 0);
        e[i] += 1;
        e[j] += 1;
        p.add_term(e, Q(i, j));
      }
    }
    return p;
  }

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Accumulates `coef * x^e`; a term that cancels to zero is erased.
  void add_term(const Exponents& e, Scalar coef) {
    if (static_cast<int>(e.size()) != nvars_)
      throw std::invalid_argument("Polynomial::add_term: exponent length != nvars");
    if (coef == Scalar(0)) return;
    auto [it, inserted] = terms_.try_emplace(e, coef);
    if (!inserted) {
      it->second += coef;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  Scalar coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  Scalar constant_term() const { return coefficient(Exponents(nvars_, 0)); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  bool is_multilinear() const {
    for (const auto& [e, c] : terms_)
      for (auto k : e)
        if (k > 1) return false;
    return true;
  }

  bool has_integer_coefficients() const {
    for (const auto& [e, c] : terms_)
      if (std::floor(static_cast<double>(c)) != static_cast<double>(c)) return false;
    return true;
  }

  /// Whether x_i appears in any term.
  bool depends_on(int i) const {
    for (const auto& [e, c] : terms_)
      if (e[i] > 0) return true;
    return false;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  Polynomial& operator*=(Scalar s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, Scalar s) { return a *= s; }
  friend Polynomial operator*(Scalar s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= Scalar(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_same(b);
    Polynomial r(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(ea);
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = static_cast<std::uint16_t>(e[k] + eb[k]);
        r.add_term(e, ca * cb);
      }
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Polynomial squared() const { return *this * *this; }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& x) const {
    return evaluate(x);
  }

  template <typename Derived>
  Scalar evaluate(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != nvars_)
      throw std::invalid_argument("Polynomial::evaluate: point has " + std::to_string(x.size()) +
                                  " coordinates, expected " + std::to_string(nvars_));
    Scalar sum(0);
    for (const auto& [e, c] : terms_) {
      Scalar m = c;
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < e[i]; ++k) m *= static_cast<Scalar>(x(i));
      sum += m;
    }
    return sum;
  }

  /// d/dx_i.
  Polynomial partial(int i) const {
    check_index(i);
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponents d(e);
      d[i] -= 1;
      r.add_term(d, c * static_cast<Scalar>(e[i]));
    }
    return r;
  }

  template <typename Derived>
  Vector gradient(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != nvars_) throw std::invalid_argument("Polynomial::gradient: dimension mismatch");
    Vector g = Vector::Zero(nvars_);
    for (const auto& [e, c] : terms_)
      for (int i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        Scalar m = c * static_cast<Scalar>(e[i]);
        for (int j = 0; j < nvars_; ++j) {
          const int k = e[j] - (j == i ? 1 : 0);
          for (int r = 0; r < k; ++r) m *= static_cast<Scalar>(x(j));
        }
        g(i) += m;
      }
    return g;
  }

  /// Replaces x_i^k by x_i for every i in `binary` (valid where x_i is 0 or 1).
  Polynomial reduce_binary(const std::vector<int>& binary) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
      Exponents d(e);
      for (int i : binary) {
        check_index(i);
        if (d[i] > 1) d[i] = 1;
      }
      r.add_term(d, c);
    }
    return r;
  }

  /// Substitutes x_i := value for each (i, value) pair, keeping nvars unchanged
  /// (the fixed variables simply no longer appear).
  Polynomial fix(const std::vector<std::pair<int, Scalar>>& assignment) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
      Exponents d(e);
      Scalar m = c;
      for (const auto& [i, v] : assignment) {
        check_index(i);
        for (int k = 0; k < d[i]; ++k) m *= v;
        d[i] = 0;
      }
      r.add_term(d, m);
    }
    return r;
  }

  /// Re-indexes onto a subset of variables: new variable k is old variable keep[k].
  /// Every other variable must be absent from all terms.
  Polynomial restrict_to(const std::vector<int>& keep) const {
    Polynomial r(static_cast<int>(keep.size()));
    for (const auto& [e, c] : terms_) {
      Exponents d(keep.size(), 0);
      int carried = 0;
      for (std::size_t k = 0; k < keep.size(); ++k) {
        d[k] = e[keep[k]];
        carried += d[k];
      }
      if (carried != total_degree(e))
        throw std::invalid_argument("Polynomial::restrict_to: term uses a dropped variable");
      r.add_term(d, c);
    }
    return r;
  }

  /// Embeds into a larger variable set: old variable i becomes new variable map[i].
  Polynomial embed(int new_nvars, const std::vector<int>& map) const {
    if (static_cast<int>(map.size()) != nvars_)
      throw std::invalid_argument("Polynomial::embed: map size != nvars");
    Polynomial r(new_nvars);
    for (const auto& [e, c] : terms_) {
      Exponents d(new_nvars, 0);
      for (int i = 0; i < nvars_; ++i) d[map[i]] = static_cast<std::uint16_t>(d[map[i]] + e[i]);
      r.add_term(d, c);
    }
    return r;
  }

  /// Natural interval extension over a box: a guaranteed enclosure of the range.
  Interval range(const std::vector<Interval>& box) const {
    if (static_cast<int>(box.size()) != nvars_)
      throw std::invalid_argument("Polynomial::range: box dimension mismatch");
    Interval sum{0.0, 0.0};
    for (const auto& [e, c] : terms_) {
      Interval m{1.0, 1.0};
      for (int i = 0; i < nvars_; ++i)
        if (e[i] > 0) m = m * pow(box[i], e[i]);
      sum = sum + m * Interval{static_cast<double>(c), static_cast<double>(c)};
    }
    return sum;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      first = false;
      const auto mag = c < 0 ? -c : c;
      const bool unit = total_degree(e) > 0 && mag == Scalar(1);
      if (!unit) os << mag;
      bool star = !unit;
      for (int i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        if (star) os << "*";
        os << "x" << i;
        if (e[i] > 1) os << "^" << e[i];
        star = true;
      }
    }
    return os.str();
  }

  static int total_degree(const Exponents& e) {
    int d = 0;
    for (auto k : e) d += k;
    return d;
  }

 private:
  static Exponents unit_exponent(int n, int i, int k) {
    if (i < 0 || i >= n) throw std::out_of_range("Polynomial: variable index out of range");
    Exponents e(n, 0);
    e[i] = static_cast<std::uint16_t>(k);
    return e;
  }

  void check_same(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("Polynomial: nvars mismatch");
  }

  void check_index(int i) const {
    if (i < 0 || i >= nvars_) throw std::out_of_range("Polynomial: variable index out of range");
  }

  int nvars_ = 0;
  TermMap terms_;
};

using Polynomiald = Polynomial<double>;

template <typename Scalar, typename Derived>
Scalar evaluate(const Polynomial<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  return p.evaluate(x);
}

template <typename Scalar>
Polynomial<Scalar> reduce_binary(const Polynomial<Scalar>& p, const std::vector<int>& binary) {
  return p.reduce_binary(binary);
}

/// ||A x - b||^2 expanded into a polynomial.
template <typename Scalar>
Polynomial<Scalar> squared_residual(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
                                    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b) {
  Polynomial<Scalar> r(static_cast<int>(A.cols()));
  for (Eigen::Index k = 0; k < A.rows(); ++k)
    r += Polynomial<Scalar>::affine(A.row(k).transpose(), -b(k)).squared();
  return r;
}

}  // namespace lagr
