#pragma once

// Exact integer linear algebra: dense matrices over Z, Smith normal form,
// integral solving and homology of finitely generated free complexes.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ipl/errors.hpp"

namespace ipl {

using Integer = boost::multiprecision::cpp_int;
using IntVector = std::vector<Integer>;

inline Integer abs_value(const Integer& x) { return x < 0 ? Integer(-x) : x; }

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw InvalidInput("IntMatrix: ragged initializer");
      for (long long v : row) data_.emplace_back(v);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return x == 0; });
  }

  /// First nonzero entry in row-major order, if any.
  std::optional<std::pair<std::size_t, std::size_t>> first_nonzero() const {
    for (std::size_t k = 0; k < data_.size(); ++k)
      if (data_[k] != 0) return std::pair{k / cols_, k % cols_};
    return std::nullopt;
  }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  IntMatrix& operator+=(const IntMatrix& o) {
    require_same_shape(o, "+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  IntMatrix& operator-=(const IntMatrix& o) {
    require_same_shape(o, "-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  IntMatrix& operator*=(const Integer& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend IntMatrix operator+(IntMatrix a, const IntMatrix& b) { return a += b; }
  friend IntMatrix operator-(IntMatrix a, const IntMatrix& b) { return a -= b; }
  friend IntMatrix operator-(IntMatrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }
  friend IntMatrix operator*(const Integer& s, IntMatrix a) { return a *= s; }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_)
      throw InvalidInput("IntMatrix: product shape mismatch " + a.shape() + " * " + b.shape());
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (b(k, j) != 0) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend IntVector operator*(const IntMatrix& a, const IntVector& x) {
    if (a.cols_ != x.size()) throw InvalidInput("IntMatrix: vector length mismatch");
    IntVector y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j)
        if (a(i, j) != 0 && x[j] != 0) y[i] += a(i, j) * x[j];
    return y;
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  // Elementary operations used by the Smith reduction.
  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
  }
  /// row[dst] += factor * row[src]
  void add_row(std::size_t dst, std::size_t src, const Integer& factor) {
    if (factor == 0) return;
    for (std::size_t c = 0; c < cols_; ++c)
      if ((*this)(src, c) != 0) (*this)(dst, c) += factor * (*this)(src, c);
  }
  /// col[dst] += factor * col[src]
  void add_col(std::size_t dst, std::size_t src, const Integer& factor) {
    if (factor == 0) return;
    for (std::size_t r = 0; r < rows_; ++r)
      if ((*this)(r, src) != 0) (*this)(r, dst) += factor * (*this)(r, src);
  }
  void negate_row(std::size_t i) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

  std::string to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j);
      os << ']';
    }
    os << ']';
    return os.str();
  }

 private:
  void require_same_shape(const IntMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw InvalidInput(std::string("IntMatrix: shape mismatch in ") + op + " " + shape() +
                         " vs " + o.shape());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

/// U * A * V = S with S diagonal, d1 | d2 | ..., nonnegative, zeros trailing.
struct SmithDecomposition {
  IntMatrix S;
  IntMatrix U;
  IntMatrix V;

  std::size_t rank() const {
    std::size_t r = 0;
    while (r < std::min(S.rows(), S.cols()) && S(r, r) != 0) ++r;
    return r;
  }
  IntVector diagonal() const {
    IntVector d;
    for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i) d.push_back(S(i, i));
    return d;
  }
};

namespace detail {

// Smallest nonzero |entry| over rows/cols >= t; ties broken by (row, col).
inline std::optional<std::pair<std::size_t, std::size_t>> smallest_pivot(const IntMatrix& s,
                                                                         std::size_t t) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  Integer best_abs;
  for (std::size_t i = t; i < s.rows(); ++i)
    for (std::size_t j = t; j < s.cols(); ++j) {
      if (s(i, j) == 0) continue;
      Integer a = abs_value(s(i, j));
      if (!best || a < best_abs) {
        best = {i, j};
        best_abs = std::move(a);
      }
    }
  return best;
}

// Same as above restricted to row t and column t.
inline std::optional<std::pair<std::size_t, std::size_t>> smallest_in_cross(const IntMatrix& s,
                                                                           std::size_t t) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  Integer best_abs;
  auto consider = [&](std::size_t i, std::size_t j) {
    if (s(i, j) == 0) return;
    Integer a = abs_value(s(i, j));
    if (!best || a < best_abs || (a == best_abs && std::pair{i, j} < *best)) {
      best = {i, j};
      best_abs = std::move(a);
    }
  };
  for (std::size_t j = t; j < s.cols(); ++j) consider(t, j);
  for (std::size_t i = t + 1; i < s.rows(); ++i) consider(i, t);
  return best;
}

}  // namespace detail

inline SmithDecomposition smith_normal_form(const IntMatrix& a) {
  SmithDecomposition out{a, IntMatrix::identity(a.rows()), IntMatrix::identity(a.cols())};
  IntMatrix& s = out.S;
  IntMatrix& u = out.U;
  IntMatrix& v = out.V;
  const std::size_t diag = std::min(a.rows(), a.cols());

  auto move_to_pivot = [&](std::size_t t, std::pair<std::size_t, std::size_t> at) {
    s.swap_rows(t, at.first);
    u.swap_rows(t, at.first);
    s.swap_cols(t, at.second);
    v.swap_cols(t, at.second);
  };

  for (std::size_t t = 0; t < diag; ++t) {
    auto pivot = detail::smallest_pivot(s, t);
    if (!pivot) break;
    move_to_pivot(t, *pivot);

    for (;;) {
      bool residue = false;
      for (std::size_t i = t + 1; i < s.rows(); ++i) {
        if (s(i, t) == 0) continue;
        Integer q = s(i, t) / s(t, t);
        s.add_row(i, t, -q);
        u.add_row(i, t, -q);
        residue = residue || s(i, t) != 0;
      }
      for (std::size_t j = t + 1; j < s.cols(); ++j) {
        if (s(t, j) == 0) continue;
        Integer q = s(t, j) / s(t, t);
        s.add_col(j, t, -q);
        v.add_col(j, t, -q);
        residue = residue || s(t, j) != 0;
      }
      if (residue) {
        move_to_pivot(t, *detail::smallest_in_cross(s, t));
        continue;
      }
      // Row and column are clear; enforce divisibility of the remaining block.
      std::optional<std::size_t> bad_row;
      for (std::size_t i = t + 1; i < s.rows() && !bad_row; ++i)
        for (std::size_t j = t + 1; j < s.cols(); ++j)
          if (s(i, j) % s(t, t) != 0) {
            bad_row = i;
            break;
          }
      if (!bad_row) break;
      s.add_row(t, *bad_row, 1);
      u.add_row(t, *bad_row, 1);
    }
    if (s(t, t) < 0) {
      s.negate_row(t);
      u.negate_row(t);
    }
  }
  return out;
}

/// Canonical particular solution of A x = b over Z (free parameters set to 0),
/// or nullopt when no integral solution exists.
inline std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b,
                                              const SmithDecomposition& snf) {
  if (b.size() != a.rows()) throw InvalidInput("solve_integer: rhs length mismatch");
  IntVector c = snf.U * b;
  IntVector y(a.cols());
  const std::size_t r = snf.rank();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i < r) {
      if (c[i] % snf.S(i, i) != 0) return std::nullopt;
      y[i] = c[i] / snf.S(i, i);
    } else if (c[i] != 0) {
      return std::nullopt;
    }
  }
  return snf.V * y;
}

inline std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b) {
  return solve_integer(a, b, smith_normal_form(a));
}

/// Z-basis of ker A, as columns.
inline IntMatrix kernel_basis(const IntMatrix& a) {
  SmithDecomposition snf = smith_normal_form(a);
  const std::size_t r = snf.rank();
  IntMatrix k(a.cols(), a.cols() - r);
  for (std::size_t j = r; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) k(i, j - r) = snf.V(i, j);
  return k;
}

/// Finitely generated abelian group Z^free_rank + sum Z/t_i with t_1 | t_2 | ...
struct AbelianGroupInvariants {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  friend bool operator==(const AbelianGroupInvariants&, const AbelianGroupInvariants&) = default;

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    if (free_rank > 0) {
      os << "Z";
      if (free_rank > 1) os << "^" << free_rank;
      first = false;
    }
    for (const auto& t : torsion) {
      os << (first ? "" : " + ") << "Z/" << t;
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }
};

/// Homology ker(d_out) / im(d_in) of C_{n+1} --d_in--> C_n --d_out--> C_{n-1}.
inline AbelianGroupInvariants homology_at(const IntMatrix& d_in, const IntMatrix& d_out) {
  if (d_in.rows() != d_out.cols())
    throw InvalidInput("homology_at: middle ranks disagree (" + d_in.shape() + " then " +
                       d_out.shape() + ")");
  if (!(d_out * d_in).is_zero()) throw InvalidInput("homology_at: d_out * d_in != 0");
  const std::size_t middle = d_in.rows();
  const SmithDecomposition in = smith_normal_form(d_in);
  const std::size_t rank_out = smith_normal_form(d_out).rank();
  AbelianGroupInvariants h;
  h.free_rank = middle - rank_out - in.rank();
  for (const auto& x : in.diagonal())
    if (x > 1) h.torsion.push_back(x);
  return h;
}

}  // namespace ipl
