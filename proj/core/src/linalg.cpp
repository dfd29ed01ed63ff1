#include "ree/linalg.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "ree/errors.hpp"

namespace ree {

// ---------------------------------------------------------------------------
// Matrix

Matrix Matrix::identity(const Field* f, int n) {
  Matrix m(f, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix Matrix::from_rows(const Field* f, const std::vector<Vec>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows[0].size()) : 0;
  Matrix m(f, r, c);
  for (int i = 0; i < r; ++i) m.set_row(i, rows[i]);
  return m;
}

Matrix Matrix::diagonal(const Field* f, const Vec& d) {
  int n = static_cast<int>(d.size());
  Matrix m(f, n);
  for (int i = 0; i < n; ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::antidiagonal(const Field* f, const Vec& d) {
  int n = static_cast<int>(d.size());
  Matrix m(f, n);
  for (int i = 0; i < n; ++i) m(i, n - 1 - i) = d[i];
  return m;
}

Matrix Matrix::random(const Field* f, int rows, int cols, Rng& rng) {
  Matrix m(f, rows, cols);
  for (auto& x : m.a_) x = static_cast<Elem>(uniform(rng, f->q()));
  return m;
}

Matrix Matrix::random_invertible(const Field* f, int n, Rng& rng) {
  for (;;) {
    Matrix m = random(f, n, n, rng);
    if (m.det() != 0) return m;
  }
}

Vec Matrix::row(int i) const {
  return Vec(a_.begin() + static_cast<std::ptrdiff_t>(i) * cols_, a_.begin() + static_cast<std::ptrdiff_t>(i + 1) * cols_);
}

void Matrix::set_row(int i, const Vec& v) {
  std::copy(v.begin(), v.end(), a_.begin() + static_cast<std::ptrdiff_t>(i) * cols_);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
  const Field& f = *a.f_;
  Matrix c(a.f_, a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int k = 0; k < a.cols_; ++k) {
      Elem x = a(i, k);
      if (x == 0) continue;
      for (int j = 0; j < b.cols_; ++j) {
        Elem y = b(k, j);
        if (y != 0) c(i, j) = f.add(c(i, j), f.mul(x, y));
      }
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] = a.f_->add(a.a_[i], b.a_[i]);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] = a.f_->sub(a.a_[i], b.a_[i]);
  return c;
}

Matrix Matrix::scaled(Elem s) const {
  Matrix c = *this;
  for (auto& x : c.a_) x = f_->mul(x, s);
  return c;
}

bool Matrix::is_identity() const {
  if (!square()) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if ((*this)(i, j) != (i == j ? 1u : 0u)) return false;
  return true;
}

bool Matrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](Elem x) { return x == 0; });
}

bool Matrix::is_diagonal() const {
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (i != j && (*this)(i, j) != 0) return false;
  return true;
}

bool Matrix::is_upper_triangular() const {
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < i && j < cols_; ++j)
      if ((*this)(i, j) != 0) return false;
  return true;
}

Matrix Matrix::transpose() const {
  Matrix t(f_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Elem Matrix::det() const {
  if (!square()) throw std::invalid_argument("det: non-square matrix");
  const Field& f = *f_;
  Matrix m = *this;
  Elem d = 1;
  int n = rows_;
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int r = c; r < n; ++r)
      if (m(r, c) != 0) {
        p = r;
        break;
      }
    if (p < 0) return 0;
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      d = f.neg(d);
    }
    Elem piv = m(c, c);
    d = f.mul(d, piv);
    Elem pinv = f.inv(piv);
    for (int r = c + 1; r < n; ++r) {
      Elem x = m(r, c);
      if (x == 0) continue;
      Elem u = f.mul(x, pinv);
      for (int j = c; j < n; ++j) m(r, j) = f.sub(m(r, j), f.mul(u, m(c, j)));
    }
  }
  return d;
}

Elem Matrix::trace() const {
  Elem s = 0;
  for (int i = 0; i < rows_ && i < cols_; ++i) s = f_->add(s, (*this)(i, i));
  return s;
}

int Matrix::rank() const {
  Matrix m = *this;
  return static_cast<int>(rref(m).size());
}

Matrix Matrix::inverse() const {
  if (!square()) throw std::invalid_argument("inverse: non-square matrix");
  const Field& f = *f_;
  int n = rows_;
  Matrix m(f_, n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = (*this)(i, j);
    m(i, n + i) = 1;
  }
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int r = c; r < n; ++r)
      if (m(r, c) != 0) {
        p = r;
        break;
      }
    if (p < 0) throw ArithmeticError("inverse: singular matrix");
    if (p != c)
      for (int j = 0; j < 2 * n; ++j) std::swap(m(p, j), m(c, j));
    Elem pinv = f.inv(m(c, c));
    for (int j = 0; j < 2 * n; ++j) m(c, j) = f.mul(m(c, j), pinv);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      Elem x = m(r, c);
      if (x == 0) continue;
      for (int j = 0; j < 2 * n; ++j) m(r, j) = f.sub(m(r, j), f.mul(x, m(c, j)));
    }
  }
  return m.block(0, n, n, n);
}

Matrix Matrix::pow(unsigned __int128 e) const {
  Matrix result = identity(f_, rows_);
  Matrix base = *this;
  while (e) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

Matrix Matrix::pow_signed(long long e) const {
  if (e >= 0) return pow(static_cast<unsigned __int128>(e));
  return inverse().pow(static_cast<unsigned __int128>(-(e + 1)) + 1);
}

Matrix Matrix::frobenius(int k) const {
  Matrix c = *this;
  for (auto& x : c.a_) x = f_->frobenius_power(x, k);
  return c;
}

Matrix Matrix::block(std::span<const int> rs, std::span<const int> cs) const {
  Matrix b(f_, static_cast<int>(rs.size()), static_cast<int>(cs.size()));
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = 0; j < cs.size(); ++j) b(static_cast<int>(i), static_cast<int>(j)) = (*this)(rs[i], cs[j]);
  return b;
}

Matrix Matrix::block(int r0, int c0, int nr, int nc) const {
  Matrix b(f_, nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

std::size_t Matrix::hash() const {
  std::size_t h = static_cast<std::size_t>(rows_) * 1000003u + static_cast<std::size_t>(cols_);
  for (Elem x : a_) h = h * 1099511628211ull + x;
  return h;
}

// ---------------------------------------------------------------------------
// Vectors

Vec vec_mul(const Field& f, const Vec& v, const Matrix& g) {
  Vec r(g.cols(), 0);
  for (int k = 0; k < g.rows(); ++k) {
    Elem x = v[k];
    if (x == 0) continue;
    for (int j = 0; j < g.cols(); ++j) {
      Elem y = g(k, j);
      if (y != 0) r[j] = f.add(r[j], f.mul(x, y));
    }
  }
  return r;
}

Elem dot(const Field& f, const Vec& u, const Vec& v) {
  Elem s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s = f.add(s, f.mul(u[i], v[i]));
  return s;
}

Elem bilinear(const Field& f, const Vec& u, const Matrix& gram, const Vec& v) { return dot(f, vec_mul(f, u, gram), v); }

Vec vec_add(const Field& f, const Vec& u, const Vec& v) {
  Vec r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = f.add(u[i], v[i]);
  return r;
}

Vec vec_scale(const Field& f, const Vec& u, Elem s) {
  Vec r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = f.mul(u[i], s);
  return r;
}

bool vec_is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](Elem x) { return x == 0; });
}

Vec normalize_projective(const Field& f, Vec v) {
  for (Elem x : v) {
    if (x != 0) {
      Elem s = f.inv(x);
      for (auto& y : v) y = f.mul(y, s);
      return v;
    }
  }
  throw std::invalid_argument("normalize_projective: zero vector");
}

bool projectively_equal(const Field& f, const Vec& u, const Vec& v) {
  return normalize_projective(f, u) == normalize_projective(f, v);
}

// ---------------------------------------------------------------------------
// Echelon forms

std::vector<int> rref(Matrix& m) {
  const Field& f = *m.field();
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int p = -1;
    for (int i = r; i < m.rows(); ++i)
      if (m(i, c) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Elem pinv = f.inv(m(r, c));
    for (int j = c; j < m.cols(); ++j) m(r, j) = f.mul(m(r, j), pinv);
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r) continue;
      Elem x = m(i, c);
      if (x == 0) continue;
      for (int j = c; j < m.cols(); ++j) m(i, j) = f.sub(m(i, j), f.mul(x, m(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

Matrix right_null_space(const Matrix& a) {
  const Field& f = *a.field();
  Matrix m = a;
  std::vector<int> pivots = rref(m);
  int n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<Vec> basis;
  for (int free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    Vec v(n, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = f.neg(m(static_cast<int>(r), free));
    basis.push_back(v);
  }
  Matrix out(a.field(), static_cast<int>(basis.size()), n);
  for (std::size_t i = 0; i < basis.size(); ++i) out.set_row(static_cast<int>(i), basis[i]);
  if (out.rows() > 0) rref(out);
  return out;
}

Matrix null_space(const Matrix& a) { return right_null_space(a.transpose()); }

Matrix eigenspace(const Matrix& g, Elem lambda) {
  return null_space(g - Matrix::identity(g.field(), g.rows()).scaled(lambda));
}

Matrix row_space(const Matrix& rows) {
  Matrix m = rows;
  int r = static_cast<int>(rref(m).size());
  return m.block(0, 0, r, m.cols());
}

bool in_span(const Matrix& basis, const Vec& v) {
  Matrix m(basis.field(), basis.rows() + 1, basis.cols());
  for (int i = 0; i < basis.rows(); ++i) m.set_row(i, basis.row(i));
  m.set_row(basis.rows(), v);
  return m.rank() == basis.rank();
}

std::optional<Vec> solve_left(const Matrix& a, const Vec& b) {
  // x a = b  <=>  a^T x^T = b^T; augment a^T with b and reduce.
  const Field& f = *a.field();
  Matrix at = a.transpose();
  Matrix m(a.field(), at.rows(), at.cols() + 1);
  for (int i = 0; i < at.rows(); ++i) {
    for (int j = 0; j < at.cols(); ++j) m(i, j) = at(i, j);
    m(i, at.cols()) = b[i];
  }
  std::vector<int> piv = rref(m);
  Vec x(a.rows(), 0);
  for (std::size_t r = 0; r < piv.size(); ++r) {
    if (piv[r] == at.cols()) return std::nullopt;
    x[piv[r]] = m(static_cast<int>(r), at.cols());
  }
  (void)f;
  return x;
}

// ---------------------------------------------------------------------------
// Polynomials

void poly_trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Field& f, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = f.add(c[i + j], f.mul(a[i], b[j]));
  }
  poly_trim(c);
  return c;
}

Poly poly_sub(const Field& f, const Poly& a, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    Elem x = i < a.size() ? a[i] : 0;
    Elem y = i < b.size() ? b[i] : 0;
    c[i] = f.sub(x, y);
  }
  poly_trim(c);
  return c;
}

std::pair<Poly, Poly> poly_divmod(const Field& f, const Poly& a, const Poly& b) {
  Poly bb = b;
  poly_trim(bb);
  if (bb.empty()) throw ArithmeticError("polynomial division by zero");
  Poly r = a;
  poly_trim(r);
  if (r.size() < bb.size()) return {{}, r};
  Poly quo(r.size() - bb.size() + 1, 0);
  Elem lead_inv = f.inv(bb.back());
  while (r.size() >= bb.size()) {
    std::size_t shift = r.size() - bb.size();
    Elem c = f.mul(r.back(), lead_inv);
    quo[shift] = c;
    for (std::size_t i = 0; i < bb.size(); ++i) r[shift + i] = f.sub(r[shift + i], f.mul(c, bb[i]));
    poly_trim(r);
  }
  poly_trim(quo);
  return {quo, r};
}

Poly poly_mod(const Field& f, const Poly& a, const Poly& b) { return poly_divmod(f, a, b).second; }

Poly poly_monic(const Field& f, Poly a) {
  poly_trim(a);
  if (a.empty()) return a;
  Elem s = f.inv(a.back());
  for (auto& x : a) x = f.mul(x, s);
  return a;
}

Poly poly_gcd(const Field& f, Poly a, Poly b) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(f, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(f, a);
}

Poly poly_powmod(const Field& f, const Poly& base, unsigned __int128 e, const Poly& mod) {
  Poly result{1};
  result = poly_mod(f, result, mod);
  Poly b = poly_mod(f, base, mod);
  while (e) {
    if (e & 1) result = poly_mod(f, poly_mul(f, result, b), mod);
    e >>= 1;
    if (e) b = poly_mod(f, poly_mul(f, b, b), mod);
  }
  return result;
}

Elem poly_eval(const Field& f, const Poly& p, Elem x) {
  Elem r = 0;
  for (std::size_t i = p.size(); i-- > 0;) r = f.add(f.mul(r, x), p[i]);
  return r;
}

Poly char_poly(const Matrix& g) {
  const Field& f = *g.field();
  int n = g.rows();
  Matrix h = g;
  // Similarity reduction to upper Hessenberg form.
  for (int j = 0; j + 2 < n; ++j) {
    int p = -1;
    for (int i = j + 1; i < n; ++i)
      if (h(i, j) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != j + 1) {
      for (int c = 0; c < n; ++c) std::swap(h(p, c), h(j + 1, c));
      for (int r = 0; r < n; ++r) std::swap(h(r, p), h(r, j + 1));
    }
    Elem pinv = f.inv(h(j + 1, j));
    for (int k = j + 2; k < n; ++k) {
      Elem u = f.mul(h(k, j), pinv);
      if (u == 0) continue;
      for (int c = 0; c < n; ++c) h(k, c) = f.sub(h(k, c), f.mul(u, h(j + 1, c)));
      for (int r = 0; r < n; ++r) h(r, j + 1) = f.add(h(r, j + 1), f.mul(u, h(r, k)));
    }
  }
  std::vector<Poly> p(n + 1);
  p[0] = Poly{1};
  for (int k = 1; k <= n; ++k) {
    // (x - h[k-1][k-1]) * p[k-1]
    p[k] = poly_mul(f, Poly{f.neg(h(k - 1, k - 1)), 1}, p[k - 1]);
    Elem t = 1;
    for (int i = 1; i < k; ++i) {
      t = f.mul(t, h(k - i, k - i - 1));
      if (t == 0) break;
      Elem c = f.mul(t, h(k - i - 1, k - 1));
      if (c == 0) continue;
      p[k] = poly_sub(f, p[k], poly_mul(f, Poly{c}, p[k - i - 1]));
    }
  }
  Poly r = p[n];
  r.resize(n + 1, 0);
  return r;
}

namespace {

void split_roots(const Field& f, const Poly& g, Rng& rng, std::vector<Elem>& out) {
  int deg = static_cast<int>(g.size()) - 1;
  if (deg <= 0) return;
  if (deg == 1) {
    out.push_back(f.neg(f.div(g[0], g[1])));
    return;
  }
  const unsigned __int128 half = (f.q() - 1) / 2;
  for (;;) {
    Elem delta = static_cast<Elem>(uniform(rng, f.q()));
    Poly w = poly_powmod(f, Poly{delta, 1}, half, g);
    w = poly_sub(f, w, Poly{1});
    Poly h = poly_gcd(f, g, w);
    int dh = static_cast<int>(h.size()) - 1;
    if (dh > 0 && dh < deg) {
      split_roots(f, h, rng, out);
      split_roots(f, poly_divmod(f, g, h).first, rng, out);
      return;
    }
  }
}

}  // namespace

std::vector<Elem> poly_roots(const Field& f, const Poly& p0, Rng& rng) {
  Poly p = poly_monic(f, p0);
  if (p.empty()) throw std::invalid_argument("poly_roots: zero polynomial");
  std::vector<Elem> roots;
  if (p.size() == 1) return roots;
  // gcd with x^q - x isolates the product of distinct linear factors.
  Poly xq = poly_powmod(f, Poly{0, 1}, f.q(), p);
  Poly g = poly_gcd(f, p, poly_sub(f, xq, Poly{0, 1}));
  split_roots(f, g, rng, roots);
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<std::pair<Elem, int>> char_poly_roots(const Matrix& g, Rng& rng) {
  const Field& f = *g.field();
  Poly cp = char_poly(g);
  std::vector<std::pair<Elem, int>> out;
  for (Elem r : poly_roots(f, cp, rng)) {
    int mult = 0;
    Poly cur = cp;
    for (;;) {
      auto [quo, rem] = poly_divmod(f, cur, Poly{f.neg(r), 1});
      if (!rem.empty()) break;
      ++mult;
      cur = quo;
    }
    out.emplace_back(r, mult);
  }
  return out;
}

std::vector<std::pair<Elem, int>> char_poly_roots(const Matrix& g) {
  Rng rng(0x5eed);
  return char_poly_roots(g, rng);
}

// ---------------------------------------------------------------------------
// Module constructions

Matrix symmetric_square(const Matrix& g) {
  const Field& f = *g.field();
  int n = g.rows();
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) idx.emplace_back(i, j);
  int d = static_cast<int>(idx.size());
  Matrix s(g.field(), d);
  for (int r = 0; r < d; ++r) {
    auto [i, j] = idx[r];
    for (int c = 0; c < d; ++c) {
      auto [k, l] = idx[c];
      Elem v = f.mul(g(i, k), g(j, l));
      if (k != l) v = f.add(v, f.mul(g(i, l), g(j, k)));
      s(r, c) = v;
    }
  }
  return s;
}

Matrix exterior_square(const Matrix& g) {
  const Field& f = *g.field();
  int n = g.rows();
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) idx.emplace_back(i, j);
  int d = static_cast<int>(idx.size());
  Matrix s(g.field(), d);
  for (int r = 0; r < d; ++r) {
    auto [i, j] = idx[r];
    for (int c = 0; c < d; ++c) {
      auto [k, l] = idx[c];
      s(r, c) = f.sub(f.mul(g(i, k), g(j, l)), f.mul(g(i, l), g(j, k)));
    }
  }
  return s;
}

std::vector<Matrix> invariant_bilinear_forms(std::span<const Matrix> gens) {
  if (gens.empty()) throw std::invalid_argument("invariant_bilinear_forms: no generators");
  const Field* fp = gens[0].field();
  const Field& f = *fp;
  int n = gens[0].rows();
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) idx.emplace_back(i, j);
  int nu = static_cast<int>(idx.size());
  Matrix sys(fp, static_cast<int>(gens.size()) * nu, nu);
  int row = 0;
  for (const Matrix& g : gens) {
    for (auto [a, b] : idx) {
      for (int u = 0; u < nu; ++u) {
        auto [i, j] = idx[u];
        Elem c = f.mul(g(a, i), g(b, j));
        if (i != j) c = f.add(c, f.mul(g(a, j), g(b, i)));
        if (i == a && j == b) c = f.sub(c, 1);
        sys(row, u) = c;
      }
      ++row;
    }
  }
  Matrix ns = right_null_space(sys);
  std::vector<Matrix> forms;
  for (int r = 0; r < ns.rows(); ++r) {
    Matrix k(fp, n);
    for (int u = 0; u < nu; ++u) {
      auto [i, j] = idx[u];
      k(i, j) = ns(r, u);
      k(j, i) = ns(r, u);
    }
    forms.push_back(k);
  }
  return forms;
}

std::vector<Matrix> intertwiners(std::span<const Matrix> a, std::span<const Matrix> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("intertwiners: mismatched generator lists");
  const Field* fp = a[0].field();
  const Field& f = *fp;
  int n = a[0].rows(), m = b[0].rows();
  int nu = n * m;
  Matrix sys(fp, static_cast<int>(a.size()) * nu, nu);
  int row = 0;
  for (std::size_t g = 0; g < a.size(); ++g) {
    for (int r = 0; r < n; ++r) {
      for (int s = 0; s < m; ++s) {
        // (a c - c b)_{rs}
        for (int k = 0; k < n; ++k) sys(row, k * m + s) = f.add(sys(row, k * m + s), a[g](r, k));
        for (int l = 0; l < m; ++l) sys(row, r * m + l) = f.sub(sys(row, r * m + l), b[g](l, s));
        ++row;
      }
    }
  }
  Matrix ns = right_null_space(sys);
  std::vector<Matrix> out;
  for (int i = 0; i < ns.rows(); ++i) {
    Matrix c(fp, n, m);
    for (int u = 0; u < nu; ++u) c(u / m, u % m) = ns(i, u);
    out.push_back(c);
  }
  return out;
}

std::optional<Matrix> module_isomorphism(std::span<const Matrix> a, std::span<const Matrix> b, Rng& rng) {
  if (a.empty() || a[0].rows() != b[0].rows()) return std::nullopt;
  auto basis = intertwiners(a, b);
  if (basis.empty()) return std::nullopt;
  for (const Matrix& c : basis)
    if (c.det() != 0) return c;
  if (basis.size() == 1) return std::nullopt;
  const Field* fp = a[0].field();
  for (int attempt = 0; attempt < 40; ++attempt) {
    Matrix c(fp, a[0].rows());
    for (const Matrix& bmat : basis) c = c + bmat.scaled(static_cast<Elem>(uniform(rng, fp->q())));
    if (c.det() != 0) return c;
  }
  return std::nullopt;
}

std::optional<Matrix> module_isomorphism(std::span<const Matrix> a, std::span<const Matrix> b) {
  Rng rng(0x150);
  return module_isomorphism(a, b, rng);
}

namespace {

/// Incrementally maintained echelon basis.
class EchelonBasis {
public:
  EchelonBasis(const Field& f, int n) : f_(f), n_(n) {}
  /// Reduce v; returns true and stores it if independent.
  bool add(Vec v) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      Elem x = v[pivots_[i]];
      if (x == 0) continue;
      const Vec& r = rows_[i];
      for (int j = 0; j < n_; ++j)
        if (r[j] != 0) v[j] = f_.sub(v[j], f_.mul(x, r[j]));
    }
    for (int j = 0; j < n_; ++j) {
      if (v[j] != 0) {
        Elem s = f_.inv(v[j]);
        for (auto& y : v) y = f_.mul(y, s);
        rows_.push_back(std::move(v));
        pivots_.push_back(j);
        return true;
      }
    }
    return false;
  }
  int size() const { return static_cast<int>(rows_.size()); }
  const Vec& row(int i) const { return rows_[i]; }

private:
  const Field& f_;
  int n_;
  std::vector<Vec> rows_;
  std::vector<int> pivots_;
};

}  // namespace

Matrix spin(const Matrix& start, std::span<const Matrix> gens) {
  const Field& f = *start.field();
  int n = start.cols();
  EchelonBasis eb(f, n);
  for (int i = 0; i < start.rows(); ++i) eb.add(start.row(i));
  for (int i = 0; i < eb.size() && eb.size() < n; ++i) {
    Vec v = eb.row(i);
    for (const Matrix& g : gens) eb.add(vec_mul(f, v, g));
  }
  Matrix out(start.field(), eb.size(), n);
  for (int i = 0; i < eb.size(); ++i) out.set_row(i, eb.row(i));
  if (out.rows() > 0) rref(out);
  return out;
}

Matrix spin(const Vec& v, std::span<const Matrix> gens) {
  Matrix s(gens[0].field(), 1, static_cast<int>(v.size()));
  s.set_row(0, v);
  return spin(s, gens);
}

namespace {

std::optional<Matrix> search_submodule(std::span<const Matrix> gens, int target_dim, Rng& rng, int attempts) {
  const Field* fp = gens[0].field();
  const Field& f = *fp;
  int n = gens[0].rows();
  for (int attempt = 0; attempt < attempts; ++attempt) {
    // Random word of length 1..6 in the generators plus a random scalar shift
    // of the identity keeps the algebra element generic.
    Matrix w = gens[uniform(rng, gens.size())];
    int len = 1 + static_cast<int>(uniform(rng, 6));
    for (int i = 1; i < len; ++i) w = w * gens[uniform(rng, gens.size())];
    if (attempt % 2 == 1) {
      Matrix w2 = gens[uniform(rng, gens.size())];
      w = w + w2.scaled(static_cast<Elem>(uniform(rng, f.q())));
    }
    for (auto [lambda, mult] : char_poly_roots(w, rng)) {
      (void)mult;
      Matrix es = eigenspace(w, lambda);
      std::vector<Vec> candidates;
      for (int r = 0; r < es.rows(); ++r) candidates.push_back(es.row(r));
      if (es.rows() > 1) {
        Vec v(n, 0);
        for (int r = 0; r < es.rows(); ++r) v = vec_add(f, v, vec_scale(f, es.row(r), static_cast<Elem>(uniform(rng, f.q()))));
        if (!vec_is_zero(v)) candidates.push_back(v);
      }
      for (const Vec& v : candidates) {
        Matrix s = spin(v, gens);
        if (s.rows() > 0 && s.rows() < n && (target_dim == 0 || s.rows() == target_dim)) return s;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Matrix> spin_invariant_submodule(std::span<const Matrix> gens, int target_dim, Rng& rng, int attempts) {
  if (gens.empty()) throw std::invalid_argument("spin_invariant_submodule: no generators");
  int n = gens[0].rows();
  if (auto s = search_submodule(gens, target_dim, rng, attempts)) return s;
  // Dual module: a submodule W of V* gives the submodule Ann(W) of V.
  std::vector<Matrix> dual;
  for (const Matrix& g : gens) dual.push_back(g.inverse().transpose());
  int dual_target = target_dim == 0 ? 0 : n - target_dim;
  if (auto w = search_submodule(dual, dual_target, rng, attempts)) return right_null_space(*w);
  return std::nullopt;
}

Matrix restrict_to_subspace(const Matrix& g, const Matrix& basis) {
  const Field& f = *g.field();
  Matrix r(g.field(), basis.rows());
  for (int i = 0; i < basis.rows(); ++i) {
    Vec img = vec_mul(f, basis.row(i), g);
    auto coords = solve_left(basis, img);
    if (!coords) throw std::invalid_argument("restrict_to_subspace: subspace not invariant");
    r.set_row(i, *coords);
  }
  return r;
}

Matrix reflection(const Matrix& gram, const Vec& v) {
  const Field& f = *gram.field();
  int n = gram.rows();
  Elem bvv = bilinear(f, v, gram, v);
  if (bvv == 0) throw ArithmeticError("reflection in an isotropic vector");
  Elem two_over = f.div(f.from_int(2), bvv);
  Vec bv = vec_mul(f, v, gram.transpose());  // bv[i] = B(e_i, v)
  Matrix r = Matrix::identity(gram.field(), n);
  for (int i = 0; i < n; ++i) {
    Elem c = f.mul(bv[i], two_over);
    for (int j = 0; j < n; ++j) r(i, j) = f.sub(r(i, j), f.mul(c, v[j]));
  }
  return r;
}

int spinor_norm(const Matrix& g, const Matrix& gram) {
  const Field& f = *g.field();
  int n = g.rows();
  if (g * gram * g.transpose() != gram) throw NotOrthogonal("spinor_norm: matrix does not preserve the form");
  // Wall form on W = V(1 - g): chi(u, v) = B(u, y) where v = y(1 - g). Its
  // discriminant is the product of the Q-values of any reflection factorization.
  Matrix one_minus = Matrix::identity(g.field(), n) - g;
  Matrix w = row_space(one_minus);
  int k = w.rows();
  if (k == 0) return 0;
  std::vector<Vec> pre;
  for (int j = 0; j < k; ++j) pre.push_back(*solve_left(one_minus, w.row(j)));
  Matrix chi(g.field(), k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) chi(i, j) = bilinear(f, w.row(i), gram, pre[j]);
  Elem d = chi.det();
  if (d == 0) throw ArithmeticError("spinor_norm: degenerate Wall form");
  return f.is_square(d) ? 0 : 1;
}

std::string format_matrix(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << ' ' << m.field()->q() << '\n';
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
  return os.str();
}

std::string format_matrices(std::span<const Matrix> ms) {
  std::string s = "count " + std::to_string(ms.size()) + "\n";
  for (const Matrix& m : ms) s += format_matrix(m);
  return s;
}

Matrix read_matrix(std::istream& in, const Field* f) {
  long long dim = 0, q = 0;
  if (!(in >> dim >> q)) throw FormatError("matrix: expected \"dim q\" header");
  if (dim <= 0 || dim > 64) throw FormatError("matrix: bad dimension " + std::to_string(dim));
  if (q != f->q()) throw FormatError("matrix: q = " + std::to_string(q) + " does not match the field");
  Matrix m(f, static_cast<int>(dim), static_cast<int>(dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      long long x = -1;
      if (!(in >> x)) throw FormatError("matrix: truncated entries");
      if (x < 0 || x >= q) throw FormatError("matrix: entry " + std::to_string(x) + " out of range");
      m(i, j) = static_cast<Elem>(x);
    }
  return m;
}

std::vector<Matrix> read_matrices(std::istream& in, const Field* f) {
  std::string word;
  long long n = -1;
  if (!(in >> word >> n) || word != "count" || n < 0) throw FormatError("generator file: expected \"count n\" header");
  std::vector<Matrix> out;
  for (long long i = 0; i < n; ++i) out.push_back(read_matrix(in, f));
  return out;
}

std::uint32_t peek_field_size(std::istream& in) {
  auto pos = in.tellg();
  std::string word;
  long long a = 0, b = 0;
  if (!(in >> word)) throw FormatError("empty input");
  if (word == "count") {
    if (!(in >> a >> a >> b)) throw FormatError("generator file: truncated header");
  } else {
    if (!(in >> b)) throw FormatError("matrix: truncated header");
  }
  in.clear();
  in.seekg(pos);
  if (b < 3 || b > 0xffffffffLL) throw FormatError("bad field size");
  return static_cast<std::uint32_t>(b);
}

// ---------------------------------------------------------------------------

namespace {

// Inverse of a square matrix over F_3 with entries in {0,1,2}; nullopt if singular.
std::optional<std::vector<std::vector<int>>> invert_mod3(std::vector<std::vector<int>> a) {
  int n = static_cast<int>(a.size());
  std::vector<std::vector<int>> inv(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    int s = a[col][col];  // 1 and 2 are their own inverses mod 3
    for (int k = 0; k < n; ++k) {
      a[col][k] = a[col][k] * s % 3;
      inv[col][k] = inv[col][k] * s % 3;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      int c = a[r][col];
      for (int k = 0; k < n; ++k) {
        a[r][k] = ((a[r][k] - c * a[col][k]) % 3 + 3) % 3;
        inv[r][k] = ((inv[r][k] - c * inv[col][k]) % 3 + 3) % 3;
      }
    }
  }
  return inv;
}

std::vector<std::vector<int>> coefficient_rows(const Field& f, std::span<const Elem> elems) {
  std::vector<std::vector<int>> rows;
  for (Elem e : elems) rows.push_back(f.coefficients(e));
  return rows;
}

}  // namespace

PrimeFieldBasis::PrimeFieldBasis(const Field& f, std::vector<Elem> basis) : f_(&f), basis_(std::move(basis)) {
  if (static_cast<int>(basis_.size()) != f.degree()) throw std::invalid_argument("PrimeFieldBasis: wrong number of elements");
  auto inv = invert_mod3(coefficient_rows(f, basis_));
  if (!inv) throw std::invalid_argument("PrimeFieldBasis: elements are linearly dependent over F_3");
  inverse_ = std::move(*inv);
}

bool PrimeFieldBasis::is_basis(const Field& f, std::span<const Elem> elems) {
  return static_cast<int>(elems.size()) == f.degree() && invert_mod3(coefficient_rows(f, elems)).has_value();
}

std::vector<std::size_t> PrimeFieldBasis::select_independent(const Field& f, std::span<const Elem> elems) {
  // Echelon rows keyed by pivot column.
  std::vector<std::vector<int>> echelon(f.degree());
  std::vector<std::size_t> chosen;
  for (std::size_t idx = 0; idx < elems.size(); ++idx) {
    std::vector<int> v = f.coefficients(elems[idx]);
    for (int col = 0; col < f.degree(); ++col) {
      if (v[col] == 0) continue;
      if (echelon[col].empty()) {
        int s = v[col];  // normalize the pivot to 1
        for (int& x : v) x = x * s % 3;
        echelon[col] = v;
        chosen.push_back(idx);
        break;
      }
      int c = v[col];
      for (int k = 0; k < f.degree(); ++k) v[k] = ((v[k] - c * echelon[col][k]) % 3 + 3) % 3;
    }
  }
  return chosen;
}

std::vector<int> PrimeFieldBasis::coordinates(Elem x) const {
  std::vector<int> c = f_->coefficients(x);
  int n = static_cast<int>(c.size());
  std::vector<int> out(n, 0);
  for (int k = 0; k < n; ++k) {
    int s = 0;
    for (int i = 0; i < n; ++i) s += c[i] * inverse_[i][k];
    out[k] = s % 3;
  }
  return out;
}

}  // namespace ree
