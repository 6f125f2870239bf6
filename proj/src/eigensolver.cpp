#include "ptspectra/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ptspectra/error.hpp"

namespace ptspectra {

namespace {

constexpr double kMachEps = std::numeric_limits<double>::epsilon();

struct QrOutcome {
  ComplexVector values;
  std::vector<bool> converged;
  std::size_t sweeps = 0;
};

// Row-major real matrix used by the real double-shift path.
struct RealMatrix {
  std::size_t n = 0;
  std::vector<double> a;
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

void require_square_finite(const ComplexMatrix& a) {
  if (!a.square()) throw Error(ErrorKind::InvalidInput, "eigensolver: matrix must be square");
  if (!a.all_finite()) throw Error(ErrorKind::InvalidInput, "eigensolver: non-finite entries");
}

// Parlett-Reinsch scaling with radix 2 (exact in floating point).
void balance_in_place(ComplexMatrix& a, std::vector<double>& scale) {
  const std::size_t n = a.rows();
  scale.assign(n, 1.0);
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        scale[i] *= f;
        const double inv = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Householder reduction A -> Q^H A Q. When q is non-null it receives Q.
void hessenberg_in_place(ComplexMatrix& a, ComplexMatrix* q) {
  const std::size_t n = a.rows();
  std::vector<ComplexVector> reflectors;
  std::vector<double> taus;
  ComplexVector v(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) tail += std::norm(a(i, k));
    if (tail == 0.0) {
      if (q) {
        reflectors.emplace_back();
        taus.push_back(0.0);
      }
      continue;
    }
    const Complex x0 = a(k + 1, k);
    const double alpha = std::sqrt(tail + std::norm(x0));
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0) : x0 / std::abs(x0);
    const Complex beta = -phase * alpha;
    std::fill(v.begin(), v.end(), Complex{});
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= beta;
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
    const double tau = 2.0 / vnorm;

    std::fill(w.begin() + k, w.end(), Complex{});
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex vi = std::conj(v[i]);
      const Complex* row = a.data() + i * n;
      for (std::size_t j = k; j < n; ++j) w[j] += vi * row[j];
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = tau * v[i];
      Complex* row = a.data() + i * n;
      for (std::size_t j = k; j < n; ++j) row[j] -= f * w[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      Complex* row = a.data() + i * n;
      Complex s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += row[j] * v[j];
      s *= tau;
      for (std::size_t j = k + 1; j < n; ++j) row[j] -= s * std::conj(v[j]);
    }
    a(k + 1, k) = beta;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    if (q) {
      reflectors.emplace_back(v.begin(), v.end());
      taus.push_back(tau);
    }
  }
  if (!q) return;
  *q = ComplexMatrix::identity(n);
  for (std::size_t r = reflectors.size(); r-- > 0;) {
    if (taus[r] == 0.0) continue;
    const auto& u = reflectors[r];
    const std::size_t k = r;
    std::fill(w.begin(), w.end(), Complex{});
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex ui = std::conj(u[i]);
      const Complex* row = q->data() + i * n;
      for (std::size_t j = 0; j < n; ++j) w[j] += ui * row[j];
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = taus[r] * u[i];
      Complex* row = q->data() + i * n;
      for (std::size_t j = 0; j < n; ++j) row[j] -= f * w[j];
    }
  }
}

double hessenberg_norm(const ComplexMatrix& h) {
  double s = 0.0;
  const std::size_t n = h.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i == 0 ? 0 : i - 1; j < n; ++j) s += std::abs(h(i, j));
  return s;
}

// Implicit single-shift complex QR on an upper Hessenberg matrix, values only
// (updates confined to the active window).
QrOutcome complex_qr(ComplexMatrix& h, const SolverConfig& cfg, std::size_t budget) {
  const std::size_t n = h.rows();
  QrOutcome out{ComplexVector(n), std::vector<bool>(n, true), 0};
  if (n == 0) return out;
  const double anorm = std::max(hessenberg_norm(h), std::numeric_limits<double>::min());
  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  std::size_t stalled = 0;
  while (hi >= 0) {
    std::ptrdiff_t l = hi;
    for (; l > 0; --l) {
      double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = anorm;
      if (std::abs(h(l, l - 1)) <= cfg.deflation_eps * s) {
        h(l, l - 1) = 0.0;
        break;
      }
    }
    if (l == hi) {
      out.values[hi] = h(hi, hi);
      --hi;
      stalled = 0;
      continue;
    }
    if (out.sweeps >= budget) {
      for (std::ptrdiff_t i = 0; i <= hi; ++i) {
        out.values[i] = h(i, i);
        out.converged[i] = false;
      }
      break;
    }
    ++out.sweeps;
    ++stalled;

    Complex mu;
    const Complex hd = h(hi, hi);
    if (stalled % 10 == 0) {
      mu = hd + Complex(0.75 * std::abs(h(hi, hi - 1)), 0.0);
    } else if (cfg.shift_strategy == ShiftStrategy::Rayleigh) {
      mu = hd;
    } else {
      const Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1);
      const Complex half_tr = 0.5 * (a + hd);
      const Complex det = a * hd - b * c;
      const Complex disc = std::sqrt(half_tr * half_tr - det);
      const Complex r1 = half_tr + disc, r2 = half_tr - disc;
      mu = std::abs(r1 - hd) < std::abs(r2 - hd) ? r1 : r2;
    }

    Complex x = h(l, l) - mu;
    Complex y = h(l + 1, l);
    for (std::ptrdiff_t k = l; k < hi; ++k) {
      if (k > l) {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      const double ax = std::abs(x), ay = std::abs(y);
      const double r = std::hypot(ax, ay);
      if (r == 0.0) continue;
      double c;
      Complex s;
      if (ax == 0.0) {
        c = 0.0;
        s = std::conj(y) / ay;
      } else {
        c = ax / r;
        s = (x / ax) * std::conj(y) / r;
      }
      const Complex sc = std::conj(s);
      Complex* rk = h.data() + k * n;
      Complex* rk1 = h.data() + (k + 1) * n;
      for (std::ptrdiff_t j = std::max(l, k - 1); j <= hi; ++j) {
        const Complex t1 = rk[j], t2 = rk1[j];
        rk[j] = c * t1 + s * t2;
        rk1[j] = c * t2 - sc * t1;
      }
      const std::ptrdiff_t last = std::min(k + 2, hi);
      for (std::ptrdiff_t i = l; i <= last; ++i) {
        Complex* row = h.data() + i * n;
        const Complex t1 = row[k], t2 = row[k + 1];
        row[k] = c * t1 + sc * t2;
        row[k + 1] = c * t2 - s * t1;
      }
      if (k > l) h(k + 1, k - 1) = 0.0;
    }
  }
  return out;
}

void real_hessenberg(RealMatrix& a) {
  const std::size_t n = a.n;
  std::vector<double> v(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) tail += a(i, k) * a(i, k);
    if (tail == 0.0) continue;
    const double x0 = a(k + 1, k);
    const double beta = -std::copysign(std::sqrt(tail + x0 * x0), x0);
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= beta;
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm += v[i] * v[i];
    const double tau = 2.0 / vnorm;
    std::fill(w.begin() + k, w.end(), 0.0);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double vi = v[i];
      const double* row = a.a.data() + i * n;
      for (std::size_t j = k; j < n; ++j) w[j] += vi * row[j];
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = tau * v[i];
      double* row = a.a.data() + i * n;
      for (std::size_t j = k; j < n; ++j) row[j] -= f * w[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double* row = a.a.data() + i * n;
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += row[j] * v[j];
      s *= tau;
      for (std::size_t j = k + 1; j < n; ++j) row[j] -= s * v[j];
    }
    a(k + 1, k) = beta;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Francis double-shift QR on a real upper Hessenberg matrix (values only).
// Complex pairs come out exactly conjugate.
QrOutcome real_qr(RealMatrix& a, const SolverConfig& cfg, std::size_t budget) {
  const std::size_t n = a.n;
  QrOutcome out{ComplexVector(n), std::vector<bool>(n, true), 0};
  if (n == 0) return out;
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i == 0 ? 0 : i - 1; j < n; ++j) anorm += std::abs(a(i, j));
  anorm = std::max(anorm, std::numeric_limits<double>::min());

  std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n) - 1;
  double t = 0.0;
  double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
  while (nn >= 0) {
    std::size_t its = 0;
    std::ptrdiff_t l;
    do {
      for (l = nn; l >= 1; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= cfg.deflation_eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      x = a(nn, nn);
      if (l == nn) {
        out.values[nn] = Complex(x + t, 0.0);
        --nn;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + std::copysign(z, p);
            out.values[nn - 1] = out.values[nn] = Complex(x + z, 0.0);
            if (z != 0.0) out.values[nn] = Complex(x - w / z, 0.0);
          } else {
            out.values[nn - 1] = Complex(x + p, -z);
            out.values[nn] = Complex(x + p, z);
          }
          nn -= 2;
        } else {
          if (out.sweeps >= budget) {
            for (std::ptrdiff_t i = 0; i <= nn; ++i) {
              out.values[i] = Complex(a(i, i) + t, 0.0);
              out.converged[i] = false;
            }
            return out;
          }
          if (its > 0 && its % 10 == 0) {
            t += x;
            for (std::ptrdiff_t i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          ++out.sweeps;
          std::ptrdiff_t m;
          for (m = nn - 2; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                            std::abs(a(m + 1, m + 1)));
            if (u <= kMachEps * v) break;
          }
          for (std::ptrdiff_t i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (std::ptrdiff_t k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = std::copysign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              double* rk = a.a.data() + k * n;
              double* rk1 = rk + n;
              if (k != nn - 1) {
                double* rk2 = rk1 + n;
                for (std::ptrdiff_t j = k; j <= nn; ++j) {
                  p = rk[j] + q * rk1[j] + r * rk2[j];
                  rk2[j] -= p * z;
                  rk1[j] -= p * y;
                  rk[j] -= p * x;
                }
              } else {
                for (std::ptrdiff_t j = k; j <= nn; ++j) {
                  p = rk[j] + q * rk1[j];
                  rk1[j] -= p * y;
                  rk[j] -= p * x;
                }
              }
              const std::ptrdiff_t mmin = nn < k + 3 ? nn : k + 3;
              for (std::ptrdiff_t i = l; i <= mmin; ++i) {
                double* row = a.a.data() + i * n;
                p = x * row[k] + y * row[k + 1];
                if (k != nn - 1) {
                  p += z * row[k + 2];
                  row[k + 2] -= p * r;
                }
                row[k + 1] -= p * q;
                row[k] -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return out;
}

Complex rotate_quarter(Complex z, int k) {
  switch (((k % 4) + 4) % 4) {
    case 1: return {-z.imag(), z.real()};
    case 2: return {-z.real(), -z.imag()};
    case 3: return {z.imag(), -z.real()};
    default: return z;
  }
}

// Finds exponents k_i with i^{k_a - k_b} a_ab real for every entry, if such a
// quarter-turn gauge exists.
std::optional<std::vector<int>> quarter_phase_gauge(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<int> k(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> queue;
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    queue.assign(1, root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t u = queue[head];
      for (std::size_t v = 0; v < n; ++v) {
        if (seen[v]) continue;
        Complex z = a(u, v);
        bool forward = true;
        if (z == Complex{}) {
          z = a(v, u);
          forward = false;
        }
        if (z == Complex{}) continue;
        int step;
        if (z.imag() == 0.0) {
          step = 0;
        } else if (z.real() == 0.0) {
          step = 1;
        } else {
          return std::nullopt;
        }
        // forward: i^{k_u - k_v} z real  ->  k_v = k_u + step
        k[v] = forward ? k[u] + step : k[u] - step;
        seen[v] = true;
        queue.push_back(v);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex z = a(i, j);
      if (z != Complex{} && rotate_quarter(z, k[i] - k[j]).imag() != 0.0) return std::nullopt;
    }
  return k;
}

ComplexMatrix extract_block(const ComplexMatrix& a, const std::vector<std::size_t>& idx) {
  ComplexMatrix b(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) b(i, j) = a(idx[i], idx[j]);
  return b;
}

QrOutcome block_values(const ComplexMatrix& block, const SolverConfig& cfg, std::size_t budget) {
  ComplexMatrix b = block;
  std::vector<double> scale;
  balance_in_place(b, scale);
  if (cfg.real_arithmetic) {
    if (auto gauge = quarter_phase_gauge(b)) {
      RealMatrix r{b.rows(), std::vector<double>(b.rows() * b.rows())};
      for (std::size_t i = 0; i < r.n; ++i)
        for (std::size_t j = 0; j < r.n; ++j)
          r(i, j) = rotate_quarter(b(i, j), (*gauge)[i] - (*gauge)[j]).real();
      real_hessenberg(r);
      return real_qr(r, cfg, budget);
    }
  }
  hessenberg_in_place(b, nullptr);
  return complex_qr(b, cfg, budget);
}

void sort_result(EigenResult& res) {
  const std::size_t n = res.values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return spectrum_less(res.values[i], res.values[j]);
  });
  EigenResult sorted;
  sorted.iterations = res.iterations;
  for (auto i : order) {
    sorted.values.push_back(res.values[i]);
    sorted.converged.push_back(res.converged[i]);
  }
  if (res.vectors) {
    sorted.vectors.emplace();
    for (auto i : order) sorted.vectors->push_back(std::move((*res.vectors)[i]));
  }
  res = std::move(sorted);
}

std::vector<std::vector<std::size_t>> blocks_for(const ComplexMatrix& a, const SolverConfig& cfg) {
  if (cfg.split_blocks) return decoupled_blocks(a);
  std::vector<std::size_t> all(a.rows());
  std::iota(all.begin(), all.end(), 0);
  return {all};
}

}  // namespace

void SolverConfig::validate(std::size_t dim) const {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_unit(deflation_eps) || !in_unit(tol_resid))
    throw Error(ErrorKind::InvalidInput, "solver tolerances must lie in (0, 1)");
  if (max_sweeps != 0 && max_sweeps < dim)
    throw Error(ErrorKind::InvalidInput, "max_sweeps must be at least the matrix dimension");
}

bool EigenResult::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; });
}

bool spectrum_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

void sort_spectrum(ComplexVector& values) {
  std::stable_sort(values.begin(), values.end(), spectrum_less);
}

BalanceResult balance(const ComplexMatrix& a) {
  require_square_finite(a);
  BalanceResult res{a, {}};
  balance_in_place(res.matrix, res.scaling);
  return res;
}

HessenbergResult hessenberg(const ComplexMatrix& a) {
  require_square_finite(a);
  HessenbergResult res{a, {}};
  hessenberg_in_place(res.h, &res.q);
  return res;
}

std::vector<std::vector<std::size_t>> decoupled_blocks(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (a(i, j) != Complex{} || a(j, i) != Complex{}) {
        const auto ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

EigenResult eigenvalues(const ComplexMatrix& a, const SolverConfig& cfg) {
  require_square_finite(a);
  cfg.validate(a.rows());
  const std::size_t budget = cfg.sweep_limit(a.rows());
  EigenResult res;
  for (const auto& idx : blocks_for(a, cfg)) {
    auto outcome = idx.size() == a.rows() ? block_values(a, cfg, budget - std::min(budget, res.iterations))
                                          : block_values(extract_block(a, idx), cfg,
                                                         budget - std::min(budget, res.iterations));
    res.iterations += outcome.sweeps;
    res.values.insert(res.values.end(), outcome.values.begin(), outcome.values.end());
    res.converged.insert(res.converged.end(), outcome.converged.begin(), outcome.converged.end());
  }
  sort_result(res);
  return res;
}

EigenResult eigenvalues(const OperatorMatrix& a, const SolverConfig& cfg) {
  return eigenvalues(a.matrix(), cfg);
}

EigenResult eigen_decompose(const ComplexMatrix& a, const SolverConfig& cfg) {
  require_square_finite(a);
  cfg.validate(a.rows());
  const std::size_t n = a.rows();
  const std::size_t budget = cfg.sweep_limit(n);
  EigenResult res;
  res.vectors.emplace();
  SolverConfig complex_cfg = cfg;
  complex_cfg.real_arithmetic = false;
  for (const auto& idx : blocks_for(a, cfg)) {
    const ComplexMatrix block = extract_block(a, idx);
    auto outcome = block_values(block, complex_cfg, budget - std::min(budget, res.iterations));
    res.iterations += outcome.sweeps;
    const InverseIteration solver(block, cfg);
    for (std::size_t k = 0; k < outcome.values.size(); ++k) {
      const auto ev = solver.solve(outcome.values[k]);
      ComplexVector full(n);
      for (std::size_t i = 0; i < idx.size(); ++i) full[idx[i]] = ev.vector[i];
      res.values.push_back(outcome.values[k]);
      res.converged.push_back(outcome.converged[k] && ev.converged);
      res.vectors->push_back(std::move(full));
    }
  }
  sort_result(res);
  return res;
}

EigenResult eigen_decompose_lowest(const ComplexMatrix& a, std::size_t count, const SolverConfig& cfg) {
  require_square_finite(a);
  cfg.validate(a.rows());
  const std::size_t budget = cfg.sweep_limit(a.rows());
  const auto blocks = blocks_for(a, cfg);
  EigenResult res;
  std::vector<std::size_t> owner;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& idx = blocks[b];
    auto outcome = block_values(extract_block(a, idx), cfg, budget - std::min(budget, res.iterations));
    res.iterations += outcome.sweeps;
    res.values.insert(res.values.end(), outcome.values.begin(), outcome.values.end());
    res.converged.insert(res.converged.end(), outcome.converged.begin(), outcome.converged.end());
    owner.insert(owner.end(), outcome.values.size(), b);
  }
  std::vector<std::size_t> order(res.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return spectrum_less(res.values[i], res.values[j]);
  });
  EigenResult sorted;
  sorted.iterations = res.iterations;
  sorted.vectors.emplace();
  std::vector<std::optional<InverseIteration>> solvers(blocks.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    sorted.values.push_back(res.values[i]);
    bool ok = res.converged[i];
    if (k < count) {
      const auto b = owner[i];
      if (!solvers[b]) solvers[b].emplace(extract_block(a, blocks[b]), cfg);
      const auto ev = solvers[b]->solve(res.values[i]);
      ComplexVector full(a.rows());
      for (std::size_t r = 0; r < blocks[b].size(); ++r) full[blocks[b][r]] = ev.vector[r];
      sorted.vectors->push_back(std::move(full));
      ok = ok && ev.converged;
    }
    sorted.converged.push_back(ok);
  }
  return sorted;
}

InverseIteration::InverseIteration(const ComplexMatrix& a, SolverConfig cfg)
    : a_(a), norm_(a.frobenius_norm()), cfg_(cfg) {
  require_square_finite(a);
  cfg_.validate(a.rows());
  h_ = a;
  balance_in_place(h_, scaling_);
  hessenberg_in_place(h_, &q_);
}

EigenvectorResult InverseIteration::solve(Complex lambda) const {
  const std::size_t n = a_.rows();
  EigenvectorResult res;
  if (n == 0) return res;
  if (norm_ == 0.0) {
    res.vector.assign(n, Complex{});
    res.vector[0] = 1.0;
    res.converged = true;
    return res;
  }
  const Complex shifted = lambda + Complex(1e-12 * norm_, 0.0);
  const double tiny = kMachEps * norm_;

  // LU of (H - shifted I) with adjacent-row pivoting; U overwrites a copy of H.
  ComplexMatrix u = h_;
  for (std::size_t i = 0; i < n; ++i) u(i, i) -= shifted;
  std::vector<bool> swapped(n, false);
  ComplexVector mult(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(u(k + 1, k)) > std::abs(u(k, k))) {
      for (std::size_t j = k; j < n; ++j) std::swap(u(k, j), u(k + 1, j));
      swapped[k] = true;
    }
    if (u(k, k) == Complex{}) u(k, k) = tiny;
    const Complex m = u(k + 1, k) / u(k, k);
    mult[k] = m;
    if (m != Complex{})
      for (std::size_t j = k + 1; j < n; ++j) u(k + 1, j) -= m * u(k, j);
    u(k + 1, k) = 0.0;
  }
  if (u(n - 1, n - 1) == Complex{}) u(n - 1, n - 1) = tiny;

  ComplexVector y(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
  ComplexVector v(n);
  // One sweep past acceptance: it costs O(n^2) and takes the residual from
  // the shift offset down to rounding level.
  bool polish = false;
  for (std::size_t it = 1; it <= 50; ++it) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (swapped[k]) std::swap(y[k], y[k + 1]);
      y[k + 1] -= mult[k] * y[k];
    }
    for (std::size_t i = n; i-- > 0;) {
      Complex s = y[i];
      const Complex* row = u.data() + i * n;
      for (std::size_t j = i + 1; j < n; ++j) s -= row[j] * y[j];
      y[i] = s / row[i];
    }
    const double ny = norm2(y);
    if (!(ny > 0.0) || !std::isfinite(ny)) break;
    for (auto& z : y) z /= ny;

    v = q_ * std::span<const Complex>(y);
    for (std::size_t i = 0; i < n; ++i) v[i] *= scaling_[i];
    const double nv = norm2(v);
    for (auto& z : v) z /= nv;

    const auto av = a_ * std::span<const Complex>(v);
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += std::norm(av[i] - lambda * v[i]);
    const double residual = std::sqrt(r) / norm_;
    if (polish) {
      if (residual < res.residual) {
        res.residual = residual;
        res.vector = v;
        res.iterations = it;
      }
      break;
    }
    res.residual = residual;
    res.iterations = it;
    res.vector = v;
    if (res.residual <= cfg_.tol_resid) {
      res.converged = true;
      polish = true;
    }
  }
  return res;
}

EigenvectorResult eigenvector(const ComplexMatrix& a, Complex lambda, const SolverConfig& cfg) {
  return InverseIteration(a, cfg).solve(lambda);
}

EigenvectorResult eigenvector(const OperatorMatrix& a, Complex lambda, const SolverConfig& cfg) {
  return eigenvector(a.matrix(), lambda, cfg);
}

EigenResult kronecker_sum_eigenvalues(std::span<const ComplexMatrix> parts, const SolverConfig& cfg) {
  if (parts.empty()) throw Error(ErrorKind::InvalidInput, "Kronecker sum needs at least one part");
  EigenResult res;
  res.values = {Complex{}};
  res.converged = {true};
  for (const auto& part : parts) {
    const auto local = eigenvalues(part, cfg);
    res.iterations += local.iterations;
    ComplexVector values;
    std::vector<bool> flags;
    values.reserve(res.values.size() * local.values.size());
    for (std::size_t i = 0; i < res.values.size(); ++i)
      for (std::size_t j = 0; j < local.values.size(); ++j) {
        values.push_back(res.values[i] + local.values[j]);
        flags.push_back(res.converged[i] && local.converged[j]);
      }
    res.values = std::move(values);
    res.converged = std::move(flags);
  }
  sort_result(res);
  return res;
}

}  // namespace ptspectra
