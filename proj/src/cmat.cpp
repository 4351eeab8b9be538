/* Copyright 2026 The PulsePINN Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "pulsepinn/cmat.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace pulsepinn::cx {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw ShapeMismatch(std::string(what) + ": shape mismatch");
}

Eigen::MatrixXcd to_eigen(const CMatrix& a) {
  Eigen::MatrixXcd m(a.rows, a.cols);
  for (int c = 0; c < a.cols; ++c)
    for (int r = 0; r < a.rows; ++r)
      m(r, c) = std::complex<double>(a.re[c * a.rows + r], a.im[c * a.rows + r]);
  return m;
}

CMatrix from_eigen(const Eigen::MatrixXcd& m) {
  CMatrix a(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int c = 0; c < a.cols; ++c)
    for (int r = 0; r < a.rows; ++r) {
      a.re[c * a.rows + r] = m(r, c).real();
      a.im[c * a.rows + r] = m(r, c).imag();
    }
  return a;
}

}  // namespace

CMatrix CMatrix::identity(int d) {
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i) a.re[i * d + i] = 1.0;
  return a;
}

CMatrix add(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b, "add");
  CMatrix z(a.rows, a.cols);
  for (std::size_t i = 0; i < a.re.size(); ++i) {
    z.re[i] = a.re[i] + b.re[i];
    z.im[i] = a.im[i] + b.im[i];
  }
  return z;
}

CMatrix sub(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b, "sub");
  CMatrix z(a.rows, a.cols);
  for (std::size_t i = 0; i < a.re.size(); ++i) {
    z.re[i] = a.re[i] - b.re[i];
    z.im[i] = a.im[i] - b.im[i];
  }
  return z;
}

CMatrix scale(const CMatrix& a, std::complex<double> s) {
  CMatrix z(a.rows, a.cols);
  for (std::size_t i = 0; i < a.re.size(); ++i) {
    z.re[i] = s.real() * a.re[i] - s.imag() * a.im[i];
    z.im[i] = s.real() * a.im[i] + s.imag() * a.re[i];
  }
  return z;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  if (a.cols != b.rows) throw ShapeMismatch("matmul: inner dimension mismatch");
  CMatrix z(a.rows, b.cols);
  for (int c = 0; c < b.cols; ++c) {
    for (int k = 0; k < a.cols; ++k) {
      const double br = b.re[c * b.rows + k];
      const double bi = b.im[c * b.rows + k];
      for (int r = 0; r < a.rows; ++r) {
        const double ar = a.re[k * a.rows + r];
        const double ai = a.im[k * a.rows + r];
        z.re[c * z.rows + r] += ar * br - ai * bi;
        z.im[c * z.rows + r] += ar * bi + ai * br;
      }
    }
  }
  return z;
}

CVector matvec(const CMatrix& a, const CVector& x) {
  if (a.cols != x.dim) throw ShapeMismatch("matvec: dimension mismatch");
  CVector z(a.rows);
  for (int k = 0; k < a.cols; ++k) {
    const double xr = x.re[k];
    const double xi = x.im[k];
    for (int r = 0; r < a.rows; ++r) {
      const double ar = a.re[k * a.rows + r];
      const double ai = a.im[k * a.rows + r];
      z.re[r] += ar * xr - ai * xi;
      z.im[r] += ar * xi + ai * xr;
    }
  }
  return z;
}

CMatrix adjoint(const CMatrix& a) {
  CMatrix z(a.cols, a.rows);
  for (int c = 0; c < a.cols; ++c)
    for (int r = 0; r < a.rows; ++r) {
      z.re[r * z.rows + c] = a.re[c * a.rows + r];
      z.im[r * z.rows + c] = -a.im[c * a.rows + r];
    }
  return z;
}

CMatrix conjugate(const CMatrix& a) {
  CMatrix z = a;
  for (auto& v : z.im) v = -v;
  return z;
}

CMatrix transpose(const CMatrix& a) {
  CMatrix z(a.cols, a.rows);
  for (int c = 0; c < a.cols; ++c)
    for (int r = 0; r < a.rows; ++r) {
      z.re[r * z.rows + c] = a.re[c * a.rows + r];
      z.im[r * z.rows + c] = a.im[c * a.rows + r];
    }
  return z;
}

std::complex<double> trace(const CMatrix& a) {
  if (a.rows != a.cols) throw ShapeMismatch("trace: matrix not square");
  double tr = 0.0, ti = 0.0;
  for (int i = 0; i < a.rows; ++i) {
    tr += a.re[i * a.rows + i];
    ti += a.im[i * a.rows + i];
  }
  return {tr, ti};
}

std::complex<double> inner(const CVector& a, const CVector& b) {
  if (a.dim != b.dim) throw ShapeMismatch("inner: dimension mismatch");
  double zr = 0.0, zi = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    // conj(a_i) * b_i
    zr += a.re[i] * b.re[i] + a.im[i] * b.im[i];
    zi += a.re[i] * b.im[i] - a.im[i] * b.re[i];
  }
  return {zr, zi};
}

double frobenius_norm(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.re.size(); ++i)
    s += a.re[i] * a.re[i] + a.im[i] * a.im[i];
  return std::sqrt(s);
}

double euclidean_norm(const CVector& x) {
  double s = 0.0;
  for (int i = 0; i < x.dim; ++i) s += x.re[i] * x.re[i] + x.im[i] * x.im[i];
  return std::sqrt(s);
}

CVector vadd(const CVector& a, const CVector& b) {
  if (a.dim != b.dim) throw ShapeMismatch("vadd: dimension mismatch");
  CVector z(a.dim);
  for (int i = 0; i < a.dim; ++i) {
    z.re[i] = a.re[i] + b.re[i];
    z.im[i] = a.im[i] + b.im[i];
  }
  return z;
}

CVector vscale(const CVector& a, std::complex<double> s) {
  CVector z(a.dim);
  for (int i = 0; i < a.dim; ++i) {
    z.re[i] = s.real() * a.re[i] - s.imag() * a.im[i];
    z.im[i] = s.real() * a.im[i] + s.imag() * a.re[i];
  }
  return z;
}

CMatrix outer(const CVector& x, const CVector& y) {
  CMatrix z(x.dim, y.dim);
  for (int c = 0; c < y.dim; ++c)
    for (int r = 0; r < x.dim; ++r) {
      // x_r * conj(y_c)
      z.re[c * z.rows + r] = x.re[r] * y.re[c] + x.im[r] * y.im[c];
      z.im[c * z.rows + r] = x.im[r] * y.re[c] - x.re[r] * y.im[c];
    }
  return z;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix z(a.rows * b.rows, a.cols * b.cols);
  for (int ac = 0; ac < a.cols; ++ac)
    for (int ar = 0; ar < a.rows; ++ar) {
      const double xr = a.re[ac * a.rows + ar];
      const double xi = a.im[ac * a.rows + ar];
      for (int bc = 0; bc < b.cols; ++bc)
        for (int br = 0; br < b.rows; ++br) {
          const int r = ar * b.rows + br;
          const int c = ac * b.cols + bc;
          const double yr = b.re[bc * b.rows + br];
          const double yi = b.im[bc * b.rows + br];
          z.re[c * z.rows + r] = xr * yr - xi * yi;
          z.im[c * z.rows + r] = xr * yi + xi * yr;
        }
    }
  return z;
}

CVector vec(const CMatrix& a) {
  CVector v(a.rows * a.cols);
  // column-major storage is already column-stacked
  std::copy(a.re.begin(), a.re.end(), v.re.begin());
  std::copy(a.im.begin(), a.im.end(), v.im.begin());
  return v;
}

CMatrix unvec(const CVector& v, int d) {
  if (v.dim != d * d) throw ShapeMismatch("unvec: dimension is not d^2");
  CMatrix a(d, d);
  std::copy(v.re.begin(), v.re.end(), a.re.begin());
  std::copy(v.im.begin(), v.im.end(), a.im.begin());
  return a;
}

CMatrix matexp(const CMatrix& a, int taylor_order, int squarings) {
  if (a.rows != a.cols) throw ShapeMismatch("matexp: matrix not square");
  if (taylor_order < 1) throw ShapeMismatch("matexp: taylor_order must be >= 1");
  int s = squarings;
  if (s < 0) {
    s = 0;
    double nrm = frobenius_norm(a);
    while (nrm > 0.5 && s < 60) {
      nrm *= 0.5;
      ++s;
    }
  }
  const double inv = std::ldexp(1.0, -s);
  const CMatrix as = scale(a, inv);
  const CMatrix id = CMatrix::identity(a.rows);
  // Horner: T = I + As*(I + As/2*(I + ... (I + As/order)))
  CMatrix t = id;
  for (int m = taylor_order; m >= 1; --m) {
    t = add(id, matmul(scale(as, 1.0 / m), t));
  }
  for (int i = 0; i < s; ++i) t = matmul(t, t);
  for (double v : t.re)
    if (!std::isfinite(v)) throw NonFiniteValue("matexp overflow");
  for (double v : t.im)
    if (!std::isfinite(v)) throw NonFiniteValue("matexp overflow");
  return t;
}

void hermitian_eig(const CMatrix& h, std::vector<double>& eigenvalues,
                   CMatrix& eigenvectors) {
  if (h.rows != h.cols) throw ShapeMismatch("hermitian_eig: matrix not square");
  if (frobenius_norm(sub(h, adjoint(h))) > 1e-10)
    throw NotHermitian("hermitian_eig: input not Hermitian within 1e-10");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(h));
  if (es.info() != Eigen::Success)
    throw NonFiniteValue("hermitian_eig: eigensolver failed");
  eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + h.rows);
  eigenvectors = from_eigen(es.eigenvectors());
}

double uhlmann_fidelity(const CMatrix& rho, const CMatrix& sigma) {
  if (rho.rows != rho.cols || sigma.rows != sigma.cols ||
      rho.rows != sigma.rows)
    throw ShapeMismatch("uhlmann_fidelity: shape mismatch");
  auto validate = [](const CMatrix& m, const char* name) {
    if (frobenius_norm(sub(m, adjoint(m))) > 1e-8)
      throw InvalidDensityMatrix(std::string(name) + " is not Hermitian");
    const auto tr = trace(m);
    if (std::abs(tr.real() - 1.0) > 1e-8 || std::abs(tr.imag()) > 1e-8)
      throw InvalidDensityMatrix(std::string(name) + " does not have unit trace");
    std::vector<double> lam;
    CMatrix v;
    hermitian_eig(scale(add(m, adjoint(m)), 0.5), lam, v);
    if (lam.front() < -1e-8)
      throw InvalidDensityMatrix(std::string(name) + " is not PSD");
  };
  validate(rho, "rho");
  validate(sigma, "sigma");

  // sqrt(rho) from its eigendecomposition; tiny negatives clamp to 0 and
  // eigenvalues at the roundoff floor are zeroed so their square roots do
  // not pollute the trace
  std::vector<double> lam;
  CMatrix v;
  hermitian_eig(scale(add(rho, adjoint(rho)), 0.5), lam, v);
  const double floor_rho = 1e-13 * std::max(1.0, std::abs(lam.back()));
  CMatrix sq(rho.rows, rho.cols);
  for (int k = 0; k < rho.rows; ++k) {
    const double l = lam[k] > floor_rho ? std::sqrt(lam[k]) : 0.0;
    for (int c = 0; c < rho.cols; ++c)
      for (int r = 0; r < rho.rows; ++r) {
        // l * v_k v_k^dagger contribution
        const double vr = v.re[k * v.rows + r], vi = v.im[k * v.rows + r];
        const double wr = v.re[k * v.rows + c], wi = v.im[k * v.rows + c];
        sq.re[c * sq.rows + r] += l * (vr * wr + vi * wi);
        sq.im[c * sq.rows + r] += l * (vi * wr - vr * wi);
      }
  }
  CMatrix m = matmul(matmul(sq, sigma), sq);
  m = scale(add(m, adjoint(m)), 0.5);
  hermitian_eig(m, lam, v);
  const double floor_m = 1e-13 * std::max(1.0, std::abs(lam.back()));
  double acc = 0.0;
  for (double l : lam) acc += l > floor_m ? std::sqrt(l) : 0.0;
  return acc * acc;
}

namespace graph {

std::vector<double> pack(const CMatrix& a) {
  std::vector<double> v;
  v.reserve(2 * a.re.size());
  v.insert(v.end(), a.re.begin(), a.re.end());
  v.insert(v.end(), a.im.begin(), a.im.end());
  return v;
}

std::vector<double> pack(const CVector& x) {
  std::vector<double> v;
  v.reserve(2 * x.re.size());
  v.insert(v.end(), x.re.begin(), x.re.end());
  v.insert(v.end(), x.im.begin(), x.im.end());
  return v;
}

CMatrix unpack_cmat(std::span<const double> v, int d) {
  if (static_cast<int>(v.size()) != 2 * d * d)
    throw ShapeMismatch("unpack_cmat: bad length");
  CMatrix a(d, d);
  std::copy(v.begin(), v.begin() + d * d, a.re.begin());
  std::copy(v.begin() + d * d, v.end(), a.im.begin());
  return a;
}

CVector unpack_cvec(std::span<const double> v, int d) {
  if (static_cast<int>(v.size()) != 2 * d)
    throw ShapeMismatch("unpack_cvec: bad length");
  CVector x(d);
  std::copy(v.begin(), v.begin() + d, x.re.begin());
  std::copy(v.begin() + d, v.end(), x.im.begin());
  return x;
}

tape::NodeId constant_cmat(tape::DiffGraph& g, const CMatrix& a) {
  if (a.rows != a.cols) throw ShapeMismatch("constant_cmat: matrix not square");
  return g.constant_vec(pack(a));
}

tape::NodeId constant_cvec(tape::DiffGraph& g, const CVector& x) {
  return g.constant_vec(pack(x));
}

tape::NodeId matexp(tape::DiffGraph& g, tape::NodeId a, int d, int taylor_order,
                    int squarings) {
  if (taylor_order < 1) throw ShapeMismatch("matexp: taylor_order must be >= 1");
  if (squarings < 0) throw ShapeMismatch("matexp: squarings must be >= 0");
  const tape::NodeId id = constant_cmat(g, CMatrix::identity(d));
  const tape::NodeId as =
      squarings == 0 ? a : g.mul(g.constant(std::ldexp(1.0, -squarings)), a);
  tape::NodeId t = id;
  for (int m = taylor_order; m >= 1; --m) {
    const tape::NodeId am = m == 1 ? as : g.mul(g.constant(1.0 / m), as);
    t = g.add(id, g.cmat_mul(am, t, d));
  }
  for (int i = 0; i < squarings; ++i) t = g.cmat_mul(t, t, d);
  return t;
}

}  // namespace graph

}  // namespace pulsepinn::cx
