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
#ifndef PULSEPINN_CMAT_HPP
#define PULSEPINN_CMAT_HPP

#include <complex>
#include <vector>

#include "pulsepinn/errors.hpp"
#include "pulsepinn/tape.hpp"

namespace pulsepinn::cx {

// Complex matrix stored as a (re, im) pair of real column-major blocks.
// This is the plain (non-recorded) flavor; the differentiable flavor lives on
// the tape as packed nodes with the same [re | im] column-major layout, see
// the graph helpers below.
struct CMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> re, im;  // column-major, entry (r,c) at c*rows + r

  CMatrix() = default;
  CMatrix(int r, int c) : rows(r), cols(c), re(r * c, 0.0), im(r * c, 0.0) {}

  static CMatrix identity(int d);

  double re_at(int r, int c) const { return re[c * rows + r]; }
  double im_at(int r, int c) const { return im[c * rows + r]; }
  std::complex<double> at(int r, int c) const {
    return {re[c * rows + r], im[c * rows + r]};
  }
  void set(int r, int c, std::complex<double> v) {
    re[c * rows + r] = v.real();
    im[c * rows + r] = v.imag();
  }
};

struct CVector {
  int dim = 0;
  std::vector<double> re, im;

  CVector() = default;
  explicit CVector(int d) : dim(d), re(d, 0.0), im(d, 0.0) {}

  std::complex<double> at(int i) const { return {re[i], im[i]}; }
  void set(int i, std::complex<double> v) {
    re[i] = v.real();
    im[i] = v.imag();
  }
};

// --- arithmetic suite -------------------------------------------------------
CMatrix add(const CMatrix& a, const CMatrix& b);
CMatrix sub(const CMatrix& a, const CMatrix& b);
CMatrix scale(const CMatrix& a, std::complex<double> s);
CMatrix matmul(const CMatrix& a, const CMatrix& b);
CVector matvec(const CMatrix& a, const CVector& x);
CMatrix adjoint(const CMatrix& a);
CMatrix conjugate(const CMatrix& a);
CMatrix transpose(const CMatrix& a);
std::complex<double> trace(const CMatrix& a);
std::complex<double> inner(const CVector& a, const CVector& b);  // <a|b>
double frobenius_norm(const CMatrix& a);
double euclidean_norm(const CVector& x);
CVector vadd(const CVector& a, const CVector& b);
CVector vscale(const CVector& a, std::complex<double> s);
CMatrix outer(const CVector& x, const CVector& y);  // x y^dagger

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector vec(const CMatrix& a);               // column stacking
CMatrix unvec(const CVector& v, int d);

// exp(A) by truncated Taylor under scaling-and-squaring. squarings < 0 picks
// the smallest s with ||A||_F / 2^s <= 0.5.
CMatrix matexp(const CMatrix& a, int taylor_order = 12, int squarings = -1);

// Plain-mode Hermitian eigendecomposition (ascending eigenvalues). Never part
// of a gradient path.
void hermitian_eig(const CMatrix& h, std::vector<double>& eigenvalues,
                   CMatrix& eigenvectors);

// F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, eigendecomposition route.
double uhlmann_fidelity(const CMatrix& rho, const CMatrix& sigma);

// --- differentiable flavor (packed tape nodes) ------------------------------
// A packed complex d x d matrix node has length 2*d*d laid out as
// [re column-major | im column-major]; a packed d-vector has length 2*d.
namespace graph {

tape::NodeId constant_cmat(tape::DiffGraph& g, const CMatrix& a);
tape::NodeId constant_cvec(tape::DiffGraph& g, const CVector& x);
std::vector<double> pack(const CMatrix& a);
std::vector<double> pack(const CVector& x);
CMatrix unpack_cmat(std::span<const double> v, int d);
CVector unpack_cvec(std::span<const double> v, int d);

// exp(A) of a packed node, Taylor + squaring, recorded on the tape.
tape::NodeId matexp(tape::DiffGraph& g, tape::NodeId a, int d,
                    int taylor_order = 12, int squarings = 3);

}  // namespace graph

}  // namespace pulsepinn::cx

#endif  // PULSEPINN_CMAT_HPP
