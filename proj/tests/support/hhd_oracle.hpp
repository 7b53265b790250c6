#pragma once

// Dense least-squares reference for the field decomposition. Built from its
// own difference operators so it shares no code with the solver under test.

#include <algorithm>

#include <Eigen/Dense>

#include "gelgrip/core/types.hpp"

namespace oracle {

// 1-D derivative: central inside, half-width one-sided differences at the ends.
inline Eigen::MatrixXd d1(int n, double h) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i + 1 < n; ++i) {
    d(i, i - 1) = -0.5 / h;
    d(i, i + 1) = 0.5 / h;
  }
  d(0, 0) = -0.5 / h;
  d(0, 1) = 0.5 / h;
  d(n - 1, n - 2) = -0.5 / h;
  d(n - 1, n - 1) = 0.5 / h;
  return d;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return k;
}

class DenseHhd {
 public:
  explicit DenseHhd(const gelgrip::GridGeometry& g) : g_(g) {
    const int rows = g.rows, cols = g.cols, n = rows * cols;
    const Eigen::MatrixXd dx = kron(Eigen::MatrixXd::Identity(rows, rows), d1(cols, g.spacing_x));
    const Eigen::MatrixXd dy = kron(d1(rows, g.spacing_y), Eigen::MatrixXd::Identity(cols, cols));
    const int m = (rows - 2) * (cols - 2);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, m);
    int k = 0;
    for (int r = 1; r + 1 < rows; ++r) {
      for (int c = 1; c + 1 < cols; ++c) e(r * cols + c, k++) = 1.0;
    }
    gmat_.resize(2 * n, m);
    gmat_ << dx * e, dy * e;
    rmat_.resize(2 * n, m);
    rmat_ << dy * e, -dx * e;
    gqr_.compute(gmat_);
    rqr_.compute(rmat_);
  }

  struct Parts {
    gelgrip::DisplacementField p, s, h;
  };

  Parts decompose(const gelgrip::DisplacementField& v) const {
    const int n = g_.rows * g_.cols;
    Eigen::VectorXd b(2 * n);
    for (int r = 0; r < g_.rows; ++r) {
      for (int c = 0; c < g_.cols; ++c) {
        b(r * g_.cols + c) = v.u(r, c);
        b(n + r * g_.cols + c) = v.v(r, c);
      }
    }
    const Eigen::VectorXd p = gmat_ * gqr_.solve(b);
    const Eigen::VectorXd s = rmat_ * rqr_.solve(b);
    Parts out{unpack(p), unpack(s), {}};
    out.h = v - out.p - out.s;
    return out;
  }

 private:
  gelgrip::DisplacementField unpack(const Eigen::VectorXd& x) const {
    const int n = g_.rows * g_.cols;
    auto f = gelgrip::DisplacementField::zeros(g_);
    for (int r = 0; r < g_.rows; ++r) {
      for (int c = 0; c < g_.cols; ++c) {
        f.u(r, c) = x(r * g_.cols + c);
        f.v(r, c) = x(n + r * g_.cols + c);
      }
    }
    return f;
  }

  gelgrip::GridGeometry g_;
  Eigen::MatrixXd gmat_, rmat_;
  Eigen::HouseholderQR<Eigen::MatrixXd> gqr_, rqr_;
};

inline double max_abs_diff(const gelgrip::DisplacementField& a, const gelgrip::DisplacementField& b) {
  return std::max((a.u - b.u).cwiseAbs().maxCoeff(), (a.v - b.v).cwiseAbs().maxCoeff());
}

}  // namespace oracle
