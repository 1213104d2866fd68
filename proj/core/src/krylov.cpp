// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/krylov.hpp"

#include <cmath>
#include <vector>

namespace hlcpe {

GmresResult gmres(const VectorMap& a, const VectorMap& precond, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                  const GmresOptions& opt) {
  GmresResult res;
  res.x = x0.size() == b.size() ? x0 : Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    return res;
  }
  auto m_apply = [&](const Eigen::VectorXd& v) { return precond ? precond(v) : v; };
  const int m = opt.restart;

  Eigen::VectorXd r = b - a(res.x);
  double beta = r.norm();
  res.residual = beta / bnorm;
  while (res.iterations < opt.max_iter) {
    if (res.residual <= opt.tol) {
      res.converged = true;
      return res;
    }
    std::vector<Eigen::VectorXd> v;
    v.reserve(m + 1);
    v.push_back(r / beta);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(m + 1);
    s(0) = beta;
    int k = 0;
    for (; k < m && res.iterations < opt.max_iter; ++k) {
      ++res.iterations;
      Eigen::VectorXd w = a(m_apply(v[k]));
      for (int j = 0; j <= k; ++j) {  // modified Gram-Schmidt
        h(j, k) = w.dot(v[j]);
        w -= h(j, k) * v[j];
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) > 0.0) v.push_back(w / h(k + 1, k));
      for (int j = 0; j < k; ++j) {
        double t = cs(j) * h(j, k) + sn(j) * h(j + 1, k);
        h(j + 1, k) = -sn(j) * h(j, k) + cs(j) * h(j + 1, k);
        h(j, k) = t;
      }
      double den = std::hypot(h(k, k), h(k + 1, k));
      cs(k) = h(k, k) / den;
      sn(k) = h(k + 1, k) / den;
      h(k, k) = den;
      h(k + 1, k) = 0.0;
      s(k + 1) = -sn(k) * s(k);
      s(k) = cs(k) * s(k);
      if (std::abs(s(k + 1)) / bnorm <= opt.tol || int(v.size()) <= k + 1) {
        ++k;
        break;
      }
    }
    Eigen::VectorXd y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(s.head(k));
    Eigen::VectorXd update = Eigen::VectorXd::Zero(b.size());
    for (int j = 0; j < k; ++j) update += y(j) * v[j];
    res.x += m_apply(update);
    r = b - a(res.x);
    beta = r.norm();
    res.residual = beta / bnorm;
    if (beta == 0.0) break;
  }
  res.converged = res.residual <= opt.tol;
  return res;
}

}  // namespace hlcpe
