#pragma once

#include <complex>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "bellbound/error.hpp"

// Multilinear helpers over a fixed party ordering: party 0 is the most
// significant tensor factor, matching Eigen's kroneckerProduct.

namespace bellbound {

using cplx = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline Eigen::Index product(std::span<const Eigen::Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Eigen::Index{1},
                         std::multiplies<>());
}

template <typename Derived>
Matrix<typename Derived::Scalar> hermitize(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / typename Derived::RealScalar(2);
}

template <typename Scalar>
Matrix<Scalar> kron_all(std::span<const Matrix<Scalar>> factors) {
  Matrix<Scalar> out = Matrix<Scalar>::Identity(1, 1);
  for (const auto& f : factors) {
    Matrix<Scalar> next = Eigen::kroneckerProduct(out, f);
    out.swap(next);
  }
  return out;
}

/// I ⊗ .. ⊗ op ⊗ .. ⊗ I with op in slot `party`.
template <typename Derived>
Matrix<typename Derived::Scalar> embed(const Eigen::MatrixBase<Derived>& op,
                                       int party,
                                       std::span<const Eigen::Index> dims) {
  using Scalar = typename Derived::Scalar;
  if (party < 0 || party >= static_cast<int>(dims.size()) ||
      op.rows() != dims[party] || op.cols() != dims[party]) {
    throw Error(ErrorKind::DimensionMismatch, "embed: operator does not fit slot");
  }
  std::span<const Eigen::Index> before = dims.first(party);
  std::span<const Eigen::Index> after = dims.subspan(party + 1);
  const Matrix<Scalar> left = Matrix<Scalar>::Identity(product(before), product(before));
  const Matrix<Scalar> right = Matrix<Scalar>::Identity(product(after), product(after));
  Matrix<Scalar> tmp = Eigen::kroneckerProduct(left, op.derived());
  return Eigen::kroneckerProduct(tmp, right);
}

/// Traces out every party not listed in `keep` (which must be ascending).
template <typename Derived>
Matrix<typename Derived::Scalar> partial_trace(const Eigen::MatrixBase<Derived>& m,
                                               std::span<const Eigen::Index> dims,
                                               std::span<const int> keep) {
  using Scalar = typename Derived::Scalar;
  using Eigen::Index;
  const Index total = product(dims);
  if (m.rows() != total || m.cols() != total) {
    throw Error(ErrorKind::DimensionMismatch, "partial_trace: size mismatch");
  }
  const int n = static_cast<int>(dims.size());
  std::vector<char> kept(n, 0);
  for (int p : keep) {
    if (p < 0 || p >= n) throw Error(ErrorKind::DimensionMismatch, "bad party index");
    kept[p] = 1;
  }
  // Split a full index into (kept part, traced part) mixed-radix indices.
  std::vector<Index> kept_idx(total), traced_idx(total);
  Index kept_dim = 1;
  for (int p = 0; p < n; ++p) {
    if (kept[p]) kept_dim *= dims[p];
  }
  for (Index i = 0; i < total; ++i) {
    Index rem = i, k = 0, t = 0, kmul = 1, tmul = 1;
    for (int p = n - 1; p >= 0; --p) {
      const Index digit = rem % dims[p];
      rem /= dims[p];
      if (kept[p]) {
        k += digit * kmul;
        kmul *= dims[p];
      } else {
        t += digit * tmul;
        tmul *= dims[p];
      }
    }
    kept_idx[i] = k;
    traced_idx[i] = t;
  }
  Matrix<Scalar> out = Matrix<Scalar>::Zero(kept_dim, kept_dim);
  for (Index c = 0; c < total; ++c) {
    for (Index r = 0; r < total; ++r) {
      if (traced_idx[r] == traced_idx[c]) out(kept_idx[r], kept_idx[c]) += m(r, c);
    }
  }
  return out;
}

/// Reshapes a vector on prod(dims) into a (dims[party] x rest) matrix whose
/// columns run over the remaining parties in their natural order.
template <typename Derived>
Matrix<typename Derived::Scalar> unfold(const Eigen::MatrixBase<Derived>& v,
                                        std::span<const Eigen::Index> dims,
                                        int party) {
  using Eigen::Index;
  const Index total = product(dims);
  const Index d = dims[party];
  const Index inner = product(dims.subspan(party + 1));
  Matrix<typename Derived::Scalar> out(d, total / d);
  for (Index i = 0; i < total; ++i) {
    const Index digit = (i / inner) % d;
    const Index outer = i / (inner * d);
    out(digit, outer * inner + i % inner) = v(i);
  }
  return out;
}

/// Tr_{all but party}[ |phi><psi| ].
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> reduced_outer(const Eigen::MatrixBase<DerivedA>& phi,
                                                const Eigen::MatrixBase<DerivedB>& psi,
                                                std::span<const Eigen::Index> dims,
                                                int party) {
  const auto a = unfold(phi, dims, party);
  const auto b = unfold(psi, dims, party);
  return a * b.adjoint();
}

/// Applies op to tensor slot `party` of v, i.e. (I ⊗ .. ⊗ op ⊗ .. ⊗ I) v,
/// without forming the full operator.
template <typename DerivedOp, typename DerivedV>
Vector<typename DerivedV::Scalar> apply_local(const Eigen::MatrixBase<DerivedOp>& op,
                                              int party,
                                              std::span<const Eigen::Index> dims,
                                              const Eigen::MatrixBase<DerivedV>& v) {
  using Eigen::Index;
  const Index d = dims[party];
  const Index inner = product(dims.subspan(party + 1));
  const Index total = product(dims);
  if (op.rows() != d || op.cols() != d || v.size() != total) {
    throw Error(ErrorKind::DimensionMismatch, "apply_local: size mismatch");
  }
  Vector<typename DerivedV::Scalar> out(total);
  const Index outer_count = total / (inner * d);
  for (Index outer = 0; outer < outer_count; ++outer) {
    // Slab of shape (d x inner), row stride `inner`.
    const Index base = outer * d * inner;
    for (Index i = 0; i < d; ++i) {
      for (Index k = 0; k < inner; ++k) {
        typename DerivedV::Scalar acc(0);
        for (Index j = 0; j < d; ++j) acc += op(i, j) * v(base + j * inner + k);
        out(base + i * inner + k) = acc;
      }
    }
  }
  return out;
}

}  // namespace bellbound
