// Dense complex linear algebra for small tensor-product Hilbert spaces.
//
// All composite indices are row-major over the declared subsystem sequence:
// the last subsystem varies fastest.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrec {

using Index = Eigen::Index;
using Dims = std::vector<Index>;

/// Tolerance for orthonormality, unitarity and normalization checks.
inline constexpr double kStructuralTol = 1e-12;
/// Tolerance for comparing probabilities produced by different routes.
inline constexpr double kProbabilityTol = 1e-9;

template <typename Scalar>
using Complex = std::complex<Scalar>;
template <typename Scalar>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

inline Index total_dim(const Dims& dims) {
  Index n = 1;
  for (Index d : dims) {
    if (d <= 0) throw std::invalid_argument("subsystem dimension must be positive");
    n *= d;
  }
  return n;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Index i = 0; i < m.size(); ++i) {
    const auto z = m.derived().data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

template <typename Scalar>
struct BasicState {
  Dims dims;
  CVector<Scalar> amps;

  Scalar norm() const { return amps.norm(); }
  bool is_normalized(Scalar tol = Scalar(kStructuralTol)) const {
    return std::abs(amps.squaredNorm() - Scalar(1)) <= tol;
  }
};

template <typename Scalar>
struct BasicOperator {
  Dims dims;
  CMatrix<Scalar> entries;
};

/// Column k of `vectors` is the basis vector named labels[k].
template <typename Scalar>
struct BasicBasis {
  Dims dims;
  std::vector<std::string> labels;
  CMatrix<Scalar> vectors;

  Index size() const { return static_cast<Index>(labels.size()); }
  auto vector(Index k) const { return vectors.col(k); }
  std::optional<Index> index_of(const std::string& label) const {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == label) return static_cast<Index>(k);
    return std::nullopt;
  }
};

using State = BasicState<double>;
using Operator = BasicOperator<double>;
using Basis = BasicBasis<double>;
using Amplitude = Complex<double>;

template <typename Scalar>
BasicState<Scalar> make_state(Dims dims, CVector<Scalar> amps) {
  if (amps.size() != total_dim(dims))
    throw std::invalid_argument("state length does not match the product of dims");
  if (!all_finite(amps)) throw std::invalid_argument("state has non-finite amplitudes");
  return {std::move(dims), std::move(amps)};
}

template <typename Scalar>
BasicOperator<Scalar> make_operator(Dims dims, CMatrix<Scalar> entries) {
  const Index n = total_dim(dims);
  if (entries.rows() != n || entries.cols() != n)
    throw std::invalid_argument("operator side does not match the product of dims");
  if (!all_finite(entries)) throw std::invalid_argument("operator has non-finite entries");
  return {std::move(dims), std::move(entries)};
}

template <typename Scalar = double>
BasicState<Scalar> basis_state(const Dims& dims, Index index) {
  CVector<Scalar> v = CVector<Scalar>::Zero(total_dim(dims));
  if (index < 0 || index >= v.size()) throw std::out_of_range("basis index out of range");
  v(index) = Scalar(1);
  return {dims, std::move(v)};
}

template <typename Scalar>
BasicState<Scalar> tensor(const BasicState<Scalar>& a, const BasicState<Scalar>& b) {
  Dims dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  CVector<Scalar> out(a.amps.size() * b.amps.size());
  for (Index i = 0; i < a.amps.size(); ++i)
    out.segment(i * b.amps.size(), b.amps.size()) = a.amps(i) * b.amps;
  return {std::move(dims), std::move(out)};
}

template <typename Scalar>
BasicOperator<Scalar> tensor(const BasicOperator<Scalar>& a, const BasicOperator<Scalar>& b) {
  Dims dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  const Index nb = b.entries.rows();
  CMatrix<Scalar> out(a.entries.rows() * nb, a.entries.cols() * nb);
  for (Index i = 0; i < a.entries.rows(); ++i)
    for (Index j = 0; j < a.entries.cols(); ++j)
      out.block(i * nb, j * nb, nb, nb) = a.entries(i, j) * b.entries;
  return {std::move(dims), std::move(out)};
}

template <typename Scalar>
Complex<Scalar> inner(const BasicState<Scalar>& a, const BasicState<Scalar>& b) {
  if (a.dims != b.dims) throw std::invalid_argument("inner: dimension mismatch");
  return a.amps.dot(b.amps);  // conjugates a
}

/// Offsets of a subset of slots inside a row-major composite index.
///
/// `target_offsets[t]` is the displacement contributed by target sub-index t
/// (itself row-major over the slots in the order given); `rest_bases` lists
/// every composite index whose target digits are all zero.
class SlotMap {
 public:
  SlotMap(const Dims& full_dims, std::span<const std::size_t> slots) {
    const std::size_t n = full_dims.size();
    std::vector<Index> strides(n, 1);
    for (std::size_t k = n; k-- > 1;) strides[k - 1] = strides[k] * full_dims[k];

    std::vector<bool> is_target(n, false);
    target_offsets_.assign(1, 0);
    for (std::size_t slot : slots) {
      if (slot >= n) throw std::invalid_argument("slot index out of range");
      if (is_target[slot]) throw std::invalid_argument("slot listed twice");
      is_target[slot] = true;
      target_dims_.push_back(full_dims[slot]);
      std::vector<Index> next;
      next.reserve(target_offsets_.size() * full_dims[slot]);
      for (Index base : target_offsets_)
        for (Index d = 0; d < full_dims[slot]; ++d) next.push_back(base + d * strides[slot]);
      target_offsets_ = std::move(next);
    }

    rest_bases_.assign(1, 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (is_target[k]) continue;
      std::vector<Index> next;
      next.reserve(rest_bases_.size() * full_dims[k]);
      for (Index base : rest_bases_)
        for (Index d = 0; d < full_dims[k]; ++d) next.push_back(base + d * strides[k]);
      rest_bases_ = std::move(next);
    }
  }

  const Dims& target_dims() const { return target_dims_; }
  const std::vector<Index>& target_offsets() const { return target_offsets_; }
  const std::vector<Index>& rest_bases() const { return rest_bases_; }

 private:
  Dims target_dims_;
  std::vector<Index> target_offsets_;
  std::vector<Index> rest_bases_;
};

/// Applies `local` (acting on `slots`, in that order) to a composite vector
/// without materializing the embedded operator.
template <typename Scalar, typename Derived>
CVector<Scalar> apply_on(const Eigen::MatrixBase<Derived>& local, const SlotMap& map,
                         const CVector<Scalar>& psi) {
  const auto& offsets = map.target_offsets();
  const Index t = static_cast<Index>(offsets.size());
  if (local.rows() != t || local.cols() != t)
    throw std::invalid_argument("apply_on: operator side does not match target dims");
  CVector<Scalar> out(psi.size());
  CVector<Scalar> block(t);
  for (Index base : map.rest_bases()) {
    for (Index i = 0; i < t; ++i) block(i) = psi(base + offsets[i]);
    const CVector<Scalar> mapped = local * block;
    for (Index i = 0; i < t; ++i) out(base + offsets[i]) = mapped(i);
  }
  return out;
}

template <typename Scalar>
BasicOperator<Scalar> embed(const BasicOperator<Scalar>& op, std::span<const std::size_t> slots,
                            const Dims& full_dims) {
  const SlotMap map(full_dims, slots);
  if (map.target_dims() != op.dims)
    throw std::invalid_argument("embed: operator dims do not match the target slots");
  const auto& offsets = map.target_offsets();
  const Index n = total_dim(full_dims);
  CMatrix<Scalar> out = CMatrix<Scalar>::Zero(n, n);
  for (Index base : map.rest_bases())
    for (std::size_t r = 0; r < offsets.size(); ++r)
      for (std::size_t c = 0; c < offsets.size(); ++c)
        out(base + offsets[r], base + offsets[c]) =
            op.entries(static_cast<Index>(r), static_cast<Index>(c));
  return {full_dims, std::move(out)};
}

template <typename Scalar>
BasicState<Scalar> apply(const BasicOperator<Scalar>& op, const BasicState<Scalar>& psi) {
  if (op.dims != psi.dims) throw std::invalid_argument("apply: dimension mismatch");
  return {psi.dims, op.entries * psi.amps};
}

/// max-norm of U^dagger U - I.
template <typename Derived>
typename Derived::RealScalar unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  using Real = typename Derived::RealScalar;
  if (u.rows() != u.cols()) return std::numeric_limits<Real>::infinity();
  const auto gram = (u.adjoint() * u).eval();
  Real worst = 0;
  for (Index i = 0; i < gram.rows(); ++i)
    for (Index j = 0; j < gram.cols(); ++j)
      worst = std::max(worst, std::abs(gram(i, j) - Real(i == j ? 1 : 0)));
  return worst;
}

template <typename Scalar>
bool is_unitary(const BasicOperator<Scalar>& op, Scalar tol = Scalar(kStructuralTol)) {
  return unitarity_defect(op.entries) <= tol;
}

struct BasisViolation {
  std::size_t first;
  std::size_t second;
  double overlap;  // |<first|second>| (or the norm when first == second)
  std::string message;
};

/// Accepts only complete orthonormal bases.
template <typename Scalar>
std::optional<BasisViolation> validate_basis(const BasicBasis<Scalar>& b,
                                             Scalar tol = Scalar(kStructuralTol)) {
  const Index n = total_dim(b.dims);
  if (b.vectors.rows() != n || b.vectors.cols() != b.size())
    return BasisViolation{0, 0, 0.0, "basis vectors do not match the declared dims"};
  if (b.size() != n) {
    std::ostringstream msg;
    msg << "basis has " << b.size() << " vectors but the space has dimension " << n;
    return BasisViolation{0, 0, 0.0, msg.str()};
  }
  if (!all_finite(b.vectors)) return BasisViolation{0, 0, 0.0, "basis has non-finite entries"};
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const Complex<Scalar> g = b.vectors.col(i).dot(b.vectors.col(j));
      const Scalar expected = i == j ? Scalar(1) : Scalar(0);
      if (std::abs(g - expected) > tol) {
        std::ostringstream msg;
        if (i == j) {
          msg << "basis vector '" << b.labels[i] << "' is not normalized (norm^2 "
              << std::abs(g) << ")";
        } else {
          msg << "basis vectors '" << b.labels[i] << "' and '" << b.labels[j]
              << "' are not orthogonal (overlap " << std::abs(g) << ")";
        }
        return BasisViolation{static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                              static_cast<double>(std::abs(g)), msg.str()};
      }
    }
  }
  return std::nullopt;
}

/// Computational basis of a single subsystem with the given labels.
inline Basis computational_basis(std::vector<std::string> labels) {
  const Index n = static_cast<Index>(labels.size());
  return {{n}, std::move(labels), CMatrix<double>::Identity(n, n)};
}

}  // namespace qrec
