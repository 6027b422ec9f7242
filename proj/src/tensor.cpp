#include "mmsb/tensor.hpp"

#include <cmath>

namespace mmsb {

Tensor3::Tensor3(int d0, int d1, int d2) : d0_(d0), d1_(d1), d2_(d2) {
  if (d0 <= 0 || d1 <= 0 || d2 <= 0)
    fail(ErrorCode::DimensionMismatch, "tensor dims must be positive");
  data_.assign(static_cast<std::size_t>(d0) * d1 * d2, 0.0);
}

Tensor3 Tensor3::transform(const MatrixXd& V1, const MatrixXd& V2,
                           const MatrixXd& V3) const {
  if (V1.rows() != d0_ || V2.rows() != d1_ || V3.rows() != d2_)
    fail(ErrorCode::DimensionMismatch, "transform factor rows mismatch");
  const int e0 = static_cast<int>(V1.cols());
  const int e1 = static_cast<int>(V2.cols());
  const int e2 = static_cast<int>(V3.cols());

  // Contract one mode at a time; each step is a batch of GEMMs.
  // Step 1: S1[i0, j1, j2] = sum_j0 T[j0, j1, j2] V1(j0, i0)
  Tensor3 s1(e0, d1_, d2_);
  {
    using ConstMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                    Eigen::Dynamic,
                                                    Eigen::RowMajor>>;
    using Map = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic,
                                         Eigen::Dynamic, Eigen::RowMajor>>;
    ConstMap tmat(data_.data(), d0_, static_cast<Eigen::Index>(d1_) * d2_);
    Map s1mat(s1.data(), e0, static_cast<Eigen::Index>(d1_) * d2_);
    s1mat = V1.transpose() * tmat;
  }
  // Step 2: S2[i0, i1, j2] = sum_j1 S1[i0, j1, j2] V2(j1, i1)
  Tensor3 s2(e0, e1, d2_);
  for (int i0 = 0; i0 < e0; ++i0) {
    using ConstMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                    Eigen::Dynamic,
                                                    Eigen::RowMajor>>;
    using Map = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic,
                                         Eigen::Dynamic, Eigen::RowMajor>>;
    ConstMap slice(s1.data() + static_cast<std::size_t>(i0) * d1_ * d2_, d1_,
                   d2_);
    Map out(s2.data() + static_cast<std::size_t>(i0) * e1 * d2_, e1, d2_);
    out = V2.transpose() * slice;
  }
  // Step 3: out[i0, i1, i2] = sum_j2 S2[i0, i1, j2] V3(j2, i2)
  Tensor3 out(e0, e1, e2);
  {
    using ConstMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                    Eigen::Dynamic,
                                                    Eigen::RowMajor>>;
    using Map = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic,
                                         Eigen::Dynamic, Eigen::RowMajor>>;
    ConstMap s2mat(s2.data(), static_cast<Eigen::Index>(e0) * e1, d2_);
    Map outmat(out.data(), static_cast<Eigen::Index>(e0) * e1, e2);
    outmat = s2mat * V3;
  }
  return out;
}

double Tensor3::frobenius_norm() const {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return std::sqrt(sum);
}

double Tensor3::max_abs_diff(const Tensor3& other) const {
  if (d0_ != other.d0_ || d1_ != other.d1_ || d2_ != other.d2_)
    fail(ErrorCode::DimensionMismatch, "tensor dims mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i)
    m = std::max(m, std::abs(data_[i] - other.data_[i]));
  return m;
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  if (size() != other.size())
    fail(ErrorCode::DimensionMismatch, "tensor dims mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  if (size() != other.size())
    fail(ErrorCode::DimensionMismatch, "tensor dims mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

namespace detail {

VectorXd apply_Ivv_unchecked(const Tensor3& T, const VectorXd& v) {
  const int k = T.dim0();
  VectorXd out(k);
  // Each slice T[p,:,:] contributes v^T T[p] v.
  for (int p = 0; p < k; ++p) {
    const double* slice = T.data() + static_cast<std::size_t>(p) * k * k;
    double acc = 0.0;
    for (int q = 0; q < k; ++q) {
      const double* row = slice + static_cast<std::size_t>(q) * k;
      double inner = 0.0;
      for (int r = 0; r < k; ++r) inner += row[r] * v[r];
      acc += v[q] * inner;
    }
    out[p] = acc;
  }
  return out;
}

double apply_vvv_unchecked(const Tensor3& T, const VectorXd& v) {
  const VectorXd tv = apply_Ivv_unchecked(T, v);
  return tv.dot(v);
}

}  // namespace detail

VectorXd apply_Ivv(const Tensor3& T, const VectorXd& v) {
  if (!T.cubic()) fail(ErrorCode::DimensionMismatch, "tensor must be cubic");
  if (v.size() != T.dim0())
    fail(ErrorCode::DimensionMismatch, "vector length != tensor dim");
  if (std::abs(v.norm() - 1.0) > 1e-9)
    fail(ErrorCode::NotUnitVector, "apply_Ivv expects a unit vector");
  return detail::apply_Ivv_unchecked(T, v);
}

double apply_vvv(const Tensor3& T, const VectorXd& v) {
  if (!T.cubic()) fail(ErrorCode::DimensionMismatch, "tensor must be cubic");
  if (v.size() != T.dim0())
    fail(ErrorCode::DimensionMismatch, "vector length != tensor dim");
  return detail::apply_vvv_unchecked(T, v);
}

Tensor3 symmetrized(const Tensor3& T) {
  if (!T.cubic())
    fail(ErrorCode::DimensionMismatch, "symmetrization needs a cubic tensor");
  const int k = T.dim0();
  Tensor3 out = Tensor3::cube(k);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q)
      for (int r = 0; r < k; ++r)
        out(p, q, r) = (T(p, q, r) + T(p, r, q) + T(q, p, r) + T(q, r, p) +
                        T(r, p, q) + T(r, q, p)) /
                       6.0;
  return out;
}

double max_symmetry_violation(const Tensor3& T) {
  if (!T.cubic()) fail(ErrorCode::DimensionMismatch, "tensor must be cubic");
  const int k = T.dim0();
  double m = 0.0;
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q)
      for (int r = 0; r < k; ++r) {
        double v = T(p, q, r);
        m = std::max(m, std::abs(v - T(p, r, q)));
        m = std::max(m, std::abs(v - T(q, p, r)));
        m = std::max(m, std::abs(v - T(q, r, p)));
        m = std::max(m, std::abs(v - T(r, p, q)));
        m = std::max(m, std::abs(v - T(r, q, p)));
      }
  return m;
}

Tensor3 weighted_outer_sum(const VectorXd& weights, const MatrixXd& cols1,
                           const MatrixXd& cols2, const MatrixXd& cols3) {
  const int m = static_cast<int>(weights.size());
  if (cols1.cols() != m || cols2.cols() != m || cols3.cols() != m)
    fail(ErrorCode::DimensionMismatch, "component count mismatch");
  Tensor3 out(static_cast<int>(cols1.rows()), static_cast<int>(cols2.rows()),
              static_cast<int>(cols3.rows()));
  for (int i = 0; i < m; ++i) {
    const auto a = cols1.col(i);
    const auto b = cols2.col(i);
    const auto c = cols3.col(i);
    for (int p = 0; p < cols1.rows(); ++p) {
      double wa = weights[i] * a[p];
      if (wa == 0.0) continue;
      for (int q = 0; q < cols2.rows(); ++q) {
        double wab = wa * b[q];
        for (int r = 0; r < cols3.rows(); ++r) out(p, q, r) += wab * c[r];
      }
    }
  }
  return out;
}

}  // namespace mmsb
