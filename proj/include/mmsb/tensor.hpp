#pragma once

#include "mmsb/types.hpp"

namespace mmsb {

// Dense third-order tensor, row-major in the last index. Whitened tensors
// are k x k x k; the raw 3-star tensor is |A| x |B| x |C|.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2);
  static Tensor3 cube(int k) { return Tensor3(k, k, k); }

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  bool cubic() const { return d0_ == d1_ && d1_ == d2_; }

  double& operator()(int i, int j, int l) {
    return data_[(static_cast<std::size_t>(i) * d1_ + j) * d2_ + l];
  }
  double operator()(int i, int j, int l) const {
    return data_[(static_cast<std::size_t>(i) * d1_ + j) * d2_ + l];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  // Multilinear map: out[i1,i2,i3] = sum_j T[j1,j2,j3] V1(j1,i1) V2(j2,i2)
  // V3(j3,i3). Result dims are the column counts of V1..V3.
  Tensor3 transform(const MatrixXd& V1, const MatrixXd& V2,
                    const MatrixXd& V3) const;

  double frobenius_norm() const;
  double max_abs_diff(const Tensor3& other) const;

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double s);

 private:
  int d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<double> data_;
};

// T(I, v, v): out_p = sum_{q,r} T[p,q,r] v_q v_r. Requires a cubic tensor
// and a unit vector (1e-9 slack).
VectorXd apply_Ivv(const Tensor3& T, const VectorXd& v);

// T(v, v, v) as a scalar; any vector of matching length.
double apply_vvv(const Tensor3& T, const VectorXd& v);

namespace detail {
// Same maps without the unit-norm check, for inner loops that renormalize
// anyway.
VectorXd apply_Ivv_unchecked(const Tensor3& T, const VectorXd& v);
double apply_vvv_unchecked(const Tensor3& T, const VectorXd& v);
}  // namespace detail

// Average over all six index permutations; exact symmetry afterwards.
Tensor3 symmetrized(const Tensor3& T);

double max_symmetry_violation(const Tensor3& T);

// sum_i weights_i * cols1_i ⊗ cols2_i ⊗ cols3_i (columns of k x m matrices).
Tensor3 weighted_outer_sum(const VectorXd& weights, const MatrixXd& cols1,
                           const MatrixXd& cols2, const MatrixXd& cols3);

}  // namespace mmsb
