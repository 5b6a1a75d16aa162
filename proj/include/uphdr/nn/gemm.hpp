#pragma once

#include <Eigen/Core>

namespace uphdr::nn {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

/// C = A[m,k] * B[k,n]
template <typename T>
void gemm_nn(int m, int k, int n, const T* a, const T* b, T* c) {
    MapMat<T>(c, m, n).noalias() = ConstMapMat<T>(a, m, k) * ConstMapMat<T>(b, k, n);
}

/// C += A^T[k,m] * B[k,n]   (A stored as [k,m])
template <typename T>
void gemm_tn_acc(int m, int k, int n, const T* a, const T* b, T* c) {
    MapMat<T>(c, m, n).noalias() +=
        ConstMapMat<T>(a, k, m).transpose() * ConstMapMat<T>(b, k, n);
}

/// C = A[m,k] * B^T[n,k]   (B stored as [n,k])
template <typename T>
void gemm_nt(int m, int k, int n, const T* a, const T* b, T* c) {
    MapMat<T>(c, m, n).noalias() =
        ConstMapMat<T>(a, m, k) * ConstMapMat<T>(b, n, k).transpose();
}

}  // namespace uphdr::nn
