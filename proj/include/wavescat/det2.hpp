#pragma once

#include "wavescat/potential.hpp"

#include <Eigen/Dense>

namespace wavescat {

/// Nystrom discretisation of R0(k^2) q on [0, R].
struct KernelMatrix {
  cplx k;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::MatrixXcd entries;
};

/// -(e^{ik|x-y|} - e^{ik(x+y)}) / (2ik), requires Im k > 0.
cplx resolvent_kernel(cplx k, double x, double y);

/// int_0^inf q(x) e^{ikx} dx.
cplx fourier_hat(const Potential& q, cplx k, double tol = 1e-11);

/// Composite Gauss-Legendre nodes (16 per panel, about n in total) on [0, R].
KernelMatrix kernel_matrix(const Potential& q, cplx k, double R, int n);

/// det(I + K) exp(-tr K) through an LU factorisation.
cplx det2(const KernelMatrix& K);

/// exp(sum log(1 + lambda) - lambda) over the eigenvalues of K.
cplx det2_log_split(const KernelMatrix& K);

struct Det2Result {
  cplx jm;
  int nodes_used = 0;
  double doubling_gap = 0;
  bool converged = true;
};

struct Det2Options {
  double gap_tol = 1e-6;
  int max_nodes = 2048;
};

/// Regularised-determinant route to the modified Jost function. The O(n^-2)
/// error from the kink of the kernel on the diagonal is removed by two levels
/// of Richardson extrapolation over n, 2n, 4n; n is doubled until two
/// successive extrapolations agree to gap_tol.
Det2Result det2_modified_jost(const Potential& q, cplx k, double R, int n = 128,
                              const Det2Options& opt = {});

}  // namespace wavescat
