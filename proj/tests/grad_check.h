// Copyright 2026 The embaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMBAUDIT_TESTS_GRAD_CHECK_H_
#define EMBAUDIT_TESTS_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>

#include "embaudit/attack_net.h"

namespace embaudit::testing {

inline double& Parameter(DenseNetwork& net, size_t layer, bool bias,
                         size_t index) {
  DenseNetwork::Layer& l = net.layers()[layer];
  return bias ? l.bias[index] : l.weights[index];
}

inline double GradientAt(const DenseNetwork& grads, size_t layer, bool bias,
                         size_t index) {
  const DenseNetwork::Layer& l = grads.layers()[layer];
  return bias ? l.bias[index] : l.weights[index];
}

// (loss(theta + h) - loss(theta - h)) / 2h for one parameter of `net`.
template <typename LossFn>
double CentralDifference(DenseNetwork& net, size_t layer, bool bias,
                         size_t index, double h, LossFn&& loss) {
  double& theta = Parameter(net, layer, bias, index);
  const double saved = theta;
  theta = saved + h;
  const double up = loss();
  theta = saved - h;
  const double down = loss();
  theta = saved;
  return (up - down) / (2.0 * h);
}

// Fourth-order stencil:
// (-loss(+2h) + 8 loss(+h) - 8 loss(-h) + loss(-2h)) / 12h.
template <typename LossFn>
double FivePointDifference(DenseNetwork& net, size_t layer, bool bias,
                           size_t index, double h, LossFn&& loss) {
  double& theta = Parameter(net, layer, bias, index);
  const double saved = theta;
  double f[4];
  const double offsets[4] = {2 * h, h, -h, -2 * h};
  for (int i = 0; i < 4; ++i) {
    theta = saved + offsets[i];
    f[i] = loss();
  }
  theta = saved;
  return (-f[0] + 8 * f[1] - 8 * f[2] + f[3]) / (12.0 * h);
}

// Relative agreement; two gradients that are both numerically zero agree.
inline bool GradientsAgree(double analytic, double numeric, double rel_tol) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < 1e-9) return true;
  return std::abs(analytic - numeric) <= rel_tol * scale;
}

}  // namespace embaudit::testing

#endif  // EMBAUDIT_TESTS_GRAD_CHECK_H_
