/*
 * Copyright 2026 The kpath Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KPATH_BESSEL_HPP_
#define KPATH_BESSEL_HPP_

namespace kpath {

/// Modified Bessel function of the second kind K_nu(z) for nu > 0, z > 0.
///
/// Half-integer orders up to 41/2 use the closed form
///   K_{n+1/2}(z) = sqrt(pi / (2z)) e^{-z} sum_k (n+k)! / (k! (n-k)!) (2z)^{-k};
/// every other order goes through bessel_k_numeric.
/// Throws DomainError for nu <= 0 or z <= 0 and OverflowError when the value
/// is not representable (small z with large nu).
double bessel_k(double nu, double z);

/// K_nu(z) by Temme's series (z <= 2) or Steed's continued fraction (z > 2)
/// for the reduced order |mu| <= 1/2, then upward recurrence. Never uses the
/// half-integer closed form.
double bessel_k_numeric(double nu, double z);

/// log K_nu(z) on the numeric path. Finite wherever K_nu(z) over- or
/// underflows a double.
double log_bessel_k(double nu, double z);

/// K_{n+1/2}(z) from the closed form.
double bessel_k_half_integer(int n, double z);

}  // namespace kpath

#endif  // KPATH_BESSEL_HPP_
