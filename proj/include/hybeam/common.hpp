// SPDX-License-Identifier: Apache-2.0
//
// hybeam — hybrid analog/digital beamforming for mmWave MIMO, simulation library
// Copyright (C) 2026 the hybeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#ifndef ARMA_DONT_USE_WRAPPER
#define ARMA_DONT_USE_WRAPPER
#endif

#include <armadillo>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hybeam {

inline constexpr const char *version = "1.0.0";

inline constexpr double pi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }

// ---- Deterministic random stream -------------------------------------------

// SplitMix64 finalizer, used to derive engine seeds and substreams.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seedable, splittable random stream with a fixed draw contract.
//
// The engine is std::mt19937_64 (bit-exact across conforming standard
// libraries); all value transforms below are implemented here rather than via
// std:: distributions, whose output is implementation-defined. Consumers that
// document a draw order (e.g. channel sampling) therefore produce identical
// values for identical (seed, draw sequence) on any platform.
//
// Substreams are derived from the root seed, not from engine state, so
// substream(d, i) is reproducible regardless of how much the parent has drawn.
class RandomStream
{
  public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), eng_(splitmix64(seed)) {}

    // Independent child stream for (domain, index); used to give each
    // Monte-Carlo trial / training sample its own stream.
    RandomStream substream(std::uint64_t domain, std::uint64_t index) const
    {
        return RandomStream(splitmix64(splitmix64(seed_ + 0x9e3779b97f4a7c15ULL * (domain + 1)) + index));
    }

    std::uint64_t seed() const { return seed_; }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal pair via Box-Muller (one pair per call, no caching).
    void gaussian_pair(double &g0, double &g1)
    {
        double u1 = 1.0 - uniform(); // (0, 1], keeps log() finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        g0 = r * std::cos(2.0 * pi * u2);
        g1 = r * std::sin(2.0 * pi * u2);
    }

    // Circularly-symmetric complex Gaussian with E|x|^2 = variance.
    arma::cx_double complex_gaussian(double variance)
    {
        double g0, g1;
        gaussian_pair(g0, g1);
        double s = std::sqrt(variance * 0.5);
        return arma::cx_double(s * g0, s * g1);
    }

    // Zero-mean Laplacian with scale b (std dev = b*sqrt(2)), inverse CDF.
    double laplacian(double scale)
    {
        double u = uniform();
        if (u < 0.5)
            return scale * std::log(std::max(2.0 * u, 0x1.0p-1022));
        return -scale * std::log(std::max(2.0 * (1.0 - u), 0x1.0p-1022));
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

// ---- Small linear-algebra helpers -------------------------------------------

// log2(det(m)) for a Hermitian positive-definite matrix, via Cholesky.
inline double log2det_hpd(const arma::cx_mat &m)
{
    arma::cx_mat r;
    if (!arma::chol(r, m))
        throw std::runtime_error("log2det_hpd: matrix is not positive definite");
    return 2.0 * arma::accu(arma::log2(arma::abs(r.diag())));
}

// Least-squares solve argmin_x ||a*x - b||_F through the SVD pseudo-inverse.
// Singular values below rtol * s_max are treated as zero, which keeps the
// solve well defined when `a` has (numerically) repeated columns.
inline arma::cx_mat ls_solve_pinv(const arma::cx_mat &a, const arma::cx_mat &b, double rtol = 1e-10)
{
    arma::cx_mat u, v;
    arma::vec s;
    if (!arma::svd_econ(u, s, v, a))
        throw std::runtime_error("ls_solve_pinv: SVD failed to converge");
    arma::vec si(s.n_elem, arma::fill::zeros);
    const double cut = s.n_elem ? rtol * s(0) : 0.0;
    for (arma::uword i = 0; i < s.n_elem; ++i)
        if (s(i) > cut)
            si(i) = 1.0 / s(i);
    return v * arma::diagmat(si) * (u.t() * b);
}

// FNV-1a over raw bytes; used to fingerprint channel realizations so the
// common-random-numbers discipline of a sweep can be asserted.
inline std::uint64_t hash_bytes(const void *data, std::size_t n, std::uint64_t h = 14695981039346656037ULL)
{
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < n; ++i)
    {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t hash_matrix(const arma::cx_mat &m)
{
    std::uint64_t h = hash_bytes(&m.n_rows, sizeof(m.n_rows));
    h = hash_bytes(&m.n_cols, sizeof(m.n_cols), h);
    return hash_bytes(m.memptr(), m.n_elem * sizeof(arma::cx_double), h);
}

// ---- Diagnostics -------------------------------------------------------------

// Process-wide counters for rare numerical events. They never affect results;
// tests and callers can inspect them to see how often fallback paths fired.
namespace diag {

inline std::atomic<std::uint64_t> omp_duplicate_selections{0};
inline std::atomic<std::uint64_t> noise_pinv_fallbacks{0};
inline std::atomic<std::uint64_t> zero_combiner_rates{0};

inline void reset()
{
    omp_duplicate_selections = 0;
    noise_pinv_fallbacks = 0;
    zero_combiner_rates = 0;
}

} // namespace diag

} // namespace hybeam
