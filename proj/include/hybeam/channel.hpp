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
//
// Narrowband clustered multipath channel: Ncl clusters of Nray rays each,
//
//   H = sqrt(Nt*Nr / (Ncl*Nray)) * sum_{i,l} alpha_il * Lr_il * Lt_il
//                                  * a_rx(aoa_il) * a_tx(aod_il)^H ,
//
// alpha_il ~ CN(0, sigma_i^2) i.i.d., with the per-cluster powers scaled so
// that sum_i sigma_i^2 = Ncl; for full-sphere sectors (all L gains = 1) this
// gives E[ ||H||_F^2 ] = Nt * Nr. Lt/Lr are the ideal sectored element gains;
// rays whose angles leave a sector keep zero gain (they are not resampled).

#pragma once

#include "arrays.hpp"

#include <vector>

namespace hybeam {

struct ChannelParams
{
    ArrayGeometry tx;
    ArrayGeometry rx;
    arma::uword n_clusters = 8;
    arma::uword n_rays = 10;            // rays per cluster
    double angle_spread_rad = 0.0;      // per-ray angular std dev, all four angle axes
    arma::vec cluster_powers;           // relative powers, empty = equal; rescaled internally

    void validate() const
    {
        tx.validate();
        rx.validate();
        if (n_clusters < 1 || n_rays < 1)
            throw std::invalid_argument("ChannelParams: need n_clusters >= 1 and n_rays >= 1");
        if (!(angle_spread_rad >= 0.0))
            throw std::invalid_argument("ChannelParams: angle spread must be >= 0");
        if (!cluster_powers.is_empty())
        {
            if (cluster_powers.n_elem != n_clusters)
                throw std::invalid_argument("ChannelParams: cluster_powers length must equal n_clusters");
            if (cluster_powers.min() < 0.0 || arma::accu(cluster_powers) <= 0.0)
                throw std::invalid_argument("ChannelParams: cluster powers must be >= 0 and not all zero");
        }
    }

    // sigma_i^2 normalized so the total over clusters is Ncl.
    arma::vec cluster_variances() const
    {
        if (cluster_powers.is_empty())
            return arma::vec(n_clusters, arma::fill::ones);
        return cluster_powers * (double(n_clusters) / arma::accu(cluster_powers));
    }
};

struct Ray
{
    arma::cx_double gain;  // alpha_il
    double aod_az_rad = 0.0;
    double aod_el_rad = 0.0;
    double aoa_az_rad = 0.0;
    double aoa_el_rad = 0.0;
    double tx_gain = 1.0;  // sectored element gain at the AoD
    double rx_gain = 1.0;  // sectored element gain at the AoA
    arma::uword cluster = 0;
    arma::uword ray = 0;   // index within the cluster
};

struct ChannelRealization
{
    ChannelParams params;
    std::vector<Ray> rays; // (cluster, ray) lexicographic
    arma::cx_mat h;        // Nr x Nt
};

namespace detail {

inline double wrap_azimuth(double az)
{
    // into [-pi, pi]; endpoint assignment is irrelevant for the responses
    return std::remainder(az, 2.0 * pi);
}

inline double fold_elevation(double el)
{
    // reflect at the poles into [0, pi] (valid for |offset| <= pi)
    el = std::fabs(el);
    return el > pi ? 2.0 * pi - el : el;
}

// Laplacian truncated to [-pi, pi] by resampling.
inline double truncated_laplacian(RandomStream &rng, double scale)
{
    if (scale <= 0.0)
        return 0.0;
    double x = rng.laplacian(scale);
    while (std::fabs(x) > pi)
        x = rng.laplacian(scale);
    return x;
}

} // namespace detail

// Draws one channel realization. The draw order is part of the interface:
//  1. per cluster i = 0..Ncl-1: mean AoD azimuth ~ U[tx sector az], mean AoD
//     elevation ~ U[tx sector el], mean AoA azimuth ~ U[-pi, pi), mean AoA
//     elevation = acos(U[-1, 1])  (uniform over the receive sphere);
//  2. per ray (i, l) lexicographic: Laplacian offsets for (aod_az, aod_el,
//     aoa_az, aoa_el), scale = spread/sqrt(2), truncated to +/-pi by
//     resampling;
//  3. per ray (i, l) lexicographic: complex Gaussian gain CN(0, sigma_i^2).
inline ChannelRealization sample_channel(const ChannelParams &params, RandomStream &rng)
{
    params.validate();

    const arma::uword ncl = params.n_clusters, nray = params.n_rays;
    const arma::uword nt = params.tx.size(), nr = params.rx.size();
    const arma::vec var = params.cluster_variances();
    const double lap_scale = params.angle_spread_rad / std::sqrt(2.0);

    struct Mean
    {
        double aod_az, aod_el, aoa_az, aoa_el;
    };
    std::vector<Mean> means(ncl);
    for (arma::uword i = 0; i < ncl; ++i)
    {
        means[i].aod_az = rng.uniform(params.tx.sector.az_min_rad, params.tx.sector.az_max_rad);
        means[i].aod_el = rng.uniform(params.tx.sector.el_min_rad, params.tx.sector.el_max_rad);
        means[i].aoa_az = rng.uniform(-pi, pi);
        means[i].aoa_el = std::acos(rng.uniform(-1.0, 1.0));
    }

    ChannelRealization real;
    real.params = params;
    real.rays.resize(ncl * nray);
    for (arma::uword i = 0; i < ncl; ++i)
        for (arma::uword l = 0; l < nray; ++l)
        {
            Ray &r = real.rays[i * nray + l];
            r.cluster = i;
            r.ray = l;
            r.aod_az_rad = detail::wrap_azimuth(means[i].aod_az + detail::truncated_laplacian(rng, lap_scale));
            r.aod_el_rad = detail::fold_elevation(means[i].aod_el + detail::truncated_laplacian(rng, lap_scale));
            r.aoa_az_rad = detail::wrap_azimuth(means[i].aoa_az + detail::truncated_laplacian(rng, lap_scale));
            r.aoa_el_rad = detail::fold_elevation(means[i].aoa_el + detail::truncated_laplacian(rng, lap_scale));
        }
    for (auto &r : real.rays)
        r.gain = rng.complex_gaussian(var(r.cluster));

    const double scale = std::sqrt(double(nt * nr) / double(ncl * nray));
    real.h.zeros(nr, nt);
    for (auto &r : real.rays)
    {
        r.tx_gain = element_gain(params.tx.sector, r.aod_az_rad, r.aod_el_rad);
        r.rx_gain = element_gain(params.rx.sector, r.aoa_az_rad, r.aoa_el_rad);
        const double g = r.tx_gain * r.rx_gain;
        if (g == 0.0)
            continue;
        const arma::cx_vec at = array_response(params.tx, r.aod_az_rad, r.aod_el_rad);
        const arma::cx_vec ar = array_response(params.rx, r.aoa_az_rad, r.aoa_el_rad);
        real.h += (scale * g * r.gain) * (ar * at.t());
    }
    return real;
}

enum class LinkSide
{
    tx,
    rx
};

// Array response dictionary over the realization's own rays, one column per
// ray in (cluster, ray) lexicographic order. Columns are pure steering
// vectors (unit norm, constant-modulus entries); sector gains do not enter.
inline arma::cx_mat response_dictionary(const ChannelRealization &real, LinkSide side)
{
    const ArrayGeometry &geom = side == LinkSide::tx ? real.params.tx : real.params.rx;
    arma::cx_mat dict(geom.size(), real.rays.size());
    for (std::size_t k = 0; k < real.rays.size(); ++k)
    {
        const Ray &r = real.rays[k];
        dict.col(k) = side == LinkSide::tx ? array_response(geom, r.aod_az_rad, r.aod_el_rad)
                                           : array_response(geom, r.aoa_az_rad, r.aoa_el_rad);
    }
    return dict;
}

} // namespace hybeam
