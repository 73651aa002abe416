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
// Antenna array geometry, steering (array response) vectors, and the ideal
// sectored element gain. Angle convention: azimuth in [-pi, pi), elevation
// in [0, pi] measured from the +z axis (pi/2 = horizon / array broadside).
// All angles are radians; configuration front-ends convert from degrees.

#pragma once

#include "common.hpp"

namespace hybeam {

// Closed angular interval [az_min, az_max] x [el_min, el_max].
struct Sector
{
    double az_min_rad = -pi;
    double az_max_rad = pi;
    double el_min_rad = 0.0;
    double el_max_rad = pi;

    static Sector full_sphere() { return Sector{}; }

    bool contains(double az_rad, double el_rad) const
    {
        return az_rad >= az_min_rad && az_rad <= az_max_rad && el_rad >= el_min_rad && el_rad <= el_max_rad;
    }

    void validate() const
    {
        if (!(az_min_rad < az_max_rad))
            throw std::invalid_argument("Sector: need az_min < az_max (sector must be non-empty)");
        if (!(el_min_rad < el_max_rad))
            throw std::invalid_argument("Sector: need el_min < el_max (sector must be non-empty)");
        if (az_min_rad < -2.0 * pi || az_max_rad > 2.0 * pi || el_min_rad < 0.0 || el_max_rad > pi)
            throw std::invalid_argument("Sector: bounds out of range (az within +/-2*pi, el within [0, pi])");
    }
};

// Ideal sectored element: unit gain inside the closed sector, zero outside.
inline double element_gain(const Sector &sector, double az_rad, double el_rad)
{
    return sector.contains(az_rad, el_rad) ? 1.0 : 0.0;
}

enum class ArrayKind
{
    ula, // uniform linear array on the y axis
    upa  // uniform planar array in the y-z plane
};

struct ArrayGeometry
{
    ArrayKind kind = ArrayKind::ula;
    arma::uword width = 1;  // elements along y
    arma::uword height = 1; // elements along z (UPA only)
    double spacing = 0.5;   // element spacing in wavelengths (d / lambda)
    Sector sector = Sector::full_sphere();

    arma::uword size() const { return width * height; }

    static ArrayGeometry make_ula(arma::uword n, double spacing = 0.5, const Sector &sector = Sector::full_sphere())
    {
        ArrayGeometry g{ArrayKind::ula, n, 1, spacing, sector};
        g.validate();
        return g;
    }

    static ArrayGeometry make_upa(arma::uword width, arma::uword height, double spacing = 0.5,
                                  const Sector &sector = Sector::full_sphere())
    {
        ArrayGeometry g{ArrayKind::upa, width, height, spacing, sector};
        g.validate();
        return g;
    }

    void validate() const
    {
        if (width < 1 || (kind == ArrayKind::upa && height < 1))
            throw std::invalid_argument("ArrayGeometry: element counts must be >= 1");
        if (kind == ArrayKind::ula && height != 1)
            throw std::invalid_argument("ArrayGeometry: a ULA has height 1");
        if (!(spacing > 0.0))
            throw std::invalid_argument("ArrayGeometry: spacing must be > 0 wavelengths");
        sector.validate();
    }
};

// ULA on the y axis: a(phi)[m] = exp(j * 2*pi*d/lambda * m * sin(phi)) / sqrt(N).
// Elevation does not enter (the response is taken in the azimuth plane).
inline arma::cx_vec ula_response(arma::uword n, double spacing, double az_rad)
{
    if (n < 1)
        throw std::invalid_argument("ula_response: need n >= 1");
    const double kd = 2.0 * pi * spacing;
    arma::cx_vec a(n);
    const double step = kd * std::sin(az_rad);
    const double norm = 1.0 / std::sqrt(double(n));
    for (arma::uword m = 0; m < n; ++m)
        a(m) = std::polar(norm, step * double(m));
    return a;
}

// UPA in the y-z plane, width W (y) x height H (z):
//   a(phi, theta)[m*H + n] = exp(j * kd * (m*sin(phi)*sin(theta) + n*cos(theta))) / sqrt(W*H)
// with 0 <= m < W, 0 <= n < H; kd = 2*pi*d/lambda. Equals the Kronecker
// product of a y-axis ULA at direction cosine sin(phi)*sin(theta) and a
// z-axis ULA at direction cosine cos(theta).
inline arma::cx_vec upa_response(arma::uword width, arma::uword height, double spacing, double az_rad, double el_rad)
{
    if (width < 1 || height < 1)
        throw std::invalid_argument("upa_response: need width, height >= 1");
    const double kd = 2.0 * pi * spacing;
    const double uy = kd * std::sin(az_rad) * std::sin(el_rad);
    const double uz = kd * std::cos(el_rad);
    arma::cx_vec a(width * height);
    const double norm = 1.0 / std::sqrt(double(width * height));
    for (arma::uword m = 0; m < width; ++m)
        for (arma::uword n = 0; n < height; ++n)
            a(m * height + n) = std::polar(norm, uy * double(m) + uz * double(n));
    return a;
}

inline arma::cx_vec array_response(const ArrayGeometry &geom, double az_rad, double el_rad)
{
    if (geom.kind == ArrayKind::ula)
        return ula_response(geom.width, geom.spacing, az_rad);
    return upa_response(geom.width, geom.height, geom.spacing, az_rad, el_rad);
}

} // namespace hybeam
