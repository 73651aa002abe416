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
// Limited feedback: uniform angle codebooks for the RF steering directions,
// a trained subspace (Grassmannian) codebook for the baseband precoder, the
// feedback bitstream layout, and the full quantize/encode/decode round trip.
//
// Bit budget per precoder: n_rf * (bits_az + bits_el) + bb_bits. The
// baseband power-normalization scalar is not fed back; the transmitter
// recomputes it from the reconstructed matrices.

#pragma once

#include "combining.hpp"

#include <cstdint>
#include <vector>

namespace hybeam {

// ---- Angle codebooks --------------------------------------------------------

// 2^bits uniformly spaced points in [lo, hi], placed at the cell midpoints:
// point m (1-based) = lo + (2m - 1) (hi - lo) / 2^(bits+1). bits = 0 yields
// the single midpoint of the interval.
inline arma::vec angle_axis_points(arma::uword bits, double lo, double hi)
{
    if (!(lo < hi))
        throw std::invalid_argument("angle_axis_points: need lo < hi");
    if (bits > 10)
        throw std::invalid_argument("angle_axis_points: bits > 10 is unsupported");
    const arma::uword n = arma::uword(1) << bits;
    arma::vec p(n);
    for (arma::uword m = 1; m <= n; ++m)
        p(m - 1) = lo + double(2 * m - 1) * (hi - lo) / double(arma::uword(2) << bits);
    return p;
}

struct AngleCodebook
{
    arma::uword bits_az = 0;
    arma::uword bits_el = 0;
    Sector sector;        // the quantized angular region (the transmit sector)
    arma::vec az_points;  // 2^bits_az azimuth points
    arma::vec el_points;  // 2^bits_el elevation points
};

inline AngleCodebook angle_codebook(arma::uword bits_az, arma::uword bits_el, const Sector &sector)
{
    sector.validate();
    AngleCodebook cb;
    cb.bits_az = bits_az;
    cb.bits_el = bits_el;
    cb.sector = sector;
    cb.az_points = angle_axis_points(bits_az, sector.az_min_rad, sector.az_max_rad);
    cb.el_points = angle_axis_points(bits_el, sector.el_min_rad, sector.el_max_rad);
    return cb;
}

// Steering-vector dictionary over every codebook angle pair, one column per
// (az, el) in lexicographic order: column index = az_index * 2^bits_el +
// el_index. Size N x 2^(bits_az + bits_el).
inline arma::cx_mat quantized_dictionary(const AngleCodebook &cb, const ArrayGeometry &geom)
{
    const arma::uword n_az = cb.az_points.n_elem, n_el = cb.el_points.n_elem;
    arma::cx_mat dict(geom.size(), n_az * n_el);
    for (arma::uword a = 0; a < n_az; ++a)
        for (arma::uword e = 0; e < n_el; ++e)
            dict.col(a * n_el + e) = array_response(geom, cb.az_points(a), cb.el_points(e));
    return dict;
}

// ---- Subspace (Grassmannian) codebook for the baseband precoder ---------------

struct SubspaceCodebook
{
    arma::uword bits = 0;
    std::vector<arma::cx_mat> entries; // 2^bits orthonormal n_rf x ns matrices
};

// Squared chordal distance between two subspaces given by orthonormal-column
// matrices: d^2 = ns - ||A^H B||_F^2. Invariant to right-unitary rotations.
inline double chordal_distance_sq(const arma::cx_mat &a, const arma::cx_mat &b)
{
    if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
        throw std::invalid_argument("chordal_distance_sq: dimension mismatch");
    const double overlap = std::pow(arma::norm(arma::cx_mat(a.t() * b), "fro"), 2);
    return std::max(0.0, double(a.n_cols) - overlap);
}

// Index of the codebook entry closest in chordal distance (lowest index on
// ties).
inline arma::uword quantize_bb(const arma::cx_mat &f_bb, const SubspaceCodebook &cb)
{
    if (cb.entries.empty())
        throw std::invalid_argument("quantize_bb: empty codebook");
    arma::uword best = 0;
    double best_d = chordal_distance_sq(f_bb, cb.entries[0]);
    for (arma::uword j = 1; j < cb.entries.size(); ++j)
    {
        const double d = chordal_distance_sq(f_bb, cb.entries[j]);
        if (d < best_d)
        {
            best_d = d;
            best = j;
        }
    }
    return best;
}

namespace detail {

// Dominant-ns eigenvectors of a Hermitian matrix, descending eigenvalues.
inline arma::cx_mat dominant_subspace(const arma::cx_mat &p, arma::uword ns)
{
    arma::vec ev;
    arma::cx_mat vec;
    arma::cx_mat ph = 0.5 * (p + p.t());
    if (!arma::eig_sym(ev, vec, ph))
        throw std::runtime_error("dominant_subspace: eigendecomposition failed");
    arma::cx_mat out(p.n_rows, ns);
    for (arma::uword i = 0; i < ns; ++i)
        out.col(i) = vec.col(vec.n_cols - 1 - i); // eig_sym sorts ascending
    return out;
}

} // namespace detail

// Lloyd clustering on the Grassmann manifold under the chordal distance.
// Starts from evenly strided training samples, reassigns/updates until the
// relative change in mean distortion drops below rel_tol (or max_iter).
// Centroids are the dominant-ns subspaces of each cell's average projector;
// an emptied cell is re-seeded with the member of the largest cell that is
// farthest from that cell's centroid.
inline SubspaceCodebook train_bb_codebook(const std::vector<arma::cx_mat> &samples, arma::uword bits,
                                          double rel_tol = 1e-6, arma::uword max_iter = 100)
{
    if (bits > 20)
        throw std::invalid_argument("train_bb_codebook: bits > 20 is unsupported");
    const arma::uword k = arma::uword(1) << bits;
    if (samples.empty())
        throw std::invalid_argument("train_bb_codebook: no training samples");
    if (samples.size() < k)
        throw std::invalid_argument("train_bb_codebook: need at least 2^bits training samples");
    const arma::uword rows = samples[0].n_rows, cols = samples[0].n_cols;
    for (const auto &s : samples)
        if (s.n_rows != rows || s.n_cols != cols)
            throw std::invalid_argument("train_bb_codebook: inconsistent sample dimensions");

    SubspaceCodebook cb;
    cb.bits = bits;
    cb.entries.resize(k);
    for (arma::uword j = 0; j < k; ++j)
        cb.entries[j] = samples[(j * samples.size()) / k];

    std::vector<arma::uword> assign(samples.size());
    double prev_distortion = -1.0;
    for (arma::uword it = 0; it < max_iter; ++it)
    {
        double distortion = 0.0;
        for (std::size_t n = 0; n < samples.size(); ++n)
        {
            assign[n] = quantize_bb(samples[n], cb);
            distortion += chordal_distance_sq(samples[n], cb.entries[assign[n]]);
        }
        distortion /= double(samples.size());
        if (prev_distortion >= 0.0 && std::fabs(prev_distortion - distortion) <= rel_tol * std::max(prev_distortion, 1e-300))
            break;
        prev_distortion = distortion;

        std::vector<std::vector<std::size_t>> cells(k);
        for (std::size_t n = 0; n < samples.size(); ++n)
            cells[assign[n]].push_back(n);

        for (arma::uword j = 0; j < k; ++j)
        {
            if (cells[j].empty())
                continue;
            arma::cx_mat p(rows, rows, arma::fill::zeros);
            for (std::size_t n : cells[j])
                p += samples[n] * samples[n].t();
            cb.entries[j] = detail::dominant_subspace(p / double(cells[j].size()), cols);
        }
        for (arma::uword j = 0; j < k; ++j)
        {
            if (!cells[j].empty())
                continue;
            arma::uword big = 0;
            for (arma::uword c = 1; c < k; ++c)
                if (cells[c].size() > cells[big].size())
                    big = c;
            if (cells[big].size() <= 1)
                continue; // nothing to split
            std::size_t far_n = cells[big][0];
            double far_d = -1.0;
            std::size_t far_pos = 0;
            for (std::size_t pos = 0; pos < cells[big].size(); ++pos)
            {
                const double d = chordal_distance_sq(samples[cells[big][pos]], cb.entries[big]);
                if (d > far_d)
                {
                    far_d = d;
                    far_n = cells[big][pos];
                    far_pos = pos;
                }
            }
            cb.entries[j] = samples[far_n];
            cells[j].push_back(far_n);
            cells[big].erase(cells[big].begin() + std::ptrdiff_t(far_pos));
        }
    }
    return cb;
}

// ---- Bitstream --------------------------------------------------------------

// MSB-first bit packing into bytes (the last byte is zero-padded).
class BitWriter
{
  public:
    void write(std::uint64_t value, arma::uword bits)
    {
        if (bits > 64)
            throw std::invalid_argument("BitWriter: at most 64 bits per field");
        for (arma::uword i = 0; i < bits; ++i)
        {
            const bool bit = (value >> (bits - 1 - i)) & 1ULL;
            if (nbits_ % 8 == 0)
                bytes_.push_back(0);
            if (bit)
                bytes_.back() |= std::uint8_t(0x80u >> (nbits_ % 8));
            ++nbits_;
        }
    }

    const std::vector<std::uint8_t> &bytes() const { return bytes_; }
    arma::uword bit_count() const { return nbits_; }

  private:
    std::vector<std::uint8_t> bytes_;
    arma::uword nbits_ = 0;
};

class BitReader
{
  public:
    explicit BitReader(const std::vector<std::uint8_t> &bytes) : bytes_(bytes) {}

    std::uint64_t read(arma::uword bits)
    {
        std::uint64_t v = 0;
        for (arma::uword i = 0; i < bits; ++i)
        {
            if (pos_ / 8 >= bytes_.size())
                throw std::out_of_range("BitReader: read past the end of the stream");
            const bool bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
            v = (v << 1) | std::uint64_t(bit);
            ++pos_;
        }
        return v;
    }

  private:
    const std::vector<std::uint8_t> &bytes_;
    arma::uword pos_ = 0;
};

// ---- Feedback round trip -------------------------------------------------------

struct FeedbackConfig
{
    AngleCodebook angles;
    SubspaceCodebook bb;
};

inline arma::uword feedback_bit_count(const FeedbackConfig &cfg, arma::uword n_rf)
{
    return n_rf * (cfg.angles.bits_az + cfg.angles.bits_el) + cfg.bb.bits;
}

struct FeedbackResult
{
    HybridPrecoder precoder;            // transmitter-side reconstruction
    std::vector<std::uint8_t> bits;     // the feedback message
    arma::uword bit_count = 0;
    std::vector<arma::uword> az_index;  // per RF chain
    std::vector<arma::uword> el_index;  // per RF chain
    arma::uword bb_index = 0;
};

// Receiver-side precoder selection over the quantized dictionary (unitary
// baseband variant, so the baseband matrix lives on the codebook's
// Grassmannian), quantization, bit packing, and transmitter-side
// reconstruction from the bits alone. Layout: for each RF chain the azimuth
// index (bits_az, MSB first) then the elevation index (bits_el), followed by
// the baseband codebook index (bb bits).
inline FeedbackResult feedback_roundtrip(const ChannelRealization &real, arma::uword n_rf, arma::uword ns,
                                         const FeedbackConfig &cfg)
{
    if (ns < 1 || ns > n_rf)
        throw std::invalid_argument("feedback_roundtrip: need 1 <= ns <= n_rf");
    if (cfg.bb.entries.empty())
        throw std::invalid_argument("feedback_roundtrip: empty baseband codebook");
    if (cfg.bb.entries[0].n_rows != n_rf || cfg.bb.entries[0].n_cols != ns)
        throw std::invalid_argument("feedback_roundtrip: baseband codebook entries must be n_rf x ns");

    const arma::uword n_el = cfg.angles.el_points.n_elem;

    // receiver: select, quantize, encode
    const UnconstrainedPrecoder opt = optimal_precoder(real.h, ns);
    const arma::cx_mat dict = quantized_dictionary(cfg.angles, real.params.tx);
    OmpOptions omp;
    omp.unitary_bb = true;
    const HybridPrecoder sel = sparse_precoder_omp(opt.f_opt, dict, n_rf, omp);
    // undo the power scalar to recover the orthonormal baseband matrix
    const arma::cx_mat bb_unit = sel.f_bb * (std::sqrt(double(ns)) / arma::norm(sel.f_bb, "fro"));

    FeedbackResult out;
    out.bb_index = quantize_bb(bb_unit, cfg.bb);
    BitWriter bw;
    for (arma::uword i = 0; i < n_rf; ++i)
    {
        out.az_index.push_back(sel.selected[i] / n_el);
        out.el_index.push_back(sel.selected[i] % n_el);
        bw.write(out.az_index.back(), cfg.angles.bits_az);
        bw.write(out.el_index.back(), cfg.angles.bits_el);
    }
    bw.write(out.bb_index, cfg.bb.bits);
    out.bits = bw.bytes();
    out.bit_count = bw.bit_count();

    // transmitter: rebuild the precoder from the bits alone
    BitReader br(out.bits);
    HybridPrecoder rec;
    rec.f_rf.set_size(dict.n_rows, n_rf);
    for (arma::uword i = 0; i < n_rf; ++i)
    {
        const arma::uword az = arma::uword(br.read(cfg.angles.bits_az));
        const arma::uword el = arma::uword(br.read(cfg.angles.bits_el));
        if (az >= cfg.angles.az_points.n_elem || el >= n_el)
            throw std::out_of_range("feedback_roundtrip: decoded angle index out of range");
        rec.f_rf.col(i) = array_response(real.params.tx, cfg.angles.az_points(az), cfg.angles.el_points(el));
        rec.selected.push_back(az * n_el + el);
    }
    const arma::uword bb = arma::uword(br.read(cfg.bb.bits));
    rec.f_bb = cfg.bb.entries[bb];
    const double pn = arma::norm(rec.f_rf * rec.f_bb, "fro");
    if (!(pn > 0.0))
        throw std::runtime_error("feedback_roundtrip: reconstructed precoder has zero power");
    rec.f_bb *= std::sqrt(double(ns)) / pn; // transmitter recomputes the power scalar
    out.precoder = std::move(rec);
    return out;
}

} // namespace hybeam
