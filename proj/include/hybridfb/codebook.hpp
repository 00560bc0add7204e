// SPDX-License-Identifier: Apache-2.0
//
// hybridfb: reduced-feedback hybrid precoding for wideband mmWave MIMO-OFDM
// Copyright (C) 2026 The hybridfb authors
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

#ifndef hybridfb_codebook_H
#define hybridfb_codebook_H

#include "hybridfb/config.hpp"
#include "hybridfb/rng.hpp"

#include <armadillo>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace hfb
{
    // B = 2^bits unit-norm codewords stored as the columns of `vectors` (N_t_RF x B).
    // Shared by both link ends and immutable once trained.
    struct Codebook
    {
        arma::cx_mat vectors;
        unsigned bits = 0;

        arma::uword size() const { return vectors.n_cols; }
        arma::uword dim() const { return vectors.n_rows; }

        // Size matches bits, unit norms to 1e-12, no two codewords identical.
        void validate() const;
    };

    struct LloydOptions
    {
        unsigned max_iters = 100;
        double tol = 1e-9; // stop once the distortion drop of one iteration falls below this
    };

    struct LloydResult
    {
        Codebook codebook;
        std::vector<double> distortion; // entry 0 is the initial codebook, one more per iteration
    };

    // Mean chordal distortion mean_i (1 - max_j |c_j^H x_i|^2) with training vectors as columns.
    double average_distortion(const arma::cx_mat &training, const arma::cx_mat &codewords);

    // Generalized Lloyd under the chordal metric. Initial codewords are distinct training vectors
    // drawn from rng, cell centroids are principal eigenvectors of sum x x^H, and empty cells are
    // re-seeded with the worst-quantized training vectors.
    LloydResult train_lloyd(const arma::cx_mat &training, unsigned bits, Rng &rng, const LloydOptions &opts = {});

    // Every 16th subcarrier of each independent channel draw contributes the dominant right
    // singular vector of its effective channel. Returns N_t_RF x n.
    arma::cx_mat training_set(const SystemConfig &config, arma::uword num_realizations, Rng &rng);
    inline constexpr arma::uword kTrainingDecimation = 16;

    // Greedy multi-stream pick with projection onto the orthogonal complement of the chosen codewords.
    struct DigitalPrecoder
    {
        arma::cx_mat V;                   // N_t_RF x N_s, raw codewords
        std::vector<arma::uword> indices; // 0-based codeword index per stream
        std::uint64_t evaluations = 0;    // number of ||H c|| evaluations
    };

    inline constexpr double kDependenceThreshold = 1e-10;

    DigitalPrecoder select_codewords(const arma::cx_mat &h_eff, const Codebook &codebook, arma::uword num_streams);

    // Same greedy recursion over a group of channels sharing one precoder, scored by
    // sum_k ||H^t[k] c||^2. Every (channel, codeword) product counts as one evaluation.
    DigitalPrecoder select_codewords_joint(const std::vector<arma::cx_mat> &h_eff, const Codebook &codebook,
                                           arma::uword num_streams);

    // Text format: "<bits> <dim>" header, then one codeword per line as interleaved re im decimals.
    void write_codebook(std::ostream &out, const Codebook &codebook);
    Codebook read_codebook(std::istream &in);
    void save_codebook(const Codebook &codebook, const std::filesystem::path &file);
    Codebook load_codebook(const std::filesystem::path &file);
}

#endif
