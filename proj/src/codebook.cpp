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

#include "hybridfb/codebook.hpp"
#include "hybridfb/beams.hpp"
#include "hybridfb/channel.hpp"
#include "hybridfb/error.hpp"
#include "hybridfb/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace hfb
{
    void Codebook::validate() const
    {
        if (bits == 0 || size() != (arma::uword(1) << bits))
            throw InvalidRequest("codebook: expected 2^bits codewords");
        for (arma::uword j = 0; j < size(); ++j)
        {
            if (std::abs(arma::norm(vectors.col(j)) - 1.0) > 1e-12)
                throw InvalidRequest("codebook: codeword " + std::to_string(j) + " is not unit norm");
            for (arma::uword i = 0; i < j; ++i)
                if (arma::approx_equal(vectors.col(i), vectors.col(j), "absdiff", 0.0))
                    throw InvalidRequest("codebook: codewords " + std::to_string(i) + " and " + std::to_string(j) +
                                         " are identical");
        }
    }

    namespace
    {
        // Best codeword per training vector and its |c^H x|^2
        void nearest(const arma::cx_mat &training, const arma::cx_mat &codewords,
                     std::vector<arma::uword> &cell, arma::vec &gain)
        {
            const arma::mat corr = arma::square(arma::abs(codewords.t() * training)); // B x n
            cell.assign(training.n_cols, 0);
            gain.set_size(training.n_cols);
            for (arma::uword i = 0; i < training.n_cols; ++i)
            {
                arma::uword best = 0;
                for (arma::uword j = 1; j < corr.n_rows; ++j)
                    if (corr(j, i) > corr(best, i))
                        best = j;
                cell[i] = best;
                gain(i) = corr(best, i);
            }
        }

        // Rotate so the largest-magnitude entry is real positive; removes the eigen-solver's phase freedom.
        void fix_phase(arma::cx_vec &v)
        {
            const arma::uword m = arma::index_max(arma::abs(v));
            const double mag = std::abs(v(m));
            if (mag > 0.0)
                v *= std::conj(v(m)) / mag;
            v /= arma::norm(v);
        }
    }

    double average_distortion(const arma::cx_mat &training, const arma::cx_mat &codewords)
    {
        if (training.n_cols == 0)
            return 0.0;
        std::vector<arma::uword> cell;
        arma::vec gain;
        nearest(training, codewords, cell, gain);
        return arma::mean(1.0 - gain);
    }

    LloydResult train_lloyd(const arma::cx_mat &training, unsigned bits, Rng &rng, const LloydOptions &opts)
    {
        if (bits == 0 || bits > 20)
            throw InvalidRequest("train_lloyd: bits must lie in [1, 20]");
        const arma::uword B = arma::uword(1) << bits;
        const arma::uword n = training.n_cols;
        if (n < B)
            throw InvalidRequest("train_lloyd: need at least " + std::to_string(B) + " training vectors, got " +
                                 std::to_string(n));

        // Partial Fisher-Yates: B distinct training indices
        std::vector<arma::uword> order(n);
        std::iota(order.begin(), order.end(), arma::uword(0));
        for (arma::uword i = 0; i < B; ++i)
        {
            std::uniform_int_distribution<arma::uword> pick(i, n - 1);
            std::swap(order[i], order[pick(rng)]);
        }

        arma::cx_mat C(training.n_rows, B);
        for (arma::uword j = 0; j < B; ++j)
        {
            arma::cx_vec c = training.col(order[j]);
            fix_phase(c);
            C.col(j) = c;
        }

        LloydResult result;
        std::vector<arma::uword> cell;
        arma::vec gain;
        nearest(training, C, cell, gain);
        result.distortion.push_back(arma::mean(1.0 - gain));

        for (unsigned it = 0; it < opts.max_iters; ++it)
        {
            std::vector<arma::cx_mat> scatter(B, arma::cx_mat(training.n_rows, training.n_rows, arma::fill::zeros));
            std::vector<arma::uword> members(B, 0);
            for (arma::uword i = 0; i < n; ++i)
            {
                scatter[cell[i]] += training.col(i) * training.col(i).t();
                ++members[cell[i]];
            }

            // Empty cells take the worst-served vectors, each used at most once.
            const arma::uvec worst = arma::sort_index(gain, "ascend");
            arma::uword next_worst = 0;
            for (arma::uword j = 0; j < B; ++j)
            {
                if (members[j] > 0)
                {
                    arma::vec eigval;
                    arma::cx_mat eigvec;
                    arma::eig_sym(eigval, eigvec, arma::cx_mat(0.5 * (scatter[j] + scatter[j].t())));
                    arma::cx_vec c = eigvec.col(eigvec.n_cols - 1);
                    fix_phase(c);
                    C.col(j) = c;
                }
                else
                {
                    arma::cx_vec c = training.col(worst(next_worst++));
                    fix_phase(c);
                    C.col(j) = c;
                }
            }

            nearest(training, C, cell, gain);
            const double d = arma::mean(1.0 - gain);
            const double prev = result.distortion.back();
            result.distortion.push_back(d);
            if (prev - d < opts.tol)
                break;
        }

        result.codebook.vectors = std::move(C);
        result.codebook.bits = bits;
        return result;
    }

    arma::cx_mat training_set(const SystemConfig &config, arma::uword num_realizations, Rng &rng)
    {
        std::vector<arma::uword> grid;
        for (arma::uword k = 1; k <= config.num_subcarriers; k += kTrainingDecimation)
            grid.push_back(k);

        arma::cx_mat out(config.num_tx_rf, num_realizations * grid.size());
        arma::uword col = 0;
        for (arma::uword r = 0; r < num_realizations; ++r)
        {
            const PathSet paths = draw_paths(config, rng);
            const arma::cx_cube taps = delay_taps(paths, config);
            const AnalogBeamformers beams = build_analog(paths, rank_paths(paths, config), config, &taps);
            const arma::cx_cube eff = to_frequency_at(effective_channel(taps, beams), config.num_subcarriers, grid);
            for (arma::uword k = 0; k < eff.n_slices; ++k)
            {
                arma::cx_mat U, V;
                arma::vec s;
                arma::svd(U, s, V, eff.slice(k));
                arma::cx_vec v = V.col(0);
                v /= arma::norm(v);
                out.col(col++) = v;
            }
        }
        return out;
    }

    namespace
    {
        // Greedy selection shared by the per-subcarrier and per-cluster variants. `score` maps the
        // projected channels and a codeword to a gain and bumps the evaluation counter.
        template <typename Score>
        DigitalPrecoder greedy_select(std::vector<arma::cx_mat> projected, const Codebook &codebook,
                                      arma::uword num_streams, Score score)
        {
            const arma::uword B = codebook.size(), dim = codebook.dim();
            for (const auto &h : projected)
                if (h.n_cols != dim)
                    throw InvalidRequest("select_codewords: channel has " + std::to_string(h.n_cols) +
                                         " columns, codebook dimension is " + std::to_string(dim));
            if (num_streams > B || num_streams > dim)
                throw InvalidRequest("select_codewords: num_streams exceeds codebook size or dimension");

            DigitalPrecoder out;
            out.V.set_size(dim, num_streams);
            std::vector<bool> unavailable(B, false);
            arma::cx_mat basis(dim, 0);

            for (arma::uword t = 0; t < num_streams; ++t)
            {
                if (t > 0)
                    for (arma::uword j = 0; j < B; ++j)
                    {
                        if (unavailable[j])
                            continue;
                        const arma::cx_vec c = codebook.vectors.col(j);
                        if (arma::norm(c - basis * (basis.t() * c)) < kDependenceThreshold)
                            unavailable[j] = true;
                    }

                arma::uword best = B;
                double best_gain = -std::numeric_limits<double>::infinity();
                for (arma::uword j = 0; j < B; ++j)
                {
                    if (unavailable[j])
                        continue;
                    const double g = score(projected, codebook.vectors.col(j), out.evaluations);
                    if (g > best_gain)
                    {
                        best_gain = g;
                        best = j;
                    }
                }
                if (best == B)
                    throw InvalidRequest("select_codewords: codebook spans fewer than num_streams independent directions");

                unavailable[best] = true;
                out.indices.push_back(best);
                out.V.col(t) = codebook.vectors.col(best);

                // Modified Gram-Schmidt with one re-orthogonalization pass
                arma::cx_vec q = codebook.vectors.col(best);
                for (int pass = 0; pass < 2; ++pass)
                    for (arma::uword i = 0; i < basis.n_cols; ++i)
                        q -= arma::cdot(basis.col(i), q) * basis.col(i);
                q /= arma::norm(q);
                basis.insert_cols(basis.n_cols, q);

                // H^{t+1} = H^t (I - Q Q^H)
                for (auto &h : projected)
                    h = h - (h * basis) * basis.t();
            }
            return out;
        }
    }

    DigitalPrecoder select_codewords(const arma::cx_mat &h_eff, const Codebook &codebook, arma::uword num_streams)
    {
        return greedy_select({h_eff}, codebook, num_streams,
                             [](const std::vector<arma::cx_mat> &h, const auto &c, std::uint64_t &evals)
                             {
                                 ++evals;
                                 return arma::norm(h.front() * c);
                             });
    }

    DigitalPrecoder select_codewords_joint(const std::vector<arma::cx_mat> &h_eff, const Codebook &codebook,
                                           arma::uword num_streams)
    {
        if (h_eff.empty())
            throw InvalidRequest("select_codewords_joint: empty channel group");
        return greedy_select(h_eff, codebook, num_streams,
                             [](const std::vector<arma::cx_mat> &h, const auto &c, std::uint64_t &evals)
                             {
                                 double sum = 0.0;
                                 for (const auto &hk : h)
                                 {
                                     ++evals;
                                     sum += std::pow(arma::norm(hk * c), 2);
                                 }
                                 return sum;
                             });
    }

    void write_codebook(std::ostream &out, const Codebook &codebook)
    {
        out << codebook.bits << " " << codebook.dim() << "\n";
        for (arma::uword j = 0; j < codebook.size(); ++j)
        {
            for (arma::uword i = 0; i < codebook.dim(); ++i)
            {
                const auto z = codebook.vectors(i, j);
                out << (i ? " " : "") << format_real(z.real()) << " " << format_real(z.imag());
            }
            out << "\n";
        }
    }

    Codebook read_codebook(std::istream &in)
    {
        std::string line;
        if (!std::getline(in, line))
            throw InvalidRequest("codebook: missing header");
        auto head = split(trim(line), ' ');
        if (head.size() != 2)
            throw InvalidRequest("codebook: header must be '<bits> <dim>'");
        Codebook cb;
        cb.bits = static_cast<unsigned>(parse_unsigned(head[0], "codebook bits"));
        const auto dim = static_cast<arma::uword>(parse_unsigned(head[1], "codebook dimension"));
        if (cb.bits == 0 || cb.bits > 20 || dim == 0)
            throw InvalidRequest("codebook: bad header values");
        const arma::uword B = arma::uword(1) << cb.bits;
        cb.vectors.set_size(dim, B);
        for (arma::uword j = 0; j < B; ++j)
        {
            if (!std::getline(in, line))
                throw InvalidRequest("codebook: expected " + std::to_string(B) + " codeword lines, got " + std::to_string(j));
            std::istringstream ls(line);
            std::vector<std::string> tok;
            for (std::string t; ls >> t;)
                tok.push_back(t);
            if (tok.size() != 2 * dim)
                throw InvalidRequest("codebook: line " + std::to_string(j + 2) + " has " + std::to_string(tok.size()) +
                                     " numbers, expected " + std::to_string(2 * dim));
            for (arma::uword i = 0; i < dim; ++i)
                cb.vectors(i, j) = {parse_real(tok[2 * i], "codeword"), parse_real(tok[2 * i + 1], "codeword")};
        }
        return cb;
    }

    void save_codebook(const Codebook &codebook, const std::filesystem::path &file)
    {
        std::ofstream out(file);
        if (!out)
            throw IoError("cannot write codebook " + file.string());
        write_codebook(out, codebook);
        if (!out)
            throw IoError("failed writing codebook " + file.string());
    }

    Codebook load_codebook(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        if (!in)
            throw IoError("cannot read codebook " + file.string());
        return read_codebook(in);
    }
}
