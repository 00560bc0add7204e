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

#include "hybridfb/beams.hpp"
#include "hybridfb/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

using namespace hfb;
using cd = std::complex<double>;

namespace
{
    SystemConfig config_with(arma::uword paths, arma::uword tx_rf, arma::uword rx_rf)
    {
        SystemConfig c;
        c.num_tx_antennas = 16;
        c.num_rx_antennas = 8;
        c.num_tx_rf = tx_rf;
        c.num_rx_rf = rx_rf;
        c.num_streams = 1;
        c.num_subcarriers = 64;
        c.pilot_spacing = 8;
        c.num_paths = paths;
        c.max_delay_taps = 8;
        return c;
    }
}

TEST_CASE("path_powers")
{
    auto c = config_with(3, 1, 1);
    PathSet p;
    p.gains = arma::cx_vec{cd(0, 0), cd(1, 0), cd(0.3, -0.8)};
    p.delays = arma::vec{1.5, 0.0, 3.21};
    p.aod = p.aoa = arma::vec{0.0, 0.0, 0.0};
    auto g = path_powers(p, c);
    CHECK(g(0) == 0.0);
    CHECK(g(1) == doctest::Approx(1.0).epsilon(1e-15));

    // independent scalar loop
    double oracle = 0.0;
    for (int d = 0; d < 8; ++d)
    {
        const double pr = raised_cosine(double(d) - 3.21, 1.0);
        oracle += std::norm(cd(0.3, -0.8) * pr);
    }
    CHECK(g(2) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(arma::all(g >= 0.0));
}

TEST_CASE("select_paths")
{
    CHECK(select_paths(arma::vec{0.1, 0.9, 0.5}, 2) == std::vector<arma::uword>{1, 2});
    CHECK(select_paths(arma::vec{0.4, 0.4, 0.4, 0.4}, 3) == std::vector<arma::uword>{0, 1, 2});
    CHECK_THROWS_AS(select_paths(arma::vec{1.0, 2.0}, 3), InvalidRequest);

    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial)
    {
        arma::vec g(12);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto &x : g)
            x = u(rng);
        auto all = select_paths(g, 12);
        std::vector<arma::uword> sorted(12);
        std::iota(sorted.begin(), sorted.end(), arma::uword(0));
        std::stable_sort(sorted.begin(), sorted.end(), [&](auto a, auto b) { return g(a) > g(b); });
        CHECK(all == sorted);

        // top-k optimality
        auto top = select_paths(g, 5);
        double picked = 0.0;
        for (auto i : top)
            picked += g(i);
        arma::vec desc = arma::sort(g, "descend");
        CHECK(picked == doctest::Approx(arma::accu(desc.head(5))).epsilon(1e-15));
    }
}

TEST_CASE("build_analog")
{
    SUBCASE("columns are array responses in power order")
    {
        auto c = config_with(3, 3, 2);
        PathSet p;
        p.gains = arma::cx_vec{cd(0.5, 0), cd(2.0, 0), cd(1.0, 0)};
        p.delays = arma::vec{0.0, 0.0, 0.0};
        p.aod = arma::vec{0.1, -0.7, 1.2};
        p.aoa = arma::vec{-0.3, 0.4, 0.9};
        auto ranking = rank_paths(p, c);
        CHECK(ranking.selected == std::vector<arma::uword>{1, 2, 0});
        auto b = build_analog(p, ranking, c);
        CHECK(arma::approx_equal(b.precoder.col(0), array_response(16, -0.7, 0.5), "absdiff", 0.0));
        CHECK(arma::approx_equal(b.precoder.col(1), array_response(16, 1.2, 0.5), "absdiff", 0.0));
        CHECK(arma::approx_equal(b.precoder.col(2), array_response(16, 0.1, 0.5), "absdiff", 0.0));
        CHECK(arma::approx_equal(b.combiner.col(0), array_response(8, 0.4, 0.5), "absdiff", 0.0));
        CHECK(arma::approx_equal(b.combiner.col(1), array_response(8, 0.9, 0.5), "absdiff", 0.0));
        CHECK(b.rx_paths == std::vector<arma::uword>{1, 2});
    }

    SUBCASE("constant modulus on random draws")
    {
        auto c = config_with(10, 4, 3);
        Rng rng(12);
        for (unsigned q : {0u, 3u})
        {
            c.phase_bits = q;
            for (int i = 0; i < 10; ++i)
            {
                auto p = draw_paths(c, rng);
                auto b = build_analog(p, rank_paths(p, c), c);
                const double ft = 1.0 / std::sqrt(16.0), wr = 1.0 / std::sqrt(8.0);
                // |polar(r, phi)| is r up to the rounding of cos/sin
                CHECK(arma::abs(arma::abs(b.precoder) - ft).max() <= 4 * std::numeric_limits<double>::epsilon());
                CHECK(arma::abs(arma::abs(b.combiner) - wr).max() <= 4 * std::numeric_limits<double>::epsilon());
            }
        }
    }

    SUBCASE("phase quantization q = 2")
    {
        auto col = steering_column(4, 0.3, 0.5, 2);
        const double two_pi = 2 * std::numbers::pi;
        for (arma::uword n = 0; n < 4; ++n)
        {
            // scalar rounding oracle
            const double exact = std::fmod(std::numbers::pi * double(n) * std::sin(0.3), two_pi);
            double best = 0.0, best_dist = 1e9;
            for (int level = 0; level < 4; ++level)
            {
                const double cand = level * std::numbers::pi / 2;
                double dist = std::abs(std::remainder(exact - cand, two_pi));
                if (dist < best_dist)
                    best_dist = dist, best = cand;
            }
            CHECK(std::abs(col(n) - std::polar(0.5, best)) < 1e-15);
        }
    }

    SUBCASE("independent receive ranking uses receive array gain")
    {
        auto c = config_with(6, 2, 2);
        c.rx_ranking = RxRanking::independent;
        Rng rng(21);
        auto p = draw_paths(c, rng);
        auto taps = delay_taps(p, c);
        CHECK_THROWS_AS(build_analog(p, rank_paths(p, c), c), InvalidRequest);
        auto b = build_analog(p, rank_paths(p, c), c, &taps);
        CHECK(b.rx_paths == select_paths(receive_direction_gains(p, taps, c), 2));
    }

    SUBCASE("frequency flat: one analog pair serves every subcarrier")
    {
        auto c = config_with(4, 2, 2);
        Rng rng(5);
        auto p = draw_paths(c, rng);
        auto ch = realize(p, c);
        auto b = build_analog(p, rank_paths(p, c), c);
        auto eff = effective_channel(ch.freq, b);
        for (arma::uword k = 0; k < c.num_subcarriers; ++k)
            CHECK(arma::approx_equal(eff.slice(k), arma::cx_mat(b.combiner.t() * ch.freq.slice(k) * b.precoder),
                                     "absdiff", 0.0));
    }
}

TEST_CASE("effective_channel")
{
    auto c = config_with(4, 2, 2);
    Rng rng(6);
    auto p = draw_paths(c, rng);
    auto b = build_analog(p, rank_paths(p, c), c);

    SUBCASE("zero channel")
    {
        arma::cx_cube z(8, 16, 3, arma::fill::zeros);
        CHECK(arma::abs(effective_channel(z, b)).max() == 0.0);
    }
    SUBCASE("dimensions and mismatch")
    {
        arma::cx_cube h = arma::randn<arma::cx_cube>(8, 16, 5);
        auto e = effective_channel(h, b);
        CHECK(e.n_rows == 2);
        CHECK(e.n_cols == 2);
        CHECK(e.n_slices == 5);
        arma::cx_cube wrong(8, 15, 1, arma::fill::zeros);
        CHECK_THROWS_AS(effective_channel(wrong, b), InvalidRequest);
    }
    SUBCASE("linearity")
    {
        arma::cx_cube A = arma::randn<arma::cx_cube>(8, 16, 4), B = arma::randn<arma::cx_cube>(8, 16, 4);
        arma::cx_cube lhs = effective_channel(arma::cx_cube(A + B), b);
        arma::cx_cube rhs = effective_channel(A, b) + effective_channel(B, b);
        CHECK(arma::abs(lhs - rhs).max() < 1e-12);
    }
    SUBCASE("full-dimensional DFT beams: triple-product oracle")
    {
        SystemConfig f = config_with(8, 8, 8);
        f.num_tx_antennas = f.num_rx_antennas = 8;
        // uniformly spaced sines give an orthonormal DFT basis
        AnalogBeamformers dft;
        dft.precoder.set_size(8, 8);
        dft.combiner.set_size(8, 8);
        for (arma::uword m = 0; m < 8; ++m)
        {
            const double s = (2.0 * double(m)) / 8.0 - 1.0;
            dft.precoder.col(m) = array_response(8, std::asin(s), 0.5);
            dft.combiner.col(m) = array_response(8, std::asin(s), 0.5);
        }
        arma::cx_cube h = arma::randn<arma::cx_cube>(8, 8, 2);
        auto e = effective_channel(h, dft);
        for (arma::uword k = 0; k < 2; ++k)
        {
            // unitary beams preserve the Frobenius norm
            CHECK(arma::norm(e.slice(k), "fro") == doctest::Approx(arma::norm(h.slice(k), "fro")).epsilon(1e-12));
            // entrywise triple product
            cd entry = 0;
            for (arma::uword i = 0; i < 8; ++i)
                for (arma::uword j = 0; j < 8; ++j)
                    entry += std::conj(dft.combiner(i, 3)) * h(i, j, k) * dft.precoder(j, 5);
            CHECK(std::abs(e(3, 5, k) - entry) < 1e-12);
        }
    }
    SUBCASE("single path: rank-1 contraction gives sqrt(Nt Nr) |c_k|")
    {
        auto s = config_with(1, 1, 1);
        PathSet one;
        one.gains = arma::cx_vec{cd(0.6, 0.8)};
        one.delays = arma::vec{0.0};
        one.aod = arma::vec{0.0};
        one.aoa = arma::vec{0.0};
        auto ch = realize(one, s);
        auto bb = build_analog(one, rank_paths(one, s), s);
        auto e = effective_channel(ch.freq, bb);
        for (arma::uword k = 0; k < s.num_subcarriers; ++k)
            CHECK(std::abs(e(0, 0, k)) == doctest::Approx(std::sqrt(16.0 * 8.0) * 1.0).epsilon(1e-12));
    }
}
