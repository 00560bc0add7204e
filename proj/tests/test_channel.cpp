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

#include "hybridfb/channel.hpp"
#include "hybridfb/error.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>

using namespace hfb;
using cd = std::complex<double>;

namespace
{
    SystemConfig small_config()
    {
        SystemConfig c;
        c.num_tx_antennas = 8;
        c.num_rx_antennas = 8;
        c.num_tx_rf = 2;
        c.num_rx_rf = 2;
        c.num_streams = 1;
        c.num_subcarriers = 64;
        c.pilot_spacing = 8;
        c.num_paths = 2;
        c.max_delay_taps = 8;
        return c;
    }

    PathSet single_path(double alpha, double tau, double aod, double aoa)
    {
        PathSet p;
        p.gains = arma::cx_vec{cd(alpha, 0.0)};
        p.delays = arma::vec{tau};
        p.aod = arma::vec{aod};
        p.aoa = arma::vec{aoa};
        return p;
    }

    // Independent scalar evaluation of the ULA response
    cd ula_entry(arma::uword N, arma::uword n, double angle, double s)
    {
        const double ph = 2.0 * std::numbers::pi * s * double(n) * std::sin(angle);
        return cd(std::cos(ph), std::sin(ph)) / std::sqrt(double(N));
    }
}

TEST_CASE("draw_paths")
{
    SUBCASE("reference config: L paths, delays inside the delay spread, angles in range")
    {
        SystemConfig c;
        Rng rng(7);
        auto p = draw_paths(c, rng);
        CHECK(p.size() == 24);
        CHECK(p.delays.max() < 31.0);
        CHECK(p.delays.min() >= 0.0);
        CHECK(arma::abs(p.aod).max() <= std::numbers::pi / 2);
        CHECK(arma::abs(p.aoa).max() <= std::numbers::pi / 2);
        CHECK(p.pathloss == 1.0);
    }
    SUBCASE("seed 42 twice is bitwise identical")
    {
        SystemConfig c;
        Rng a(42), b(42);
        auto p = draw_paths(c, a), q = draw_paths(c, b);
        CHECK(std::memcmp(p.gains.memptr(), q.gains.memptr(), p.gains.n_elem * sizeof(cd)) == 0);
        CHECK(std::memcmp(p.delays.memptr(), q.delays.memptr(), p.delays.n_elem * sizeof(double)) == 0);
        CHECK(std::memcmp(p.aod.memptr(), q.aod.memptr(), p.aod.n_elem * sizeof(double)) == 0);
        CHECK(std::memcmp(p.aoa.memptr(), q.aoa.memptr(), p.aoa.n_elem * sizeof(double)) == 0);
    }
    SUBCASE("gain moments are CN(0,1)")
    {
        SystemConfig c;
        c.num_paths = 20000;
        c.num_tx_rf = c.num_rx_rf = 1;
        c.num_streams = 1;
        Rng rng(3);
        auto p = draw_paths(c, rng);
        CHECK(arma::mean(arma::square(arma::abs(p.gains))) == doctest::Approx(1.0).epsilon(0.03));
        CHECK(std::abs(arma::mean(p.gains)) < 0.03);
    }
}

TEST_CASE("array_response")
{
    auto a = array_response(4, 0.0, 0.5);
    for (arma::uword n = 0; n < 4; ++n)
        CHECK(std::abs(a(n) - cd(0.5, 0.0)) < 1e-15);

    auto b = array_response(2, std::numbers::pi / 2, 0.5);
    CHECK(std::abs(b(0) - cd(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(b(1) - cd(-1.0 / std::sqrt(2.0), 0.0)) < 1e-15);

    auto c = array_response(8, 0.3, 0.5);
    for (arma::uword n = 0; n < 8; ++n)
        CHECK(std::abs(c(n) - ula_entry(8, n, 0.3, 0.5)) < 1e-14);

    Rng rng(11);
    std::uniform_real_distribution<double> ang(-std::numbers::pi / 2, std::numbers::pi / 2);
    for (arma::uword N : {1u, 3u, 16u, 128u})
        for (int i = 0; i < 20; ++i)
            CHECK(std::abs(arma::norm(array_response(N, ang(rng), 0.5)) - 1.0) < 1e-12);

    CHECK_THROWS_AS(array_response(0, 0.0, 0.5), InvalidRequest);
}

TEST_CASE("raised cosine")
{
    for (double beta : {0.0, 0.25, 0.5, 1.0})
    {
        CHECK(raised_cosine(0.0, beta) == 1.0);
        for (int d = 1; d < 10; ++d)
        {
            CHECK(std::abs(raised_cosine(double(d), beta)) < 1e-15);
            CHECK(std::abs(raised_cosine(-double(d), beta)) < 1e-15);
        }
    }
    // Removable singularity at 1/(2 beta): limit is (pi/4) sinc(1/(2 beta))
    CHECK(raised_cosine(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(raised_cosine(0.5 - 1e-6, 1.0) == doctest::Approx(0.5).epsilon(1e-5));
    const double t_sing = 1.0 / 0.6; // rolloff 0.3
    const double limit = std::numbers::pi / 4 * std::sin(std::numbers::pi * t_sing) / (std::numbers::pi * t_sing);
    CHECK(raised_cosine(t_sing, 0.3) == doctest::Approx(limit).epsilon(1e-12));
    CHECK(raised_cosine(t_sing + 1e-6, 0.3) == doctest::Approx(limit).epsilon(1e-5));
    CHECK(raised_cosine(1.0 + 1e-7, 0.5) == doctest::Approx(raised_cosine(1.0, 0.5)).epsilon(1e-5));
}

TEST_CASE("delay_taps")
{
    SUBCASE("single boresight-ish path at tau = 0 lands on tap 0 only")
    {
        auto c = small_config();
        c.num_paths = 1;
        c.num_tx_rf = c.num_rx_rf = 1;
        const double aod = 0.2, aoa = -0.4;
        auto taps = delay_taps(single_path(1.0, 0.0, aod, aoa), c);
        arma::cx_mat expected = std::sqrt(64.0) * array_response(8, aoa, 0.5) * array_response(8, aod, 0.5).t();
        CHECK(arma::abs(taps.slice(0) - expected).max() < 1e-13);
        for (arma::uword d = 1; d < c.max_delay_taps; ++d)
            CHECK(arma::abs(taps.slice(d)).max() < 1e-14);
    }

    SUBCASE("tap energy matches the brute-force double sum over paths")
    {
        auto c = small_config();
        c.num_paths = 3;
        c.num_tx_rf = c.num_rx_rf = 2;
        c.rolloff = 0.3;
        Rng rng(5);
        auto p = draw_paths(c, rng);
        auto taps = delay_taps(p, c);

        const arma::uword Nt = c.num_tx_antennas, Nr = c.num_rx_antennas, L = p.size();
        auto inner = [](arma::uword N, double x, double y)
        {
            cd s = 0;
            for (arma::uword n = 0; n < N; ++n)
                s += std::conj(ula_entry(N, n, x, 0.5)) * ula_entry(N, n, y, 0.5);
            return s;
        };
        double oracle = 0.0;
        for (arma::uword d = 0; d < c.max_delay_taps; ++d)
            for (arma::uword l = 0; l < L; ++l)
                for (arma::uword m = 0; m < L; ++m)
                {
                    const cd wl = p.gains(l) * raised_cosine(double(d) - p.delays(l), c.rolloff);
                    const cd wm = p.gains(m) * raised_cosine(double(d) - p.delays(m), c.rolloff);
                    // tr((a_r(m) a_t(m)^H)^H a_r(l) a_t(l)^H) = (a_r(m)^H a_r(l)) (a_t(l)^H a_t(m))
                    oracle += (wl * std::conj(wm) * inner(Nr, p.aoa(m), p.aoa(l)) * inner(Nt, p.aod(l), p.aod(m))).real();
                }
        oracle *= double(Nt * Nr) / double(L);
        CHECK(frobenius_energy(taps) == doctest::Approx(oracle).epsilon(1e-10));
    }

    SUBCASE("each tap has rank at most L")
    {
        auto c = small_config();
        Rng rng(9);
        auto taps = delay_taps(draw_paths(c, rng), c);
        for (arma::uword d = 0; d < taps.n_slices; ++d)
            CHECK(arma::rank(arma::cx_mat(taps.slice(d)), 1e-9) <= 2);
    }
}

TEST_CASE("to_frequency")
{
    SUBCASE("impulse is frequency flat")
    {
        arma::cx_cube taps(3, 2, 4, arma::fill::zeros);
        taps.slice(0) = arma::randn<arma::cx_mat>(3, 2);
        auto f = to_frequency(taps, 16);
        for (arma::uword k = 0; k < 16; ++k)
            CHECK(arma::abs(f.slice(k) - taps.slice(0)).max() < 1e-15);
    }
    SUBCASE("two-tap scalar channel, hand evaluated")
    {
        arma::cx_cube taps(1, 1, 2);
        taps(0, 0, 0) = 1.0;
        taps(0, 0, 1) = cd(0.0, 1.0);
        auto f = to_frequency(taps, 4);
        // H[k] = 1 + j e^{-j pi k / 2}
        const cd expected[4] = {cd(2, 0), cd(1, -1), cd(0, 0), cd(1, 1)};
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(f(0, 0, k) - expected[k]) < 1e-15);
    }
    SUBCASE("Parseval at the reference scale")
    {
        SystemConfig c;
        Rng rng(1);
        auto ch = realize(draw_paths(c, rng), c);
        const double ratio = frobenius_energy(ch.freq) / (double(c.num_subcarriers) * frobenius_energy(ch.taps));
        CHECK(std::abs(ratio - 1.0) < 1e-9);
    }
    SUBCASE("Parseval on random small configs")
    {
        Rng rng(2);
        for (int i = 0; i < 20; ++i)
        {
            auto c = small_config();
            c.max_delay_taps = 1 + arma::uword(rng() % 8);
            c.num_subcarriers = c.max_delay_taps * (1 + rng() % 4) * 8;
            c.rolloff = double(rng() % 5) / 4.0;
            auto ch = realize(draw_paths(c, rng), c);
            CHECK(std::abs(frobenius_energy(ch.freq) / (double(c.num_subcarriers) * frobenius_energy(ch.taps)) - 1.0) < 1e-9);
        }
    }
    SUBCASE("single path stays rank one at every subcarrier")
    {
        auto c = small_config();
        c.num_paths = 1;
        c.num_tx_rf = c.num_rx_rf = 1;
        auto p = single_path(1.0, 2.7, 0.3, -0.1);
        auto ch = realize(p, c);
        const arma::cx_mat outer = array_response(8, -0.1, 0.5) * array_response(8, 0.3, 0.5).t();
        for (arma::uword k = 0; k < c.num_subcarriers; ++k)
        {
            const cd ck = arma::accu(ch.freq.slice(k) % arma::conj(outer)); // <outer, H[k]>, ||outer||_F = 1
            CHECK(arma::abs(ch.freq.slice(k) - ck * outer).max() < 1e-12);
        }
    }
    SUBCASE("subset evaluation agrees with the full transform")
    {
        auto c = small_config();
        Rng rng(4);
        auto taps = delay_taps(draw_paths(c, rng), c);
        auto full = to_frequency(taps, c.num_subcarriers);
        auto sub = to_frequency_at(taps, c.num_subcarriers, {1, 17, 64});
        CHECK(arma::approx_equal(sub.slice(0), full.slice(0), "absdiff", 1e-14));
        CHECK(arma::approx_equal(sub.slice(1), full.slice(16), "absdiff", 1e-14));
        CHECK(arma::approx_equal(sub.slice(2), full.slice(63), "absdiff", 1e-14));
    }
    SUBCASE("more taps than subcarriers is rejected")
    {
        arma::cx_cube taps(1, 1, 8, arma::fill::ones);
        CHECK_THROWS_AS(to_frequency(taps, 4), InvalidRequest);
    }
}

TEST_CASE("corrupt_csi")
{
    Rng rng(10);
    arma::cx_cube h(4, 4, 10000);
    for (arma::uword k = 0; k < h.n_slices; ++k)
    {
        arma::cx_mat m = complex_normal(rng, 4, 4);
        h.slice(k) = m / arma::norm(m, "fro");
    }

    SUBCASE("rho = 1 is the identity")
    {
        auto out = corrupt_csi(h, 1.0, rng);
        CHECK(std::memcmp(out.memptr(), h.memptr(), h.n_elem * sizeof(cd)) == 0);
    }
    SUBCASE("rho = 0 decorrelates")
    {
        auto out = corrupt_csi(h, 0.0, rng);
        const cd cross = arma::accu(arma::conj(h) % out);
        const double corr = std::abs(cross) / std::sqrt(frobenius_energy(h) * frobenius_energy(out));
        CHECK(corr < 0.05);
    }
    SUBCASE("rho = 0.7 second moment")
    {
        auto out = corrupt_csi(h, 0.7, rng);
        const double mean_energy = frobenius_energy(out) / double(h.n_slices);
        const double expected = 0.49 + 0.51 * 16.0;
        CHECK(std::abs(mean_energy / expected - 1.0) < 0.02);
    }
    SUBCASE("rho outside [0,1]")
    {
        CHECK_THROWS_AS(corrupt_csi(h, 1.5, rng), InvalidRequest);
    }
}

TEST_CASE("binary channel cache")
{
    auto c = small_config();
    Rng rng(8);
    auto ch = realize(draw_paths(c, rng), c);
    const auto dir = std::filesystem::temp_directory_path() / "hybridfb_cache_test";
    std::filesystem::create_directories(dir);
    const auto file = channel_cache_path(dir, c, 8);
    CHECK(file.filename().string().find("_8.bin") != std::string::npos);
    save_channel(ch, file);
    auto back = load_channel(file);
    CHECK(std::memcmp(back.taps.memptr(), ch.taps.memptr(), ch.taps.n_elem * sizeof(cd)) == 0);
    CHECK(std::memcmp(back.freq.memptr(), ch.freq.memptr(), ch.freq.n_elem * sizeof(cd)) == 0);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(load_channel(file), IoError);
}
