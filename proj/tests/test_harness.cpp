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

#include "hybridfb/error.hpp"
#include "hybridfb/harness.hpp"

#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace hfb;
namespace fs = std::filesystem;

namespace
{
    ExperimentSpec small_spec()
    {
        ExperimentSpec s;
        auto &c = s.system;
        c.num_tx_antennas = 16;
        c.num_rx_antennas = 8;
        c.num_tx_rf = 4;
        c.num_rx_rf = 4;
        c.num_streams = 2;
        c.num_subcarriers = 32;
        c.pilot_spacing = 8;
        c.num_paths = 4;
        c.max_delay_taps = 8;
        c.codebook_bits = 3;
        s.snr_grid = {0.0, 10.0};
        s.rho_grid = {1.0, 0.7};
        s.num_realizations = 2;
        s.num_symbols_per_snr = 4;
        s.codebook_training_realizations = 8;
        return s;
    }

    std::string curves_text(const RunRecord &r)
    {
        std::ostringstream out;
        write_curves_csv(out, r.curves);
        return out.str();
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path scratch(const std::string &name)
    {
        auto d = fs::temp_directory_path() / ("hybridfb_test_" + name);
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }

    Codebook random_codebook(arma::uword dim, unsigned bits, std::uint64_t seed)
    {
        Rng rng(seed);
        arma::cx_mat x = complex_normal(rng, dim, arma::uword(1) << bits);
        for (arma::uword j = 0; j < x.n_cols; ++j)
            x.col(j) /= arma::norm(x.col(j));
        return {x, bits};
    }
}

TEST_CASE("one realization, one method, one point")
{
    auto s = small_spec();
    s.methods = {Method::hierarchical};
    s.snr_grid = {5.0};
    s.rho_grid = {1.0};
    s.num_realizations = 1;
    auto r = run_experiment(s);
    CHECK(r.raw.size() == 1);
    REQUIRE(r.curves.size() == 1);
    CHECK(r.curves[0].realizations == 1);
    CHECK(r.curves[0].mean_se == r.raw[0].se);
    CHECK(r.beams.size() == 1);
    CHECK(r.spec_hash.size() == 16);
}

TEST_CASE("raw and curve cardinality")
{
    auto s = small_spec();
    auto r = run_experiment(s);
    const std::size_t cells = s.methods.size() * s.snr_grid.size() * s.rho_grid.size();
    CHECK(r.raw.size() == cells * s.num_realizations);
    CHECK(r.curves.size() == cells);
    for (const auto &c : r.curves)
        CHECK(c.realizations == 2);

    s.methods = {Method::hierarchical, Method::cluster_simple};
    s.snr_grid = {0.0, 5.0, 10.0};
    s.rho_grid = {1.0};
    auto two = run_experiment(s);
    std::istringstream in(curves_text(two));
    std::string line;
    int rows = -1;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 6);
}

TEST_CASE("same master seed gives identical curves")
{
    auto s = small_spec();
    auto a = run_experiment(s);
    auto b = run_experiment(s);
    CHECK(curves_text(a) == curves_text(b));
    s.master_seed = 2;
    CHECK(curves_text(run_experiment(s)) != curves_text(a));
}

TEST_CASE("methods share channel, CSI and symbols")
{
    auto s = small_spec();
    s.methods = {Method::hierarchical};
    auto solo = run_experiment(s);
    s.methods = {Method::gaussian, Method::per_subcarrier_exhaustive, Method::hierarchical};
    auto mixed = run_experiment(s);
    std::vector<RawRow> picked;
    for (const auto &row : mixed.raw)
        if (row.method == Method::hierarchical)
            picked.push_back(row);
    REQUIRE(picked.size() == solo.raw.size());
    for (std::size_t i = 0; i < picked.size(); ++i)
    {
        CHECK(picked[i].se == solo.raw[i].se);
        CHECK(picked[i].bit_errors == solo.raw[i].bit_errors);
        CHECK(picked[i].eval_count == solo.raw[i].eval_count);
    }
    for (std::size_t i = 0; i < solo.beams.size(); ++i)
        CHECK(solo.beams[i].tx_paths == mixed.beams[i].tx_paths);
}

TEST_CASE("child seeds are distinct")
{
    std::set<std::uint64_t> seen;
    for (auto purpose : {SeedPurpose::channel, SeedPurpose::csi_error, SeedPurpose::ber, SeedPurpose::codebook,
                         SeedPurpose::codebook_init})
        for (std::uint64_t r = 0; r < 50; ++r)
            for (std::uint64_t j = 0; j < 5; ++j)
                seen.insert(derive_seed(1, purpose, {r, j}));
    CHECK(seen.size() == 5 * 50 * 5);
    CHECK(derive_seed(1, SeedPurpose::channel, {3}) == derive_seed(1, SeedPurpose::channel, {3}));
    CHECK(derive_seed(1, SeedPurpose::channel, {3}) != derive_seed(2, SeedPurpose::channel, {3}));
    CHECK(derive_seed(1, SeedPurpose::channel, {1, 2}) != derive_seed(1, SeedPurpose::channel, {2, 1}));
}

TEST_CASE("reference configuration feedback accounting")
{
    ExperimentSpec s;
    s.methods = {Method::hierarchical, Method::per_subcarrier_exhaustive};
    s.snr_grid = {10.0};
    s.rho_grid = {1.0};
    s.num_realizations = 1;
    s.num_symbols_per_snr = 1;
    const auto cb = random_codebook(16, 5, 50);
    auto r = run_experiment(s, &cb);
    REQUIRE(r.raw.size() == 2);
    CHECK(r.raw[0].feedback_bits_paper == 115);
    CHECK(r.raw[1].feedback_bits_paper == 10240);
    CHECK(1.0 - 115.0 / 10240.0 > 0.98);
}

TEST_CASE("output files")
{
    auto s = small_spec();
    s.methods = {Method::hierarchical, Method::geodesic};
    s.output_dir = scratch("outputs");
    auto r = run_experiment(s);
    for (auto f : {"summary.json", "curves.csv", "raw.csv"})
        CHECK(fs::exists(s.output_dir / f));

    SUBCASE("curves.csv round trip")
    {
        std::ifstream in(s.output_dir / "curves.csv");
        auto back = read_curves_csv(in);
        REQUIRE(back.size() == r.curves.size());
        for (std::size_t i = 0; i < back.size(); ++i)
        {
            CHECK(back[i].method == r.curves[i].method);
            CHECK(back[i].snr_db == r.curves[i].snr_db);
            CHECK(back[i].rho == r.curves[i].rho);
            CHECK(back[i].mean_se == r.curves[i].mean_se);
            CHECK(back[i].mean_ber == r.curves[i].mean_ber);
            CHECK(back[i].feedback_bits_paper == r.curves[i].feedback_bits_paper);
            CHECK(back[i].feedback_bits_per_stream == r.curves[i].feedback_bits_per_stream);
            CHECK(back[i].eval_count == r.curves[i].eval_count);
            CHECK(back[i].realizations == r.curves[i].realizations);
        }
    }
    SUBCASE("rewriting a record is byte identical")
    {
        auto other = scratch("outputs_again");
        write_outputs(r, other);
        for (auto f : {"summary.json", "curves.csv", "raw.csv"})
            CHECK(slurp(other / f) == slurp(s.output_dir / f));
    }
    SUBCASE("summary carries the spec hash")
    {
        CHECK(slurp(s.output_dir / "summary.json").find(r.spec_hash) != std::string::npos);
    }
}

TEST_CASE("empty method list writes a header-only curves file")
{
    auto s = small_spec();
    s.methods.clear();
    s.output_dir = scratch("empty");
    auto r = run_experiment(s);
    CHECK(r.raw.empty());
    CHECK(slurp(s.output_dir / "curves.csv") ==
          "method,snr_db,rho,mean_se,mean_ber,feedback_bits_paper,feedback_bits_per_stream,eval_count,realizations\n");
}

TEST_CASE("unwritable output directory fails before any work")
{
    auto d = scratch("blocked");
    {
        std::ofstream f(d / "plain_file");
        f << "x";
    }
    ExperimentSpec s; // reference scale: would take a while if it started computing
    s.num_realizations = 100;
    s.output_dir = d / "plain_file" / "out";
    const auto t0 = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(run_experiment(s), IoError);
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(2));
}

TEST_CASE("experiment config parsing")
{
    std::istringstream in("num_tx_antennas = 16\nnum_rx_antennas = 8\nnum_tx_rf = 4\nnum_rx_rf = 4\n"
                          "num_subcarriers = 32\npilot_spacing = 8\nnum_paths = 4\nmax_delay_taps = 8\n"
                          "codebook_bits = 3\nsnr_grid = -5:5:5\nrho_grid = 1,0.7\nmethods = hierarchical,cluster_snr\n"
                          "num_realizations = 3\nseed = 9\nequalizer = zf\nse_mode = direct\n");
    auto kv = KeyValueConfig::parse(in, "test");
    auto s = experiment_from(kv);
    CHECK(s.snr_grid == std::vector<double>{-5.0, 0.0, 5.0});
    CHECK(s.rho_grid == std::vector<double>{1.0, 0.7});
    CHECK(s.methods == std::vector<Method>{Method::hierarchical, Method::cluster_snr});
    CHECK(s.num_realizations == 3);
    CHECK(s.master_seed == 9);
    CHECK(s.equalizer == Equalizer::zf);
    CHECK(s.se_mode == SeMode::direct);

    auto t = s;
    t.master_seed = 10;
    CHECK(spec_hash(t) != spec_hash(s));
    CHECK(spec_hash(s) == spec_hash(s));

    std::istringstream bad("snr_gird = 1\n");
    auto kb = KeyValueConfig::parse(bad, "bad");
    CHECK_THROWS_AS(experiment_from(kb), InvalidRequest);
    std::istringstream badrho("rho_grid = 1.5\n");
    auto kr = KeyValueConfig::parse(badrho, "bad");
    CHECK_THROWS_AS(experiment_from(kr), InvalidRequest);
}
