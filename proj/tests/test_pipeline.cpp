#include <doctest.h>

#include <cmath>
#include <complex>

#include "raman_echo/core.hpp"
#include "raman_echo/diagnostics.hpp"
#include "raman_echo/pipeline.hpp"
#include "raman_echo/spectral.hpp"

using namespace raman_echo;

namespace {

PulseTrain train_of(std::initializer_list<std::pair<double, double>> width_tau)
{
    PulseTrain t;
    for (const auto& [dw, tau] : width_tau) {
        t.modes.push_back(gaussian_mode(FrequencyGrid{}, dw, tau));
    }
    return t;
}

} // namespace

TEST_CASE("timeline is the mirror image of the write window")
{
    const PulseTrain train = train_of({{0.2, 0.0}, {0.2, 40.0}});
    const PipelineTimeline tl = pipeline_timeline(train, 200.0);
    // extent = 12 / (2 * 0.2) = 30
    CHECK(tl.storage_begin == doctest::Approx(-30.0).epsilon(1e-8));
    CHECK(tl.switch_off == doctest::Approx(75.0).epsilon(1e-8));
    CHECK(tl.second_pair == doctest::Approx(275.0).epsilon(1e-8));
    CHECK(tl.read_begin == doctest::Approx(325.0).epsilon(1e-8));
    CHECK(tl.read_end == doctest::Approx(475.0).epsilon(1e-8));
    CHECK(tl.read_end - tl.read_begin == doctest::Approx(tl.switch_off - tl.storage_begin + 45.0).epsilon(1e-8));
}

TEST_CASE("too short a storage time is a configuration error")
{
    const PulseTrain train = train_of({{0.1, 0.0}});
    // lead = 60 + 5, so T0 must be at least 130
    CHECK_THROWS_AS(pipeline_timeline(train, 129.0), config_error);
    CHECK_NOTHROW(pipeline_timeline(train, 131.0));
    PipelineOptions bad;
    bad.settle = -1.0;
    CHECK_THROWS_AS(pipeline_timeline(train, 500.0, bad), config_error);
}

TEST_CASE("single-mode echo efficiency and fidelity follow the spectral oracle")
{
    const SystemParams p = matched_params();
    const EnsembleSample ens = sample_ensemble(2001, p.delta_in);
    for (double dw : {0.2, 0.3}) {
        const PulseTrain train = train_of({{dw, 0.0}});
        const PipelineResult r = run_pipeline(p, ens, train, 80.0);
        const EfficiencyReport ref = efficiency_report(train.modes[0], p);
        CHECK(r.report.q_st == doctest::Approx(ref.q_st).epsilon(1e-3));
        CHECK(std::abs(r.report.q_e - ref.q_e) < 1e-3 * ref.q_e);
        CHECK(std::abs(r.report.fidelity - ref.fidelity) < 1e-2);
        CHECK(std::abs(r.report.modes[0].fidelity - ref.fidelity) < 1e-2);
    }
}

TEST_CASE("three-mode train is echoed in the same order and shape")
{
    const SystemParams p = matched_params();
    const EnsembleSample ens = sample_ensemble(1001, p.delta_in);
    const PulseTrain train = train_of({{0.2, 0.0}, {0.3, 40.0}, {0.25, 80.0}});
    ScopedWarningHandler quiet([](const std::string&) {});
    const PipelineResult r = run_pipeline(p, ens, train, 250.0);
    REQUIRE(r.report.modes.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const ModeEcho& e = r.report.modes[k];
        CHECK(e.expected_peak == doctest::Approx(500.0 + train.modes[k].tau));
        // analytic echo of this mode alone on the retrieval grid
        const PulseTrain alone{{train.modes[k]}};
        const TimeGrid& grid = r.retrieval.grid;
        Eigen::Index arg = 0;
        echo_waveform(alone, p, 250.0, grid).cwiseAbs().maxCoeff(&arg);
        CHECK(std::abs(e.peak_time - grid.node(arg)) <= grid.dt + 1e-9);
        CHECK(std::abs(e.peak_time - e.expected_peak) < 3.0);
        CHECK(std::abs(e.fidelity - fidelity(train.modes[k], p)) < 1e-2);
        CHECK(e.energy_ratio == doctest::Approx(echo_efficiency(train.modes[k], p)).epsilon(2e-3));
        if (k > 0) {
            CHECK(e.peak_time > r.report.modes[k - 1].peak_time);
        }
    }
}

TEST_CASE("finite T2 scales the echo amplitude by exp(-2 T0 / T2)")
{
    const double t0 = 200.0;
    const PulseTrain train = train_of({{0.1, 0.0}});
    const SystemParams ideal = matched_params();
    const SystemParams lossy = matched_params(5e-4);
    const EnsembleSample ens = sample_ensemble(1001, ideal.delta_in);
    const PipelineResult a = run_pipeline(ideal, ens, train, t0);
    const PipelineResult b = run_pipeline(lossy, ens, train, t0);
    const double amp_ratio = b.retrieval.b_out.cwiseAbs().maxCoeff() / a.retrieval.b_out.cwiseAbs().maxCoeff();
    const double expected = std::exp(-2.0 * t0 * lossy.t2_inv);
    // The residual comes from T2 entering the transfer function itself.
    CHECK(amp_ratio == doctest::Approx(expected).epsilon(5e-3));
    CHECK(b.report.decay_factor == doctest::Approx(expected * expected).epsilon(1e-14));
    CHECK(b.report.q_e == doctest::Approx(echo_efficiency(train.modes[0], lossy)).epsilon(2e-3));
}

TEST_CASE("rephased coherences have the stored magnitudes")
{
    const SystemParams p = matched_params();
    const EnsembleSample ens = sample_ensemble(201, p.delta_in);
    const PulseTrain train = train_of({{0.2, 0.0}});
    ScopedWarningHandler quiet([](const std::string&) {});
    const PipelineResult r = run_pipeline(p, ens, train, 100.0);
    CHECK((r.rephased_p12.cwiseAbs() - r.storage.p12_final.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-14);
}
