// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Scenario runner reproducing the resumption experiment: a client works
// through total_messages stop-and-wait round trips while its interfaces
// cycle through scheduled handovers, and the wall-clock time (virtual) until
// the final acknowledgment is compared across variants.

#ifndef FASTRESUME_BENCH_HPP_
#define FASTRESUME_BENCH_HPP_

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fastresume/netsim.hpp"
#include "fastresume/result.hpp"
#include "fastresume/server.hpp"
#include "fastresume/types.hpp"

namespace fastresume {

struct ScenarioConfig {
    Variant variant = Variant::kTcs;
    int interfaces = 1;  // 2 = multi-homed client
    SimTime delay_ms = 5;
    double loss_rate = 0.0;
    NatMode nat_mode = NatMode::kNone;
    SimTime nat_ttl_ms = 30000;
    SimTime handover_period_ms = 0;  // 0 = no handovers
    SimTime handover_downtime_ms = 200;
    SimTime handover_interleave_ms = 5000;  // second interface's phase offset
    bool renumber = true;
    int total_messages = 600;
    SimTime app_timeout_ms = 1000;
    SimTime idle_timeout_ms = 1000;
    SimTime redirect_retx_ms = 500;
    SimTime client_processing_ms = 0;
    std::uint64_t seed = 1;
    int repeats = 5;  // sweep averaging; seeds seed..seed+repeats-1
    SimTime time_cap_ms = 30 * 60 * 1000;
};

/// "baseline" / "ipc" / "tcs", with "-multi" appended when interfaces == 2.
std::string variant_label(const ScenarioConfig& cfg);
std::optional<std::pair<Variant, int>> parse_variant_label(const std::string& label);

/// Applies one scenario key (kebab-case, matching the CLI flags) to cfg.
bool apply_scenario_value(ScenarioConfig& cfg, const std::string& key, const std::string& value,
                          std::string* error);

/// Loads `key = value` lines ('#' comments, blank lines allowed) on top of
/// `base`.
Result<ScenarioConfig, std::string> load_scenario_file(const std::string& path,
                                                       ScenarioConfig base);

struct RunMetrics {
    bool completed = false;  // all acknowledgments received within time_cap_ms
    SimTime wct_ms = 0;      // first ClientHello -> final DataAck
    std::uint64_t acked = 0;
    std::uint64_t handshakes_completed = 0;
    std::uint64_t handshake_flights_after_establish = 0;
    std::uint64_t datagrams_sent = 0;
    std::uint64_t datagrams_received = 0;
    std::uint64_t data_retransmissions = 0;
    std::uint64_t redirect_transmissions = 0;
    std::uint64_t handovers_observed = 0;
    std::uint64_t handovers_mid_session = 0;
    std::vector<SimTime> recovery_latency_ms;
};

struct ScenarioHooks {
    DropFilter drop_filter;          // scripted send-time drops
    TraceLog* trace_out = nullptr;   // receives a copy of the full event trace
    std::FILE* trace_echo = nullptr; // live trace dump
};

RunMetrics run_scenario(const ScenarioConfig& cfg, const ScenarioHooks& hooks = {});

std::string describe(const RunMetrics& metrics);

struct SweepRow {
    SimTime delay_ms = 0;
    std::string variant;
    double wct_ms = 0.0;    // mean over repeats
    double gain_pct = 0.0;  // mean of per-seed 100*(base-variant)/base
    bool completed = true;  // every contributing run finished under the cap
};

/// Runs `repeats` seeded runs of baseline plus each listed variant label at
/// each delay. The baseline row (gain 0) always comes first per delay.
std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::vector<SimTime>& delays,
                            const std::vector<std::string>& variants);

/// Published reference gains for comparison printing; not asserted.
std::optional<double> reference_gain(const std::string& variant, SimTime delay_ms);

std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_table(const std::vector<SweepRow>& rows);

}  // namespace fastresume

#endif  // FASTRESUME_BENCH_HPP_
