// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// frbench — scenario driver for the resumption benchmark.
//
//   frbench run   [scenario flags]                 one scenario, metric dump
//   frbench sweep [scenario flags] --delays ... --variants ... [--out csv]
//   frbench trace [scenario flags] [--out file]    one scenario, event trace
//   frbench demo  [--variant V] [--messages N]     live run over loopback UDP
//
// Scenario flags mirror the `key = value` scenario-file keys one to one;
// `--config FILE` loads such a file first and explicit flags override it.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fastresume/bench.hpp"
#include "fastresume/client.hpp"
#include "fastresume/udp.hpp"

namespace fr = fastresume;

namespace {

int fail(const std::string& message) {
    std::fprintf(stderr, "frbench: %s\n", message.c_str());
    return 1;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> parts;
    std::string::size_type begin = 0;
    while (begin <= text.size()) {
        const auto comma = text.find(',', begin);
        const auto end = comma == std::string::npos ? text.size() : comma;
        if (end > begin) parts.push_back(text.substr(begin, end - begin));
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return parts;
}

void add_scenario_flags(CLI::App* cmd, fr::ScenarioConfig* cfg) {
    // Consumed by the pre-scan in main(); registered so parsing accepts it.
    static std::string config_path;
    cmd->add_option("--config", config_path, "scenario file of key = value lines");

    static const char* const kKeys[] = {
        "variant",          "interfaces",
        "delay-ms",         "loss-rate",
        "nat",              "nat-ttl-ms",
        "handover-period-ms", "handover-downtime-ms", "handover-interleave-ms",
        "renumber",         "messages",
        "app-timeout-ms",   "idle-timeout-ms",
        "redirect-retx-ms", "client-processing-ms",
        "seed",             "repeats",
        "time-cap-ms",
    };
    for (const char* key : kKeys) {
        cmd->add_option_function<std::string>(
            "--" + std::string(key),
            [cfg, key](const std::string& value) {
                std::string why;
                if (!fr::apply_scenario_value(*cfg, key, value, &why))
                    throw CLI::ValidationError("--" + std::string(key), why);
            },
            "scenario key '" + std::string(key) + "'");
    }
}

int cmd_run(const fr::ScenarioConfig& cfg) {
    const fr::RunMetrics metrics = fr::run_scenario(cfg);
    std::fputs(fr::describe(metrics).c_str(), stdout);
    if (!metrics.completed) return fail("scenario did not complete within time-cap-ms");
    return 0;
}

int cmd_sweep(const fr::ScenarioConfig& cfg, const std::string& delays_text,
              const std::string& variants_text, const std::string& out_path) {
    std::vector<fr::SimTime> delays;
    for (const std::string& part : split_csv(delays_text)) {
        char* end = nullptr;
        const unsigned long long value = std::strtoull(part.c_str(), &end, 10);
        if (end == nullptr || *end != '\0' || part.empty())
            return fail("bad --delays entry '" + part + "'");
        delays.push_back(value);
    }
    if (delays.empty()) return fail("--delays is empty");

    const std::vector<std::string> variants = split_csv(variants_text);
    for (const std::string& label : variants)
        if (label != "baseline" && !fr::parse_variant_label(label).has_value())
            return fail("unknown variant '" + label + "'");

    const std::vector<fr::SweepRow> rows = fr::sweep(cfg, delays, variants);
    std::fputs(fr::to_table(rows).c_str(), stdout);

    const std::string csv = fr::to_csv(rows);
    if (out_path.empty()) {
        std::fputs("\n", stdout);
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) return fail("cannot write '" + out_path + "'");
        out << csv;
        if (!out.good()) return fail("cannot write '" + out_path + "'");
    }

    for (const fr::SweepRow& row : rows)
        if (!row.completed)
            return fail("variant '" + row.variant + "' at delay " +
                        std::to_string(row.delay_ms) + " ms did not complete");
    return 0;
}

int cmd_trace(const fr::ScenarioConfig& cfg, const std::string& out_path) {
    fr::TraceLog log;
    fr::ScenarioHooks hooks;
    hooks.trace_out = &log;
    const fr::RunMetrics metrics = fr::run_scenario(cfg, hooks);

    const std::string text = log.joined();
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) return fail("cannot write '" + out_path + "'");
        out << text;
        if (!out.good()) return fail("cannot write '" + out_path + "'");
    }
    if (!metrics.completed) return fail("scenario did not complete within time-cap-ms");
    return 0;
}

int cmd_demo(const std::string& variant_text, int messages, int port, bool show_trace) {
    const std::optional<fr::Variant> variant = fr::parse_variant(variant_text);
    if (!variant.has_value())
        return fail("unknown variant '" + variant_text + "' (demo runs baseline, ipc, or tcs)");
    if (messages < 1) return fail("--messages must be >= 1");
    if (port < 1024 || port > 64000) return fail("--port must be in 1024..64000");

    const std::uint32_t loopback = fr::make_ip(127, 0, 0, 1);
    fr::UdpLoop loop;
    if (show_trace) loop.trace().set_echo(stderr);
    const fr::HostId server_host = loop.add_host("server", loopback);
    const fr::HostId client_host = loop.add_host("client", loopback);

    fr::ServerConfig server_cfg;
    server_cfg.welcome_addr = fr::SocketAddr{loopback, std::uint16_t(port)};
    server_cfg.variant = *variant;
    server_cfg.port_range_begin = std::uint16_t(port + 100);
    server_cfg.port_range_end = std::uint16_t(port + 1099);
    fr::ServerEndpoint server(loop.transport(server_host), server_cfg);

    fr::ClientConfig client_cfg;
    client_cfg.server_welcome = server_cfg.welcome_addr;
    client_cfg.variant = *variant;
    client_cfg.total_messages = messages;
    client_cfg.local_port = std::uint16_t(port + 1);
    fr::ClientEndpoint client(loop.transport(client_host), client_cfg);

    loop.attach(server_host, &server);
    loop.attach(client_host, &client);
    server.start();
    client.start();
    const bool completed = loop.run_until([&client] { return client.done(); }, 60000);

    const fr::ClientMetrics& cm = client.metrics();
    const fr::ServerMetrics& sm = server.metrics();
    fr::RunMetrics metrics;  // reuse the scenario schema for the printout
    metrics.completed = completed;
    metrics.wct_ms = completed ? cm.done_ms - cm.first_hello_ms : 0;
    metrics.acked = cm.acked;
    metrics.handshakes_completed = cm.handshakes_completed;
    metrics.handshake_flights_after_establish = cm.handshake_flights_sent_after_establish +
                                                sm.handshake_flights_sent_after_establish;
    metrics.datagrams_sent = loop.datagrams_sent();
    metrics.datagrams_received = loop.datagrams_delivered();
    metrics.data_retransmissions = cm.data_retransmissions;
    metrics.redirect_transmissions = sm.redirect_transmissions;
    std::fputs(fr::describe(metrics).c_str(), stdout);
    if (!completed) return fail("demo did not complete within 60 s");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    fr::ScenarioConfig cfg;

    // Fold --config files in before flag callbacks run, so flags override.
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        std::string path;
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
        else continue;
        auto loaded = fr::load_scenario_file(path, cfg);
        if (!loaded.ok()) return fail(loaded.error());
        cfg = loaded.value();
    }

    CLI::App app{"deterministic benchmark of connection-resumption variants"};
    app.require_subcommand(1);

    CLI::App* run_cmd = app.add_subcommand("run", "run one scenario and print its metrics");
    add_scenario_flags(run_cmd, &cfg);

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "compare variants against baseline across delays");
    add_scenario_flags(sweep_cmd, &cfg);
    std::string delays_text = "5,30,100";
    std::string variants_text = "ipc,tcs,tcs-multi";
    std::string sweep_out;
    sweep_cmd->add_option("--delays", delays_text, "comma-separated one-way delays (ms)");
    sweep_cmd->add_option("--variants", variants_text, "comma-separated variant labels");
    sweep_cmd->add_option("--out", sweep_out, "write the CSV to this file instead of stdout");

    CLI::App* trace_cmd =
        app.add_subcommand("trace", "run one scenario and dump the full event trace");
    add_scenario_flags(trace_cmd, &cfg);
    std::string trace_out;
    trace_cmd->add_option("--out", trace_out, "write the trace to this file instead of stdout");

    CLI::App* demo_cmd =
        app.add_subcommand("demo", "run the endpoints live over loopback UDP sockets");
    std::string demo_variant = "tcs";
    int demo_messages = 100;
    int demo_port = 45433;
    bool demo_trace = false;
    demo_cmd->add_option("--variant", demo_variant, "baseline, ipc, or tcs");
    demo_cmd->add_option("--messages", demo_messages, "application messages to exchange");
    demo_cmd->add_option("--port", demo_port,
                         "server welcome port; com ports use port+100..port+1099");
    demo_cmd->add_flag("--trace", demo_trace, "echo the event trace to stderr");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return cmd_run(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, delays_text, variants_text, sweep_out);
    if (trace_cmd->parsed()) return cmd_trace(cfg, trace_out);
    if (demo_cmd->parsed()) return cmd_demo(demo_variant, demo_messages, demo_port, demo_trace);
    return fail("no subcommand");
}
