// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#include "fastresume/bench.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include "fastresume/client.hpp"

namespace fastresume {

namespace {

constexpr std::uint32_t kServerIp = make_ip(10, 0, 0, 1);
constexpr std::uint16_t kWelcomePort = 4433;
constexpr std::uint32_t kClientIp0 = make_ip(10, 0, 1, 2);
constexpr std::uint32_t kClientIp1 = make_ip(10, 0, 2, 2);
constexpr std::uint32_t kNatExternalIp = make_ip(100, 64, 0, 1);

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

bool parse_u64(const std::string& text, std::uint64_t* out) {
    if (text.empty()) return false;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || text[0] == '-') return false;
    *out = value;
    return true;
}

bool parse_int(const std::string& text, int* out) {
    if (text.empty()) return false;
    char* end = nullptr;
    const long value = std::strtol(text.c_str(), &end, 10);
    if (end == nullptr || *end != '\0') return false;
    *out = static_cast<int>(value);
    return true;
}

bool parse_double(const std::string& text, double* out) {
    if (text.empty()) return false;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == nullptr || *end != '\0') return false;
    *out = value;
    return true;
}

bool parse_bool(const std::string& text, bool* out) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        *out = true;
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        *out = false;
        return true;
    }
    return false;
}

double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

}  // namespace

std::string variant_label(const ScenarioConfig& cfg) {
    std::string label = to_string(cfg.variant);
    if (cfg.interfaces >= 2) label += "-multi";
    return label;
}

std::optional<std::pair<Variant, int>> parse_variant_label(const std::string& label) {
    static const std::string kMulti = "-multi";
    std::string name = label;
    int interfaces = 1;
    if (name.size() > kMulti.size() &&
        name.compare(name.size() - kMulti.size(), kMulti.size(), kMulti) == 0) {
        name.resize(name.size() - kMulti.size());
        interfaces = 2;
    }
    const std::optional<Variant> variant = parse_variant(name);
    if (!variant.has_value()) return std::nullopt;
    return std::make_pair(*variant, interfaces);
}

bool apply_scenario_value(ScenarioConfig& cfg, const std::string& key, const std::string& value,
                          std::string* error) {
    const auto fail = [&](const std::string& why) {
        if (error != nullptr) *error = why;
        return false;
    };

    if (key == "variant") {
        const auto parsed = parse_variant_label(value);
        if (!parsed.has_value()) return fail("unknown variant '" + value + "'");
        cfg.variant = parsed->first;
        cfg.interfaces = std::max(cfg.interfaces, parsed->second);
        if (parsed->second == 1 && cfg.interfaces != 1) cfg.interfaces = 1;
        return true;
    }
    if (key == "interfaces") {
        int n = 0;
        if (!parse_int(value, &n) || n < 1 || n > 2) return fail("interfaces must be 1 or 2");
        cfg.interfaces = n;
        return true;
    }
    if (key == "nat") {
        const auto mode = parse_nat_mode(value);
        if (!mode.has_value()) return fail("unknown nat mode '" + value + "'");
        cfg.nat_mode = *mode;
        return true;
    }
    if (key == "renumber") {
        bool b = false;
        if (!parse_bool(value, &b)) return fail("renumber must be a boolean");
        cfg.renumber = b;
        return true;
    }
    if (key == "loss-rate") {
        double rate = 0.0;
        if (!parse_double(value, &rate) || rate < 0.0 || rate > 1.0)
            return fail("loss-rate must be in [0, 1]");
        cfg.loss_rate = rate;
        return true;
    }
    if (key == "seed") {
        std::uint64_t seed = 0;
        if (!parse_u64(value, &seed)) return fail("seed must be a non-negative integer");
        cfg.seed = seed;
        return true;
    }
    if (key == "messages" || key == "repeats") {
        int n = 0;
        if (!parse_int(value, &n) || n < 1) return fail(key + " must be a positive integer");
        (key == "messages" ? cfg.total_messages : cfg.repeats) = n;
        return true;
    }

    SimTime* time_field = nullptr;
    if (key == "delay-ms") time_field = &cfg.delay_ms;
    else if (key == "nat-ttl-ms") time_field = &cfg.nat_ttl_ms;
    else if (key == "handover-period-ms") time_field = &cfg.handover_period_ms;
    else if (key == "handover-downtime-ms") time_field = &cfg.handover_downtime_ms;
    else if (key == "handover-interleave-ms") time_field = &cfg.handover_interleave_ms;
    else if (key == "app-timeout-ms") time_field = &cfg.app_timeout_ms;
    else if (key == "idle-timeout-ms") time_field = &cfg.idle_timeout_ms;
    else if (key == "redirect-retx-ms") time_field = &cfg.redirect_retx_ms;
    else if (key == "client-processing-ms") time_field = &cfg.client_processing_ms;
    else if (key == "time-cap-ms") time_field = &cfg.time_cap_ms;
    if (time_field != nullptr) {
        std::uint64_t ms = 0;
        if (!parse_u64(value, &ms)) return fail(key + " must be a non-negative integer");
        *time_field = ms;
        return true;
    }

    return fail("unknown key '" + key + "'");
}

Result<ScenarioConfig, std::string> load_scenario_file(const std::string& path,
                                                       ScenarioConfig base) {
    std::ifstream in(path);
    if (!in) return std::string("cannot open '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            return path + ":" + std::to_string(line_no) + ": expected key = value";
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        std::string why;
        if (!apply_scenario_value(base, key, value, &why))
            return path + ":" + std::to_string(line_no) + ": " + why;
    }
    return base;
}

RunMetrics run_scenario(const ScenarioConfig& cfg, const ScenarioHooks& hooks) {
    Network net(LinkConfig{cfg.delay_ms, cfg.loss_rate, cfg.seed});
    if (hooks.trace_echo != nullptr) net.trace().set_echo(hooks.trace_echo);
    if (hooks.drop_filter) net.set_drop_filter(hooks.drop_filter);

    const HostId server_host = net.add_host("server");
    net.add_interface(server_host, kServerIp);

    const HostId client_host = net.add_host("client");
    const IfaceId if0 = net.add_interface(client_host, kClientIp0);
    std::optional<IfaceId> if1;
    if (cfg.interfaces >= 2) if1 = net.add_interface(client_host, kClientIp1);

    if (cfg.nat_mode != NatMode::kNone)
        net.set_nat(client_host, NatPolicy{cfg.nat_mode, cfg.nat_ttl_ms}, kNatExternalIp);

    if (cfg.handover_period_ms > 0) {
        net.set_handover(client_host, if0,
                         HandoverSchedule{cfg.handover_period_ms, 0, cfg.handover_downtime_ms,
                                          cfg.renumber});
        if (if1.has_value())
            net.set_handover(client_host, *if1,
                             HandoverSchedule{cfg.handover_period_ms, cfg.handover_interleave_ms,
                                              cfg.handover_downtime_ms, cfg.renumber});
    }

    ServerConfig server_cfg;
    server_cfg.welcome_addr = SocketAddr{kServerIp, kWelcomePort};
    server_cfg.variant = cfg.variant;
    server_cfg.idle_timeout_ms = cfg.idle_timeout_ms;
    server_cfg.redirect_retx_ms = cfg.redirect_retx_ms;
    server_cfg.seed = cfg.seed;
    ServerEndpoint server(net.transport(server_host), server_cfg);

    ClientConfig client_cfg;
    client_cfg.server_welcome = server_cfg.welcome_addr;
    client_cfg.variant = cfg.variant;
    client_cfg.app_timeout_ms = cfg.app_timeout_ms;
    client_cfg.total_messages = cfg.total_messages;
    client_cfg.processing_ms = cfg.client_processing_ms;
    ClientEndpoint client(net.transport(client_host), client_cfg);

    net.attach(server_host, &server);
    net.attach(client_host, &client);
    server.start();
    client.start();

    net.run_until([&client] { return client.done(); }, cfg.time_cap_ms);

    const ClientMetrics& cm = client.metrics();
    const ServerMetrics& sm = server.metrics();
    RunMetrics m;
    m.completed = cm.done;
    m.wct_ms = cm.done ? cm.done_ms - cm.first_hello_ms : 0;
    m.acked = cm.acked;
    m.handshakes_completed = cm.handshakes_completed;
    m.handshake_flights_after_establish = cm.handshake_flights_sent_after_establish +
                                          sm.handshake_flights_sent_after_establish;
    m.datagrams_sent = net.datagrams_sent();
    m.datagrams_received = net.datagrams_delivered();
    m.data_retransmissions = cm.data_retransmissions;
    m.redirect_transmissions = sm.redirect_transmissions;
    m.handovers_observed = cm.handovers_observed;
    m.handovers_mid_session = cm.handovers_mid_session;
    m.recovery_latency_ms = cm.recovery_latency_ms;
    if (hooks.trace_out != nullptr) *hooks.trace_out = net.trace();
    return m;
}

std::string describe(const RunMetrics& m) {
    char buf[160];
    std::string out;
    const auto add_u64 = [&](const char* name, std::uint64_t value) {
        std::snprintf(buf, sizeof buf, "%-36s %" PRIu64 "\n", name, value);
        out += buf;
    };
    std::snprintf(buf, sizeof buf, "%-36s %s\n", "completed", m.completed ? "yes" : "no");
    out += buf;
    add_u64("wct_ms", m.wct_ms);
    add_u64("acked", m.acked);
    add_u64("handshakes_completed", m.handshakes_completed);
    add_u64("handshake_flights_after_establish", m.handshake_flights_after_establish);
    add_u64("datagrams_sent", m.datagrams_sent);
    add_u64("datagrams_received", m.datagrams_received);
    add_u64("data_retransmissions", m.data_retransmissions);
    add_u64("redirect_transmissions", m.redirect_transmissions);
    add_u64("handovers_observed", m.handovers_observed);
    add_u64("handovers_mid_session", m.handovers_mid_session);
    if (m.recovery_latency_ms.empty()) {
        std::snprintf(buf, sizeof buf, "%-36s -\n", "recovery_latency_ms");
        out += buf;
    } else {
        std::vector<double> lat(m.recovery_latency_ms.begin(), m.recovery_latency_ms.end());
        const SimTime worst = *std::max_element(m.recovery_latency_ms.begin(),
                                                m.recovery_latency_ms.end());
        std::snprintf(buf, sizeof buf, "%-36s mean=%.1f max=%" PRIu64 " n=%zu\n",
                      "recovery_latency_ms", mean(lat), worst, lat.size());
        out += buf;
    }
    return out;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::vector<SimTime>& delays,
                            const std::vector<std::string>& variants) {
    std::vector<SweepRow> rows;
    const int repeats = std::max(1, base.repeats);
    for (const SimTime delay : delays) {
        ScenarioConfig at_delay = base;
        at_delay.delay_ms = delay;

        std::vector<double> base_wct(static_cast<std::size_t>(repeats), 0.0);
        bool base_ok = true;
        for (int r = 0; r < repeats; ++r) {
            ScenarioConfig cfg = at_delay;
            cfg.variant = Variant::kBaseline;
            cfg.interfaces = 1;
            cfg.seed = base.seed + static_cast<std::uint64_t>(r);
            const RunMetrics m = run_scenario(cfg);
            base_ok = base_ok && m.completed;
            base_wct[static_cast<std::size_t>(r)] = static_cast<double>(m.wct_ms);
        }
        SweepRow base_row;
        base_row.delay_ms = delay;
        base_row.variant = "baseline";
        base_row.wct_ms = mean(base_wct);
        base_row.completed = base_ok;
        rows.push_back(base_row);

        for (const std::string& label : variants) {
            if (label == "baseline") continue;
            SweepRow row;
            row.delay_ms = delay;
            row.variant = label;
            const auto parsed = parse_variant_label(label);
            if (!parsed.has_value()) {
                row.completed = false;
                rows.push_back(row);
                continue;
            }
            std::vector<double> wct(static_cast<std::size_t>(repeats), 0.0);
            std::vector<double> gain(static_cast<std::size_t>(repeats), 0.0);
            bool ok = base_ok;
            for (int r = 0; r < repeats; ++r) {
                ScenarioConfig cfg = at_delay;
                cfg.variant = parsed->first;
                cfg.interfaces = parsed->second;
                cfg.seed = base.seed + static_cast<std::uint64_t>(r);
                const RunMetrics m = run_scenario(cfg);
                ok = ok && m.completed;
                const auto i = static_cast<std::size_t>(r);
                wct[i] = static_cast<double>(m.wct_ms);
                if (base_wct[i] > 0.0) gain[i] = 100.0 * (base_wct[i] - wct[i]) / base_wct[i];
            }
            row.wct_ms = mean(wct);
            row.gain_pct = mean(gain);
            row.completed = ok;
            rows.push_back(row);
        }
    }
    return rows;
}

std::optional<double> reference_gain(const std::string& variant, SimTime delay_ms) {
    struct Ref {
        const char* variant;
        SimTime delay;
        double gain;
    };
    static constexpr Ref kRefs[] = {
        {"tcs", 5, 8.35},        {"tcs", 30, 13.63},       {"tcs", 100, 15.22},
        {"tcs-multi", 5, 16.61}, {"tcs-multi", 30, 17.48}, {"tcs-multi", 100, 23.42},
    };
    for (const Ref& ref : kRefs)
        if (variant == ref.variant && delay_ms == ref.delay) return ref.gain;
    return std::nullopt;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "delay_ms,variant,wct_ms,gain_pct\n";
    char buf[160];
    for (const SweepRow& row : rows) {
        if (!row.completed) continue;
        std::snprintf(buf, sizeof buf, "%" PRIu64 ",%s,%.2f,%.2f\n", row.delay_ms,
                      row.variant.c_str(), row.wct_ms, row.gain_pct);
        out += buf;
    }
    return out;
}

std::string to_table(const std::vector<SweepRow>& rows) {
    char buf[200];
    std::string out;
    std::snprintf(buf, sizeof buf, "%8s  %-14s  %12s  %9s  %9s\n", "delay_ms", "variant",
                  "wct_ms", "gain_pct", "ref_gain");
    out += buf;
    for (const SweepRow& row : rows) {
        char wct[32] = "-";
        char gain[32] = "-";
        char ref[32] = "-";
        if (row.completed) {
            std::snprintf(wct, sizeof wct, "%.2f", row.wct_ms);
            std::snprintf(gain, sizeof gain, "%.2f", row.gain_pct);
        }
        const std::optional<double> published = reference_gain(row.variant, row.delay_ms);
        if (published.has_value()) std::snprintf(ref, sizeof ref, "%.2f", *published);
        std::snprintf(buf, sizeof buf, "%8" PRIu64 "  %-14s  %12s  %9s  %9s\n", row.delay_ms,
                      row.variant.c_str(), wct, gain, ref);
        out += buf;
    }
    return out;
}

}  // namespace fastresume
