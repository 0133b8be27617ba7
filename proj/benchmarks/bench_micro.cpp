// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the per-packet hot path (encode/decode, MAC, dispatch)
// plus one end-to-end scenario to measure simulator throughput.

#include <benchmark/benchmark.h>

#include <vector>

#include "fastresume/bench.hpp"
#include "fastresume/dispatch.hpp"
#include "fastresume/rng.hpp"
#include "fastresume/session.hpp"
#include "fastresume/wire.hpp"

namespace fr = fastresume;

namespace {

fr::WireMessage sample_message(std::size_t payload_len) {
    fr::Rng rng(1);
    fr::WireMessage msg;
    msg.type = fr::MessageType::kData;
    msg.session_id = rng.next_u64();
    msg.seq = 7;
    msg.payload.resize(payload_len);
    for (auto& b : msg.payload) b = std::uint8_t(rng.next_u64());
    msg.mac = rng.next_bytes<16>();
    return msg;
}

void BM_WireEncode(benchmark::State& state) {
    const fr::WireMessage msg = sample_message(std::size_t(state.range(0)));
    for (auto _ : state) {
        auto bytes = fr::encode(msg);
        benchmark::DoNotOptimize(bytes);
    }
}
BENCHMARK(BM_WireEncode)->Arg(0)->Arg(72);

void BM_WireDecode(benchmark::State& state) {
    const auto bytes = fr::encode(sample_message(std::size_t(state.range(0)))).value();
    for (auto _ : state) {
        auto msg = fr::decode(bytes);
        benchmark::DoNotOptimize(msg);
    }
}
BENCHMARK(BM_WireDecode)->Arg(0)->Arg(72);

void BM_CookieGenerate(benchmark::State& state) {
    fr::Rng rng(2);
    const fr::ServerSecret secret = fr::ServerSecret::from_rng(rng);
    const fr::SocketAddr client{fr::make_ip(10, 0, 1, 2), 1234};
    const fr::Nonce nonce = rng.next_bytes<8>();
    for (auto _ : state) {
        auto cookie = fr::generate_cookie(secret, client, nonce);
        benchmark::DoNotOptimize(cookie);
    }
}
BENCHMARK(BM_CookieGenerate);

void BM_ProtectUnprotect(benchmark::State& state) {
    fr::Rng rng(3);
    const fr::Cookie cookie = rng.next_bytes<32>();
    fr::Session client(fr::Role::kClient, cookie);
    fr::Session server(fr::Role::kServer, cookie);
    const fr::SocketAddr src{fr::make_ip(10, 0, 1, 2), 1234};
    std::vector<std::uint8_t> payload(72, 0x5a);
    for (auto _ : state) {
        const fr::WireMessage msg = client.protect(fr::MessageType::kData, payload);
        auto out = server.unprotect(msg, src);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_ProtectUnprotect);

void BM_Dispatch(benchmark::State& state) {
    fr::HostStack stack("bench");
    const std::uint32_t ip = fr::make_ip(10, 0, 0, 1);
    stack.add_interface(ip);
    stack.bind(fr::SocketAddr{ip, 4433}).value();
    const fr::SocketId conn =
        stack.bind_connected(fr::SocketAddr{ip, 4433}, fr::SocketAddr{fr::make_ip(9, 9, 9, 9), 1})
            .value();
    const fr::Datagram dgram{fr::SocketAddr{fr::make_ip(9, 9, 9, 9), 1},
                             fr::SocketAddr{ip, 4433},
                             {0x42},
                             0};
    for (auto _ : state) {
        auto r = stack.deliver(dgram);
        benchmark::DoNotOptimize(r);
        stack.pop_rx(conn);  // keep the queue from growing
    }
}
BENCHMARK(BM_Dispatch);

void BM_Scenario(benchmark::State& state) {
    fr::ScenarioConfig cfg;
    cfg.variant = fr::Variant::kTcs;
    cfg.total_messages = int(state.range(0));
    cfg.handover_period_ms = 10000;
    for (auto _ : state) {
        auto m = fr::run_scenario(cfg);
        benchmark::DoNotOptimize(m);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Scenario)->Arg(100)->Arg(600)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
