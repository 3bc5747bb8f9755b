#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "recon/ldpc.hpp"

namespace recon::protocol {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyndromeBundle {
    std::vector<ldpc::Syndrome> syndromes;
};

struct ShortenReveal {
    std::vector<std::pair<uint32_t, uint8_t>> reveals;  // (position, bit)
};

struct Verdict {
    bool success = false;
};

struct Abort {
    std::string reason;
};

using Message = std::variant<SyndromeBundle, ShortenReveal, Verdict, Abort>;

// Wire framing: 4-byte big-endian length (counting tag + payload), 1 tag
// byte (1 = SyndromeBundle, 2 = ShortenReveal, 3 = Verdict, 4 = Abort),
// then the payload. Syndromes travel as (u32 count, u32 bits-per-syndrome,
// packed bits MSB-first); reveals as raw (u32 position, u8 bit) pairs.
std::vector<uint8_t> encode_frame(const Message& msg);

// Decodes tag + payload (the frame minus its length prefix).
Message decode_frame_payload(const uint8_t* data, size_t len);

struct Transport {
    virtual void send(const Message& msg) = 0;
    virtual Message recv() = 0;
    virtual ~Transport() = default;
};

// Two connected in-process endpoints backed by blocking frame queues.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_inprocess_pair();

// Stream-socket transports. The listener accepts exactly one peer.
std::unique_ptr<Transport> listen_socket(const std::string& host, int port,
                                         int* bound_port = nullptr);
std::unique_ptr<Transport> connect_socket(const std::string& host, int port);

// "host:port", ":port" or "port"; host defaults to 127.0.0.1.
std::pair<std::string, int> parse_address(const std::string& addr);

}  // namespace recon::protocol
