#include "recon/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

namespace recon::protocol {

namespace {

void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back((uint8_t)(v >> 24));
    out.push_back((uint8_t)(v >> 16));
    out.push_back((uint8_t)(v >> 8));
    out.push_back((uint8_t)v);
}

uint32_t get_u32_be(const uint8_t* p) {
    return ((uint32_t)p[0] << 24) | ((uint32_t)p[1] << 16) | ((uint32_t)p[2] << 8) | (uint32_t)p[3];
}

constexpr uint8_t kTagSyndromes = 1;
constexpr uint8_t kTagReveal = 2;
constexpr uint8_t kTagVerdict = 3;
constexpr uint8_t kTagAbort = 4;
constexpr uint32_t kMaxFrame = 1u << 26;

}  // namespace

std::vector<uint8_t> encode_frame(const Message& msg) {
    std::vector<uint8_t> payload;
    uint8_t tag = 0;
    if (const auto* sb = std::get_if<SyndromeBundle>(&msg)) {
        tag = kTagSyndromes;
        uint32_t count = (uint32_t)sb->syndromes.size();
        uint32_t bits = count ? (uint32_t)sb->syndromes.front().bits.size() : 0;
        put_u32_be(payload, count);
        put_u32_be(payload, bits);
        for (const auto& z : sb->syndromes) {
            if ((uint32_t)z.bits.size() != bits)
                throw TransportError("encode: ragged syndrome bundle");
            size_t nbytes = (bits + 7) / 8;
            size_t base = payload.size();
            payload.resize(base + nbytes, 0);
            for (uint32_t j = 0; j < bits; ++j)
                if (z.bits[j]) payload[base + j / 8] |= (uint8_t)(0x80u >> (j % 8));
        }
    } else if (const auto* sr = std::get_if<ShortenReveal>(&msg)) {
        tag = kTagReveal;
        for (const auto& [pos, bit] : sr->reveals) {
            put_u32_be(payload, pos);
            payload.push_back(bit ? 1 : 0);
        }
    } else if (const auto* v = std::get_if<Verdict>(&msg)) {
        tag = kTagVerdict;
        payload.push_back(v->success ? 1 : 0);
    } else {
        tag = kTagAbort;
        const auto& a = std::get<Abort>(msg);
        payload.insert(payload.end(), a.reason.begin(), a.reason.end());
    }
    std::vector<uint8_t> frame;
    frame.reserve(5 + payload.size());
    put_u32_be(frame, (uint32_t)(1 + payload.size()));
    frame.push_back(tag);
    frame.insert(frame.end(), payload.begin(), payload.end());
    return frame;
}

Message decode_frame_payload(const uint8_t* data, size_t len) {
    if (len < 1) throw TransportError("malformed frame: empty");
    uint8_t tag = data[0];
    const uint8_t* p = data + 1;
    size_t plen = len - 1;
    switch (tag) {
        case kTagSyndromes: {
            if (plen < 8) throw TransportError("malformed frame: short syndrome header");
            uint32_t count = get_u32_be(p);
            uint32_t bits = get_u32_be(p + 4);
            size_t nbytes = ((size_t)bits + 7) / 8;
            if (count > 1024 || plen != 8 + (size_t)count * nbytes)
                throw TransportError("malformed frame: syndrome size mismatch");
            SyndromeBundle sb;
            const uint8_t* q = p + 8;
            for (uint32_t k = 0; k < count; ++k) {
                ldpc::Syndrome z;
                z.bits.resize(bits);
                for (uint32_t j = 0; j < bits; ++j)
                    z.bits[j] = (q[j / 8] >> (7 - j % 8)) & 1u;
                sb.syndromes.push_back(std::move(z));
                q += nbytes;
            }
            return sb;
        }
        case kTagReveal: {
            if (plen % 5 != 0) throw TransportError("malformed frame: reveal size not a multiple of 5");
            ShortenReveal sr;
            for (size_t off = 0; off < plen; off += 5)
                sr.reveals.push_back({get_u32_be(p + off), (uint8_t)(p[off + 4] ? 1 : 0)});
            return sr;
        }
        case kTagVerdict: {
            if (plen != 1) throw TransportError("malformed frame: verdict payload size");
            return Verdict{p[0] != 0};
        }
        case kTagAbort:
            return Abort{std::string((const char*)p, plen)};
        default:
            throw TransportError("malformed frame: unknown tag " + std::to_string(tag));
    }
}

namespace {

Message decode_full_frame(const std::vector<uint8_t>& frame) {
    if (frame.size() < 5) throw TransportError("malformed frame: truncated header");
    uint32_t len = get_u32_be(frame.data());
    if ((size_t)len != frame.size() - 4) throw TransportError("malformed frame: length mismatch");
    return decode_frame_payload(frame.data() + 4, frame.size() - 4);
}

struct FrameQueue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<uint8_t>> frames;
    bool closed = false;

    void push(std::vector<uint8_t> f) {
        {
            std::lock_guard<std::mutex> lk(mu);
            frames.push_back(std::move(f));
        }
        cv.notify_one();
    }
    std::vector<uint8_t> pop() {
        std::unique_lock<std::mutex> lk(mu);
        cv.wait(lk, [&] { return !frames.empty() || closed; });
        if (frames.empty()) throw TransportError("peer closed");
        auto f = std::move(frames.front());
        frames.pop_front();
        return f;
    }
    void close() {
        {
            std::lock_guard<std::mutex> lk(mu);
            closed = true;
        }
        cv.notify_all();
    }
};

struct Duplex {
    FrameQueue a_to_b, b_to_a;
};

struct InProcessTransport final : Transport {
    std::shared_ptr<Duplex> d;
    bool is_a;

    InProcessTransport(std::shared_ptr<Duplex> d_, bool is_a_) : d(std::move(d_)), is_a(is_a_) {}

    void send(const Message& msg) override {
        (is_a ? d->a_to_b : d->b_to_a).push(encode_frame(msg));
    }
    Message recv() override { return decode_full_frame((is_a ? d->b_to_a : d->a_to_b).pop()); }
    ~InProcessTransport() override {
        (is_a ? d->a_to_b : d->b_to_a).close();
    }
};

void write_full(int fd, const uint8_t* data, size_t len) {
    while (len > 0) {
        ssize_t w = ::write(fd, data, len);
        if (w < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("socket write failed: ") + std::strerror(errno));
        }
        data += w;
        len -= (size_t)w;
    }
}

void read_full(int fd, uint8_t* data, size_t len) {
    while (len > 0) {
        ssize_t r = ::read(fd, data, len);
        if (r < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("socket read failed: ") + std::strerror(errno));
        }
        if (r == 0) throw TransportError("connection closed by peer");
        data += r;
        len -= (size_t)r;
    }
}

struct SocketTransport final : Transport {
    int fd;

    explicit SocketTransport(int fd_) : fd(fd_) {}

    void send(const Message& msg) override {
        auto frame = encode_frame(msg);
        write_full(fd, frame.data(), frame.size());
    }
    Message recv() override {
        uint8_t hdr[4];
        read_full(fd, hdr, 4);
        uint32_t len = get_u32_be(hdr);
        if (len < 1 || len > kMaxFrame) throw TransportError("malformed frame: bad length");
        std::vector<uint8_t> body(len);
        read_full(fd, body.data(), len);
        return decode_frame_payload(body.data(), len);
    }
    ~SocketTransport() override {
        if (fd >= 0) ::close(fd);
    }
};

int make_socket() {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError(std::string("socket() failed: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

sockaddr_in make_addr(const std::string& host, int port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons((uint16_t)port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        hostent* he = ::gethostbyname(host.c_str());
        if (!he || he->h_addrtype != AF_INET)
            throw TransportError("cannot resolve host: " + host);
        std::memcpy(&addr.sin_addr, he->h_addr, sizeof addr.sin_addr);
    }
    return addr;
}

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_inprocess_pair() {
    auto d = std::make_shared<Duplex>();
    return {std::make_unique<InProcessTransport>(d, true),
            std::make_unique<InProcessTransport>(d, false)};
}

std::unique_ptr<Transport> listen_socket(const std::string& host, int port, int* bound_port) {
    int lfd = make_socket();
    int one = 1;
    ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = make_addr(host, port);
    if (::bind(lfd, (sockaddr*)&addr, sizeof addr) < 0) {
        int err = errno;
        ::close(lfd);
        throw TransportError(std::string("bind failed: ") + std::strerror(err));
    }
    if (::listen(lfd, 1) < 0) {
        int err = errno;
        ::close(lfd);
        throw TransportError(std::string("listen failed: ") + std::strerror(err));
    }
    if (bound_port) {
        sockaddr_in actual{};
        socklen_t alen = sizeof actual;
        ::getsockname(lfd, (sockaddr*)&actual, &alen);
        *bound_port = (int)ntohs(actual.sin_port);
    }
    int cfd = ::accept(lfd, nullptr, nullptr);
    int err = errno;
    ::close(lfd);
    if (cfd < 0) throw TransportError(std::string("accept failed: ") + std::strerror(err));
    int one2 = 1;
    ::setsockopt(cfd, IPPROTO_TCP, TCP_NODELAY, &one2, sizeof one2);
    return std::make_unique<SocketTransport>(cfd);
}

std::unique_ptr<Transport> connect_socket(const std::string& host, int port) {
    sockaddr_in addr = make_addr(host, port);
    // the peer's listener may still be starting; retry briefly
    for (int attempt = 0;; ++attempt) {
        int fd = make_socket();
        if (::connect(fd, (sockaddr*)&addr, sizeof addr) == 0)
            return std::make_unique<SocketTransport>(fd);
        int err = errno;
        ::close(fd);
        if (err != ECONNREFUSED || attempt >= 100)
            throw TransportError(std::string("connect failed: ") + std::strerror(err));
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

std::pair<std::string, int> parse_address(const std::string& addr) {
    std::string host = "127.0.0.1";
    std::string port_str = addr;
    auto colon = addr.rfind(':');
    if (colon != std::string::npos) {
        if (colon > 0) host = addr.substr(0, colon);
        port_str = addr.substr(colon + 1);
    }
    if (port_str.empty()) throw TransportError("address missing port: " + addr);
    char* end = nullptr;
    long port = std::strtol(port_str.c_str(), &end, 10);
    if (*end != '\0' || port < 0 || port > 65535)
        throw TransportError("bad port in address: " + addr);
    return {host, (int)port};
}

}  // namespace recon::protocol
