#pragma once

// TCP publisher for live frames. Subscribers send a one-line "SUB 1\n"
// handshake and then receive length-prefixed encoded frames at the scheduled
// rate. Each subscriber owns a bounded drop-oldest queue; a slow or stuck
// subscriber never stalls the scan loop.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "skinsim/scan.hpp"
#include "skinsim/topology.hpp"

namespace skinsim {

struct StreamOptions {
    std::string bind_address = "127.0.0.1";
    std::uint16_t port = 0;       // 0 picks an ephemeral port
    std::uint64_t max_frames = 0; // 0 runs until stop()
    std::size_t queue_depth = 8;
};

class StreamServer {
public:
    StreamServer(ScanEngine engine, std::vector<ContactSpec> contacts,
                 StreamOptions options);
    ~StreamServer();

    StreamServer(const StreamServer&) = delete;
    StreamServer& operator=(const StreamServer&) = delete;

    // Binds and launches the accept and scan threads. Throws
    // std::runtime_error when the address cannot be bound.
    void start();

    // Blocks until max_frames have been produced and delivered queues have
    // drained. Only meaningful when max_frames > 0.
    void wait();

    void stop();

    std::uint16_t port() const;
    std::uint64_t frames_produced() const;
    std::size_t subscriber_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace skinsim
