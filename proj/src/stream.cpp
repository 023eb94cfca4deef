#include "skinsim/stream.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "skinsim/frame.hpp"

namespace skinsim {

namespace {

using Payload = std::shared_ptr<const std::vector<std::uint8_t>>;

bool send_all(int fd, const std::uint8_t* data, std::size_t len) {
    while (len > 0) {
        const ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
        if (n <= 0) {
            return false;
        }
        data += n;
        len -= static_cast<std::size_t>(n);
    }
    return true;
}

bool send_text(int fd, const std::string& text) {
    return send_all(fd, reinterpret_cast<const std::uint8_t*>(text.data()),
                    text.size());
}

} // namespace

struct StreamServer::Impl {
    ScanEngine engine;
    std::vector<ContactSpec> contacts;
    StreamOptions options;

    int listen_fd = -1;
    std::uint16_t bound_port = 0;

    std::thread accept_thread;
    std::thread scan_thread;
    std::atomic<bool> stopping{false};
    std::atomic<bool> producing_done{false};
    std::atomic<std::uint64_t> produced{0};

    // The subscriber's fd is owned by the server and closed in teardown,
    // after the writer thread has been joined. Writers only shutdown().
    struct Subscriber {
        int fd;
        std::thread writer;
        std::mutex mutex;
        std::condition_variable cv;
        std::deque<Payload> queue;
        bool dead = false;
    };

    mutable std::mutex subscribers_mutex;
    std::vector<std::shared_ptr<Subscriber>> subscribers;

    Impl(ScanEngine eng, std::vector<ContactSpec> cts, StreamOptions opts)
        : engine(std::move(eng)), contacts(std::move(cts)), options(opts) {}

    void bind_and_listen() {
        listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (listen_fd < 0) {
            throw std::runtime_error("stream: socket() failed");
        }
        const int one = 1;
        ::setsockopt(listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(options.port);
        if (::inet_pton(AF_INET, options.bind_address.c_str(), &addr.sin_addr) != 1) {
            ::close(listen_fd);
            listen_fd = -1;
            throw std::runtime_error("stream: invalid bind address '" +
                                     options.bind_address + "'");
        }
        if (::bind(listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
            ::listen(listen_fd, 16) != 0) {
            ::close(listen_fd);
            listen_fd = -1;
            throw std::runtime_error("stream: cannot bind " + options.bind_address +
                                     ":" + std::to_string(options.port));
        }
        socklen_t len = sizeof(addr);
        ::getsockname(listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
        bound_port = ntohs(addr.sin_port);
    }

    bool read_handshake_line(int fd, std::string& line) {
        timeval tv{5, 0};
        ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
        line.clear();
        char ch = 0;
        while (line.size() < 64) {
            const ssize_t n = ::recv(fd, &ch, 1, 0);
            if (n <= 0) {
                return false;
            }
            if (ch == '\n') {
                return true;
            }
            line.push_back(ch);
        }
        return false;
    }

    void handle_connection(int fd) {
        std::string line;
        if (!read_handshake_line(fd, line) || line != "SUB 1") {
            send_text(fd, "ERR expected handshake 'SUB 1'\n");
            ::close(fd);
            return;
        }
        auto sub = std::make_shared<Subscriber>();
        sub->fd = fd;
        sub->writer = std::thread([this, sub] { writer_loop(*sub); });
        std::lock_guard<std::mutex> lock(subscribers_mutex);
        subscribers.push_back(std::move(sub));
    }

    void accept_loop() {
        while (!stopping.load()) {
            const int fd = ::accept(listen_fd, nullptr, nullptr);
            if (fd < 0) {
                if (stopping.load()) {
                    return;
                }
                continue;
            }
            handle_connection(fd);
        }
    }

    void writer_loop(Subscriber& sub) {
        while (true) {
            Payload payload;
            {
                std::unique_lock<std::mutex> lock(sub.mutex);
                sub.cv.wait(lock, [&] {
                    return !sub.queue.empty() || stopping.load() ||
                           producing_done.load();
                });
                if (sub.queue.empty()) {
                    if (stopping.load() || producing_done.load()) {
                        break;
                    }
                    continue;
                }
                payload = std::move(sub.queue.front());
                sub.queue.pop_front();
            }
            std::uint8_t prefix[4];
            const auto size = static_cast<std::uint32_t>(payload->size());
            for (int i = 0; i < 4; ++i) {
                prefix[i] = static_cast<std::uint8_t>(size >> (8 * i));
            }
            if (!send_all(sub.fd, prefix, 4) ||
                !send_all(sub.fd, payload->data(), payload->size())) {
                std::lock_guard<std::mutex> lock(sub.mutex);
                sub.dead = true;
                break;
            }
        }
        ::shutdown(sub.fd, SHUT_WR); // EOF for the subscriber; fd closed later
    }

    void publish(const Payload& payload) {
        std::lock_guard<std::mutex> lock(subscribers_mutex);
        for (const auto& sub : subscribers) {
            std::lock_guard<std::mutex> qlock(sub->mutex);
            if (sub->dead) {
                continue;
            }
            sub->queue.push_back(payload);
            while (sub->queue.size() > options.queue_depth) {
                sub->queue.pop_front(); // drop the oldest, keep the feed fresh
            }
            sub->cv.notify_one();
        }
    }

    void scan_loop() {
        const double rate = engine.schedule().rate_hz;
        const auto period = std::chrono::duration<double>(1.0 / rate);
        const auto start = std::chrono::steady_clock::now();
        std::uint64_t i = 0;
        while (!stopping.load()) {
            if (options.max_frames > 0 && i >= options.max_frames) {
                break;
            }
            std::this_thread::sleep_until(
                start +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    period * static_cast<double>(i)));
            if (stopping.load()) {
                break;
            }
            const double t = static_cast<double>(i) / rate;
            const std::vector<double> forces =
                contact_forces_at(engine.topology(), contacts, t);
            const Frame frame =
                engine.scan(forces, static_cast<std::uint64_t>(std::llround(t * 1e6)));
            publish(std::make_shared<const std::vector<std::uint8_t>>(
                encode_frame(frame)));
            produced.store(++i);
        }
        producing_done.store(true);
        std::lock_guard<std::mutex> lock(subscribers_mutex);
        for (const auto& sub : subscribers) {
            std::lock_guard<std::mutex> qlock(sub->mutex);
            sub->cv.notify_all();
        }
    }

    void teardown() {
        stopping.store(true);
        if (listen_fd >= 0) {
            ::shutdown(listen_fd, SHUT_RDWR);
            ::close(listen_fd);
            listen_fd = -1;
        }
        if (accept_thread.joinable()) {
            accept_thread.join();
        }
        if (scan_thread.joinable()) {
            scan_thread.join();
        }
        std::vector<std::shared_ptr<Subscriber>> subs;
        {
            std::lock_guard<std::mutex> lock(subscribers_mutex);
            subs = subscribers;
            subscribers.clear();
        }
        for (const auto& sub : subs) {
            {
                std::lock_guard<std::mutex> qlock(sub->mutex);
                sub->cv.notify_all();
            }
            // Unblocks a writer stuck in send() on a stalled peer.
            ::shutdown(sub->fd, SHUT_RDWR);
            if (sub->writer.joinable()) {
                sub->writer.join();
            }
            ::close(sub->fd);
        }
    }
};

StreamServer::StreamServer(ScanEngine engine, std::vector<ContactSpec> contacts,
                           StreamOptions options)
    : impl_(std::make_unique<Impl>(std::move(engine), std::move(contacts),
                                   options)) {}

StreamServer::~StreamServer() {
    stop();
}

void StreamServer::start() {
    impl_->bind_and_listen();
    impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
    impl_->scan_thread = std::thread([this] { impl_->scan_loop(); });
}

void StreamServer::wait() {
    if (impl_->scan_thread.joinable()) {
        impl_->scan_thread.join();
    }
}

void StreamServer::stop() {
    if (impl_) {
        impl_->teardown();
    }
}

std::uint16_t StreamServer::port() const {
    return impl_->bound_port;
}

std::uint64_t StreamServer::frames_produced() const {
    return impl_->produced.load();
}

std::size_t StreamServer::subscriber_count() const {
    std::lock_guard<std::mutex> lock(impl_->subscribers_mutex);
    return impl_->subscribers.size();
}

} // namespace skinsim
