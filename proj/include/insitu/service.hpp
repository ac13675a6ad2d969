#pragma once

#include <memory>
#include <optional>
#include <string>

namespace insitu {

struct ServiceOptions {
    std::string bind = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::string cors_origin = "*";
    std::optional<std::string> snapshot_path;  // sessions are saved here on POST /snapshot and loaded at start
};

/// Reads INSITU_BIND and INSITU_PORT over the given defaults.
ServiceOptions service_options_from_env(ServiceOptions defaults = {});

/// Session-oriented HTTP facade over the design kernel and estimators.
class Service {
public:
    explicit Service(ServiceOptions options = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves on a background thread. Returns the bound port.
    /// Throws IoError when binding fails.
    int start();

    /// Binds and serves on the calling thread until stop().
    void run();

    void stop();
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace insitu
