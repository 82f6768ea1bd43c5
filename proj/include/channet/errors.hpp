#pragma once

#include <stdexcept>
#include <string>

namespace channet {

/// Input file could not be read, parsed, or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data is valid but carries no usable signal (e.g. an empty NMS image for Otsu).
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Wraps an error raised while a named pipeline stage was running.
class StageError : public std::runtime_error {
public:
    enum class Kind { usage, io, degenerate };

    StageError(std::string stage, Kind kind, const std::string& message)
        : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)), kind_(kind) {}

    const std::string& stage() const noexcept { return stage_; }
    Kind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
            case Kind::io: return 2;
            case Kind::degenerate: return 3;
            case Kind::usage: break;
        }
        return 1;
    }

private:
    std::string stage_;
    Kind kind_;
};

}  // namespace channet
