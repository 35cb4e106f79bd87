#ifndef ZVR_ERROR_HPP
#define ZVR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace zvr {

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error("shape: " + msg) {}
};

struct ValueError : std::runtime_error {
    explicit ValueError(const std::string& msg) : std::runtime_error("value: " + msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error("format: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io: " + msg) {}
};

struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& msg) : std::runtime_error("unsupported: " + msg) {}
};

struct MetricError : std::runtime_error {
    explicit MetricError(const std::string& msg) : std::runtime_error("metric: " + msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

// Thrown by the pipeline when a module fails mid-run; carries the stage name
// so the CLI can report where the run died.
struct PipelineError : std::runtime_error {
    std::string stage;
    PipelineError(std::string stage_, const std::string& msg)
        : std::runtime_error("[" + stage_ + "] " + msg), stage(std::move(stage_)) {}
};

}  // namespace zvr

#endif
