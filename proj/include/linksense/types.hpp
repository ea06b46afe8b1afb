#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace linksense {

using NodeId = std::uint32_t;

/// Thrown for invalid configuration values. `field` is a dotted path
/// ("scenario.spacing_m"), `line` is the config-file line (0 when the
/// error is semantic rather than syntactic).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, std::string reason, int line = 0)
        : std::runtime_error(format(field, reason, line)),
          field_(std::move(field)),
          reason_(std::move(reason)),
          line_(line) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& reason() const noexcept { return reason_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, const std::string& reason, int line) {
        std::string msg = "config error at " + field + ": " + reason;
        if (line > 0) msg += " (line " + std::to_string(line) + ")";
        return msg;
    }

    std::string field_;
    std::string reason_;
    int line_;
};

}  // namespace linksense
