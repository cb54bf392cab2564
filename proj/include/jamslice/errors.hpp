#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace jamslice {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct LookupError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for invalid configuration. Carries every offending field path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
    explicit ConfigError(const std::string& issue) : ConfigError(std::vector<std::string>{issue}) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> issues_;
};

} // namespace jamslice
