#ifndef QSMETRIC_ERRORS_HPP
#define QSMETRIC_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qsmetric {

struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Configuration problems carry the offending field path for diagnostics.
struct config_error : std::invalid_argument {
    std::string field;
    config_error(std::string field_, const std::string& message)
        : std::invalid_argument(field_.empty() ? message : field_ + ": " + message),
          field(std::move(field_)) {}
};

// Raised when a grid build would exceed its node budget.
struct resource_error : std::runtime_error {
    std::int64_t nodes;
    std::int64_t edges;
    resource_error(const std::string& message, std::int64_t nodes_, std::int64_t edges_)
        : std::runtime_error(message + " (nodes=" + std::to_string(nodes_) +
                             ", edges~=" + std::to_string(edges_) + ")"),
          nodes(nodes_),
          edges(edges_) {}
};

}  // namespace qsmetric

#endif
