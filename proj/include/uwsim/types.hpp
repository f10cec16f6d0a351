#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace uwsim {

/// Node identifier. The sink is always node 0.
enum class NodeId : std::uint32_t {};

inline constexpr NodeId kSinkId{0};

constexpr std::uint32_t to_index(NodeId id) noexcept { return static_cast<std::uint32_t>(id); }
constexpr NodeId node_id(std::uint32_t index) noexcept { return NodeId{index}; }

inline constexpr double kInfiniteRank = std::numeric_limits<double>::infinity();

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(const Vec3& a, const Vec3& b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Axis-aligned deployment volume; z is depth below the surface.
struct Box {
    Vec3 lo;
    Vec3 hi;

    double volume() const noexcept { return (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z); }
    bool contains(const Vec3& p) const noexcept {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
    }
};

/// Invalid input to a model function (domain violation, malformed matrix, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bad scenario or plan configuration. Carries the offending field and, when
/// known, the 1-based source line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          field_(std::move(field)),
          line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    std::string field_;
    int line_;
};

}  // namespace uwsim
