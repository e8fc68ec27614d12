#pragma once

#include <stdexcept>
#include <string>

namespace pvtrack {

struct NearVerticalLine : std::runtime_error {
    explicit NearVerticalLine(const std::string& what) : std::runtime_error(what) {}
};

struct SingularObservation : std::runtime_error {
    explicit SingularObservation(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidThresholds : std::runtime_error {
    explicit InvalidThresholds(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateRegion : std::runtime_error {
    explicit DegenerateRegion(const std::string& what) : std::runtime_error(what) {}
};

struct NoIntersection : std::runtime_error {
    explicit NoIntersection(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeMismatch : std::runtime_error {
    explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedMission : std::runtime_error {
    explicit MalformedMission(const std::string& what) : std::runtime_error(what) {}
};

struct NoRegionsDetected : std::runtime_error {
    explicit NoRegionsDetected(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyWindow : std::runtime_error {
    explicit EmptyWindow(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pvtrack
