#pragma once

#include <stdexcept>
#include <string>

namespace eitfuse {

// Invalid geometry, mismatched dimensions, out-of-range knobs. CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Everything below maps to CLI exit code 3.
class RuntimeError : public std::runtime_error {
public:
    explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

class SolverError : public RuntimeError {
public:
    explicit SolverError(const std::string& what) : RuntimeError(what) {}
};

class SamplingError : public RuntimeError {
public:
    explicit SamplingError(const std::string& what) : RuntimeError(what) {}
};

class SegmentationError : public RuntimeError {
public:
    explicit SegmentationError(const std::string& what) : RuntimeError(what) {}
};

class AllocationError : public RuntimeError {
public:
    explicit AllocationError(const std::string& what) : RuntimeError(what) {}
};

} // namespace eitfuse
