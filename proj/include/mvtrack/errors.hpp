#pragma once

#include <stdexcept>
#include <string>

namespace mvtrack {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Camera centers coincide; the epipole (and thus F) is undefined.
class DegenerateRigError : public Error {
public:
    using Error::Error;
};

// A line degenerated to the zero vector (point is the epipole).
class NullLineError : public Error {
public:
    using Error::Error;
};

// Bounding box with w + h == 0 cannot normalize a distance.
class DegenerateBoxError : public Error {
public:
    using Error::Error;
};

// Two keypoint sets share no jointly-valid joint.
class NoCommonJointsError : public Error {
public:
    using Error::Error;
};

// Triangulation rays are parallel or cameras coincide.
class DegenerateBaselineError : public Error {
public:
    using Error::Error;
};

// Triangulated point lies at infinity (homogeneous w ~ 0).
class InfinitePointError : public Error {
public:
    using Error::Error;
};

// Detections fed to a tracker out of frame order.
class FrameRegressionError : public Error {
public:
    using Error::Error;
};

// Fewer than two cameras contribute at a frame; no stereo pair exists.
class EmptyFrameError : public Error {
public:
    using Error::Error;
};

// A cluster yielded no 3D position at any frame.
class EmptyTrackletError : public Error {
public:
    using Error::Error;
};

// Windows handed to the linker out of keyframe order.
class OutOfOrderWindowError : public Error {
public:
    using Error::Error;
};

// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Keypoint count changed mid-file.
class SchemaMismatchError : public Error {
public:
    using Error::Error;
};

// Bad or unknown configuration key/value.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mvtrack
