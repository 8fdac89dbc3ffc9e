#pragma once

#include <stdexcept>
#include <string>

namespace lanedet {

// Shared base so callers can catch any pipeline error in one handler.
struct LaneDetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Back-projected image ray is parallel to or above the ground plane.
struct HorizonError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Ground point projects behind the camera (non-positive depth).
struct BehindCameraError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Image smaller than the convolution kernel.
struct ImageTooSmallError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Line-fit window holds fewer than two usable pixels.
struct DegenerateWindowError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Least-squares design matrix has effective rank < 4.
struct RankDeficientError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Weighted sampling asked for more points than the window supports.
struct InsufficientSupportError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Chord parameterization of a point set with zero total length.
struct ZeroLengthError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Argument outside the callee's documented domain (e.g. t outside [0,1]).
struct DomainError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Malformed image file; message carries the byte offset.
struct FormatError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Synthetic scene geometry outside the visible ground region.
struct GeometryError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Detection and label frame indices do not line up.
struct FrameMismatchError : LaneDetError {
    using LaneDetError::LaneDetError;
};

// Bad or missing configuration; message carries the line number when known.
struct ConfigError : LaneDetError {
    using LaneDetError::LaneDetError;
};

} // namespace lanedet
