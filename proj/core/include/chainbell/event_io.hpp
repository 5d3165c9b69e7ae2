#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "chainbell/events.hpp"

namespace chainbell {

/// Raised for malformed event files; message carries the offending line number.
class EventFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Serialize events as `trial,side,setting,outcome,time` rows, sorted by
/// (trial, side). Times are written with 12 significant digits, so
/// write -> read -> write is byte-identical.
std::string format_events(std::span<const DetectionEvent> events);

/// Atomically write the event file (temp file then rename).
void write_events(const std::filesystem::path& path, std::span<const DetectionEvent> events);

std::vector<DetectionEvent> parse_events(const std::string& text);

std::vector<DetectionEvent> read_events(const std::filesystem::path& path);

}  // namespace chainbell
