#include "chainbell/event_io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace chainbell {

namespace {

constexpr const char* kHeader = "trial,side,setting,outcome,time";

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw EventFileError("line " + std::to_string(line) + ": " + what);
}

std::uint64_t parse_u64(std::string_view field, std::size_t line, const char* what) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(line, std::string("bad ") + what + " '" + std::string(field) + "'");
    }
    return value;
}

int parse_int(std::string_view field, std::size_t line, const char* what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(line, std::string("bad ") + what + " '" + std::string(field) + "'");
    }
    return value;
}

double parse_time(std::string_view field, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    const std::string buffer(field);
    const double value = std::strtod(buffer.c_str(), &end);
    if (errno != 0 || end != buffer.c_str() + buffer.size() || buffer.empty()) {
        fail(line, "bad time '" + buffer + "'");
    }
    return value;
}

}  // namespace

std::string format_events(std::span<const DetectionEvent> events) {
    std::vector<DetectionEvent> sorted(events.begin(), events.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.trial_id != b.trial_id) return a.trial_id < b.trial_id;
        return static_cast<int>(a.side) < static_cast<int>(b.side);
    });

    std::string out;
    out.reserve(sorted.size() * 24 + 32);
    out += kHeader;
    out += '\n';
    char buffer[64];
    for (const DetectionEvent& event : sorted) {
        std::snprintf(buffer, sizeof(buffer), "%llu,%c,%d,%d,%.12g\n",
                      static_cast<unsigned long long>(event.trial_id),
                      event.side == Side::Alice ? 'A' : 'B', event.setting, event.outcome,
                      event.timestamp);
        out += buffer;
    }
    return out;
}

void write_events(const std::filesystem::path& path, std::span<const DetectionEvent> events) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw EventFileError("cannot open '" + tmp.string() + "' for writing");
        }
        file << format_events(events);
        if (!file.flush()) {
            throw EventFileError("write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

std::vector<DetectionEvent> parse_events(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(stream, line)) {
        throw EventFileError("empty event file");
    }
    ++line_no;
    if (line != kHeader) {
        fail(line_no, "expected header '" + std::string(kHeader) + "'");
    }

    std::vector<DetectionEvent> events;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;

        std::string_view view(line);
        std::string_view fields[5];
        std::size_t field_count = 0;
        for (;;) {
            const std::size_t comma = view.find(',');
            if (field_count < 5) {
                fields[field_count] = view.substr(0, comma);
            }
            ++field_count;
            if (comma == std::string_view::npos) break;
            view.remove_prefix(comma + 1);
        }
        if (field_count != 5) {
            fail(line_no, "expected 5 comma-separated fields, got " + std::to_string(field_count));
        }

        DetectionEvent event{};
        event.trial_id = parse_u64(fields[0], line_no, "trial id");
        if (fields[1] == "A") {
            event.side = Side::Alice;
        } else if (fields[1] == "B") {
            event.side = Side::Bob;
        } else {
            fail(line_no, "side must be A or B, got '" + std::string(fields[1]) + "'");
        }
        event.setting = parse_int(fields[2], line_no, "setting");
        if (event.setting < 1) fail(line_no, "setting must be >= 1");
        event.outcome = parse_int(fields[3], line_no, "outcome");
        if (event.outcome != 1 && event.outcome != -1) {
            fail(line_no, "outcome must be -1 or 1");
        }
        event.timestamp = parse_time(fields[4], line_no);
        events.push_back(event);
    }
    if (events.empty()) {
        throw EventFileError("event file has no data rows");
    }
    return events;
}

std::vector<DetectionEvent> read_events(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw EventFileError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_events(buffer.str());
}

}  // namespace chainbell
