#include "safemob/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace safemob {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_int(const std::string& text, UnixTime& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

EventLog EventLog::in_memory() { return EventLog(); }

EventLog EventLog::open(const std::filesystem::path& path) {
    EventLog log;
    log.path_ = path;
    bool existed = std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
    if (existed) {
        std::string body;
        {
            std::ifstream in(path, std::ios::binary);
            if (!in) fail(ErrorKind::Io, "cannot open event log " + path.string());
            std::ostringstream ss;
            ss << in.rdbuf();
            body = ss.str();
        }
        const std::string header_line = std::string(kHeader) + '\n';
        if (body.rfind(header_line, 0) != 0 && header_line.rfind(body, 0) != 0) {
            fail(ErrorKind::Parse, path.string() + ": unrecognized log header");
        }
        // A record is durable once its newline is written. Anything after the
        // last newline is a torn append from a crash; cut it off so the next
        // append starts on a fresh line.
        const auto durable = body.rfind('\n');
        const std::size_t keep = durable == std::string::npos ? 0 : durable + 1;
        if (keep != body.size()) {
            body.resize(keep);
            std::filesystem::resize_file(path, keep);
        }
        existed = keep > 0;
        std::istringstream in(body);
        std::string line;
        std::getline(in, line);
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto fields = split_csv(line);
            UnixTime t = 0;
            if (fields.size() != 3 || !parse_int(fields[0], t)) {
                fail(ErrorKind::Parse, path.string() + ":" + std::to_string(lineno) + ": bad record");
            }
            try {
                log.events_.push_back(DetectionEvent{fields[1], MacPseudonym(fields[2]), t});
            } catch (const Error&) {
                fail(ErrorKind::Parse, path.string() + ":" + std::to_string(lineno) + ": bad pseudonym");
            }
            log.index_last();
        }
    }
    log.out_.open(path, std::ios::app);
    if (!log.out_) fail(ErrorKind::Io, "cannot append to event log " + path.string());
    if (!existed) {
        log.out_ << kHeader << '\n';
        log.out_.flush();
    }
    return log;
}

EventLog::EventLog(EventLog&& other) noexcept
    : path_(std::move(other.path_)),
      out_(std::move(other.out_)),
      events_(std::move(other.events_)),
      by_pseudonym_(std::move(other.by_pseudonym_)) {}

void EventLog::index_last() {
    by_pseudonym_[events_.back().pseudonym.str()].push_back(events_.size() - 1);
}

void EventLog::append(const DetectionEvent& event) { append(std::span(&event, 1)); }

void EventLog::append(std::span<const DetectionEvent> events) {
    std::unique_lock lock(mutex_);
    for (const auto& e : events) {
        if (out_.is_open()) {
            out_ << e.timestamp << ',' << e.detector_id << ',' << e.pseudonym.str() << '\n';
        }
        events_.push_back(e);
        index_last();
    }
    if (out_.is_open()) {
        out_.flush();
        if (!out_) fail(ErrorKind::Io, "failed appending to event log " + path_.string());
    }
}

void EventLog::flush() {
    std::unique_lock lock(mutex_);
    if (out_.is_open()) out_.flush();
}

std::size_t EventLog::size() const {
    std::shared_lock lock(mutex_);
    return events_.size();
}

std::vector<DetectionEvent> EventLog::events() const {
    std::shared_lock lock(mutex_);
    return events_;
}

std::vector<MacPseudonym> EventLog::pseudonyms() const {
    std::shared_lock lock(mutex_);
    std::vector<MacPseudonym> out;
    out.reserve(by_pseudonym_.size());
    for (const auto& [p, _] : by_pseudonym_) out.emplace_back(p);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<DetectionEvent> EventLog::query(const MacPseudonym& pseudonym, UnixTime from,
                                            UnixTime to) const {
    if (from > to) fail(ErrorKind::InvalidArgument, "query range has from > to");
    std::vector<DetectionEvent> out;
    {
        std::shared_lock lock(mutex_);
        auto it = by_pseudonym_.find(pseudonym.str());
        if (it == by_pseudonym_.end()) return out;
        for (std::size_t i : it->second) {
            const auto& e = events_[i];
            if (e.timestamp >= from && e.timestamp <= to) out.push_back(e);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const DetectionEvent& a, const DetectionEvent& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.detector_id < b.detector_id;
    });
    return out;
}

DetectionEvent ingest_detection(const RawDetection& raw, const DetectorNetwork& net,
                                UnixTime clock, std::span<const std::uint8_t> salt,
                                EventLog& log) {
    if (!net.contains(raw.detector_id)) {
        fail(ErrorKind::NotFound, "unknown detector '" + raw.detector_id + "'");
    }
    const auto mac = MacAddress::try_parse(raw.mac);
    if (!mac) fail(ErrorKind::InvalidArgument, "malformed MAC");
    if (raw.timestamp > clock + kMaxClockSkew) {
        fail(ErrorKind::InvalidArgument, "future timestamp");
    }
    DetectionEvent event{raw.detector_id, pseudonymize_mac(*mac, salt), raw.timestamp};
    log.append(event);
    return event;
}

ReplayStats replay_csv(std::istream& in, const DetectorNetwork& net, UnixTime clock,
                       std::span<const std::uint8_t> salt, EventLog& log) {
    ReplayStats stats;
    std::vector<DetectionEvent> batch;
    std::string line;
    std::size_t lineno = 0;
    auto reject = [&](const std::string& reason) {
        ++stats.rejected;
        stats.diagnostics.push_back("line " + std::to_string(lineno) + ": " + reason);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (lineno == 1 && !fields.empty() && fields[0] == "detector_id") continue;
        UnixTime t = 0;
        if (fields.size() != 3) {
            reject("expected 3 fields");
            continue;
        }
        if (!parse_int(fields[2], t)) {
            reject("bad timestamp");
            continue;
        }
        if (!net.contains(fields[0])) {
            reject("unknown detector '" + fields[0] + "'");
            continue;
        }
        const auto mac = MacAddress::try_parse(fields[1]);
        if (!mac) {
            reject("malformed MAC");
            continue;
        }
        if (t > clock + kMaxClockSkew) {
            reject("future timestamp");
            continue;
        }
        batch.push_back(DetectionEvent{fields[0], pseudonymize_mac(*mac, salt), t});
        ++stats.ingested;
    }
    log.append(batch);
    return stats;
}

}  // namespace safemob
