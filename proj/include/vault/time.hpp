#pragma once

#include <cstdio>
#include <ctime>
#include <string>

#include "vault/error.hpp"

namespace vault {

// Accepts "YYYY-MM-DDTHH:MM:SS" followed by 'Z' or a +hh:mm / -hh:mm offset.
// Returns seconds since the Unix epoch.
inline std::uint64_t rfc3339_parse(const std::string& text) {
    int y, mo, d, h, mi, s;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s,
                    &consumed) != 6)
        raise(Errc::malformed_input, "not an RFC 3339 timestamp: " + text);

    long offset = 0;
    std::string rest = text.substr(consumed);
    if (rest == "Z" || rest == "z") {
        offset = 0;
    } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
        int oh = 0, om = 0;
        if (std::sscanf(rest.c_str() + 1, "%2d:%2d", &oh, &om) != 2)
            raise(Errc::malformed_input, "bad timezone offset: " + text);
        offset = (oh * 3600L + om * 60L) * (rest[0] == '+' ? 1 : -1);
    } else {
        raise(Errc::malformed_input, "missing timezone designator: " + text);
    }

    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    std::time_t utc = timegm(&tm);
    if (utc == -1) raise(Errc::malformed_input, "timestamp out of range: " + text);
    long long result = static_cast<long long>(utc) - offset;
    if (result < 0) raise(Errc::malformed_input, "timestamp before epoch: " + text);
    return static_cast<std::uint64_t>(result);
}

inline std::string rfc3339_format(std::uint64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

}  // namespace vault
