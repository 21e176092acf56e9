#pragma once

#include "dca/event_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dca {

// Normalization constants. Time constants are in seconds, the sampling
// window in milliseconds.
struct NormalizationConfig {
    double n_p = 20.0;   // keyboard calls per second that map to PAMP 100
    double n_d = 10.0;   // receive->send latency at or above which danger is 0
    double n_s1 = 5.0;   // send gaps below this are unsafe
    double n_s2 = 20.0;  // send gaps above this are fully safe
    std::int64_t window_ms = 1000;

    void validate() const;
};

struct SignalSample {
    std::int64_t ts = 0;  // window start, ms
    double pamp = 0.0;    // [0, 100]
    double ds = 0.0;      // [0, 100]
    double ss = 0.0;      // [0, 10]

    bool operator==(const SignalSample&) const = default;
};

inline constexpr double kPampMax = 100.0;
inline constexpr double kDangerMax = 100.0;
inline constexpr double kSafeMax = 10.0;

double compute_pamp(double keyboard_call_rate, const NormalizationConfig& cfg);
double compute_danger(double response_delta_s, const NormalizationConfig& cfg);
double compute_safe(double send_gap_s, const NormalizationConfig& cfg);

// Single-pass fold over a time-ordered event stream. Feed events in order,
// then call `close_window` for each elapsed window.
class SignalExtractor {
public:
    explicit SignalExtractor(NormalizationConfig cfg);

    void observe(const EventRecord& e);
    SignalSample close_window(std::int64_t window_start);

private:
    NormalizationConfig cfg_;
    std::size_t keyboard_calls_ = 0;
    std::optional<double> min_delta_s_;
    std::optional<double> last_gap_s_;  // carried across windows
    std::map<std::string, std::int64_t> pending_recv_;
    std::map<std::string, std::int64_t> last_send_;
};

// Index of the window containing `ts`.
std::int64_t window_index(std::int64_t ts, std::int64_t window_ms);

// One sample per window from 0 up to the window holding the last item.
std::vector<SignalSample> extract_signals(const Dataset& ds, const NormalizationConfig& cfg);

void write_signals_csv(std::ostream& out, std::span<const SignalSample> samples);

} // namespace dca
