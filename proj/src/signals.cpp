#include "dca/signals.hpp"

#include "dca/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace dca {

void NormalizationConfig::validate() const {
    if (!(n_p > 0)) throw ConfigError("n_p must be positive");
    if (!(n_d > 0)) throw ConfigError("n_d must be positive");
    if (!(n_s1 > 0 && n_s1 < n_s2)) throw ConfigError("require 0 < n_s1 < n_s2");
    if (window_ms <= 0) throw ConfigError("window_ms must be positive");
}

double compute_pamp(double rate, const NormalizationConfig& cfg) {
    return std::clamp(kPampMax * rate / cfg.n_p, 0.0, kPampMax);
}

double compute_danger(double delta, const NormalizationConfig& cfg) {
    if (delta >= cfg.n_d) return 0.0;
    return std::clamp(kDangerMax * (1.0 - delta / cfg.n_d), 0.0, kDangerMax);
}

double compute_safe(double gap, const NormalizationConfig& cfg) {
    if (gap < cfg.n_s1) return 0.0;
    if (gap > cfg.n_s2) return kSafeMax;
    return kSafeMax * (gap - cfg.n_s1) / (cfg.n_s2 - cfg.n_s1);
}

SignalExtractor::SignalExtractor(NormalizationConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void SignalExtractor::observe(const EventRecord& e) {
    switch (e.category) {
    case CallCategory::keyboard_state: ++keyboard_calls_; break;
    case CallCategory::file_access: break;
    case CallCategory::communication:
        if (e.is_inbound()) {
            pending_recv_[e.process_id] = e.ts;
            break;
        }
        if (auto it = last_send_.find(e.process_id); it != last_send_.end())
            last_gap_s_ = static_cast<double>(e.ts - it->second) / 1000.0;
        last_send_[e.process_id] = e.ts;
        // socket() opens a channel but carries no data, so it does not answer a receive.
        if (e.call_name != "socket") {
            if (auto it = pending_recv_.find(e.process_id); it != pending_recv_.end()) {
                const double delta = static_cast<double>(e.ts - it->second) / 1000.0;
                min_delta_s_ = min_delta_s_ ? std::min(*min_delta_s_, delta) : delta;
                pending_recv_.erase(it);
            }
        }
        break;
    }
}

SignalSample SignalExtractor::close_window(std::int64_t window_start) {
    SignalSample s;
    s.ts = window_start;
    const double rate = static_cast<double>(keyboard_calls_) * 1000.0 / static_cast<double>(cfg_.window_ms);
    s.pamp = keyboard_calls_ ? compute_pamp(rate, cfg_) : 0.0;
    s.ds = min_delta_s_ ? compute_danger(*min_delta_s_, cfg_) : 0.0;
    s.ss = last_gap_s_ ? compute_safe(*last_gap_s_, cfg_) : 0.0;
    keyboard_calls_ = 0;
    min_delta_s_.reset();
    return s;
}

std::int64_t window_index(std::int64_t ts, std::int64_t window_ms) { return ts / window_ms; }

std::vector<SignalSample> extract_signals(const Dataset& ds, const NormalizationConfig& cfg) {
    std::vector<SignalSample> out;
    if (ds.empty()) return out;
    SignalExtractor ex(cfg);
    const std::int64_t last = window_index(ds.items.back().ts(), cfg.window_ms);
    out.reserve(static_cast<std::size_t>(last + 1));
    std::size_t i = 0;
    for (std::int64_t w = 0; w <= last; ++w) {
        const std::int64_t end = (w + 1) * cfg.window_ms;
        for (; i < ds.items.size() && ds.items[i].ts() < end; ++i) {
            if (ds.items[i].ts() < w * cfg.window_ms) throw PreconditionError("dataset not sorted by ts");
            if (!ds.items[i].is_antigen()) ex.observe(ds.items[i].event());
        }
        out.push_back(ex.close_window(w * cfg.window_ms));
    }
    return out;
}

void write_signals_csv(std::ostream& out, std::span<const SignalSample> samples) {
    out << "ts_ms,pamp,ds,ss\n";
    char buf[128];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%lld,%.6f,%.6f,%.6f\n", static_cast<long long>(s.ts), s.pamp, s.ds, s.ss);
        out << buf;
    }
}

} // namespace dca
