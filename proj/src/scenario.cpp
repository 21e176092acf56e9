#include "dca/scenario.hpp"

#include "dca/errors.hpp"
#include "dca/rng.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace dca {

namespace {

struct Episode {
    double start = 0.0;   // command received
    double action = 0.0;  // attack starts (command + latency)
    double end = 0.0;
};

struct Emitted {
    double t = 0.0;
    std::string call;
};

class ProcessTimeline {
public:
    ProcessTimeline(double duration) : duration_(duration) {}
    void emit(double t, std::string_view call) {
        if (t >= 0.0 && t < duration_) events.push_back({t, std::string(call)});
    }
    std::vector<Emitted> events;

private:
    double duration_;
};

bool has(const ProcessProfile& p, Behavior b) { return p.behaviors.count(b) != 0; }

bool is_attack(Behavior b) {
    return b == Behavior::command_channel || b == Behavior::keylog_burst || b == Behavior::flood_syn_like ||
           b == Behavior::flood_udp_like;
}

bool is_bot(const ProcessProfile& p) {
    if (p.name == "bot") return true;
    return std::any_of(p.behaviors.begin(), p.behaviors.end(), is_attack);
}

std::vector<Episode> schedule_attacks(const ScenarioConfig& cfg, Rng& rng, const Range& latency) {
    std::vector<Episode> out;
    if (cfg.scenario == Scenario::E1 || cfg.scenario == Scenario::E3) return out;
    double t = rng.uniform(cfg.attacks.first_start.lo, cfg.attacks.first_start.hi);
    while (t < cfg.duration_s) {
        Episode e;
        e.start = t;
        e.action = t + rng.uniform(latency.lo, latency.hi);
        e.end = std::min(cfg.duration_s, e.action + rng.uniform(cfg.attacks.active.lo, cfg.attacks.active.hi));
        out.push_back(e);
        t = e.end + rng.uniform(cfg.attacks.pause.lo, cfg.attacks.pause.hi);
    }
    return out;
}

template <std::size_t N>
std::string_view pick(Rng& rng, const std::pair<std::string_view, double> (&table)[N]) {
    double u = rng.uniform01();
    for (const auto& [name, p] : table) {
        if (u < p) return name;
        u -= p;
    }
    return table[N - 1].first;
}

constexpr std::pair<std::string_view, double> kKeylogCalls[] = {
    {"GetAsyncKeyState", 0.75}, {"GetKeyboardState", 0.2}, {"GetKeyNameText", 0.05}};
constexpr std::pair<std::string_view, double> kEditorCalls[] = {{"GetKeyboardState", 0.8}, {"GetKeyNameText", 0.2}};
constexpr std::pair<std::string_view, double> kFileCalls[] = {
    {"CreateFile", 0.2}, {"OpenFile", 0.1}, {"ReadFile", 0.4}, {"WriteFile", 0.3}};

void paced_comm(const ProcessProfile& p, Rng& rng, ProcessTimeline& tl, double duration) {
    std::vector<Behavior> kinds;
    for (Behavior b : {Behavior::idle_ping, Behavior::chat, Behavior::file_transfer})
        if (has(p, b)) kinds.push_back(b);
    if (kinds.empty()) return;
    const auto& q = p.params;
    auto gap_of = [&](Behavior b) { return b == Behavior::idle_ping ? q.ping_interval : q.chat_gap; };

    Behavior next = kinds[rng.index(kinds.size())];
    double t = rng.uniform(0.0, gap_of(next).hi);
    while (t < duration) {
        switch (next) {
        case Behavior::idle_ping:
            tl.emit(t, "recv");
            tl.emit(t + rng.uniform(q.response_latency.lo, q.response_latency.hi), "send");
            break;
        case Behavior::chat:
            tl.emit(t, "send");
            tl.emit(t + rng.uniform(q.reply_delay.lo, q.reply_delay.hi), "recv");
            break;
        case Behavior::file_transfer: {
            double u = t;
            tl.emit(u, "CreateFile");
            for (int c = 0; c < q.transfer_chunks; ++c) tl.emit(u += 0.005, "ReadFile");
            tl.emit(u += 0.005, "send");
            tl.emit(u + rng.uniform(0.2, 1.0), "recv");
            break;
        }
        default: break;
        }
        next = kinds[rng.index(kinds.size())];
        const Range g = gap_of(next);
        t += rng.uniform(g.lo, g.hi);
    }
}

void command_channel(const ProcessProfile& p, Rng& rng, ProcessTimeline& tl, const std::vector<Episode>& eps) {
    for (const auto& e : eps) {
        tl.emit(e.start, "recv");
        tl.emit(e.action, "send");
        for (double t = e.action + rng.uniform(p.params.status_interval.lo, p.params.status_interval.hi); t < e.end;
             t += rng.uniform(p.params.status_interval.lo, p.params.status_interval.hi))
            tl.emit(t, "recv");
    }
}

void keylog(const ProcessProfile& p, Rng& rng, ProcessTimeline& tl, const std::vector<Episode>& eps) {
    for (const auto& e : eps)
        for (double t = e.action + rng.exponential(p.params.keylog_rate); t < e.end;
             t += rng.exponential(p.params.keylog_rate))
            tl.emit(t, pick(rng, kKeylogCalls));
}

void flood(const ProcessProfile& p, Rng& rng, ProcessTimeline& tl, const std::vector<Episode>& eps, bool syn) {
    const Range g = p.params.flood_gap_ms;
    for (const auto& e : eps)
        for (double t = e.action + 0.001; t < e.end; t += rng.uniform(g.lo, g.hi) / 1000.0) {
            if (syn) {
                tl.emit(t, "socket");
                tl.emit(t, "send");
            } else {
                tl.emit(t, "sendto");
            }
        }
}

void editor(const ProcessProfile& p, Rng& rng, ProcessTimeline& tl, double duration) {
    const auto& q = p.params;
    double t = rng.uniform(0.0, q.typing_pause.hi);
    while (t < duration) {
        const double end = t + rng.uniform(q.typing_session.lo, q.typing_session.hi);
        for (double u = t + rng.exponential(q.editor_key_rate); u < end; u += rng.exponential(q.editor_key_rate))
            tl.emit(u, pick(rng, kEditorCalls));
        t = end + rng.uniform(q.typing_pause.lo, q.typing_pause.hi);
    }
}

void file_io(const ProcessProfile& p, Rng& rng, ProcessTimeline& tl, double duration) {
    if (p.params.file_io_rate <= 0.0) return;
    for (double t = rng.exponential(p.params.file_io_rate); t < duration; t += rng.exponential(p.params.file_io_rate))
        tl.emit(t, pick(rng, kFileCalls));
}

ProcessProfile make_profile(std::string name, std::string pid, std::set<Behavior> behaviors) {
    ProcessProfile p{std::move(name), std::move(pid), std::move(behaviors), {}};
    return p;
}

ProcessProfile bot_profile(Scenario s, BotVariant v) {
    std::set<Behavior> b{Behavior::idle_ping};
    if (s != Scenario::E1) b.insert(Behavior::command_channel);
    if (s == Scenario::E2_1 || s == Scenario::E2_3) b.insert(Behavior::keylog_burst);
    if (s == Scenario::E2_2 || s == Scenario::E2_3)
        b.insert(v == BotVariant::spy_like ? Behavior::flood_syn_like : Behavior::flood_udp_like);
    return make_profile("bot", "1001", std::move(b));
}

ProcessProfile irc_profile(Scenario s) {
    std::set<Behavior> b{Behavior::idle_ping};
    if (s != Scenario::E1) b.insert(Behavior::chat);
    if (s == Scenario::E3) b.insert(Behavior::file_transfer);
    auto p = make_profile("IRC", "1002", std::move(b));
    p.params.ping_interval = {20.0, 60.0};
    return p;
}

ProcessProfile cmd_profile() {
    auto p = make_profile("cmd", "1003", {Behavior::file_io});
    p.params.file_io_rate = 0.8;
    return p;
}

ProcessProfile editor_profile(std::string name, std::string pid, double key_rate, double io_rate) {
    auto p = make_profile(std::move(name), std::move(pid), {Behavior::editor_keys, Behavior::file_io});
    p.params.editor_key_rate = key_rate;
    p.params.file_io_rate = io_rate;
    return p;
}

ProcessProfile hook_profile() {
    auto p = make_profile("hook", "1006", {Behavior::file_io});
    p.params.file_io_rate = 0.2;
    return p;
}

} // namespace

std::string_view to_string(Behavior b) {
    switch (b) {
    case Behavior::idle_ping: return "idle_ping";
    case Behavior::command_channel: return "command_channel";
    case Behavior::chat: return "chat";
    case Behavior::file_transfer: return "file_transfer";
    case Behavior::keylog_burst: return "keylog_burst";
    case Behavior::flood_syn_like: return "flood_syn_like";
    case Behavior::flood_udp_like: return "flood_udp_like";
    case Behavior::editor_keys: return "editor_keys";
    case Behavior::file_io: return "file_io";
    }
    return "?";
}

std::string_view to_string(Scenario s) {
    switch (s) {
    case Scenario::E1: return "E1";
    case Scenario::E2_1: return "E2_1";
    case Scenario::E2_2: return "E2_2";
    case Scenario::E2_3: return "E2_3";
    case Scenario::E3: return "E3";
    }
    return "?";
}

void ScenarioConfig::validate() const {
    if (!(duration_s > 0.0)) throw ConfigError("scenario duration must be positive");
    for (const auto& p : processes) {
        if (p.process_id.empty()) throw ConfigError("process '" + p.name + "' has no process id");
        if (scenario == Scenario::E3 && is_bot(p))
            throw ConfigError("E3 is a bot-free session; process '" + p.name + "' is a bot profile");
        if (scenario == Scenario::E2_2 && has(p, Behavior::editor_keys))
            throw ConfigError("E2_2 runs no interactive applications; process '" + p.name + "' types");
        const auto& q = p.params;
        for (const Range* r : {&q.ping_interval, &q.response_latency, &q.chat_gap, &q.reply_delay,
                               &q.status_interval, &q.flood_gap_ms, &q.typing_session, &q.typing_pause})
            if (!(r->lo > 0.0 && r->lo <= r->hi)) throw ConfigError("process '" + p.name + "' has an invalid range");
        if (q.keylog_rate <= 0.0 || q.editor_key_rate <= 0.0 || q.file_io_rate < 0.0 || q.transfer_chunks < 0)
            throw ConfigError("process '" + p.name + "' has an invalid rate");
    }
    for (const Range* r : {&attacks.first_start, &attacks.active, &attacks.pause})
        if (!(r->lo >= 0.0 && r->lo <= r->hi)) throw ConfigError("invalid attack schedule range");
}

std::vector<std::string> scenario_preset_ids() {
    return {"E1", "E2.1.a", "E2.1.b", "E2.2.a", "E2.2.b", "E2.3.a", "E2.3.b", "E3"};
}

ScenarioConfig scenario_preset(std::string_view id) {
    std::string canon(id);
    std::replace(canon.begin(), canon.end(), '_', '.');
    const auto ids = scenario_preset_ids();
    if (std::find(ids.begin(), ids.end(), canon) == ids.end())
        throw ConfigError("unknown scenario '" + std::string(id) + "'");

    ScenarioConfig cfg;
    cfg.label = canon;
    const bool sub_b = canon.size() == 6 && canon.back() == 'b';
    cfg.bot_variant = sub_b ? BotVariant::sd_like : BotVariant::spy_like;
    if (canon == "E1")
        cfg.scenario = Scenario::E1;
    else if (canon == "E3")
        cfg.scenario = Scenario::E3;
    else
        cfg.scenario = canon[3] == '1' ? Scenario::E2_1 : canon[3] == '2' ? Scenario::E2_2 : Scenario::E2_3;

    if (cfg.scenario != Scenario::E3) cfg.processes.push_back(bot_profile(cfg.scenario, cfg.bot_variant));
    cfg.processes.push_back(irc_profile(cfg.scenario));

    const bool with_desktop = cfg.scenario == Scenario::E3 ||
                              ((cfg.scenario == Scenario::E2_1 || cfg.scenario == Scenario::E2_3) && sub_b);
    if (with_desktop || canon == "E2.2.a") cfg.processes.push_back(cmd_profile());
    if (with_desktop) {
        cfg.processes.push_back(editor_profile("Notepad", "1004", 1.0, 0.02));
        cfg.processes.push_back(editor_profile("Wordpad", "1005", 1.0, 0.05));
    }
    if (cfg.scenario == Scenario::E3) cfg.processes.push_back(hook_profile());
    return cfg;
}

const std::vector<std::string>& ScenarioOverrides::known_keys() {
    static const std::vector<std::string> keys = {
        "duration",          "keylog_rate",      "editor_key_rate",  "file_io_rate",     "flood_gap_ms_lo",
        "flood_gap_ms_hi",   "latency_lo",       "latency_hi",       "chat_gap_lo",      "chat_gap_hi",
        "attack_active_lo",  "attack_active_hi", "attack_pause_lo",  "attack_pause_hi",
    };
    return keys;
}

void ScenarioOverrides::set(const std::string& key, double value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ConfigError("unknown config key 'scenario." + key + "'");
    values[key] = value;
}

void ScenarioOverrides::apply(ScenarioConfig& cfg) const {
    for (const auto& [key, v] : values) {
        if (key == "duration") cfg.duration_s = v;
        else if (key == "attack_active_lo") cfg.attacks.active.lo = v;
        else if (key == "attack_active_hi") cfg.attacks.active.hi = v;
        else if (key == "attack_pause_lo") cfg.attacks.pause.lo = v;
        else if (key == "attack_pause_hi") cfg.attacks.pause.hi = v;
        for (auto& p : cfg.processes) {
            auto& q = p.params;
            const bool bot = is_bot(p);
            if (key == "keylog_rate") q.keylog_rate = v;
            else if (key == "editor_key_rate" && has(p, Behavior::editor_keys)) q.editor_key_rate = v;
            else if (key == "file_io_rate" && has(p, Behavior::file_io)) q.file_io_rate = v;
            else if (key == "flood_gap_ms_lo") q.flood_gap_ms.lo = v;
            else if (key == "flood_gap_ms_hi") q.flood_gap_ms.hi = v;
            else if (key == "latency_lo" && bot) q.response_latency.lo = v;
            else if (key == "latency_hi" && bot) q.response_latency.hi = v;
            else if (key == "chat_gap_lo") q.chat_gap.lo = v;
            else if (key == "chat_gap_hi") q.chat_gap.hi = v;
        }
    }
}

std::vector<EventRecord> generate_records(const ScenarioConfig& cfg) {
    cfg.validate();

    const ProcessProfile* bot = nullptr;
    for (const auto& p : cfg.processes)
        if (is_bot(p)) bot = &p;
    Rng schedule_rng(mix_seed(cfg.seed, 0));
    const auto episodes =
        schedule_attacks(cfg, schedule_rng, bot ? bot->params.response_latency : BehaviorParams{}.response_latency);

    struct Keyed {
        std::int64_t ts;
        std::size_t proc;
        std::size_t local;
        EventRecord rec;
    };
    std::vector<Keyed> all;
    for (std::size_t i = 0; i < cfg.processes.size(); ++i) {
        const auto& p = cfg.processes[i];
        Rng rng(mix_seed(cfg.seed, i + 1));
        ProcessTimeline tl(cfg.duration_s);
        paced_comm(p, rng, tl, cfg.duration_s);
        if (has(p, Behavior::command_channel)) command_channel(p, rng, tl, episodes);
        if (has(p, Behavior::keylog_burst)) keylog(p, rng, tl, episodes);
        if (has(p, Behavior::flood_syn_like)) flood(p, rng, tl, episodes, true);
        if (has(p, Behavior::flood_udp_like)) flood(p, rng, tl, episodes, false);
        if (has(p, Behavior::editor_keys)) editor(p, rng, tl, cfg.duration_s);
        if (has(p, Behavior::file_io)) file_io(p, rng, tl, cfg.duration_s);

        for (std::size_t k = 0; k < tl.events.size(); ++k) {
            const auto& e = tl.events[k];
            EventRecord r;
            r.ts = std::llround(e.t * 1000.0);
            r.process_id = p.process_id;
            r.process_name = p.name;
            r.category = *category_of(e.call);
            r.call_name = e.call;
            r.direction = natural_direction(e.call);
            all.push_back({r.ts, i, k, std::move(r)});
        }
    }
    std::sort(all.begin(), all.end(), [](const Keyed& a, const Keyed& b) {
        return std::tie(a.ts, a.proc, a.local) < std::tie(b.ts, b.proc, b.local);
    });
    std::vector<EventRecord> out;
    out.reserve(all.size());
    for (auto& k : all) {
        k.rec.seq = out.size();
        out.push_back(std::move(k.rec));
    }
    return out;
}

Dataset generate(const ScenarioConfig& cfg) {
    DatasetMeta meta;
    meta.scenario = cfg.label.empty() ? std::string(to_string(cfg.scenario)) : cfg.label;
    meta.seed = cfg.seed;
    meta.sources.push_back("generated");
    return dataset_from_records(generate_records(cfg), std::move(meta));
}

} // namespace dca
