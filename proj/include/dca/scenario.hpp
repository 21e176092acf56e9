#pragma once

// Seeded synthetic host traces for the five monitored sessions:
//
//   E1    inactive bot idling on its IRC channel next to an IRC client
//   E2.1  keylogging on command
//   E2.2  SYN-like (a) or UDP-like (b) packet flooding on command
//   E2.3  keylogging and flooding together
//   E3    no bot; IRC chat and a 10 KB file transfer beside editors
//
// Sub-sessions "a" use the spy-like bot (SYN flood), "b" the sd-like bot
// (UDP flood); the "b" keylogging/combined sessions also run cmd, Notepad and
// Wordpad. Attack behaviors are active only inside attack episodes, each
// opened by a command the bot receives on its channel.

#include "dca/event_model.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dca {

enum class Scenario { E1, E2_1, E2_2, E2_3, E3 };
enum class BotVariant { spy_like, sd_like };

enum class Behavior {
    idle_ping,        // answers server PINGs
    command_channel,  // receives attack commands and channel traffic, acks commands
    chat,             // sends messages, receives replies
    file_transfer,    // reads a file in chunks and sends it, receives an ack
    keylog_burst,     // polls keyboard state at a high rate during attacks
    flood_syn_like,   // socket+send per packet during attacks
    flood_udp_like,   // sendto per packet during attacks
    editor_keys,      // keyboard state calls while a user types
    file_io,          // background file access
};

std::string_view to_string(Behavior b);
std::string_view to_string(Scenario s);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct BehaviorParams {
    Range ping_interval{10.0, 30.0};    // s between PINGs
    Range response_latency{0.5, 5.0};   // s from receive to reply / command to action
    Range chat_gap{25.0, 120.0};        // s between messages or transfers
    Range reply_delay{2.0, 10.0};       // s until the remote side answers
    Range status_interval{1.0, 5.0};    // s between channel messages during attacks
    double keylog_rate = 16.0;          // keyboard calls/s while keylogging
    Range flood_gap_ms{1.0, 50.0};      // ms between flood packets
    double editor_key_rate = 1.0;       // keyboard calls/s while typing
    Range typing_session{5.0, 30.0};    // s
    Range typing_pause{20.0, 90.0};     // s
    double file_io_rate = 0.5;          // file calls/s
    int transfer_chunks = 10;           // 1 KB reads per 10 KB transfer
};

struct ProcessProfile {
    std::string name;
    std::string process_id;
    std::set<Behavior> behaviors;
    BehaviorParams params;
};

struct AttackSchedule {
    Range first_start{5.0, 15.0};  // s
    Range active{20.0, 40.0};      // s
    Range pause{30.0, 90.0};       // s
};

struct ScenarioConfig {
    Scenario scenario = Scenario::E1;
    std::string label;  // preset id, e.g. "E2.1.a"
    double duration_s = 600.0;
    std::vector<ProcessProfile> processes;
    std::uint64_t seed = 0;
    BotVariant bot_variant = BotVariant::spy_like;
    AttackSchedule attacks;

    // Throws ConfigError on an invalid scenario/profile combination.
    void validate() const;
};

// Known preset ids in canonical form.
std::vector<std::string> scenario_preset_ids();

// Accepts "E2.1.a" or "E2_1_a" forms. Throws ConfigError("unknown scenario ...").
ScenarioConfig scenario_preset(std::string_view id);

// Optional numeric overrides from the run config ("scenario.<key>").
struct ScenarioOverrides {
    std::map<std::string, double> values;

    static const std::vector<std::string>& known_keys();
    void set(const std::string& key, double value);  // ConfigError on unknown key
    void apply(ScenarioConfig& cfg) const;
};

std::vector<EventRecord> generate_records(const ScenarioConfig& cfg);
Dataset generate(const ScenarioConfig& cfg);

} // namespace dca
