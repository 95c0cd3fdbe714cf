#pragma once

#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "forage/engine.hpp"

namespace forage {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

json coord_json(Coord c);
Coord coord_from(const json& j);

json config_to_json(const RunConfig& c);
RunConfig config_from_json(const json& j);

// Plain-text configuration: one "key = value" per line, '#' starts a comment.
// Keys mirror the JSON field names; food is "x,y;x,y".
RunConfig parse_key_value_config(std::istream& in);

json food_event_to_json(const FoodEvent& e);
FoodEvent food_event_from_json(const json& j);
FoodSchedule schedule_from_json(const json& j);
json schedule_to_json(const FoodSchedule& s);

json frame_to_json(const MetricsFrame& f);

json snapshot_json(const Simulation& sim);

// Emits a full snapshot first, then only the cells that changed.
class DeltaTracker {
public:
    json next(const Simulation& sim);
    void reset() { primed_ = false; }

private:
    bool primed_ = false;
    std::map<std::pair<int, int>, std::string> cells_;
    std::vector<Coord> food_;
};

using MoveList = std::vector<std::pair<Coord, Coord>>;
json moves_to_json(const MoveList& moves);
MoveList moves_from_json(const json& j);

// Length-delimited framing: decimal byte count, newline, payload.
std::string frame_message(const json& message);
// Pulls complete messages off the front of buffer.
std::vector<json> take_messages(std::string& buffer);

}  // namespace forage
