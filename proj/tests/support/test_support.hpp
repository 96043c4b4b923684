#pragma once

#include "matchflow/ingest.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace support {

inline std::filesystem::path data_dir() { return MATCHFLOW_TEST_DATA_DIR; }
inline std::filesystem::path schema_dir() { return MATCHFLOW_SCHEMA_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Timeline with alternating service games of four points each; only the
// fields the analyses read are filled in.
inline matchflow::ingest::MatchTimeline timeline_from(const std::vector<int>& victors, std::vector<int> servers = {},
                                                      const std::string& id = "t-0001") {
    matchflow::ingest::MatchTimeline t;
    t.match_id = id;
    t.player1 = "A";
    t.player2 = "B";
    int won1 = 0, won2 = 0;
    for (std::size_t i = 0; i < victors.size(); ++i) {
        matchflow::ingest::PointRecord r;
        r.match_id = id;
        r.point_no = static_cast<int>(i + 1);
        r.game_no = static_cast<int>(i / 4 + 1);
        r.server = servers.empty() ? (static_cast<int>(i / 4) % 2 == 0 ? 1 : 2) : servers[i];
        r.point_victor = victors[i];
        (victors[i] == 1 ? won1 : won2) += 1;
        r.p1_points_won = won1;
        r.p2_points_won = won2;
        t.records.push_back(r);
    }
    return t;
}

inline std::vector<int> random_victors(std::mt19937_64& gen, std::size_t n, double p1 = 0.5) {
    std::bernoulli_distribution coin(p1);
    std::vector<int> v(n);
    for (auto& x : v) x = coin(gen) ? 1 : 2;
    return v;
}

} // namespace support
