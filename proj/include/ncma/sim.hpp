#pragma once

#include <string>

#include "ncma/analysis.hpp"
#include "ncma/bridge.hpp"

namespace ncma {

enum class Profile { Sic, BpskHomogeneous, QpskHomogeneous, DrNcma, SrNcma };

Profile profile_from_string(const std::string& s);
std::string to_string(Profile p);
std::string to_string(Stage s);
SlotProfileKind slot_profile_kind(Profile p);

struct ScenarioConfig {
    Profile profile = Profile::SrNcma;
    double snr_a_db = 8.0;
    double snr_b_db = 8.0;
    std::vector<double> snr_c_db = {8.0, 10.0, 12.0, 14.0};
    int slots = 1000;
    int trials = 10;  // independent batches per sweep point
    uint64_t seed = 1;
    int packet_bits = 128;
    std::array<int, kMaxUsers> l = {8, 16, 32};  // message lengths, normalized packets
    int window_factor = 2;                       // coded window n_total = factor * l
    Fading fading = Fading::RayleighBlock;
    double sigma2 = 1.0;
    double llr_clip = 50.0;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;  // throws with the offending field name
};

// Flat "key = value" text, '#' comments; unknown keys are errors.
ScenarioConfig parse_config_text(const std::string& text);
void apply_config_entry(ScenarioConfig& cfg, const std::string& key, const std::string& value);
std::string config_text(const ScenarioConfig& cfg);  // canonical round-trippable form
uint64_t config_hash(const ScenarioConfig& cfg);

struct ResultRow {
    Profile profile = Profile::SrNcma;
    double snr_c_db = 0.0;
    ThroughputRecord th;
    Stage stage = Stage::Mud;
    int slots = 0;
    uint64_t seed = 0;  // the derived batch seed
};

// One batch: all three bridging stages at one sweep point with one seed.
// The stages replay identical channel, noise and message contents; only the
// decoder schedule and bridging depth differ.
std::array<ThroughputRecord, 3> run_point(const ScenarioConfig& cfg, double snr_c_db,
                                          uint64_t batch_seed);

// Full sweep, parallel over (point, batch); rows ordered by point, then
// stage, then batch, independent of thread timing.
std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg);

std::string render_csv(const std::vector<ResultRow>& rows);
std::string render_manifest(const ScenarioConfig& cfg, const std::string& csv_path);

// batch seed = splitmix chain over (master, point index, batch index)
uint64_t batch_seed(uint64_t master, size_t point_index, int batch);

}  // namespace ncma
