#pragma once

// Acquisition-chain emulation: per-taxel dynamics driven by a scan schedule,
// producing frames in address order. Virtual-time runs are exact and
// deterministic; wall-clock pacing lives in the stream server.

#include <cstdint>
#include <vector>

#include "skinsim/capmodel.hpp"
#include "skinsim/dynamics.hpp"
#include "skinsim/frame.hpp"
#include "skinsim/topology.hpp"

namespace skinsim {

struct ScanSchedule {
    double rate_hz = 100.0;
    std::vector<int> order; // taxel indices, ascending address order

    static ScanSchedule for_topology(const SkinTopology& topo, double rate_hz);

    // Throws std::domain_error when the rate leaves the converter's window.
    void validate() const;
};

// Per-channel hysteresis/drift parameters shared by every taxel of a build.
struct ChannelSettings {
    SensorChannelConfig channel;
    DynamicsToggles toggles;
    double loop_gap_fraction = 0.054;
    double relaxation_rate_hz = HysteresisState::kDefaultHysteresisRate;
    double gain_decay_per_1000 = 0.00054;
};

// Owns the per-taxel dynamic state and the frame sequence counter. One engine
// per stream; not meant for concurrent scans.
class ScanEngine {
public:
    ScanEngine(SkinTopology topo, SensorModel model, ChannelSettings settings);

    // One full scan at the given timestamp. forces_n is indexed by global
    // taxel index and must cover the topology.
    Frame scan(const std::vector<double>& forces_n, std::uint64_t timestamp_us);

    const SkinTopology& topology() const { return topo_; }
    const ScanSchedule& schedule() const { return schedule_; }
    const SensorModel& model() const { return model_; }
    const ChannelSettings& settings() const { return settings_; }

    double baseline_pf() const { return model_.baseline_pf(); }
    double quantized_baseline_pf() const;
    double dt_s() const { return 1.0 / schedule_.rate_hz; }

    // Reading position of a taxel within a frame (address order).
    std::size_t frame_slot(int taxel_index) const;

    void add_interactions(int taxel_index, std::int64_t presses);

private:
    SkinTopology topo_;
    SensorModel model_;
    ChannelSettings settings_;
    ScanSchedule schedule_;
    std::vector<ChannelDynamics> channels_; // parallel to schedule_.order
    std::uint32_t next_sequence_ = 0;
    std::uint64_t last_timestamp_us_ = 0;
    bool started_ = false;
};

// Sum of all contacts projected onto the topology at time t.
std::vector<double> contact_forces_at(const SkinTopology& topo,
                                      const std::vector<ContactSpec>& contacts,
                                      double t_s);

// Virtual-clock run: exactly round(rate * duration) frames with timestamps
// i / rate.
std::vector<Frame> run_virtual(ScanEngine& engine,
                               const std::vector<ContactSpec>& contacts,
                               double duration_s);

} // namespace skinsim
