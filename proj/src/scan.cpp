#include "skinsim/scan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skinsim {

ScanSchedule ScanSchedule::for_topology(const SkinTopology& topo, double rate_hz) {
    ScanSchedule schedule;
    schedule.rate_hz = rate_hz;
    schedule.order.reserve(topo.total_taxel_count);
    for (const SkinSection& section : topo.sections) {
        for (const TaxelPlacement& t : section.taxels) {
            schedule.order.push_back(t.index);
        }
    }
    std::sort(schedule.order.begin(), schedule.order.end());
    schedule.validate();
    return schedule;
}

void ScanSchedule::validate() const {
    if (rate_hz < 100.0 || rate_hz > 400.0) {
        throw std::domain_error("scan schedule: rate must lie in [100, 400] Hz");
    }
    if (order.empty()) {
        throw std::domain_error("scan schedule: empty taxel order");
    }
}

ScanEngine::ScanEngine(SkinTopology topo, SensorModel model,
                       ChannelSettings settings)
    : topo_(std::move(topo)),
      model_(model),
      settings_(settings),
      schedule_(ScanSchedule::for_topology(topo_, settings.channel.sample_rate_hz)) {
    topo_.validate();
    model_.coeffs.validate();
    const double baseline = model_.baseline_pf();
    channels_.reserve(schedule_.order.size());
    for (std::size_t slot = 0; slot < schedule_.order.size(); ++slot) {
        const std::uint64_t seed = derive_seed(
            settings_.channel.rng_seed,
            static_cast<std::uint64_t>(schedule_.order[slot]));
        channels_.emplace_back(settings_.channel, settings_.toggles, baseline,
                               seed, settings_.loop_gap_fraction,
                               settings_.relaxation_rate_hz,
                               settings_.gain_decay_per_1000);
    }
}

double ScanEngine::quantized_baseline_pf() const {
    return quantize_clamp(model_.baseline_pf(), settings_.channel);
}

std::size_t ScanEngine::frame_slot(int taxel_index) const {
    const auto it =
        std::lower_bound(schedule_.order.begin(), schedule_.order.end(), taxel_index);
    if (it == schedule_.order.end() || *it != taxel_index) {
        throw std::domain_error("scan engine: unknown taxel index");
    }
    return static_cast<std::size_t>(it - schedule_.order.begin());
}

void ScanEngine::add_interactions(int taxel_index, std::int64_t presses) {
    channels_[frame_slot(taxel_index)].add_interactions(presses);
}

Frame ScanEngine::scan(const std::vector<double>& forces_n,
                       std::uint64_t timestamp_us) {
    if (forces_n.size() < schedule_.order.size()) {
        throw std::domain_error("scan engine: force state does not cover topology");
    }
    if (started_ && timestamp_us < last_timestamp_us_) {
        throw std::domain_error("scan engine: timestamps must not decrease");
    }
    Frame frame;
    frame.sequence = next_sequence_++;
    frame.timestamp_us = timestamp_us;
    frame.readings.reserve(schedule_.order.size());
    const double dt = dt_s();
    for (std::size_t slot = 0; slot < schedule_.order.size(); ++slot) {
        const int taxel = schedule_.order[slot];
        const double deflection =
            force_to_deflection(model_.stiffness, forces_n[taxel]);
        DeformationState state;
        state.axial_deflection_mm = deflection;
        const double true_c = combined_capacitance(model_.geometry, model_.coeffs,
                                                   state, model_.stretch_sensitivity);
        const double out = channels_[slot].process(true_c, dt);
        frame.readings.push_back(
            static_cast<std::int32_t>(std::lround(out * 2000.0)));
    }
    started_ = true;
    last_timestamp_us_ = timestamp_us;
    return frame;
}

std::vector<double> contact_forces_at(const SkinTopology& topo,
                                      const std::vector<ContactSpec>& contacts,
                                      double t_s) {
    std::vector<double> forces(topo.total_taxel_count, 0.0);
    for (const ContactSpec& contact : contacts) {
        const std::vector<double> part = project_contact(topo, contact, t_s);
        for (std::size_t i = 0; i < forces.size(); ++i) {
            forces[i] += part[i];
        }
    }
    return forces;
}

std::vector<Frame> run_virtual(ScanEngine& engine,
                               const std::vector<ContactSpec>& contacts,
                               double duration_s) {
    if (duration_s <= 0.0) {
        throw std::domain_error("virtual run: duration must be positive");
    }
    const double rate = engine.schedule().rate_hz;
    const auto ticks = static_cast<std::int64_t>(std::llround(duration_s * rate));
    std::vector<Frame> frames;
    frames.reserve(ticks);
    for (std::int64_t i = 0; i < ticks; ++i) {
        const double t = static_cast<double>(i) / rate;
        const std::vector<double> forces =
            contact_forces_at(engine.topology(), contacts, t);
        frames.push_back(
            engine.scan(forces, static_cast<std::uint64_t>(
                                    std::llround(t * 1e6))));
    }
    return frames;
}

} // namespace skinsim
