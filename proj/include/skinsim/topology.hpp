#pragma once

// Skin layout for a multi-link arm: sections of taxels on a pitch grid,
// mux/CDC/channel addressing, projection of circular contact footprints onto
// taxels and force-weighted contact localization. Each link is modeled as an
// unwrapped 2D surface; taxel centers sit on integer multiples of the pitch.

#include <optional>
#include <string>
#include <vector>

namespace skinsim {

// One controller fans out over 8 multiplexers of 7 CDCs with 4 channels each.
inline constexpr int kMaxTaxelsPerController = 224;
inline constexpr int kCdcsPerMux = 7;
inline constexpr int kChannelsPerCdc = 4;

struct TaxelAddress {
    int mux;
    int cdc;
    int channel;

    bool operator==(const TaxelAddress&) const = default;
};

// Bijective packing of a flat taxel index into (mux, cdc, channel).
TaxelAddress taxel_address(int index);
int taxel_index(const TaxelAddress& address);

struct TaxelPlacement {
    int index; // global, equals the address-packing index
    int row;
    int col;
    double u_mm;
    double v_mm;
};

struct SkinSection {
    std::string link_id;
    int grid_rows;
    int grid_cols;
    double taxel_pitch_mm = 30.0;
    std::vector<TaxelPlacement> taxels;
};

struct SkinTopology {
    std::vector<SkinSection> sections;
    int total_taxel_count = 0;

    // Throws std::domain_error on address collisions, controller overflow or
    // off-grid positions.
    void validate() const;

    const SkinSection* find_link(const std::string& link_id) const;
    const TaxelPlacement& placement(int index) const;
};

// Builds a section with `count` taxels filled row-major into a rows x cols
// grid, indices starting at first_index.
SkinSection make_grid_section(const std::string& link_id, int rows, int cols,
                              int count, double pitch_mm, int first_index);

// The reference whole-arm layout: four sections of 19 + 19 + 9 + 9 taxels.
SkinTopology build_reference_topology();

// A circular pressing footprint on one link with a sampled force profile over
// [0, duration]; the profile is linearly interpolated and zero outside.
struct ContactSpec {
    std::string link_id;
    double center_u_mm;
    double center_v_mm;
    double footprint_radius_mm;
    std::vector<double> force_profile_n;
    double duration_s;

    double force_at(double t_s) const;

    // Throws std::domain_error on a non-positive radius or negative forces.
    void validate() const;
};

// Exact area of intersection between the circle (cx, cy, r) and the
// axis-aligned rectangle [x0, x1] x [y0, y1].
double circle_rect_overlap(double cx, double cy, double r, double x0, double x1,
                           double y0, double y1);

// Distributes the instantaneous contact force over the link's taxels in
// proportion to footprint/taxel overlap area; the returned per-taxel forces
// sum to the total whenever the footprint overlaps any taxel. Indexed by
// global taxel index. Throws std::invalid_argument for an unknown link.
std::vector<double> project_contact(const SkinTopology& topo,
                                    const ContactSpec& spec, double t_s);

struct ContactEstimate {
    std::vector<int> activated_taxels;
    std::vector<double> activated_forces_n; // parallel to activated_taxels
    std::optional<std::pair<double, double>> centroid_mm;
    double total_force_n = 0.0;

    bool has_contact() const { return centroid_mm.has_value(); }
};

// Taxels above the threshold and the force-weighted mean of their centers.
// No activation yields a no-contact estimate rather than a zero position.
ContactEstimate contact_centroid(const SkinTopology& topo,
                                 const std::vector<double>& forces_n,
                                 double threshold_n);

} // namespace skinsim
