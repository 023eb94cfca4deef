#include "skinsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace skinsim {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw std::domain_error(what);
    }
}

} // namespace

TaxelAddress taxel_address(int index) {
    require(index >= 0 && index < kMaxTaxelsPerController,
            "taxel address: index out of range");
    const int per_mux = kCdcsPerMux * kChannelsPerCdc;
    return TaxelAddress{index / per_mux, (index % per_mux) / kChannelsPerCdc,
                        index % kChannelsPerCdc};
}

int taxel_index(const TaxelAddress& address) {
    require(address.mux >= 0 && address.mux < 8 && address.cdc >= 0 &&
                address.cdc < kCdcsPerMux && address.channel >= 0 &&
                address.channel < kChannelsPerCdc,
            "taxel address: fields out of range");
    return address.mux * kCdcsPerMux * kChannelsPerCdc +
           address.cdc * kChannelsPerCdc + address.channel;
}

void SkinTopology::validate() const {
    int counted = 0;
    std::set<int> seen;
    std::set<std::string> links;
    for (const SkinSection& section : sections) {
        require(!section.link_id.empty(), "topology: section needs a link id");
        require(links.insert(section.link_id).second,
                "topology: duplicate link id");
        require(section.taxel_pitch_mm > 0.0, "topology: pitch must be positive");
        require(static_cast<int>(section.taxels.size()) <=
                    section.grid_rows * section.grid_cols,
                "topology: more taxels than grid cells");
        for (const TaxelPlacement& t : section.taxels) {
            require(t.index >= 0 && t.index < kMaxTaxelsPerController,
                    "topology: taxel index exceeds controller capacity");
            require(seen.insert(t.index).second, "topology: address collision");
            require(t.row >= 0 && t.row < section.grid_rows && t.col >= 0 &&
                        t.col < section.grid_cols,
                    "topology: grid cell out of range");
            const double ru = t.u_mm / section.taxel_pitch_mm;
            const double rv = t.v_mm / section.taxel_pitch_mm;
            require(std::abs(ru - std::nearbyint(ru)) < 1e-9 &&
                        std::abs(rv - std::nearbyint(rv)) < 1e-9,
                    "topology: taxel position off the pitch grid");
            ++counted;
        }
    }
    require(counted == total_taxel_count, "topology: taxel count mismatch");
    require(counted <= kMaxTaxelsPerController,
            "topology: controller supports at most 224 taxels");
}

const SkinSection* SkinTopology::find_link(const std::string& link_id) const {
    for (const SkinSection& section : sections) {
        if (section.link_id == link_id) {
            return &section;
        }
    }
    return nullptr;
}

const TaxelPlacement& SkinTopology::placement(int index) const {
    for (const SkinSection& section : sections) {
        for (const TaxelPlacement& t : section.taxels) {
            if (t.index == index) {
                return t;
            }
        }
    }
    throw std::domain_error("topology: unknown taxel index");
}

SkinSection make_grid_section(const std::string& link_id, int rows, int cols,
                              int count, double pitch_mm, int first_index) {
    require(rows > 0 && cols > 0, "section: grid dimensions must be positive");
    require(count > 0 && count <= rows * cols,
            "section: taxel count must fit the grid");
    SkinSection section{link_id, rows, cols, pitch_mm, {}};
    section.taxels.reserve(count);
    for (int i = 0; i < count; ++i) {
        const int row = i / cols;
        const int col = i % cols;
        section.taxels.push_back(TaxelPlacement{first_index + i, row, col,
                                                col * pitch_mm, row * pitch_mm});
    }
    return section;
}

SkinTopology build_reference_topology() {
    SkinTopology topo;
    int next = 0;
    const struct {
        const char* link;
        int rows, cols, count;
    } plan[] = {
        {"upper_arm", 4, 5, 19},
        {"forearm", 4, 5, 19},
        {"wrist_inner", 3, 3, 9},
        {"wrist_outer", 3, 3, 9},
    };
    for (const auto& p : plan) {
        topo.sections.push_back(
            make_grid_section(p.link, p.rows, p.cols, p.count, 30.0, next));
        next += p.count;
    }
    topo.total_taxel_count = next;
    topo.validate();
    return topo;
}

double ContactSpec::force_at(double t_s) const {
    if (force_profile_n.empty() || t_s < 0.0 || t_s > duration_s) {
        return 0.0;
    }
    if (force_profile_n.size() == 1) {
        return force_profile_n.front();
    }
    const double pos =
        t_s / duration_s * static_cast<double>(force_profile_n.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= force_profile_n.size()) {
        return force_profile_n.back();
    }
    const double w = pos - static_cast<double>(lo);
    return force_profile_n[lo] + w * (force_profile_n[lo + 1] - force_profile_n[lo]);
}

void ContactSpec::validate() const {
    require(footprint_radius_mm > 0.0, "contact: radius must be positive");
    require(duration_s > 0.0, "contact: duration must be positive");
    for (double f : force_profile_n) {
        require(f >= 0.0, "contact: forces must be non-negative");
    }
}

namespace {

// Antiderivative of sqrt(r^2 - t^2).
double circle_slice(double t, double r) {
    const double c = std::clamp(t / r, -1.0, 1.0);
    return 0.5 * (t * std::sqrt(std::max(0.0, r * r - t * t)) +
                  r * r * std::asin(c));
}

} // namespace

double circle_rect_overlap(double cx, double cy, double r, double x0, double x1,
                           double y0, double y1) {
    require(r > 0.0, "overlap: radius must be positive");
    // Shift the circle to the origin.
    const double xa = std::max(x0 - cx, -r);
    const double xb = std::min(x1 - cx, r);
    if (xa >= xb) {
        return 0.0;
    }
    const double ya = y0 - cy;
    const double yb = y1 - cy;
    if (ya >= yb) {
        return 0.0;
    }

    // The integrand's min/max branches switch where the circle boundary
    // crosses the rectangle's horizontal edges.
    std::vector<double> cuts{xa, xb};
    for (double y : {ya, yb}) {
        const double d = r * r - y * y;
        if (d > 0.0) {
            const doublexc = std::sqrt(d);
            if (-xc > xa && -xc < xb) cuts.push_back(-xc);
            if (xc > xa && xc < xb) cuts.push_back(xc);
        }
    }
    std::sort(cuts.begin(), cuts.end());

    double area = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double p = cuts[i];
        const double q = cuts[i + 1];
        if (q - p <= 0.0) {
            continue;
        }
        const double mid = 0.5 * (p + q);
        const double s_mid = std::sqrt(std::max(0.0, r * r - mid * mid));
        const bool upper_flat = yb < s_mid;
        const bool lower_flat = ya > -s_mid;
        const double up_mid = upper_flat ? yb : s_mid;
        const double lo_mid = lower_flat ? ya : -s_mid;
        if (up_mid <= lo_mid) {
            continue;
        }
        const double upper =
            upper_flat ? yb * (q - p) : circle_slice(q, r) - circle_slice(p, r);
        const double lower =
            lower_flat ? ya * (q - p) : -(circle_slice(q, r) - circle_slice(p, r));
        area += upper - lower;
    }
    return area;
}

std::vector<double> project_contact(const SkinTopology& topo,
                                    const ContactSpec& spec, double t_s) {
    spec.validate();
    const SkinSection* section = topo.find_link(spec.link_id);
    if (section == nullptr) {
        throw std::invalid_argument("project contact: unknown link '" +
                                    spec.link_id + "'");
    }
    std::vector<double> forces(topo.total_taxel_count, 0.0);
    const double total = spec.force_at(t_s);
    if (total <= 0.0) {
        return forces;
    }

    const double half = section->taxel_pitch_mm / 2.0;
    std::vector<double> overlaps(section->taxels.size());
    double overlap_sum = 0.0;
    for (std::size_t i = 0; i < section->taxels.size(); ++i) {
        const TaxelPlacement& t = section->taxels[i];
        overlaps[i] = circle_rect_overlap(spec.center_u_mm, spec.center_v_mm,
                                          spec.footprint_radius_mm, t.u_mm - half,
                                          t.u_mm + half, t.v_mm - half,
                                          t.v_mm + half);
        overlap_sum += overlaps[i];
    }
    if (overlap_sum <= 0.0) {
        return forces; // footprint misses the instrumented surface entirely
    }
    for (std::size_t i = 0; i < section->taxels.size(); ++i) {
        forces[section->taxels[i].index] = total * overlaps[i] / overlap_sum;
    }
    return forces;
}

ContactEstimate contact_centroid(const SkinTopology& topo,
                                 const std::vector<double>& forces_n,
                                 double threshold_n) {
    require(threshold_n >= 0.0, "centroid: threshold must be non-negative");
    ContactEstimate est;
    double weighted_u = 0.0;
    double weighted_v = 0.0;
    for (const SkinSection& section : topo.sections) {
        for (const TaxelPlacement& t : section.taxels) {
            if (t.index >= static_cast<int>(forces_n.size())) {
                continue;
            }
            const double f = forces_n[t.index];
            if (f > threshold_n) {
                est.activated_taxels.push_back(t.index);
                est.activated_forces_n.push_back(f);
                est.total_force_n += f;
                weighted_u += f * t.u_mm;
                weighted_v += f * t.v_mm;
            }
        }
    }
    if (!est.activated_taxels.empty() && est.total_force_n > 0.0) {
        est.centroid_mm = {weighted_u / est.total_force_n,
                           weighted_v / est.total_force_n};
    }
    return est;
}

} // namespace skinsim
