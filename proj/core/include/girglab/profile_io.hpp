#pragma once

#include <filesystem>
#include <iosfwd>

#include "girglab/meanfield.hpp"

namespace girglab::meanfield {

// CSV with header "w,z,f" (half-space) or "w,rho,g" (radial), one row per node,
// weight-major, 17 significant digits.
void write_profile_csv(std::ostream& os, const Profile& f);
void write_profile_csv(const std::filesystem::path& path, const Profile& f);

// The CSV carries the grid but not the model, so d, tau and k are supplied by the caller.
struct ProfileMeta {
    int d = 2;
    double tau = 3.0;
    double k = 1.0;
    double quad_tol = 1e-8;
    bool truncated_lambda = false;
    double radius = 0.0; // radial only
};

Profile read_profile_csv(std::istream& is, const ProfileMeta& meta);
Profile read_profile_csv(const std::filesystem::path& path, const ProfileMeta& meta);

} // namespace girglab::meanfield
