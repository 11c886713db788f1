#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "fgsim/errors.hpp"
#include "fgsim/exotic.hpp"
#include "fgsim/integrator.hpp"
#include "fgsim/levitation.hpp"
#include "fgsim/spectral.hpp"

namespace fgsim {

// Shortest scientific form that parses back to the same bits, so reruns and
// round trips are byte exact.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific);
    return std::string(buf, res.ptr);
}

// Write-to-temp then rename, so readers never observe a half-written file
// and a crashed run leaves the previous output intact.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// Column layout: t,nx,ny,nz,jx,jy,jz,x,y,z,flux. The flux column is empty
// unless a readout signal of matching length is supplied.
inline std::string trajectory_csv(const Trajectory& traj, const std::vector<double>* flux = nullptr) {
    if (flux && flux->size() != traj.size())
        throw ParameterError("trajectory_csv: flux length does not match trajectory");
    std::string s = "t,nx,ny,nz,jx,jy,jz,x,y,z,flux\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const FGState& st = traj.y[i];
        s += format_double(traj.t[i]);
        for (const double v : {st.n.x, st.n.y, st.n.z, st.j.x, st.j.y, st.j.z,
                               st.r.x, st.r.y, st.r.z}) {
            s += ',';
            s += format_double(v);
        }
        s += ',';
        if (flux) s += format_double((*flux)[i]);
        s += '\n';
    }
    return s;
}

// Missing peaks (merged or below floor) leave their fields empty.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string s = "omega_L,peak1,amp1,peak2,amp2,brick_peak,brick_amp\n";
    auto put = [&s](const std::optional<SpectralPeak>& p) {
        s += ',';
        if (p) s += format_double(p->omega_rad_s);
        s += ',';
        if (p) s += format_double(p->amplitude);
    };
    for (const SweepRow& r : rows) {
        s += format_double(r.omega_L_rad_s);
        put(r.fg_low);
        put(r.fg_high);
        put(r.brick);
        s += '\n';
    }
    return s;
}

inline std::string suppression_csv(const std::vector<SuppressionPoint>& pts) {
    std::string s = "radius_m,ratio,z_eq_m,B_image_T\n";
    for (const SuppressionPoint& p : pts) {
        s += format_double(p.radius_m);
        s += ',';
        s += format_double(p.ratio);
        s += ',';
        s += format_double(p.z_eq_m);
        s += ',';
        s += format_double(p.B_image_T);
        s += '\n';
    }
    return s;
}

inline std::string exclusion_csv(const ExclusionCurve& curve) {
    std::string s = "boson_mass_eV,min_coupling\n";
    for (const ExclusionPoint& p : curve.points) {
        s += format_double(p.boson_mass_eV);
        s += ',';
        s += format_double(p.min_coupling);
        s += '\n';
    }
    return s;
}

}  // namespace fgsim
