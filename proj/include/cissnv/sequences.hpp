// Piecewise-constant drive programs: Lee-Goldburg and frequency-switched LG
// decoupling of the radical pair, and NV pi pulses.
#pragma once

#include "cissnv/spinmath.hpp"

#include <string>
#include <vector>

namespace cissnv {

enum class DriveTarget { None, RadicalPair, Nv };

/// One constant-drive interval. In the rotating frame of the target the drive reads
/// amplitude (cos(phase) Sx + sin(phase) Sy) + offset Sz for each radical spin.
/// For the NV, amplitude is the Rabi frequency on |0> <-> |-1> and offset is the
/// carrier detuning, entering as offset * Tz.
struct Segment {
    std::string label;
    double duration = 0;  // s
    DriveTarget target = DriveTarget::None;
    double amplitude = 0; // rad/s
    double offset = 0;    // rad/s
    double phase = 0;     // rad

    bool same_drive(const Segment& o) const noexcept {
        return target == o.target && amplitude == o.amplitude && offset == o.offset && phase == o.phase;
    }
};

struct Schedule {
    std::vector<Segment> segments;
    double total_duration = 0;
    /// Length of one LG rotation; averaging windows snap to multiples of it. 0 = no snapping.
    double period = 0;
    bool partial_final_segment = false;
    std::vector<std::string> warnings;

    void validate() const;
};

struct LGParams {
    double omega1 = 0;
    double omega_off = 0;
    double omega_eff = 0;
    Vec3 axis = Vec3::UnitZ(); // effective-field direction of the phase-0 segment

    /// One full rotation about the effective field.
    double period() const;
};

LGParams lg_params(double omega1);

/// Alternating +offset/phase 0 and -offset/phase pi segments of one LG period each.
/// omega1 == 0 gives a single free-evolution segment.
Schedule fslg_schedule(double omega1, double total);

/// Continuous-wave LG with a fixed effective axis, for comparison with FSLG.
Schedule lg_schedule(double omega1, double total);

/// Single NV segment with Rabi frequency pi / duration.
Schedule pi_pulse(double duration, double detuning);

/// Drive Hamiltonian of a segment on the given register. Radical-pair drives act on the
/// sites labelled radical-1/radical-2, NV drives on the site labelled nv.
ComplexMatrix drive_hamiltonian(const Segment& seg, const SpinRegister& reg);

/// One line per segment: label, duration_ns, amplitude_MHz, offset_MHz, phase_rad.
std::string to_text(const Schedule& s);

} // namespace cissnv
