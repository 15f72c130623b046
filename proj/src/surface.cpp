#include "cissnv/surface.hpp"

#include "cissnv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <limits>

namespace cissnv {

double nv_axis_angle(Termination t) {
    return t == Termination::Diamond001 ? constants::magic_angle : 0.0;
}

SurfaceModel SurfaceModel::make(Termination t, double depth, double mask_diameter, double linker, double separation,
                                double rho_mol) {
    SurfaceModel m{t, nv_axis_angle(t), depth, mask_diameter, linker, separation, rho_mol};
    m.validate();
    return m;
}

void SurfaceModel::validate() const {
    if (!(depth > 0)) throw std::invalid_argument("NV depth must be positive");
    if (mask_diameter < 0) throw std::invalid_argument("mask diameter must be nonnegative");
    if (!(linker > 0)) throw std::invalid_argument("linker length must be positive");
    if (!(separation > 0)) throw std::invalid_argument("radical separation must be positive");
    if (rho_mol < 0) throw std::invalid_argument("molecular density must be nonnegative");
}

SensitivityMap sensitivity_map(double theta_nv, const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("sensitivity map grid is empty");
    const Eigen::Vector3d axis(std::sin(theta_nv), 0.0, std::cos(theta_nv));
    SensitivityMap map{xs, ys, Eigen::MatrixXd(ys.size(), xs.size())};
    for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const Eigen::Vector3d r(xs[i], ys[j], 1.0);
            const double rn = r.norm();
            const double c = r.dot(axis) / rn;
            map.values(j, i) = (1 - 3 * c * c) / (rn * rn * rn);
        }
    const double peak = map.values.cwiseAbs().maxCoeff();
    if (peak > 0) map.values /= peak;
    return map;
}

double angular_factor(double theta_nv) {
    const double f = 1 + 3 * std::cos(2 * theta_nv);
    return std::abs(f) < 1e-14 ? 0.0 : f;
}

namespace {

double kappa_e() { return constants::dipolar_kappa(constants::gamma_nv, constants::gamma_e); }

} // namespace

MonolayerShift monolayer_shift_analytic(const SurfaceModel& m, Handedness h) {
    m.validate();
    const double r = m.mask_radius();
    const double r2 = r * r;
    const double near = m.depth + m.linker;
    const double far = near + m.separation;
    const double bracket = 1 / std::pow(near * near + r2, 1.5) - 1 / std::pow(far * far + r2, 1.5);
    const double shift = static_cast<int>(h) * m.rho_mol * kappa_e() * std::numbers::pi * r2 *
                         angular_factor(m.theta_nv) / 4 * bracket;
    return {shift, shift / std::numbers::sqrt3};
}

double molecule_shift(const SurfaceModel& m, double x, double y, Handedness h) {
    const Eigen::Vector3d axis(std::sin(m.theta_nv), 0.0, std::cos(m.theta_nv));
    const double kappa = kappa_e();
    auto line = [&](double z, double spin_m) {
        const Eigen::Vector3d r(x, y, z);
        const double rn = r.norm();
        const double c = r.dot(axis) / rn;
        return -kappa * (1 - 3 * c * c) / (rn * rn * rn) * spin_m;
    };
    const double m1 = 0.5 * static_cast<int>(h);
    const double near = m.depth + m.linker;
    return line(near, m1) + line(near + m.separation, -m1);
}

namespace {

double polar_quadrature(const SurfaceModel& m, Handedness h, int n_r, int n_phi) {
    const double r_max = m.mask_radius();
    const double dr = r_max / n_r;
    const double dphi = 2 * std::numbers::pi / n_phi;
    double sum = 0;
    for (int i = 0; i < n_r; ++i) {
        const double rho = (i + 0.5) * dr;
        double ring = 0;
        for (int k = 0; k < n_phi; ++k) {
            const double phi = k * dphi;
            ring += molecule_shift(m, rho * std::cos(phi), rho * std::sin(phi), h);
        }
        sum += ring * rho;
    }
    return sum * dr * dphi * m.rho_mol;
}

} // namespace

NumericShift monolayer_shift_numeric(const SurfaceModel& m, Handedness h, double radial_nodes_per_nm,
                                     int angular_nodes) {
    m.validate();
    if (!(radial_nodes_per_nm > 0) || angular_nodes < 4)
        throw std::invalid_argument("quadrature resolution too coarse");
    if (m.mask_radius() == 0 || m.rho_mol == 0) return {0.0, 0.0, true};
    const int n_r = std::max(4, static_cast<int>(std::ceil(m.mask_radius() / 1e-9 * radial_nodes_per_nm)));
    const double fine = polar_quadrature(m, h, n_r, angular_nodes);
    const double coarse = polar_quadrature(m, h, std::max(2, n_r / 2), std::max(4, angular_nodes / 2));
    const double rel = fine != 0 ? std::abs(fine - coarse) / std::abs(fine) : std::abs(fine - coarse);
    return {fine, rel, rel < 5e-3};
}

double AnchorField::min_pair_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            best = std::min(best, (positions[i] - positions[j]).norm());
    return best;
}

namespace {

void check_anchor_inputs(double rho_anchor, double d_min, double width, double height) {
    if (rho_anchor < 0) throw std::invalid_argument("anchor density must be nonnegative");
    if (d_min < 0) throw std::invalid_argument("d_min must be nonnegative");
    if (!(width > 0) || !(height > 0)) throw std::invalid_argument("sampling area is degenerate");
    const double footprint = std::numbers::pi * d_min * d_min / 4;
    if (footprint > 0 && width * height < 1e3 * footprint)
        throw std::invalid_argument("sampling area holds fewer than 1000 molecular footprints");
}

/// Kept anchors are at least d_min apart, so with cells of side d_min/sqrt2 each cell holds
/// at most one of them and any conflict lies within two cells.
class ExclusionGrid {
public:
    ExclusionGrid(double d_min, double width, double height)
        : cell_(d_min / std::numbers::sqrt2), d2_(d_min * d_min),
          nx_(static_cast<long>(std::ceil(width / cell_)) + 1), ny_(static_cast<long>(std::ceil(height / cell_)) + 1),
          slots_(static_cast<std::size_t>(nx_ * ny_), -1) {}

    bool try_insert(const Point2& p, std::vector<Point2>& kept) {
        const long cx = cell_of(p.x(), nx_), cy = cell_of(p.y(), ny_);
        for (long y = std::max(0L, cy - 2); y <= std::min(ny_ - 1, cy + 2); ++y)
            for (long x = std::max(0L, cx - 2); x <= std::min(nx_ - 1, cx + 2); ++x) {
                const int k = slots_[static_cast<std::size_t>(y * nx_ + x)];
                if (k >= 0 && (p - kept[static_cast<std::size_t>(k)]).squaredNorm() < d2_) return false;
            }
        slots_[static_cast<std::size_t>(cy * nx_ + cx)] = static_cast<int>(kept.size());
        kept.push_back(p);
        return true;
    }

private:
    long cell_of(double v, long n) const { return std::clamp(static_cast<long>(v / cell_), 0L, n - 1); }

    double cell_, d2_;
    long nx_, ny_;
    std::vector<int> slots_;
};

AnchorField anchor_trial(double rho_anchor, double d_min, double width, double height, std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(std::llround(rho_anchor * width * height));
    std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, height);
    AnchorField field{{}, width, height, d_min};
    if (d_min == 0) {
        field.positions.reserve(n);
        for (std::size_t i = 0; i < n; ++i) field.positions.emplace_back(ux(rng), uy(rng));
        return field;
    }
    // Independent uniform draws are already in random order.
    ExclusionGrid grid(d_min, width, height);
    for (std::size_t i = 0; i < n; ++i) grid.try_insert(Point2(ux(rng), uy(rng)), field.positions);
    return field;
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

} // namespace

AnchorField sample_anchor_field(double rho_anchor, double d_min, double width, double height, std::uint64_t seed) {
    check_anchor_inputs(rho_anchor, d_min, width, height);
    auto rng = trial_rng(seed, 0);
    return anchor_trial(rho_anchor, d_min, width, height, rng);
}

DensityEstimate sample_anchor_density(double rho_anchor, double d_min, double width, double height,
                                      std::size_t trials, std::uint64_t seed) {
    check_anchor_inputs(rho_anchor, d_min, width, height);
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    std::vector<double> densities(trials);
    parallel_for(trials, [&](std::size_t k) {
        auto rng = trial_rng(seed, k);
        densities[k] = anchor_trial(rho_anchor, d_min, width, height, rng).density();
    });
    double mean = 0;
    for (double d : densities) mean += d;
    mean /= static_cast<double>(trials);
    double var = 0;
    for (double d : densities) var += (d - mean) * (d - mean);
    const double sd = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
    return {mean, sd, trials, seed};
}

std::vector<Point2> place_molecules(const AnchorField& field, double mask_diameter, const Point2& center) {
    if (mask_diameter < 0) throw std::invalid_argument("mask diameter must be nonnegative");
    std::vector<Point2> out;
    const double r2 = mask_diameter * mask_diameter / 4;
    for (const Point2& p : field.positions)
        if (mask_diameter > 0 && (p - center).squaredNorm() <= r2) out.push_back(p);
    return out;
}

double discrete_shift(const SurfaceModel& m, const std::vector<Point2>& positions, const Point2& nv_xy, Handedness h) {
    double sum = 0;
    for (const Point2& p : positions) sum += molecule_shift(m, p.x() - nv_xy.x(), p.y() - nv_xy.y(), h);
    return sum;
}

} // namespace cissnv
