#include "cli.hpp"

#include "cissnv/odmr.hpp"
#include "cissnv/surface.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cissnv::cli {
namespace {

constexpr double deg = std::numbers::pi / 180;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}
std::string fmt(const std::string& s) { return s; }
std::string fmt(bool b) { return b ? "true" : "false"; }
std::string fmt(std::size_t v) { return std::to_string(v); }

/// One subcommand plus the ordered list of its options, echoed as the output header.
class Experiment {
public:
    Experiment(CLI::App& parent, const std::string& name, const std::string& description)
        : app_(parent.add_subcommand(name, description)), name_(name) {
        app_->add_option("--config", config_, "key = value file; command-line flags take precedence");
        app_->add_option("--out", out_, "output table path, '-' for stdout")->capture_default_str();
    }

    template <typename T>
    CLI::Option* option(const std::string& key, T& var, const std::string& description) {
        echo_.emplace_back(key, [&var] { return fmt(var); });
        return app_->add_option("--" + key, var, description)->capture_default_str();
    }

    CLI::Option* flag(const std::string& key, bool& var, const std::string& description) {
        echo_.emplace_back(key, [&var] { return fmt(var); });
        return app_->add_flag("--" + key, var, description);
    }

    void write_header(std::ostream& os) const {
        os << "# experiment = " << name_ << '\n';
        for (const auto& [key, value] : echo_) os << "# " << key << " = " << value() << '\n';
    }

    CLI::App* app() const noexcept { return app_; }
    const std::string& out_path() const noexcept { return out_; }

    std::function<void(std::ostream&)> body;

private:
    CLI::App* app_;
    std::string name_;
    std::string config_;
    std::string out_ = "-";
    std::vector<std::pair<std::string, std::function<std::string()>>> echo_;
};

void write_row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << '\t';
        os << fmt(v);
        first = false;
    }
    os << '\n';
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw std::invalid_argument(key + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw std::invalid_argument(key + ": list is empty");
    return out;
}

std::vector<double> stepped_range(double lo, double hi, double step, const std::string& key) {
    if (!(step > 0)) throw std::invalid_argument(key + "-step must be positive");
    if (hi < lo) throw std::invalid_argument(key + "-max must be at least " + key + "-min");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> out;
    for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
    return out;
}

Decoupling decoupling_from(const std::string& s) {
    if (s == "none") return Decoupling::None;
    if (s == "lg") return Decoupling::LG;
    return Decoupling::FSLG;
}

DipolarMode dipolar_from(const std::string& s) {
    if (s == "full") return DipolarMode::Full;
    if (s == "secular") return DipolarMode::SecularOnly;
    return DipolarMode::SecularPlusPseudosecular;
}

Termination termination_from(const std::string& s) {
    return s == "001" ? Termination::Diamond001 : Termination::Diamond111;
}

struct StateOptions {
    double alpha_deg = 45, beta_deg = 0, lambda = 1;

    void attach(Experiment& e) {
        e.option("alpha-deg", alpha_deg, "mixing angle alpha (45 = P_R, -45 = P_S, 0 = S, 90 = T0)");
        e.option("beta-deg", beta_deg, "relative phase beta");
        e.option("lambda", lambda, "coherence Lambda in [0, 1]");
    }
    InitialStateParams params() const { return {alpha_deg * deg, beta_deg * deg, lambda}; }
};

struct PairOptions {
    double s_nm = 2, theta_rp_deg = 0, bz_mt = 40, dg_ppm = 0;
    std::string dipolar = "secular+pseudosecular";
    std::string decoupling = "fslg";

    void attach(Experiment& e) {
        e.option("s-nm", s_nm, "radical separation")->check(CLI::PositiveNumber);
        e.option("theta-rp-deg", theta_rp_deg, "pair axis to B angle");
        e.option("bz-mt", bz_mt, "static field")->check(CLI::NonNegativeNumber);
        e.option("dg-ppm", dg_ppm, "g-factor difference relative to g_e");
        e.option("dipolar", dipolar, "dipolar truncation")
            ->check(CLI::IsMember({"full", "secular", "secular+pseudosecular"}));
        e.option("decoupling", decoupling, "decoupling sequence")->check(CLI::IsMember({"none", "lg", "fslg"}));
    }
    RadicalPairGeometry geometry() const { return RadicalPairGeometry::from_angle(s_nm * units::nm, theta_rp_deg * deg); }
    GFactorPair g() const { return GFactorPair::from_delta_ppm(dg_ppm); }
};

SpinState pair_initial_state(const StateOptions& st, const RadicalPairGeometry& geom) {
    return rotate_to_axis(make_initial_state(st.params()), geom.axis);
}

/// Holds every experiment's option storage so the echo lambdas stay valid.
struct Options {
    struct {
        StateOptions state;
        PairOptions pair;
        double w_min = 0, w_max = 50, w_step = 1, duration_us = 1, dt_ns = 0.05;
    } sweep;
    struct {
        StateOptions state;
        PairOptions pair;
        double omega1_mhz = 50, duration_us = 1, dt_ns = 0.05;
        std::size_t stride = 1;
    } evolve;
    struct {
        StateOptions state;
        double depth_nm = 5, s_nm = 2, theta_deg = 0, bz_mt = 40, dg_ppm = 0, omega1_mhz = 50;
        double duration_us = 4, span_khz = 1000, step_khz = 10, dt_ns = 0.05;
        std::string decoupling = "fslg", lab_drive = "circular";
        bool no_pair = false, lab = false;
    } odmr;
    struct {
        std::string termination = "111", handedness = "R";
        double rho_nm2 = 0.15, linker_nm = 1, s_nm = 2;
        double d_min = 1, d_max = 20, d_step = 1, m_min = 0, m_max = 50, m_step = 1;
        bool numeric = false;
    } monolayer;
    struct {
        std::string rho_list = "0.1,0.25,0.5,1,2,3,4,5", dmin_list = "0.25,0.5,1,2";
        std::size_t trials = 1000;
        std::uint64_t seed = 1;
        double width_nm = 100, height_nm = 100;
        std::string field_out;
        double field_rho = 5, field_dmin = 2;
    } mc;
    struct {
        std::string termination = "111";
        double extent = 2;
        std::size_t points = 81;
    } map;
};

void add_decouple_sweep(CLI::App& app, Options& o, std::vector<std::unique_ptr<Experiment>>& exps) {
    auto& e = *exps.emplace_back(std::make_unique<Experiment>(app, "decouple-sweep",
                                                              "time-averaged occupations and p versus drive strength"));
    auto& c = o.sweep;
    c.state.attach(e);
    c.pair.attach(e);
    e.option("omega1-min-mhz", c.w_min, "first drive amplitude")->check(CLI::NonNegativeNumber);
    e.option("omega1-max-mhz", c.w_max, "last drive amplitude")->check(CLI::NonNegativeNumber);
    e.option("omega1-step-mhz", c.w_step, "drive amplitude step")->check(CLI::PositiveNumber);
    e.option("duration-us", c.duration_us, "evolution time per point")->check(CLI::PositiveNumber);
    e.option("dt-ns", c.dt_ns, "time step")->check(CLI::PositiveNumber);
    e.body = [&c](std::ostream& os) {
        const auto geom = c.pair.geometry();
        std::vector<double> w;
        for (double x : stepped_range(c.w_min, c.w_max, c.w_step, "omega1")) w.push_back(x * units::MHz);
        const SweepOptions opts{c.pair.g(), c.pair.bz_mt * units::mT, dipolar_from(c.pair.dipolar),
                                decoupling_from(c.pair.decoupling)};
        const SweepResult r = decoupling_sweep(pair_initial_state(c.state, geom), geom, w, c.duration_us * units::us,
                                               c.dt_ns * units::ns, opts);
        os << "omega1_MHz\tc_Tp\tc_PR\tc_PS\tc_Tm\tp\n";
        for (std::size_t i = 0; i < r.omega1.size(); ++i) {
            const Occupations& o = r.cbar[i];
            write_row(os, {r.omega1[i] / units::MHz, o.t_plus, o.p_r, o.p_s, o.t_minus, r.pbar[i]});
        }
    };
}

void add_evolve(CLI::App& app, Options& o, std::vector<std::unique_ptr<Experiment>>& exps) {
    auto& e = *exps.emplace_back(
        std::make_unique<Experiment>(app, "evolve", "Zeeman occupations and p versus time at one drive strength"));
    auto& c = o.evolve;
    c.state.attach(e);
    c.pair.attach(e);
    e.option("omega1-mhz", c.omega1_mhz, "drive amplitude")->check(CLI::NonNegativeNumber);
    e.option("duration-us", c.duration_us, "evolution time")->check(CLI::PositiveNumber);
    e.option("dt-ns", c.dt_ns, "time step")->check(CLI::PositiveNumber);
    e.option("stride", c.stride, "write every n-th step")->check(CLI::PositiveNumber);
    e.body = [&c](std::ostream& os) {
        const auto geom = c.pair.geometry();
        const auto terms =
            radical_pair_static_terms(geom, c.pair.g(), c.pair.bz_mt * units::mT, dipolar_from(c.pair.dipolar));
        const Schedule sched =
            decoupling_schedule(decoupling_from(c.pair.decoupling), c.omega1_mhz * units::MHz, c.duration_us * units::us);
        const Trajectory traj = propagate(pair_initial_state(c.state, geom), terms, sched, c.dt_ns * units::ns);
        const auto& d = traj.diagnostics;
        os << "# max_trace_error = " << fmt(d.max_trace_error) << '\n'
           << "# max_hermiticity_error = " << fmt(d.max_hermiticity_error) << '\n'
           << "# min_eigenvalue = " << fmt(d.min_eigenvalue) << '\n'
           << "# max_unitarity_error = " << fmt(d.max_unitarity_error) << '\n'
           << "# time_averaged_p = " << fmt(time_averaged_polarization(traj)) << '\n';
        for (const auto& w : sched.warnings) os << "# warning: " << w << '\n';
        os << "time_ns\tc_Tp\tc_PR\tc_PS\tc_Tm\tp\n";
        for (std::size_t k = 0; k < traj.times.size(); k += c.stride) {
            const Occupations& o = traj.occupations[k];
            write_row(os, {traj.times[k] / units::ns, o.t_plus, o.p_r, o.p_s, o.t_minus, traj.polarization[k]});
        }
    };
}

void add_odmr(CLI::App& app, Options& o, std::vector<std::unique_ptr<Experiment>>& exps) {
    auto& e = *exps.emplace_back(std::make_unique<Experiment>(app, "odmr", "pulsed ODMR spectrum of the NV"));
    auto& c = o.odmr;
    c.state.attach(e);
    e.option("depth-nm", c.depth_nm, "NV to radical-1 distance")->check(CLI::PositiveNumber);
    e.option("s-nm", c.s_nm, "radical separation")->check(CLI::PositiveNumber);
    e.option("theta-deg", c.theta_deg, "stack axis to B angle");
    e.option("bz-mt", c.bz_mt, "static field")->check(CLI::NonNegativeNumber);
    e.option("dg-ppm", c.dg_ppm, "g-factor difference relative to g_e");
    e.option("omega1-mhz", c.omega1_mhz, "decoupling amplitude")->check(CLI::NonNegativeNumber);
    e.option("decoupling", c.decoupling, "decoupling sequence")->check(CLI::IsMember({"none", "lg", "fslg"}));
    e.option("duration-us", c.duration_us, "pi-pulse length")->check(CLI::PositiveNumber);
    e.option("span-khz", c.span_khz, "sweep half-width")->check(CLI::NonNegativeNumber);
    e.option("step-khz", c.step_khz, "sweep step")->check(CLI::PositiveNumber);
    e.flag("no-pair", c.no_pair, "bare NV without the radical pair");
    e.flag("lab", c.lab, "laboratory-frame radical pair with a time-dependent drive");
    e.option("lab-drive", c.lab_drive, "drive polarization of the lab-frame path")
        ->check(CLI::IsMember({"circular", "linear"}));
    e.option("dt-ns", c.dt_ns, "time step of the lab-frame path")->check(CLI::PositiveNumber);
    e.body = [&c](std::ostream& os) {
        OdmrConfig cfg;
        cfg.state = c.state.params();
        cfg.radical_pair_present = !c.no_pair;
        cfg.geom = SensingGeometry::collinear_stack(c.depth_nm * units::nm, c.s_nm * units::nm);
        cfg.geom.theta1 = cfg.geom.theta2 = c.theta_deg * deg;
        cfg.g = GFactorPair::from_delta_ppm(c.dg_ppm);
        cfg.bz = c.bz_mt * units::mT;
        cfg.omega1 = c.omega1_mhz * units::MHz;
        cfg.decoupling = decoupling_from(c.decoupling);
        cfg.pulse_duration = c.duration_us * units::us;
        cfg.detunings = detuning_grid(c.span_khz * units::kHz, c.step_khz * units::kHz);
        const Spectrum spec =
            c.lab ? simulate_odmr_lab(cfg, c.dt_ns * units::ns,
                                      c.lab_drive == "linear" ? LabDrive::Linear : LabDrive::Circular)
                  : simulate_odmr(cfg);
        os << "# asymmetry = " << fmt(spectrum_asymmetry(spec)) << '\n';
        for (const auto& w : spec.warnings) os << "# warning: " << w << '\n';
        os << "detuning_kHz\tcontrast\n";
        for (std::size_t i = 0; i < spec.detunings.size(); ++i)
            write_row(os, {spec.detunings[i] / units::kHz, spec.contrast[i]});
    };
}

void add_monolayer(CLI::App& app, Options& o, std::vector<std::unique_ptr<Experiment>>& exps) {
    auto& e = *exps.emplace_back(
        std::make_unique<Experiment>(app, "monolayer", "masked-monolayer NV shift over depth and mask diameter"));
    auto& c = o.monolayer;
    e.option("termination", c.termination, "diamond surface")->check(CLI::IsMember({"001", "111"}));
    e.option("handedness", c.handedness, "polarized pair state, R or S")->check(CLI::IsMember({"R", "S"}));
    e.option("rho-mol-nm2", c.rho_nm2, "molecules per nm^2")->check(CLI::NonNegativeNumber);
    e.option("linker-nm", c.linker_nm, "surface to first radical")->check(CLI::PositiveNumber);
    e.option("s-nm", c.s_nm, "radical separation")->check(CLI::PositiveNumber);
    e.option("depth-min-nm", c.d_min, "first NV depth")->check(CLI::PositiveNumber);
    e.option("depth-max-nm", c.d_max, "last NV depth")->check(CLI::PositiveNumber);
    e.option("depth-step-nm", c.d_step, "NV depth step")->check(CLI::PositiveNumber);
    e.option("mask-min-nm", c.m_min, "first mask diameter")->check(CLI::NonNegativeNumber);
    e.option("mask-max-nm", c.m_max, "last mask diameter")->check(CLI::NonNegativeNumber);
    e.option("mask-step-nm", c.m_step, "mask diameter step")->check(CLI::PositiveNumber);
    e.flag("numeric", c.numeric, "add the quadrature column");
    e.body = [&c](std::ostream& os) {
        const Handedness h = c.handedness == "S" ? Handedness::S : Handedness::R;
        os << "depth_nm\tmask_nm\tshift_kHz\tshift_lg_kHz" << (c.numeric ? "\tshift_numeric_kHz" : "") << '\n';
        for (double d : stepped_range(c.d_min, c.d_max, c.d_step, "depth"))
            for (double m : stepped_range(c.m_min, c.m_max, c.m_step, "mask")) {
                const auto model = SurfaceModel::make(termination_from(c.termination), d * units::nm, m * units::nm,
                                                      c.linker_nm * units::nm, c.s_nm * units::nm, c.rho_nm2 * 1e18);
                const MonolayerShift s = monolayer_shift_analytic(model, h);
                os << fmt(d) << '\t' << fmt(m) << '\t' << fmt(s.shift / units::kHz) << '\t' << fmt(s.shift_lg / units::kHz);
                if (c.numeric) os << '\t' << fmt(monolayer_shift_numeric(model, h).shift / units::kHz);
                os << '\n';
            }
    };
}

void add_mc_density(CLI::App& app, Options& o, std::vector<std::unique_ptr<Experiment>>& exps) {
    auto& e = *exps.emplace_back(
        std::make_unique<Experiment>(app, "mc-density", "molecular density after footprint exclusion"));
    auto& c = o.mc;
    e.option("rho-anchor-nm2", c.rho_list, "comma-separated anchor densities per nm^2");
    e.option("d-min-nm", c.dmin_list, "comma-separated footprint diameters");
    e.option("trials", c.trials, "random geometries per point")->check(CLI::PositiveNumber);
    e.option("width-nm", c.width_nm, "sampling area width")->check(CLI::PositiveNumber);
    e.option("height-nm", c.height_nm, "sampling area height")->check(CLI::PositiveNumber);
    e.option("field-out", c.field_out, "also write one anchor field to this path");
    e.option("field-rho-anchor-nm2", c.field_rho, "anchor density of the exported field")
        ->check(CLI::NonNegativeNumber);
    e.option("field-d-min-nm", c.field_dmin, "footprint of the exported field")->check(CLI::NonNegativeNumber);
    e.option("seed", c.seed, "base seed; trial k uses (seed, k)");
    e.body = [&c, &e](std::ostream& os) {
        const auto rhos = parse_list(c.rho_list, "rho-anchor-nm2");
        const auto dmins = parse_list(c.dmin_list, "d-min-nm");
        const double w = c.width_nm * units::nm, h = c.height_nm * units::nm;
        os << "d_min_nm\trho_anchor_nm2\trho_mol_nm2\trho_mol_sd_nm2\n";
        for (double dm : dmins)
            for (double r : rhos) {
                const DensityEstimate est = sample_anchor_density(r * 1e18, dm * units::nm, w, h, c.trials, c.seed);
                write_row(os, {dm, r, est.mean * 1e-18, est.stddev * 1e-18});
            }
        if (c.field_out.empty()) return;
        const AnchorField f = sample_anchor_field(c.field_rho * 1e18, c.field_dmin * units::nm, w, h, c.seed);
        std::ostringstream fs;
        e.write_header(fs);
        fs << "x_nm\ty_nm\n";
        for (const Point2& p : f.positions) write_row(fs, {p.x() / units::nm, p.y() / units::nm});
        std::ofstream file(c.field_out);
        if (!(file << fs.str())) throw std::runtime_error("cannot write " + c.field_out);
    };
}

void add_sensitivity_map(CLI::App& app, Options& o, std::vector<std::unique_ptr<Experiment>>& exps) {
    auto& e = *exps.emplace_back(
        std::make_unique<Experiment>(app, "sensitivity-map", "normalized NV sensitivity over the surface plane"));
    auto& c = o.map;
    e.option("termination", c.termination, "diamond surface")->check(CLI::IsMember({"001", "111"}));
    e.option("extent", c.extent, "grid covers -extent..extent in units of the depth")->check(CLI::PositiveNumber);
    e.option("points", c.points, "grid points per axis")->check(CLI::Range(2, 10001));
    e.body = [&c](std::ostream& os) {
        std::vector<double> axis(c.points);
        for (std::size_t i = 0; i < c.points; ++i)
            axis[i] = -c.extent + 2 * c.extent * static_cast<double>(i) / static_cast<double>(c.points - 1);
        const SensitivityMap m = sensitivity_map(nv_axis_angle(termination_from(c.termination)), axis, axis);
        os << "x_over_d\ty_over_d\tvalue\n";
        for (std::size_t j = 0; j < axis.size(); ++j)
            for (std::size_t i = 0; i < axis.size(); ++i)
                write_row(os, {axis[i], axis[j], m.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))});
    };
}

/// Splices `key = value` entries from --config in front of the explicit arguments, so that the
/// explicit ones are parsed later and win.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;
    std::vector<std::string> merged{args.front()};
    for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
        if (!item.parents.empty())
            throw CLI::ConversionError("config file " + path + ": sections are not supported ('" +
                                       item.parents.front() + "')");
        std::string value;
        for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
        merged.push_back("--" + item.name + "=" + value);
    }
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Radical-pair spin dynamics and NV-centre sensing simulations", "cissnv"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    Options opts;
    std::vector<std::unique_ptr<Experiment>> exps;
    add_decouple_sweep(app, opts, exps);
    add_evolve(app, opts, exps);
    add_odmr(app, opts, exps);
    add_monolayer(app, opts, exps);
    add_mc_density(app, opts, exps);
    add_sensitivity_map(app, opts, exps);

    try {
        std::vector<std::string> rev = merge_config(args);
        std::reverse(rev.begin(), rev.end());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Success : ValidationError;
    }

    const Experiment* chosen = nullptr;
    for (const auto& e : exps)
        if (e->app()->parsed()) chosen = e.get();

    try {
        std::ostringstream table;
        chosen->write_header(table);
        chosen->body(table);
        if (chosen->out_path() == "-") {
            out << table.str();
        } else {
            std::ofstream file(chosen->out_path());
            if (!(file << table.str())) throw std::runtime_error("cannot write " + chosen->out_path());
        }
    } catch (const std::invalid_argument& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return ValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return RuntimeError;
    }
    return Success;
}

} // namespace cissnv::cli
