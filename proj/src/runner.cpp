#include "srelab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "srelab/dynamics.hpp"
#include "srelab/ed.hpp"
#include "srelab/io_util.hpp"
#include "srelab/rng.hpp"
#include "srelab/version.hpp"

namespace srelab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
constexpr double kLn2 = 0.69314718055994530942;

std::string num_tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void write_run_meta(const RunConfig& cfg) {
    json meta;
    meta["version"] = kVersion;
    meta["mode"] = cfg.mode;
    meta["seed"] = cfg.model.seed;
    meta["workers"] = cfg.workers;
    meta["config"] = json::parse(cfg.original_json);
    io::write_text_atomic(fs::path(cfg.io.out_dir) / "run_meta.json", meta.dump(2) + "\n");
}

thermal::ThermalOptions thermal_opts(const RunConfig& cfg) {
    thermal::ThermalOptions o;
    o.n_freq = cfg.solver.n_freq;
    o.tol = cfg.solver.thermal_tol;
    o.damping = cfg.solver.damping;
    return o;
}

dynamics::DynamicsOptions dynamics_opts(const RunConfig& cfg) {
    dynamics::DynamicsOptions o;
    o.q = cfg.model.q;
    o.j = cfg.model.j_coupling;
    o.contour = cfg.contour;
    o.saddle.tol = cfg.solver.tol;
    o.saddle.damping = cfg.solver.damping;
    o.saddle.max_iter = cfg.solver.max_iter;
    o.thermal = thermal_opts(cfg);
    o.continuation_dt = cfg.solver.continuation_dt;
    return o;
}

// ---------------------------------------------------------------- ed mode

struct EdCurve {
    std::vector<double> m2;   // per t
    std::vector<double> sff;  // per t
};

int run_ed(const RunConfig& cfg) {
    const auto& ts = cfg.sweep.t_list;
    for (double beta : cfg.sweep.beta_list) {
        const int nr = cfg.ed.realizations;
        std::vector<EdCurve> slots(nr);
        std::atomic<bool> failed{false};
        parallel_for(nr, cfg.workers, [&](int r) {
            try {
                ModelParams mp = cfg.model;
                mp.seed = substream_seed(cfg.model.seed, static_cast<std::uint64_t>(r));
                const CouplingTensor c = sample_couplings(mp);
                const ed::DoubledSystem sys(c);
                const ed::LeftSystem left(c);
                const Eigen::VectorXcd tfd = sys.tfd(beta);
                EdCurve curve;
                for (double t : ts) {
                    const Eigen::VectorXcd st = sys.evolve(t, tfd);
                    const ed::MajoranaSpectrum spec = ed::majorana_spectrum(st, mp.n_majorana);
                    curve.m2.push_back(ed::stabilizer_renyi(spec));
                    curve.sff.push_back(left.sff(beta, t));
                }
                slots[r] = std::move(curve);
            } catch (...) {
                failed = true;
            }
        });
        if (failed) throw std::runtime_error("ed realization failed");

        io::CsvWriter csv(fs::path(cfg.io.out_dir) / ("ed_m2_beta_" + num_tag(beta) + ".csv"),
                          {"t", "m2_mean", "m2_stderr", "sff_mean"});
        for (std::size_t k = 0; k < ts.size(); ++k) {
            std::vector<double> m2s, sffs;
            for (int r = 0; r < nr; ++r) {
                m2s.push_back(slots[r].m2[k]);
                sffs.push_back(slots[r].sff[k]);
            }
            const ed::MeanStderr m = ed::mean_stderr(m2s);
            const ed::MeanStderr s = ed::mean_stderr(sffs);
            csv.add_row({ts[k], m.mean, m.stderr_of_mean, s.mean});
        }
        csv.commit();
    }
    return kExitOk;
}

// ------------------------------------------------------------- saddle mode

void emit_saddle_plotdata(const RunConfig& cfg, const std::vector<dynamics::SRECurve>& curves) {
    io::CsvWriter op(fs::path(cfg.io.out_dir) / "plot_order_param.csv",
                     {"beta", "t", "order_param"});
    for (const auto& curve : curves) {
        io::CsvWriter m2(fs::path(cfg.io.out_dir) /
                             ("plot_m2_vs_t_beta_" + num_tag(curve.beta) + ".csv"),
                         {"t", "m2_sym", "m2_ssb", "m2_dom"});
        for (const auto& p : curve.points) {
            m2.add_row({p.t, p.m2_symmetric, p.m2_ssb, p.m2_dominant});
            op.add_row({curve.beta, p.t, p.order_param});
        }
        m2.commit();
    }
    op.commit();
}

int run_saddle(const RunConfig& cfg) {
    const dynamics::DynamicsOptions opts = dynamics_opts(cfg);
    const int nb = static_cast<int>(cfg.sweep.beta_list.size());
    std::vector<dynamics::SRECurve> curves(nb);
    std::atomic<bool> nonconverged{false};
    parallel_for(nb, cfg.workers, [&](int i) {
        curves[i] = dynamics::m2_curve(cfg.sweep.beta_list[i], cfg.sweep.t_list, opts);
        for (const auto& p : curves[i].points)
            if (!(p.flags & dynamics::kSymConverged) || !(p.flags & dynamics::kSsbConverged))
                nonconverged = true;
    });
    for (const auto& curve : curves) {
        io::CsvWriter csv(fs::path(cfg.io.out_dir) / ("saddle_beta_" + num_tag(curve.beta) +
                                                      ".csv"),
                          {"t", "m2_sym", "m2_ssb", "m2_dom", "order_param", "lnz_sre_sym",
                           "lnz_sre_ssb"});
        for (const auto& p : curve.points)
            csv.add_row({p.t, p.m2_symmetric, p.m2_ssb, p.m2_dominant, p.order_param, p.lnz_sym,
                         p.lnz_ssb});
        csv.commit();
    }
    emit_saddle_plotdata(cfg, curves);
    return nonconverged ? kExitNonConvergence : kExitOk;
}

// ---------------------------------------------------------------- sff mode

int run_sff(const RunConfig& cfg) {
    const thermal::ThermalOptions topts = thermal_opts(cfg);
    for (double beta : cfg.sweep.beta_list) {
        const thermal::SffSweep sweep = thermal::sff_slope_sweep(
            beta, cfg.sweep.t_list, cfg.model.q, cfg.model.j_coupling, topts);
        const double f_beta = thermal::thermal_solve(std::complex<double>(beta, 0), cfg.model.q,
                                                     cfg.model.j_coupling, topts)
                                  .ln_z_per_mode.real();
        io::CsvWriter csv(fs::path(cfg.io.out_dir) / ("sff_beta_" + num_tag(beta) + ".csv"),
                          {"t", "ln_sff_per_mode", "m2_pred"});
        for (const auto& p : sweep.points)
            csv.add_row({p.t, p.ln_sff_per_mode,
                         2.0 * kLn2 - 4.0 * (p.ln_sff_per_mode - f_beta)});
        csv.commit();
        if (sweep.branch_lost) return kExitNonConvergence;
    }
    return kExitOk;
}

// ------------------------------------------------------ phase-diagram mode

int run_phase_diagram(const RunConfig& cfg) {
    const dynamics::DynamicsOptions opts = dynamics_opts(cfg);
    dynamics::PhaseDiagram pd;
    const int nb = static_cast<int>(cfg.sweep.beta_list.size());
    std::vector<dynamics::PhaseDiagram> parts(nb);
    parallel_for(nb, cfg.workers, [&](int i) {
        parts[i] = dynamics::phase_diagram({cfg.sweep.beta_list[i]}, cfg.sweep.t_max, opts);
    });
    for (auto& part : parts)
        for (auto& p : part.points) pd.points.push_back(p);
    fitkit::Points xy;
    for (const auto& p : pd.points)
        if (p.status == "crossing-found") xy.push_back({p.t_star_j, p.beta_j});
    if (xy.size() >= 3) {
        pd.boundary_fit = fitkit::fit_boundary(xy, 1.0);
        pd.fit_done = true;
    }

    io::CsvWriter csv(fs::path(cfg.io.out_dir) / "plot_phase_boundary.csv",
                      {"beta_j", "t_star_j", "status"});
    for (const auto& p : pd.points)
        csv.add_row_raw({io::fmt17(p.beta_j), io::fmt17(p.t_star_j), p.status});
    csv.commit();

    io::CsvWriter fitcsv(fs::path(cfg.io.out_dir) / "plot_phase_boundary_fit.csv",
                         {"t_star_j", "beta_j_fit"});
    if (pd.fit_done) {
        double lo = 1e30, hi = -1e30;
        for (const auto& [x, y] : xy) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const auto& p = pd.boundary_fit.params;
        for (int k = 0; k < 100; ++k) {
            const double t = lo + (hi - lo) * k / 99.0;
            fitcsv.add_row({t, p[0] + p[1] / (p[2] + t * t)});
        }
        json fj;
        fj["model"] = "boundary";
        fj["params"] = {p[0], p[1], p[2]};
        fj["r_squared"] = pd.boundary_fit.r_squared;
        fj["converged"] = pd.boundary_fit.converged;
        io::write_text_atomic(fs::path(cfg.io.out_dir) / "phase_boundary_fit.json",
                              fj.dump(2) + "\n");
    }
    fitcsv.commit();
    return kExitOk;
}

// ---------------------------------------------------------------- fit mode

fitkit::Points read_points_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("fit.points_file not found: " + path);
    fitkit::Points pts;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, y;
        if (ss >> x >> y)
            pts.push_back({x, y});
        else if (!first)
            throw ValidationError("fit.points_file: malformed line: " + line);
        first = false;
    }
    return pts;
}

int run_fit(const RunConfig& cfg) {
    const fitkit::Points pts = read_points_csv(cfg.fit.points_file);
    fitkit::FitResult r;
    if (cfg.fit.model == "saturation")
        r = fitkit::fit_saturation(pts);
    else if (cfg.fit.model == "lorentzian")
        r = fitkit::fit_lorentzian(pts);
    else
        r = fitkit::fit_boundary(pts);

    json out;
    out["model"] = cfg.fit.model;
    out["params"] = std::vector<double>(r.params.data(), r.params.data() + r.params.size());
    out["r_squared"] = r.r_squared;
    out["converged"] = r.converged;
    out["degenerate"] = r.degenerate;
    out["iterations"] = r.iterations;
    io::write_text_atomic(fs::path(cfg.io.out_dir) / "fit_result.json", out.dump(2) + "\n");
    return r.converged ? kExitOk : kExitNonConvergence;
}

}  // namespace

// ------------------------------------------------------------- verify mode

VerifyOutcome run_identity_battery(const RunConfig& cfg) {
    VerifyOutcome out;
    std::ostringstream rep;
    const int n = cfg.model.n_majorana;
    const int nr = cfg.ed.realizations;
    const std::vector<double> betas = {0.0, 1.0, 2.0};
    const std::vector<double> times = {0.0, 0.5, 2.0};

    double res_eq5 = 0.0, res_wightman = 0.0, res_parseval = 0.0, res_imag = 0.0;
    double res_bound = 0.0, res_epr = 0.0, res_j0 = 0.0;

    for (int r = 0; r < nr; ++r) {
        ModelParams mp = cfg.model;
        mp.seed = substream_seed(cfg.model.seed, static_cast<std::uint64_t>(r));
        const CouplingTensor c = sample_couplings(mp);
        const ed::DoubledSystem sys(c);
        const ed::LeftSystem left(c);
        GaussianSampler pick(substream_seed(mp.seed, 777));

        {
            const ed::MajoranaSpectrum spec = ed::majorana_spectrum(sys.epr(), n);
            res_epr = std::max(res_epr, std::abs(ed::stabilizer_renyi(spec)));
        }

        for (double beta : betas) {
            const Eigen::VectorXcd tfd = sys.tfd(beta);
            for (double t : times) {
                const Eigen::VectorXcd st = sys.evolve(t, tfd);
                const ed::MajoranaSpectrum spec = ed::majorana_spectrum(st, n);
                res_parseval =
                    std::max(res_parseval, std::abs(spec.sum_c2 - std::pow(2.0, n)));
                res_imag = std::max(res_imag, spec.max_abs_imag);
                const double m2 = ed::stabilizer_renyi(spec);
                res_bound = std::max(res_bound, std::max(-m2, m2 - n * kLn2));

                // averaged diagonal coefficients against |Z(b/2+it)|^2/(Z(b) 2^{N/2})
                const std::vector<double> diag = ed::diagonal_coefficients(st, n);
                double mean = 0.0;
                for (std::uint32_t v = 0; v < diag.size(); ++v) {
                    const int nhalf =
                        ((__builtin_popcount(v) + 1) * __builtin_popcount(v)) / 2;
                    mean += (nhalf % 2 == 0 ? 1.0 : -1.0) * diag[v];
                }
                mean /= static_cast<double>(diag.size());
                const double rhs =
                    std::norm(left.partition(std::complex<double>(beta / 2, t))) /
                    (std::real(left.partition(std::complex<double>(beta, 0))) *
                     std::pow(2.0, n / 2.0));
                res_eq5 = std::max(res_eq5, std::abs(mean - rhs));

                // Wightman representation against state expansion, random strings
                for (int k = 0; k < 10; ++k) {
                    const auto vl = static_cast<std::uint32_t>(pick.uniform01() * (1u << n));
                    const auto vr = static_cast<std::uint32_t>(pick.uniform01() * (1u << n));
                    const std::complex<double> w = left.wightman(beta, t, vl, vr);
                    const double cv =
                        spec.coefficients[(static_cast<std::size_t>(vl) << n) | vr];
                    res_wightman = std::max(res_wightman, std::abs(w.real() - cv));
                    res_wightman = std::max(res_wightman, std::abs(w.imag()));
                }
            }
        }
    }

    {
        ModelParams mp = cfg.model;
        mp.j_coupling = 0.0;
        const CouplingTensor c = sample_couplings(mp);
        const ed::DoubledSystem sys(c);
        for (double beta : betas)
            for (double t : times) {
                const Eigen::VectorXcd st = sys.evolve(t, sys.tfd(beta));
                res_j0 = std::max(
                    res_j0, std::abs(ed::stabilizer_renyi(ed::majorana_spectrum(st, n))));
            }
    }

    struct Line {
        const char* name;
        double residual;
        double tol;
    };
    const Line lines[] = {
        {"averaged-diagonal-identity", res_eq5, 1e-10},
        {"wightman-vs-spectrum", res_wightman, 1e-10},
        {"spectrum-normalization", res_parseval, 1e-9},
        {"spectrum-reality", res_imag, 1e-10},
        {"m2-bounds", res_bound, 1e-9},
        {"m2-epr-zero", res_epr, 1e-10},
        {"m2-free-zero", res_j0, 1e-10},
    };
    for (const auto& l : lines) {
        const bool ok = l.residual <= l.tol;
        if (!ok) out.passed = false;
        rep << l.name << " max_residual=" << l.residual << " tol=" << l.tol
            << (ok ? " PASS" : " FAIL") << "\n";
    }
    out.report = rep.str();
    return out;
}

void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, n_tasks));
    if (workers == 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n_tasks) break;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

int run(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.io.out_dir);
    write_run_meta(cfg);
    if (cfg.mode == "ed") return run_ed(cfg);
    if (cfg.mode == "saddle") return run_saddle(cfg);
    if (cfg.mode == "sff") return run_sff(cfg);
    if (cfg.mode == "phase-diagram") return run_phase_diagram(cfg);
    if (cfg.mode == "fit") return run_fit(cfg);
    if (cfg.mode == "verify") {
        const VerifyOutcome v = run_identity_battery(cfg);
        io::write_text_atomic(std::filesystem::path(cfg.io.out_dir) / "verify_report.txt",
                              v.report);
        std::cout << v.report;
        return v.passed ? kExitOk : kExitVerification;
    }
    throw ValidationError("unknown mode: " + cfg.mode);
}

}  // namespace srelab
