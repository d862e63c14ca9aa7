#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "girglab/experiments.hpp"
#include "girglab/graph_io.hpp"
#include "girglab/parallel.hpp"
#include "girglab/profile_io.hpp"

namespace girglab::experiments {

using io::format_double;

void SweepConfig::validate() const {
    if (n < 1)
        throw std::invalid_argument("sweep: n must be >= 1");
    if (d < 1)
        throw std::invalid_argument("sweep: d must be >= 1");
    if (!(avg_degree > 0.0))
        throw std::invalid_argument("sweep: avg_degree must be > 0");
    if (runs_per_point < 1)
        throw std::invalid_argument("sweep: runs_per_point must be >= 1");
    if (tau_values.empty() || side_values.empty())
        throw std::invalid_argument("sweep: tau_values and side_values must be non-empty");
    for (double t : tau_values)
        if (!(t > 2.0))
            throw std::invalid_argument("sweep: every tau must be > 2");
    const double L = std::pow(static_cast<double>(n), 1.0 / d);
    for (double s : side_values)
        if (!(s >= 0.0 && s <= L))
            throw std::invalid_argument("sweep: sides must lie in [0, n^{1/d}]");
    if (max_steps < 0)
        throw std::invalid_argument("sweep: max_steps must be >= 0");
}

std::uint64_t run_seed(std::uint64_t seed_base, std::size_t tau_idx, std::size_t s_idx,
                       std::size_t run) {
    return derive_seed(seed_base, {tau_idx, s_idx, run});
}

dynamics::RunStats survival_run(const girg::GirgParams& gp, double side, const SweepConfig& cfg) {
    const girg::Graph g = girg::build_graph(gp);
    dynamics::OpinionConfig op = dynamics::init_opinions(g, dynamics::Square{side});
    CounterRng rng = CounterRng(gp.seed).split(3);
    dynamics::RunOptions opt;
    opt.max_steps = cfg.max_steps;
    return dynamics::run_until_stable(g, op, rng, opt, cfg.survival);
}

std::vector<SurvivalCurve> survival_sweep(const SweepConfig& cfg, const SweepProgress& progress) {
    cfg.validate();
    const std::size_t nt = cfg.tau_values.size(), ns = cfg.side_values.size();
    const auto nr = static_cast<std::size_t>(cfg.runs_per_point);
    std::vector<double> ks(nt);
    for (std::size_t t = 0; t < nt; ++t)
        ks[t] = girg::calibrate_k(cfg.avg_degree, cfg.d, cfg.tau_values[t]);

    // 0 died, 1 survived, 2 did not converge
    std::vector<std::uint8_t> outcome(nt * ns * nr);
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    parallel_for(outcome.size(), [&](std::size_t q) {
        const std::size_t t = q / (ns * nr), s = (q / nr) % ns, r = q % nr;
        girg::GirgParams gp;
        gp.n = cfg.n;
        gp.d = cfg.d;
        gp.tau = cfg.tau_values[t];
        gp.k = ks[t];
        gp.seed = run_seed(cfg.seed_base, t, s, r);
        const auto st = survival_run(gp, cfg.side_values[s], cfg);
        outcome[q] = !st.converged ? 2 : st.survived ? 1 : 0;
        const std::size_t c = ++done;
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(c, outcome.size());
        }
    });

    std::vector<SurvivalCurve> curves;
    for (std::size_t t = 0; t < nt; ++t) {
        SurvivalCurve c{cfg.tau_values[t], ks[t], {}};
        for (std::size_t s = 0; s < ns; ++s) {
            CurvePoint p;
            p.side = cfg.side_values[s];
            for (std::size_t r = 0; r < nr; ++r) {
                const auto o = outcome[(t * ns + s) * nr + r];
                if (o == 2)
                    ++p.non_converged;
                else {
                    ++p.runs;
                    p.survived += o;
                }
            }
            p.p_hat = p.runs > 0 ? static_cast<double>(p.survived) / p.runs : 0.0;
            c.points.push_back(p);
        }
        std::sort(c.points.begin(), c.points.end(),
                  [](const CurvePoint& a, const CurvePoint& b) { return a.side < b.side; });
        curves.push_back(std::move(c));
    }
    return curves;
}

void write_curves_csv(std::ostream& os, const std::vector<SurvivalCurve>& curves) {
    os << "tau,s,survived,runs,p_hat,non_converged\n";
    for (const auto& c : curves)
        for (const auto& p : c.points)
            os << format_double(c.tau) << ',' << format_double(p.side) << ',' << p.survived << ','
               << p.runs << ',' << format_double(p.p_hat) << ',' << p.non_converged << '\n';
}

std::vector<SurvivalCurve> read_curves_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("tau,s,survived,runs,p_hat", 0) != 0)
        throw std::runtime_error("curves csv: bad header");
    std::vector<SurvivalCurve> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');)
            f.push_back(cell);
        if (f.size() != 5 && f.size() != 6)
            throw std::runtime_error("curves csv line " + std::to_string(lineno) + ": bad field count");
        try {
            const double tau = std::stod(f[0]);
            CurvePoint p;
            p.side = std::stod(f[1]);
            p.survived = std::stoi(f[2]);
            p.runs = std::stoi(f[3]);
            p.p_hat = std::stod(f[4]);
            p.non_converged = f.size() == 6 ? std::stoi(f[5]) : 0;
            if (out.empty() || out.back().tau != tau)
                out.push_back({tau, 0.0, {}});
            out.back().points.push_back(p);
        } catch (const std::logic_error&) {
            throw std::runtime_error("curves csv line " + std::to_string(lineno) + ": bad number");
        }
    }
    return out;
}

void write_fits_csv(std::ostream& os, const std::vector<SurvivalCurve>& curves,
                    const std::vector<LogisticFit>& fits) {
    os << "tau,s0,b,loglik,converged,se_s0\n";
    for (std::size_t i = 0; i < fits.size(); ++i)
        os << format_double(curves[i].tau) << ',' << format_double(fits[i].s0) << ','
           << format_double(fits[i].b) << ',' << format_double(fits[i].log_likelihood) << ','
           << (fits[i].converged ? 1 : 0) << ',' << format_double(fits[i].se_s0) << '\n';
}

std::string survival_plot_script(const std::string& curves_csv,
                                  const std::vector<SurvivalCurve>& curves,
                                  const std::vector<LogisticFit>& fits) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set key bottom right\n"
      << "set xlabel 'side s'\n"
      << "set ylabel 'survival probability'\n"
      << "set yrange [-0.05:1.05]\n";
    for (std::size_t i = 0; i < fits.size(); ++i)
        s << "f" << i << "(x) = 1 / (1 + exp(-(x - " << format_double(fits[i].s0) << ") / "
          << format_double(fits[i].b) << "))\n";
    s << "plot ";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const std::string tau = format_double(curves[i].tau);
        if (i > 0)
            s << ", \\\n     ";
        s << "'" << curves_csv << "' using ($1 == " << tau << " ? $2 : NaN):5 with points pt 7 lc "
          << i + 1 << " title 'tau = " << tau << "'";
        if (i < fits.size())
            s << ", f" << i << "(x) with lines lc " << i + 1 << " notitle";
    }
    s << "\n";
    return s.str();
}

std::string snapshot_plot_script(const std::string& snapshot_csv) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set size ratio -1\n"
      << "unset key\n"
      << "plot '" << snapshot_csv
      << "' using 1:2:($3 > 0 ? 0x1f4fd8 : 0xd81f1f) every ::1 with points pt 7 ps 0.3 lc rgb variable\n";
    return s.str();
}

std::string profile_plot_script(const std::string& profile_csv, const std::vector<double>& weights) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set key bottom right\n"
      << "set xlabel 'z'\n"
      << "set ylabel 'f(w, z)'\n"
      << "plot ";
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const std::string w = format_double(weights[i]);
        if (i > 0)
            s << ", \\\n     ";
        s << "'" << profile_csv << "' using ($1 == " << w << " ? $2 : NaN):3 every ::1 with lines title 'w = "
          << w << "'";
    }
    s << "\n";
    return s.str();
}

std::string format_validity(const theory::ValidityReport& r) {
    std::ostringstream s;
    s << std::setprecision(17);
    s << "symmetry_max_violation=" << r.symmetry_max_violation << '\n'
      << "z_monotonicity_max_violation=" << r.z_monotonicity_max_violation << '\n'
      << "w_monotonicity_max_violation=" << r.w_monotonicity_max_violation << '\n'
      << "subsolution_max_violation=" << r.subsolution_max_violation << '\n'
      << "subsolution_tolerance=" << r.subsolution_tolerance << '\n'
      << "operator_checked=" << (r.operator_checked ? 1 : 0) << '\n'
      << "valid=" << (r.pass ? 1 : 0) << '\n';
    return s.str();
}

std::string format_comparison(const theory::ComparisonResult& r) {
    std::ostringstream s;
    s << std::setprecision(17);
    s << "comparison_holds=" << (r.holds ? 1 : 0) << '\n'
      << "comparison_iterations=" << r.iterations << '\n'
      << "comparison_min_slack=" << r.min_slack << '\n';
    if (r.first_violation) {
        const auto& v = *r.first_violation;
        s << "comparison_violation_t=" << v.t << '\n'
          << "comparison_violation_w=" << v.w << '\n'
          << "comparison_violation_z=" << v.z << '\n'
          << "comparison_violation_sub=" << v.sub << '\n'
          << "comparison_violation_f=" << v.f_t << '\n';
    }
    return s.str();
}

std::string format_erosion(const theory::ErosionReport& r) {
    std::ostringstream s;
    s << std::setprecision(17);
    s << "r=" << r.params.r << '\n'
      << "eps=" << r.params.eps << '\n'
      << "k=" << r.params.k << '\n'
      << "tau=" << r.tau << '\n'
      << "r_max=" << r.params.r_max << '\n'
      << "w_max=" << r.params.w_max << '\n'
      << "delta_bound=" << r.params.delta_bound << '\n'
      << "delta_unit=" << r.params.delta_unit << '\n'
      << "t_max=" << r.t_max << '\n'
      << "domination_holds=" << (r.holds ? 1 : 0) << '\n'
      << "domination_min_slack=" << r.min_slack << '\n'
      << "domination_holds_unit_delta=" << (r.holds_unit_delta ? 1 : 0) << '\n'
      << "crossing_monotone=" << (r.crossing_monotone ? 1 : 0) << '\n'
      << "recession_per_step=" << r.recession_per_step << '\n'
      << "value_error_radial=" << r.value_error_radial << '\n'
      << "value_error_halfspace=" << r.value_error_halfspace << '\n';
    auto viol = [&](const char* tag, const std::optional<theory::ErosionViolation>& v) {
        if (!v)
            return;
        s << tag << "_t=" << v->t << '\n'
          << tag << "_w=" << v->w << '\n'
          << tag << "_rho=" << v->rho << '\n'
          << tag << "_g=" << v->g << '\n'
          << tag << "_f=" << v->f_shifted << '\n';
    };
    viol("violation", r.first_violation);
    viol("violation_unit_delta", r.first_violation_unit_delta);
    return s.str();
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
    if (!os)
        throw std::runtime_error("write failed: " + p.string());
}

} // namespace

MeanFieldSuiteReport run_meanfield_suite(const MeanFieldSuiteConfig& cfg,
                                         const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    MeanFieldSuiteReport rep;
    rep.k_min = theory::k_min(cfg.d, cfg.tau);
    rep.k = cfg.k_factor * rep.k_min;
    const auto p = meanfield::halfspace_params(cfg.d, cfg.tau, rep.k, cfg.w_cap, cfg.n_w, cfg.n_z);
    const meanfield::UpdateOperator op(p, meanfield::Geometry::halfspace());
    const auto f0 = meanfield::Profile::halfspace_indicator(p);
    const auto it = meanfield::iterate(op, f0, cfg.iterations, cfg.conv_tol);
    rep.iterations = it.iterations;
    rep.last_sup_delta = it.sup_deltas.back();
    rep.survival_margin = meanfield::survival_margin(it.profile);

    const auto sub = theory::build_subsolution(p);
    rep.delta_star = sub.spec.delta_star;
    rep.validity = theory::check_valid(sub.profile, op);
    rep.comparison = theory::check_comparison(op, sub.profile, f0, cfg.comparison_t_max);

    auto radii = cfg.erosion_radii;
    std::sort(radii.begin(), radii.end());
    for (double r : radii)
        rep.erosion.push_back(theory::check_erosion_domination(r, cfg.eps, cfg.tau, rep.k,
                                                               cfg.erosion_t_max, cfg.erosion_grid));

    const auto hs = out_dir / "halfspace_profile.csv";
    meanfield::write_profile_csv(hs, it.profile);
    const auto ss = out_dir / "subsolution_profile.csv";
    meanfield::write_profile_csv(ss, sub.profile);

    const auto es = out_dir / "erosion_series.csv";
    {
        std::ofstream os(es);
        os << "r,t,crossing,delta_bound\n";
        for (const auto& e : rep.erosion)
            for (std::size_t t = 0; t < e.crossing.size(); ++t)
                os << format_double(e.params.r) << ',' << t << ',' << format_double(e.crossing[t])
                   << ',' << format_double(e.params.delta_bound) << '\n';
        if (!os)
            throw std::runtime_error("write failed: " + es.string());
    }

    bool erosion_ok = !rep.erosion.empty();
    for (std::size_t i = 0; i < rep.erosion.size(); ++i) {
        const auto& e = rep.erosion[i];
        erosion_ok = erosion_ok && e.holds && e.crossing_monotone;
        if (i > 0)
            erosion_ok = erosion_ok && e.recession_per_step < rep.erosion[i - 1].recession_per_step;
    }
    const bool converged = rep.last_sup_delta < 1e-6;
    const bool margin_ok = rep.survival_margin >= rep.delta_star - 0.5 - 0.01;
    rep.pass = converged && margin_ok && rep.validity.pass && rep.comparison.holds && erosion_ok;

    std::ostringstream txt;
    txt << std::setprecision(17) << "d=" << cfg.d << "\ntau=" << cfg.tau << "\nk_min=" << rep.k_min
        << "\nk=" << rep.k << "\ndelta_star=" << rep.delta_star << "\niterations=" << rep.iterations
        << "\nlast_sup_delta=" << rep.last_sup_delta << "\nsurvival_margin=" << rep.survival_margin
        << "\nconverged=" << converged << "\nmargin_ok=" << margin_ok << '\n'
        << format_validity(rep.validity) << format_comparison(rep.comparison);
    for (const auto& e : rep.erosion) {
        std::istringstream lines(format_erosion(e));
        for (std::string l; std::getline(lines, l);)
            txt << "erosion_r" << e.params.r << '.' << l << '\n';
    }
    txt << "erosion_ok=" << erosion_ok << "\npass=" << rep.pass << '\n';
    const auto vr = out_dir / "validity_report.txt";
    write_text(vr, txt.str());

    const auto& w = p.w_grid;
    const auto gp = out_dir / "profile.gp";
    write_text(gp, profile_plot_script("halfspace_profile.csv", {w.front(), w[w.size() / 2], w.back()}));

    rep.files = {hs, ss, es, vr, gp};
    return rep;
}

std::vector<KScanRow> k_scan(int d, double tau, const std::vector<double>& ks, int iterations,
                             std::size_t n_w, std::size_t n_z) {
    std::vector<KScanRow> rows;
    for (double k : ks) {
        KScanRow row;
        row.k = k;
        // extent tied to the largest edge radius so z = (k w)^{1/d} sits well inside the grid
        const auto p = meanfield::halfspace_params(d, tau, k, 1000.0, n_w, n_z,
                                                   2.0 * std::pow(k * 1000.0, 1.0 / d));
        const meanfield::UpdateOperator op(p, meanfield::Geometry::halfspace());
        row.subsolution_exists = theory::solve_delta_star(theory::y_coefficient(d, tau, k)).has_value();
        if (row.subsolution_exists)
            row.valid = theory::check_valid(theory::build_subsolution(p).profile, op).pass;
        const auto it = meanfield::iterate(op, meanfield::Profile::halfspace_indicator(p),
                                           iterations, 0.0);
        row.margin = meanfield::survival_margin(it.profile);
        rows.push_back(row);
    }
    return rows;
}

} // namespace girglab::experiments
