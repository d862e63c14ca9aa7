#include "girglab/cli/app.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "girglab/dynamics.hpp"
#include "girglab/experiments.hpp"
#include "girglab/girg.hpp"
#include "girglab/graph_io.hpp"
#include "girglab/meanfield.hpp"
#include "girglab/numerics.hpp"
#include "girglab/parallel.hpp"
#include "girglab/profile_io.hpp"
#include "girglab/theory.hpp"

#ifndef GIRGLAB_VERSION
#define GIRGLAB_VERSION "unknown"
#endif

namespace girglab::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using io::format_double;

std::string version_string() { return std::string("girg-lab ") + GIRGLAB_VERSION; }

std::string sha256_hex(const fs::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + file.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 init failed");
    std::vector<char> buf(1 << 16);
    while (is) {
        is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (is.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(is.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

CsvTable read_numeric_csv(const fs::path& file) {
    std::ifstream is(file);
    if (!is)
        throw std::runtime_error("cannot open " + file.string());
    CsvTable t;
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error(file.string() + ": empty");
    std::stringstream hs(line);
    for (std::string c; std::getline(hs, c, ',');)
        t.header.push_back(c);
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::logic_error&) {
                used = std::string::npos;
            }
            // stod handles "nan" and "inf" as written by to_chars
            if (used != c.size())
                throw std::runtime_error(file.string() + ": bad number '" + c + "'");
            row.push_back(v);
        }
        if (row.size() != t.header.size())
            throw std::runtime_error(file.string() + ": row width differs from header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

struct Manifest {
    std::string subcommand;
    json params = json::object();
    std::optional<std::uint64_t> seed;
    std::vector<fs::path> outputs;

    void write(const fs::path& path) const {
        json j;
        j["subcommand"] = subcommand;
        j["parameters"] = params;
        j["seed"] = seed ? json(*seed) : json(nullptr);
        j["version"] = version_string();
        json files = json::array();
        for (const auto& p : outputs)
            files.push_back({{"path", p.filename().string()}, {"sha256", sha256_hex(p)}});
        j["outputs"] = files;
        std::ofstream os(path);
        os << j.dump(2) << '\n';
        if (!os)
            throw std::runtime_error("write failed: " + path.string());
    }
};

template <class Fn>
fs::path write_file(const fs::path& p, Fn&& fn) {
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os)
        throw std::runtime_error("cannot open " + p.string() + " for writing");
    fn(os);
    if (!os)
        throw std::runtime_error("write failed: " + p.string());
    return p;
}

fs::path with_suffix(const std::string& prefix, const std::string& suffix) {
    return fs::path(prefix + suffix);
}

struct GraphOpts {
    std::int64_t n = 1000;
    int d = 2;
    double tau = 3.0;
    double k = 1.0;
    double avg_degree = 0.0;
    std::uint64_t seed = 0;
    CLI::Option* k_opt = nullptr;
    CLI::Option* avg_opt = nullptr;

    void add(CLI::App* app) {
        app->add_option("--n", n, "number of vertices")->capture_default_str();
        app->add_option("--d", d, "dimension")->capture_default_str();
        app->add_option("--tau", tau, "power-law exponent, > 2")->capture_default_str();
        k_opt = app->add_option("--k", k, "edge constant (default 1)");
        avg_opt = app->add_option("--avg-degree", avg_degree, "target mean degree; sets k");
        k_opt->excludes(avg_opt);
        app->add_option("--seed", seed, "random seed")->capture_default_str();
    }

    girg::GirgParams resolve() const {
        girg::GirgParams p;
        p.n = n;
        p.d = d;
        p.tau = tau;
        p.k = avg_opt->count() > 0 ? girg::calibrate_k(avg_degree, d, tau) : k;
        p.seed = seed;
        p.validate();
        return p;
    }

    json to_json(const girg::GirgParams& p) const {
        json j{{"n", p.n}, {"d", p.d}, {"tau", p.tau}, {"k", p.k}, {"seed", p.seed}};
        if (avg_opt->count() > 0)
            j["avg_degree"] = avg_degree;
        return j;
    }
};

// ---- generate ---------------------------------------------------------------

struct GenerateCmd {
    GraphOpts g;
    std::string prefix;

    void add(CLI::App& app) {
        auto* s = app.add_subcommand("generate", "sample a GIRG and write edge and vertex files");
        g.add(s);
        s->add_option("--out-prefix", prefix, "output path prefix")->required();
    }

    int run(std::ostream& out) {
        const auto p = g.resolve();
        const auto graph = girg::build_graph(p);
        Manifest m{"generate", g.to_json(p), p.seed, {}};
        m.outputs.push_back(write_file(with_suffix(prefix, ".edges"),
                                       [&](std::ostream& os) { io::write_edge_list(os, graph); }));
        m.outputs.push_back(write_file(with_suffix(prefix, ".vertices"),
                                       [&](std::ostream& os) { io::write_vertices(os, graph); }));
        m.write(with_suffix(prefix, ".manifest.json"));
        double deg = 0.0;
        for (std::size_t v = 0; v < graph.order(); ++v)
            deg += static_cast<double>(graph.degree(static_cast<girg::VertexId>(v)));
        out << "n=" << graph.order() << "\nedges=" << graph.edge_count()
            << "\nk=" << format_double(p.k)
            << "\nmean_degree=" << format_double(deg / static_cast<double>(graph.order())) << '\n';
        return kExitOk;
    }
};

// ---- simulate ---------------------------------------------------------------

struct SimulateCmd {
    GraphOpts g;
    std::string shape = "square";
    double side = 10.0, radius = 5.0, p_blue = 0.5;
    std::int64_t max_steps = 0, snapshot_every = 0;
    std::size_t min_component = 50;
    double min_fraction = 0.005;
    std::string prefix;

    void add(CLI::App& app) {
        auto* s = app.add_subcommand("simulate", "run the sequential majority dynamics on one GIRG");
        g.add(s);
        s->add_option("--shape", shape, "square | ball | halfspace | random")
            ->check(CLI::IsMember({"square", "ball", "halfspace", "random"}))
            ->capture_default_str();
        s->add_option("--side", side, "square side")->capture_default_str();
        s->add_option("--radius", radius, "ball radius")->capture_default_str();
        s->add_option("--p-blue", p_blue, "blue probability for --shape random")->capture_default_str();
        s->add_option("--max-steps", max_steps, "step budget (0: 100 n ln n)")->capture_default_str();
        s->add_option("--snapshot-every", snapshot_every, "record spins every m steps (0: off)")
            ->capture_default_str();
        s->add_option("--min-component", min_component, "survival: absolute component size")
            ->capture_default_str();
        s->add_option("--min-fraction", min_fraction, "survival: component size as fraction of n")
            ->capture_default_str();
        s->add_option("--out-prefix", prefix, "output path prefix")->required();
    }

    int run(std::ostream& out) {
        const auto p = g.resolve();
        if (max_steps < 0 || snapshot_every < 0)
            throw std::invalid_argument("--max-steps and --snapshot-every must be >= 0");
        const auto graph = girg::build_graph(p);
        dynamics::InitialShape init = dynamics::Square{side};
        if (shape == "ball")
            init = dynamics::Ball{radius};
        else if (shape == "halfspace")
            init = dynamics::HalfSpace{};
        else if (shape == "random")
            init = dynamics::UniformRandom{p_blue, derive_seed(p.seed, {4})};
        auto conf = dynamics::init_opinions(graph, init);
        const std::size_t initial_blue = conf.blue_count();

        Manifest m{"simulate", g.to_json(p), p.seed, {}};
        m.params["shape"] = shape;
        m.params["side"] = side;
        m.params["radius"] = radius;
        m.params["p_blue"] = p_blue;
        m.params["max_steps"] = max_steps;
        m.params["snapshot_every"] = snapshot_every;
        m.params["min_component"] = min_component;
        m.params["min_fraction"] = min_fraction;

        std::optional<std::ofstream> traj;
        const auto traj_path = with_suffix(prefix, ".trajectory.csv");
        dynamics::RunOptions opt;
        opt.max_steps = max_steps;
        if (snapshot_every > 0) {
            if (traj_path.has_parent_path())
                fs::create_directories(traj_path.parent_path());
            traj.emplace(traj_path);
            *traj << "step,id,spin\n";
            opt.snapshot_every = snapshot_every;
            opt.on_snapshot = [&](std::int64_t step, const dynamics::OpinionConfig& c) {
                for (std::size_t v = 0; v < c.size(); ++v)
                    *traj << step << ',' << v << ',' << static_cast<int>(c.spins()[v]) << '\n';
            };
        }
        dynamics::SurvivalCriterion crit{min_component, min_fraction};
        CounterRng rng = CounterRng(p.seed).split(3);
        const auto st = dynamics::run_until_stable(graph, conf, rng, opt, crit);
        if (traj) {
            traj->close();
            if (!*traj)
                throw std::runtime_error("write failed: " + traj_path.string());
            m.outputs.push_back(traj_path);
        }

        m.outputs.push_back(write_file(with_suffix(prefix, ".spins"), [&](std::ostream& os) {
            for (std::size_t v = 0; v < conf.size(); ++v)
                os << v << ' ' << static_cast<int>(conf.spins()[v]) << '\n';
        }));
        const auto xy = with_suffix(prefix, ".xy.csv");
        m.outputs.push_back(write_file(xy, [&](std::ostream& os) {
            os << "x,y,spin\n";
            for (std::size_t v = 0; v < conf.size(); ++v) {
                const auto x = graph.position(static_cast<girg::VertexId>(v));
                os << format_double(x[0]) << ',' << format_double(x.size() > 1 ? x[1] : 0.0) << ','
                   << static_cast<int>(conf.spins()[v]) << '\n';
            }
        }));
        m.outputs.push_back(write_file(with_suffix(prefix, ".gp"), [&](std::ostream& os) {
            os << experiments::snapshot_plot_script(xy.filename().string());
        }));
        std::ostringstream stats;
        stats << "k=" << format_double(p.k) << "\ninitial_blue=" << initial_blue
              << "\nfinal_blue=" << st.final_blue_count << "\nsteps=" << st.steps_taken
              << "\nflips=" << st.flips << "\nconverged=" << (st.converged ? 1 : 0)
              << "\nsurvived=" << (st.survived ? 1 : 0)
              << "\nlargest_blue_component=" << dynamics::largest_blue_component(graph, conf)
              << "\nsurvival_threshold=" << crit.threshold(graph.order()) << '\n';
        m.outputs.push_back(write_file(with_suffix(prefix, ".stats.txt"),
                                       [&](std::ostream& os) { os << stats.str(); }));
        m.write(with_suffix(prefix, ".manifest.json"));
        out << stats.str();
        return kExitOk;
    }
};

// ---- sweep ------------------------------------------------------------------

experiments::SweepConfig parse_sweep_config(const json& j) {
    experiments::SweepConfig c;
    static const std::vector<std::string> known{"n", "d", "avg_degree", "tau_values", "side_values",
                                                "runs_per_point", "seed_base", "survival", "max_steps"};
    if (!j.is_object())
        throw std::invalid_argument("sweep config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("sweep config: unknown field '" + key + "'");
    try {
        if (j.contains("n"))
            c.n = j.at("n").get<std::int64_t>();
        if (j.contains("d"))
            c.d = j.at("d").get<int>();
        if (j.contains("avg_degree"))
            c.avg_degree = j.at("avg_degree").get<double>();
        if (j.contains("tau_values"))
            c.tau_values = j.at("tau_values").get<std::vector<double>>();
        if (j.contains("side_values"))
            c.side_values = j.at("side_values").get<std::vector<double>>();
        if (j.contains("runs_per_point"))
            c.runs_per_point = j.at("runs_per_point").get<int>();
        if (j.contains("seed_base"))
            c.seed_base = j.at("seed_base").get<std::uint64_t>();
        if (j.contains("max_steps"))
            c.max_steps = j.at("max_steps").get<std::int64_t>();
        if (j.contains("survival")) {
            const auto& s = j.at("survival");
            for (const auto& [key, _] : s.items())
                if (key != "min_component" && key != "min_fraction")
                    throw std::invalid_argument("sweep config: unknown survival field '" + key + "'");
            if (s.contains("min_component"))
                c.survival.min_component = s.at("min_component").get<std::size_t>();
            if (s.contains("min_fraction"))
                c.survival.min_fraction = s.at("min_fraction").get<double>();
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("sweep config: ") + e.what());
    }
    c.validate();
    return c;
}

json sweep_config_json(const experiments::SweepConfig& c) {
    return {{"n", c.n},
            {"d", c.d},
            {"avg_degree", c.avg_degree},
            {"tau_values", c.tau_values},
            {"side_values", c.side_values},
            {"runs_per_point", c.runs_per_point},
            {"seed_base", c.seed_base},
            {"survival",
             {{"min_component", c.survival.min_component},
              {"min_fraction", c.survival.min_fraction}}},
            {"max_steps", c.max_steps}};
}

struct SweepCmd {
    std::string config;
    std::string out_dir;
    bool quiet = false;

    void add(CLI::App& app) {
        auto* s = app.add_subcommand("sweep", "survival probability of square initial blue regions");
        s->add_option("--config", config, "sweep JSON")->required()->check(CLI::ExistingFile);
        s->add_option("--out", out_dir, "output directory")->required();
        s->add_flag("--quiet", quiet, "no progress output");
    }

    int run(std::ostream& out, std::ostream& err) {
        std::ifstream is(config);
        json j;
        try {
            j = json::parse(is);
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("cannot parse ") + config + ": " + e.what());
        }
        const auto cfg = parse_sweep_config(j);
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        std::size_t last = 0;
        const auto curves = experiments::survival_sweep(cfg, [&](std::size_t done, std::size_t total) {
            if (!quiet && (done * 20 / total != last || done == total)) {
                last = done * 20 / total;
                err << "sweep: " << done << "/" << total << " runs\n";
            }
        });
        std::vector<experiments::LogisticFit> fits;
        for (const auto& c : curves) {
            try {
                fits.push_back(experiments::fit_logistic(c));
            } catch (const std::invalid_argument&) {
                experiments::LogisticFit f;
                f.s0 = f.b = f.log_likelihood = std::numeric_limits<double>::quiet_NaN();
                f.se_s0 = f.se_b = f.s0;
                fits.push_back(f);
            }
        }
        Manifest m{"sweep", sweep_config_json(cfg), cfg.seed_base, {}};
        m.outputs.push_back(write_file(dir / "curves.csv", [&](std::ostream& os) {
            experiments::write_curves_csv(os, curves);
        }));
        m.outputs.push_back(write_file(dir / "fits.csv", [&](std::ostream& os) {
            experiments::write_fits_csv(os, curves, fits);
        }));
        m.outputs.push_back(write_file(dir / "survival.gp", [&](std::ostream& os) {
            os << experiments::survival_plot_script("curves.csv", curves, fits);
        }));
        m.write(dir / "manifest.json");
        for (std::size_t i = 0; i < curves.size(); ++i) {
            const auto cs = experiments::critical_size(fits[i]);
            out << "tau=" << format_double(curves[i].tau) << " s0=" << format_double(cs.s0)
                << " b=" << format_double(fits[i].b) << (cs.warning ? " (fit did not converge)" : "")
                << '\n';
        }
        return kExitOk;
    }
};

// ---- meanfield --------------------------------------------------------------

struct MeanfieldCmd {
    std::string geometry = "halfspace";
    int d = 2;
    double tau = 3.0, k = 1.0, wcap = 0.0, r = 0.0;
    int iters = 200;
    double conv_tol = 1e-7, quad_tol = 1e-8;
    std::size_t n_w = 0, n_z = 512;
    double z_extent = 0.0, h = 0.5, extent = 0.0;
    bool truncated = false;
    std::string out_dir;

    void add(CLI::App& app) {
        auto* s = app.add_subcommand("meanfield", "iterate the mean-field update operator");
        s->add_option("--geometry", geometry, "halfspace | radial")
            ->check(CLI::IsMember({"halfspace", "radial"}))
            ->capture_default_str();
        s->add_option("--r", r, "initial ball radius (radial)");
        s->add_option("--d", d, "dimension (radial: 2)")->capture_default_str();
        s->add_option("--tau", tau, "power-law exponent")->capture_default_str();
        s->add_option("--k", k, "edge constant")->capture_default_str();
        s->add_option("--wcap", wcap, "weight cutoff (default 1000; radial: r^{1/4})");
        s->add_option("--iters", iters, "maximum iterations")->capture_default_str();
        s->add_option("--conv-tol", conv_tol, "stop when the sup-norm change drops below")
            ->capture_default_str();
        s->add_option("--quad-tol", quad_tol, "relative quadrature tolerance")->capture_default_str();
        s->add_option("--nw", n_w, "weight nodes (default 64, radial 16)");
        s->add_option("--nz", n_z, "z nodes (half-space)")->capture_default_str();
        s->add_option("--z-extent", z_extent, "half-space grid covers [-Z, Z] (0: 8 (k wcap)^{1/d})");
        s->add_option("--spacing", h, "radial node spacing")->capture_default_str();
        s->add_option("--extent", extent, "radial grid covers r +- extent (0: sqrt(k) wcap + 20)");
        s->add_flag("--truncated-lambda", truncated, "restrict lambda to weights <= wcap");
        s->add_option("--out", out_dir, "output directory")->required();
    }

    int run(std::ostream& out) {
        using namespace meanfield;
        const bool radial = geometry == "radial";
        MeanFieldParams p;
        Geometry geo;
        if (radial) {
            if (!(r > 0.0))
                throw std::invalid_argument("--r must be > 0 for the radial geometry");
            if (d != 2)
                throw std::invalid_argument("radial geometry is implemented for d = 2 only");
            const double W = wcap > 0.0 ? wcap : std::pow(r, 0.25);
            const double A = extent > 0.0 ? extent : std::sqrt(k) * W + 20.0;
            p = radial_params(tau, k, W, r, h, A, n_w > 0 ? n_w : 16);
            geo = Geometry::radial(r);
        } else {
            p = halfspace_params(d, tau, k, wcap > 0.0 ? wcap : 1000.0, n_w > 0 ? n_w : 64, n_z,
                                 z_extent);
            geo = Geometry::halfspace();
        }
        p.quad_tol = quad_tol;
        p.truncated_lambda = truncated;
        p.validate(geo.kind);
        if (iters < 1)
            throw std::invalid_argument("--iters must be >= 1");

        const UpdateOperator op(p, geo);
        const Profile f0 = radial ? Profile::ball_indicator(p, r) : Profile::halfspace_indicator(p);
        std::vector<double> crossing;
        if (radial)
            crossing.push_back(crossing_radius(f0).value_or(std::nan("")));
        const auto res = iterate(op, f0, iters, conv_tol, [&](int, const Profile& g) {
            if (radial)
                crossing.push_back(crossing_radius(g).value_or(std::nan("")));
        });

        const fs::path dir(out_dir);
        fs::create_directories(dir);
        Manifest m{"meanfield",
                   {{"geometry", geometry}, {"d", p.d}, {"tau", tau}, {"k", k}, {"wcap", p.w_cap},
                    {"r", r}, {"iters", iters}, {"conv_tol", conv_tol}, {"quad_tol", quad_tol},
                    {"n_w", p.w_grid.size()}, {"n_x", p.x_grid.size()},
                    {"x_lo", p.x_grid.front()}, {"x_hi", p.x_grid.back()},
                    {"truncated_lambda", truncated}},
                   std::nullopt,
                   {}};
        m.outputs.push_back(write_file(dir / "profile.csv",
                                       [&](std::ostream& os) { write_profile_csv(os, res.profile); }));
        m.outputs.push_back(write_file(dir / "history.csv", [&](std::ostream& os) {
            os << (radial ? "t,sup_delta,crossing\n" : "t,sup_delta\n");
            for (std::size_t t = 0; t < res.sup_deltas.size(); ++t) {
                os << t + 1 << ',' << format_double(res.sup_deltas[t]);
                if (radial)
                    os << ',' << format_double(crossing[t + 1]);
                os << '\n';
            }
        }));
        const auto& w = p.w_grid;
        m.outputs.push_back(write_file(dir / "profile.gp", [&](std::ostream& os) {
            os << experiments::profile_plot_script("profile.csv", {w.front(), w[w.size() / 2], w.back()});
        }));
        std::ostringstream sum;
        sum << "geometry=" << geometry << "\niterations=" << res.iterations
            << "\nlast_sup_delta=" << format_double(res.sup_deltas.back())
            << "\nvalue_error=" << format_double(op.value_error())
            << "\nlambda_min=" << format_double(op.lambda(0)) << '\n';
        if (op.lambda(0) < 30.0)
            sum << "warning=lambda_min below 30; the Gaussian approximation is questionable\n";
        if (radial) {
            sum << "initial_crossing=" << format_double(crossing.front())
                << "\nfinal_crossing=" << format_double(crossing.back()) << '\n';
        } else {
            sum << "survival_margin=" << format_double(survival_margin(res.profile))
                << "\nsymmetry_violation=" << format_double(res.profile.symmetry_violation()) << '\n';
            const double y = theory::y_coefficient(p.d, tau, k);
            if (const auto ds = theory::solve_delta_star(y))
                sum << "delta_star=" << format_double(*ds) << '\n';
        }
        m.outputs.push_back(write_file(dir / "summary.txt", [&](std::ostream& os) { os << sum.str(); }));
        m.write(dir / "manifest.json");
        out << sum.str();
        return kExitOk;
    }
};

// ---- subsolution ------------------------------------------------------------

struct SubsolutionCmd {
    int d = 2;
    double tau = 3.0, k = 0.0;
    bool kmin = false, scan = false;
    int scan_iters = 100;
    std::string out_dir;
    CLI::Option* k_opt = nullptr;

    void add(CLI::App& app) {
        auto* s = app.add_subcommand("subsolution", "delta*, k_min and the explicit subsolution");
        s->add_option("--d", d, "dimension")->capture_default_str();
        s->add_option("--tau", tau, "power-law exponent")->capture_default_str();
        k_opt = s->add_option("--k", k, "edge constant");
        s->add_flag("--kmin", kmin, "print k_min");
        s->add_flag("--scan", scan, "scan k around k_min: validity and iterated survival margin");
        s->add_option("--scan-iters", scan_iters, "iterations per k in --scan")->capture_default_str();
        s->add_option("--out", out_dir, "write the subsolution profile here");
    }

    int run(std::ostream& out) {
        if (!(tau > 2.0))
            throw std::invalid_argument("tau must satisfy tau > 2");
        const double km = theory::k_min(d, tau);
        Manifest m{"subsolution", {{"d", d}, {"tau", tau}}, std::nullopt, {}};
        std::ostringstream txt;
        txt << std::setprecision(17);
        if (kmin || k_opt->count() == 0)
            txt << "k_min=" << km << "\ny_per_sqrt_k=" << theory::y_coefficient(d, tau, 1.0) << '\n';
        if (k_opt->count() > 0) {
            m.params["k"] = k;
            const auto spec = theory::subsolution_spec(d, tau, k);
            txt << "k=" << k << "\nk_over_k_min=" << k / km << "\ncone_constant=" << spec.cone_constant
                << "\ny=" << spec.y_coefficient << "\ndelta_star=" << spec.delta_star << '\n';
            const auto all = theory::solve_delta_star_all(spec.y_coefficient);
            txt << "brackets=" << all.brackets.size() << '\n';
            if (!out_dir.empty()) {
                const fs::path dir(out_dir);
                fs::create_directories(dir);
                const auto sub = theory::build_subsolution(d, tau, k);
                m.outputs.push_back(write_file(dir / "subsolution.csv", [&](std::ostream& os) {
                    meanfield::write_profile_csv(os, sub.profile);
                }));
            }
        }
        if (scan) {
            std::vector<double> ks;
            for (double f : {0.02, 0.05, 0.1, 0.25, 0.5, 1.0001, 1.05, 1.2})
                ks.push_back(f * km);
            m.params["scan_iters"] = scan_iters;
            const auto rows = experiments::k_scan(d, tau, ks, scan_iters, 32, 513);
            std::ostringstream csv;
            csv << "k,k_over_k_min,subsolution_exists,valid,margin\n";
            for (const auto& r : rows)
                csv << format_double(r.k) << ',' << format_double(r.k / km) << ','
                    << r.subsolution_exists << ',' << r.valid << ',' << format_double(r.margin) << '\n';
            txt << csv.str();
            if (!out_dir.empty())
                m.outputs.push_back(write_file(fs::path(out_dir) / "k_scan.csv",
                                               [&](std::ostream& os) { os << csv.str(); }));
        }
        if (!out_dir.empty()) {
            m.outputs.push_back(write_file(fs::path(out_dir) / "subsolution.txt",
                                           [&](std::ostream& os) { os << txt.str(); }));
            m.write(fs::path(out_dir) / "manifest.json");
        }
        out << txt.str();
        return kExitOk;
    }
};

// ---- check ------------------------------------------------------------------

int condition_code(const std::string& c) {
    if (c == "symmetry")
        return 1;
    if (c == "z-monotonicity")
        return 2;
    if (c == "w-monotonicity")
        return 3;
    return 4;
}

struct CheckCmd {
    std::string profile;
    int d = 2;
    double tau = 3.0, k = 1.0, quad_tol = 1e-8;
    bool use_operator = false;
    std::string out_dir;

    void add(CLI::App& app) {
        auto* s = app.add_subcommand("check", "check the validity conditions of a half-space profile");
        s->add_option("--profile", profile, "profile CSV (w,z,f)")->required()->check(CLI::ExistingFile);
        s->add_option("--d", d, "dimension")->capture_default_str();
        s->add_option("--tau", tau, "power-law exponent")->capture_default_str();
        s->add_option("--k", k, "edge constant")->required();
        s->add_option("--quad-tol", quad_tol, "relative quadrature tolerance")->capture_default_str();
        s->add_flag("--operator", use_operator, "also check f <= T f on z >= 0");
        s->add_option("--out", out_dir, "write the report and violations here");
    }

    int run(std::ostream& out) {
        meanfield::ProfileMeta meta;
        meta.d = d;
        meta.tau = tau;
        meta.k = k;
        meta.quad_tol = quad_tol;
        const auto f = meanfield::read_profile_csv(fs::path(profile), meta);
        if (f.geometry().is_radial())
            throw std::invalid_argument("check: half-space profiles only");
        const auto rep = theory::check_valid(f, use_operator);
        const std::string txt = experiments::format_validity(rep);
        if (!out_dir.empty()) {
            const fs::path dir(out_dir);
            Manifest m{"check",
                       {{"profile", profile}, {"profile_sha256", sha256_hex(profile)}, {"d", d},
                        {"tau", tau}, {"k", k}, {"quad_tol", quad_tol}, {"operator", use_operator}},
                       std::nullopt,
                       {}};
            m.outputs.push_back(write_file(dir / "validity_report.txt", [&](std::ostream& os) { os << txt; }));
            m.outputs.push_back(write_file(dir / "violations.csv", [&](std::ostream& os) {
                os << "condition,w,z,amount,tolerance\n";
                for (const auto& v : rep.violations)
                    os << condition_code(v.condition) << ',' << format_double(v.w) << ','
                       << format_double(v.z) << ',' << format_double(v.amount) << ','
                       << format_double(v.tolerance) << '\n';
            }));
            m.write(dir / "manifest.json");
        }
        out << txt;
        return kExitOk;
    }
};

// ---- erosion ----------------------------------------------------------------

struct ErosionCmd {
    double r = 100.0, eps = 0.5, tau = 3.0, k = 0.0;
    int tmax = 20;
    theory::ErosionGrid grid;
    std::string out_dir;

    void add(CLI::App& app) {
        auto* s = app.add_subcommand("erosion", "radial vs shifted half-space iteration");
        s->add_option("--r", r, "ball radius")->capture_default_str();
        s->add_option("--eps", eps, "exponent in (0, 1)")->capture_default_str();
        s->add_option("--tau", tau, "power-law exponent")->capture_default_str();
        s->add_option("--k", k, "edge constant")->required();
        s->add_option("--tmax", tmax, "iterations")->capture_default_str();
        s->add_option("--nw", grid.n_w, "weight nodes")->capture_default_str();
        s->add_option("--spacing", grid.h, "node spacing")->capture_default_str();
        s->add_option("--margin", grid.margin, "radial grid margin beyond the edge radius")
            ->capture_default_str();
        s->add_option("--out", out_dir, "output directory");
    }

    int run(std::ostream& out) {
        const auto rep = theory::check_erosion_domination(r, eps, tau, k, tmax, grid);
        const std::string txt = experiments::format_erosion(rep);
        if (!out_dir.empty()) {
            const fs::path dir(out_dir);
            Manifest m{"erosion",
                       {{"r", r}, {"eps", eps}, {"tau", tau}, {"k", k}, {"tmax", tmax},
                        {"n_w", grid.n_w}, {"h", grid.h}, {"margin", grid.margin}},
                       std::nullopt,
                       {}};
            m.outputs.push_back(write_file(dir / "erosion_report.txt", [&](std::ostream& os) { os << txt; }));
            m.outputs.push_back(write_file(dir / "erosion_series.csv", [&](std::ostream& os) {
                os << "t,crossing,shift\n";
                for (std::size_t t = 0; t < rep.crossing.size(); ++t)
                    os << t << ',' << format_double(rep.crossing[t]) << ','
                       << format_double(static_cast<double>(t) * rep.delta) << '\n';
            }));
            m.outputs.push_back(write_file(dir / "violations.csv", [&](std::ostream& os) {
                os << "t,w,rho,g,f_shifted,tolerance\n";
                if (const auto& v = rep.first_violation)
                    os << v->t << ',' << format_double(v->w) << ',' << format_double(v->rho) << ','
                       << format_double(v->g) << ',' << format_double(v->f_shifted) << ','
                       << format_double(v->tolerance) << '\n';
            }));
            m.write(dir / "manifest.json");
        }
        out << txt;
        return kExitOk;
    }
};

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Majority dynamics on geometric inhomogeneous random graphs", "girg-lab"};
    app.require_subcommand(1);
    app.fallthrough();
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads (default: GIRG_LAB_JOBS, then all cores)");
    bool show_version = false;
    app.add_flag("--version", show_version, "print the build identifier");
    app.set_version_flag(); // handled by hand so the output goes to `out`

    GenerateCmd gen;
    SimulateCmd sim;
    SweepCmd sweep;
    MeanfieldCmd mf;
    SubsolutionCmd sub;
    CheckCmd check;
    ErosionCmd ero;
    gen.add(app);
    sim.add(app);
    sweep.add(app);
    mf.add(app);
    sub.add(app);
    check.add(app);
    ero.add(app);

    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--version") {
            out << version_string() << '\n';
            return kExitOk;
        }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (jobs < 0) {
        err << "error: --jobs must be >= 0\n";
        return kExitUsage;
    }
    if (jobs > 0)
        set_job_count(jobs);

    try {
        const auto* s = app.get_subcommands().front();
        const std::string name = s->get_name();
        if (name == "generate")
            return gen.run(out);
        if (name == "simulate")
            return sim.run(out);
        if (name == "sweep")
            return sweep.run(out, err);
        if (name == "meanfield")
            return mf.run(out);
        if (name == "subsolution")
            return sub.run(out);
        if (name == "check")
            return check.run(out);
        if (name == "erosion")
            return ero.run(out);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace girglab::cli
