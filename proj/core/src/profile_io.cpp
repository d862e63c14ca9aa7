#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "girglab/graph_io.hpp"
#include "girglab/profile_io.hpp"

namespace girglab::meanfield {

namespace {

std::string num(double x) { return io::format_double(x); }

double parse(const std::string& s, std::size_t line) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw std::runtime_error("profile csv line " + std::to_string(line) + ": bad number '" + s +
                                 "'");
    return v;
}

} // namespace

void write_profile_csv(std::ostream& os, const Profile& f) {
    const bool radial = f.geometry().is_radial();
    os << (radial ? "w,rho,g\n" : "w,z,f\n");
    const auto& p = f.params();
    for (std::size_t i = 0; i < f.n_w(); ++i)
        for (std::size_t j = 0; j < f.n_x(); ++j)
            os << num(p.w_grid[i]) << ',' << num(p.x_grid[j]) << ',' << num(f.at(i, j)) << '\n';
}

void write_profile_csv(const std::filesystem::path& path, const Profile& f) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_profile_csv(os, f);
    if (!os)
        throw std::runtime_error("write failed: " + path.string());
}

Profile read_profile_csv(std::istream& is, const ProfileMeta& meta) {
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("profile csv: empty input");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    bool radial;
    if (line == "w,z,f")
        radial = false;
    else if (line == "w,rho,g")
        radial = true;
    else
        throw std::runtime_error("profile csv: unknown header '" + line + "'");

    std::vector<double> ws, xs, vals;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c) ||
            c.find(',') != std::string::npos)
            throw std::runtime_error("profile csv line " + std::to_string(lineno) +
                                     ": expected 3 fields");
        const double w = parse(a, lineno), x = parse(b, lineno), v = parse(c, lineno);
        if (ws.empty() || ws.back() != w) {
            if (!ws.empty() && !(w > ws.back()))
                throw std::runtime_error("profile csv line " + std::to_string(lineno) +
                                         ": weights must increase");
            ws.push_back(w);
        }
        if (ws.size() == 1)
            xs.push_back(x);
        else {
            const std::size_t j = vals.size() % xs.size();
            if (x != xs[j])
                throw std::runtime_error("profile csv line " + std::to_string(lineno) +
                                         ": spatial nodes differ between weight rows");
        }
        if (vals.size() / std::max<std::size_t>(xs.size(), 1) + 1 != ws.size() && ws.size() > 1)
            throw std::runtime_error("profile csv line " + std::to_string(lineno) +
                                     ": incomplete weight row");
        vals.push_back(v);
    }
    if (ws.empty() || vals.size() != ws.size() * xs.size())
        throw std::runtime_error("profile csv: rows do not form a full grid");

    MeanFieldParams p;
    p.d = meta.d;
    p.tau = meta.tau;
    p.k = meta.k;
    p.quad_tol = meta.quad_tol;
    p.truncated_lambda = meta.truncated_lambda;
    p.w_cap = ws.back();
    p.w_grid = std::move(ws);
    p.x_grid = std::move(xs);
    const Geometry g = radial ? Geometry::radial(meta.radius) : Geometry::halfspace();
    return Profile(std::move(p), g, std::move(vals));
}

Profile read_profile_csv(const std::filesystem::path& path, const ProfileMeta& meta) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    return read_profile_csv(is, meta);
}

} // namespace girglab::meanfield
