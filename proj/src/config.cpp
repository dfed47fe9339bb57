#include "annulus/config.hpp"
#include "annulus/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace annulus {

namespace {

std::string trim(const std::string& s)
{
    const char* ws = " \t\r";
    size_t a = s.find_first_not_of(ws);
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(ws) - a + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError("key '" + key + "': expected a finite number, got '" + v + "'");
    return x;
}

long to_int(const std::string& key, const std::string& v)
{
    long x = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return x;
}

void need(bool ok, const std::string& key, const std::string& range)
{
    if (!ok) throw ConfigError("key '" + key + "' out of range: expected " + range);
}

}  // namespace

void RunConfig::validate() const
{
    geometry.validate();
    const AnnulusConfig& g = geometry;
    need(eps > 0.0, "eps", "eps > 0");
    // bands plus the 0.3 eps grid margin must stay disjoint and inside the walls
    need(g.r1 < g.R1 - 1.3 * eps && g.R1 + 1.3 * eps < g.R2 - 1.3 * eps && g.R2 + 1.3 * eps < g.r2, "eps",
         "1.3 eps below the distances r1..R1, (R2-R1)/2, R2..r2");
    need(kappa > 0.0 && kappa < 0.5, "kappa", "0 < kappa < 0.5");
    need(m >= 1, "m", "m >= 1");
    need(M >= 1 && M <= 64, "M", "1 <= M <= 64");
    need(sigma >= 0.0 && sigma <= eps, "sigma", "0 <= sigma <= eps");
    need(steps >= 1, "steps", "steps >= 1");
    need(branch_ntheta >= 8 && branch_ntheta > 2 * m, "branch_ntheta", "branch_ntheta >= 8 and > 2m");
    need(nr >= 64, "nr", "nr >= 64");
    need(ntheta >= 8 && ntheta % 2 == 0 && ntheta > 2 * m, "ntheta", "even ntheta >= 8 and > 2m");
    need(dt > 0.0, "dt", "dt > 0");
    need(T >= 0.0, "T", "T >= 0 (0 selects one rotation period)");
    need(checkpoint_every >= 1, "checkpoint_every", "checkpoint_every >= 1");
}

std::string RunConfig::to_text() const
{
    std::ostringstream os;
    os.precision(17);
    os << "r1=" << geometry.r1 << "\nr2=" << geometry.r2 << "\nR1=" << geometry.R1 << "\nR2=" << geometry.R2
       << "\nA=" << geometry.A << "\nB=" << geometry.B << "\neps=" << eps << "\nkappa=" << kappa << "\nm=" << m
       << "\nM=" << M << "\nsigma=" << sigma << "\nsteps=" << steps << "\nbranch_ntheta=" << branch_ntheta
       << "\nnr=" << nr << "\nntheta=" << ntheta << "\ndt=" << dt << "\nT=" << T
       << "\ncheckpoint_every=" << checkpoint_every << "\ntwo_thirds=" << (two_thirds ? 1 : 0) << "\nseed=" << seed
       << "\n";
    return os.str();
}

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides)
{
    RunConfig c;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto dbl = [](double& d) -> Setter { return [&d](const std::string& k, const std::string& v) { d = to_double(k, v); }; };
    auto intg = [](int& i) -> Setter {
        return [&i](const std::string& k, const std::string& v) {
            long x = to_int(k, v);
            need(x >= -1000000000L && x <= 1000000000L, k, "|value| <= 1e9");
            i = static_cast<int>(x);
        };
    };
    const std::map<std::string, Setter> keys = {
        {"r1", dbl(c.geometry.r1)},
        {"r2", dbl(c.geometry.r2)},
        {"R1", dbl(c.geometry.R1)},
        {"R2", dbl(c.geometry.R2)},
        {"A", dbl(c.geometry.A)},
        {"B", dbl(c.geometry.B)},
        {"eps", dbl(c.eps)},
        {"kappa", dbl(c.kappa)},
        {"m", intg(c.m)},
        {"M", intg(c.M)},
        {"sigma", dbl(c.sigma)},
        {"steps", intg(c.steps)},
        {"branch_ntheta", intg(c.branch_ntheta)},
        {"nr", intg(c.nr)},
        {"ntheta", intg(c.ntheta)},
        {"dt", dbl(c.dt)},
        {"T", dbl(c.T)},
        {"checkpoint_every", intg(c.checkpoint_every)},
        {"two_thirds",
         [&c](const std::string& k, const std::string& v) {
             long x = to_int(k, v);
             need(x == 0 || x == 1, k, "0 or 1");
             c.two_thirds = x == 1;
         }},
        {"seed",
         [&c](const std::string& k, const std::string& v) {
             long x = to_int(k, v);
             need(x >= 0 && x <= 4294967295L, k, "0 <= seed < 2^32");
             c.seed = static_cast<unsigned>(x);
         }},
    };
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError("unknown key '" + key + "' on line " + std::to_string(lineno));
        if (!seen.insert(key).second) throw ConfigError("key '" + key + "' given twice");
        it->second(key, val);
    }
    for (const std::string& o : overrides) {
        size_t eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected key=value");
        std::string key = trim(o.substr(0, eq));
        auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError("unknown key '" + key + "' in override");
        it->second(key, trim(o.substr(eq + 1)));
    }
    c.validate();
    return c;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

}  // namespace annulus
