#include "gevqmc/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "gevqmc/errors.hpp"
#include "gevqmc/io.hpp"
#include "gevqmc/lattice.hpp"

namespace gevqmc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T v{};
    const std::string t = trim(value);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError("config: key '" + key + "' has malformed value '" + value + "'");
    return v;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

struct Entry {
    std::function<std::string(const StudyConfig&)> get;
    std::function<void(StudyConfig&, const std::string&, const std::string&)> set;
};

#define REAL_KEY(name)                                                                              \
    {#name, {[](const StudyConfig& c) { return format_real(c.name); },                              \
             [](StudyConfig& c, const std::string& k, const std::string& v) { c.name = parse_number<double>(k, v); }}}
#define INT_KEY(name, type)                                                                         \
    {#name, {[](const StudyConfig& c) { return std::to_string(c.name); },                           \
             [](StudyConfig& c, const std::string& k, const std::string& v) { c.name = parse_number<type>(k, v); }}}
#define STRING_KEY(name)                                                                            \
    {#name, {[](const StudyConfig& c) { return c.name; },                                           \
             [](StudyConfig& c, const std::string&, const std::string& v) { c.name = trim(v); }}}

std::vector<int> to_int_vector(const std::string& key, const std::string& value) {
    std::vector<int> out;
    try {
        for (auto x : parse_int_list(value)) out.push_back(static_cast<int>(x));
    } catch (const ConfigError&) {
        throw ConfigError("config: key '" + key + "' has malformed list '" + value + "'");
    }
    return out;
}

const std::map<std::string, Entry>& table() {
    static const std::map<std::string, Entry> t = {
        STRING_KEY(field),
        REAL_KEY(vartheta),
        REAL_KEY(amplitude),
        REAL_KEY(sigma),
        REAL_KEY(C_xi),
        REAL_KEY(beta),
        REAL_KEY(tau),
        REAL_KEY(theta),
        REAL_KEY(r),
        REAL_KEY(delta),
        REAL_KEY(C),
        REAL_KEY(p),
        INT_KEY(s, int),
        INT_KEY(s_reference, int),
        {"s_list", {[](const StudyConfig& c) { return join(c.s_list); },
                    [](StudyConfig& c, const std::string& k, const std::string& v) { c.s_list = to_int_vector(k, v); }}},
        INT_KEY(k, int),
        INT_KEY(k_reference, int),
        {"k_list", {[](const StudyConfig& c) { return join(c.k_list); },
                    [](StudyConfig& c, const std::string& k, const std::string& v) { c.k_list = to_int_vector(k, v); }}},
        {"n_list", {[](const StudyConfig& c) { return join(c.n_list); },
                    [](StudyConfig& c, const std::string& k, const std::string& v) {
                        try {
                            c.n_list = parse_int_list(v);
                        } catch (const ConfigError&) {
                            throw ConfigError("config: key '" + k + "' has malformed list '" + v + "'");
                        }
                    }}},
        INT_KEY(R, int),
        INT_KEY(n_trunc, std::int64_t),
        INT_KEY(n_fem, std::int64_t),
        INT_KEY(seed, std::uint64_t),
        STRING_KEY(kernel),
        STRING_KEY(quadrature),
        STRING_KEY(lattice_dir),
        STRING_KEY(output),
    };
    return t;
}

#undef REAL_KEY
#undef INT_KEY
#undef STRING_KEY

}  // namespace

const std::vector<std::string>& StudyConfig::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> out;
        for (const auto& [name, entry] : table()) out.push_back(name);
        return out;
    }();
    return k;
}

void StudyConfig::set(const std::string& key, const std::string& value) {
    const auto it = table().find(key);
    if (it == table().end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second.set(*this, key, value);
}

std::string StudyConfig::get(const std::string& key) const {
    const auto it = table().find(key);
    if (it == table().end()) throw ConfigError("config: unknown key '" + key + "'");
    return it->second.get(*this);
}

SpaceParams StudyConfig::space() const {
    SpaceParams sp;
    sp.tau = tau;
    sp.theta = theta;
    sp.r = r;
    sp.delta = delta;
    sp.beta = beta;
    return sp;
}

GevreyField StudyConfig::gevrey_field(int terms) const {
    GevreyField f;
    f.vartheta = vartheta;
    f.s = terms;
    f.amplitude = amplitude;
    f.sigma = sigma;
    f.C_xi = C_xi;
    return f;
}

double StudyConfig::summability_p() const { return p > 0.0 ? p : 1.0 / vartheta + 1e-3; }

void StudyConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (field != "gevrey" && field != "lognormal") fail("field must be 'gevrey' or 'lognormal'");
    if (quadrature != "centroid" && quadrature != "edge_midpoint") fail("quadrature must be 'centroid' or 'edge_midpoint'");
    if (!(vartheta > 1.0)) fail("vartheta must exceed 1");
    if (!(amplitude >= 0.0)) fail("amplitude must be >= 0");
    if (!(sigma >= 1.0)) fail("sigma must be >= 1");
    if (!(C_xi > 0.0) || !(C > 0.0)) fail("C_xi and C must be positive");
    if (!(tau <= beta)) fail("tau must not exceed beta");
    try {
        space().validate();
    } catch (const DomainError& e) {
        fail(e.what());
    }
    // alpha_j = amplitude j^-vartheta peaks at j = 1
    if (!(theta > 2.0 * amplitude))
        fail("theta = " + format_real(theta) + " must exceed 2 max_j alpha_j = " + format_real(2.0 * amplitude));
    const double pp = summability_p();
    if (!(pp > 0.0 && pp <= 1.0)) fail("p must lie in (0, 1]");
    if (!(pp > 1.0 / vartheta)) fail("p must exceed 1/vartheta for b to be p-summable");
    try {
        const double lambda = select_lambda(pp, sigma, space());
        if (!(2.0 * r * lambda > 1.0)) fail("2 r lambda must exceed 1 (zeta argument)");
    } catch (const DomainError& e) {
        fail(e.what());
    }
    if (s < 1) fail("s must be >= 1");
    if (R < 1) fail("R must be >= 1");
    if (n_list.empty()) fail("n_list must not be empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (!is_prime(n_list[i])) fail("n_list entry " + std::to_string(n_list[i]) + " is not prime");
        if (i > 0 && n_list[i] <= n_list[i - 1]) fail("n_list must be strictly increasing");
    }
    if (!is_prime(n_trunc)) fail("n_trunc must be prime");
    if (!is_prime(n_fem)) fail("n_fem must be prime");
    if (k < 1 || k > 10 || k_reference < 1 || k_reference > 10) fail("mesh levels must lie in 1..10");
    if (s_list.empty() || k_list.empty()) fail("s_list and k_list must not be empty");
    for (std::size_t i = 0; i < s_list.size(); ++i) {
        if (s_list[i] < 1) fail("s_list entries must be >= 1");
        if (i > 0 && s_list[i] <= s_list[i - 1]) fail("s_list must be strictly increasing");
    }
    if (s_reference < s_list.back()) fail("s_reference must be >= max s_list");
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        if (k_list[i] < 1) fail("k_list entries must be >= 1");
        if (i > 0 && k_list[i] <= k_list[i - 1]) fail("k_list must be strictly increasing");
    }
    if (k_reference < k_list.back()) fail("k_reference must be >= max k_list");
}

std::string StudyConfig::canonical() const {
    std::string out;
    for (const auto& [name, entry] : table()) {
        if (name == "output" || name == "lattice_dir") continue;
        out += name + "=" + entry.get(*this) + "\n";
    }
    return out;
}

std::string StudyConfig::hash() const { return hex64(fnv1a64(canonical())); }

void read_config(std::istream& is, StudyConfig& cfg) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void apply_full_scale(StudyConfig& cfg) {
    cfg.s = 100;
    cfg.k = 7;
    cfg.k_reference = 7;
    cfg.k_list = {1, 2, 3, 4, 5, 6};
    cfg.n_list = {17, 31, 67, 127, 263, 503, 1013, 2003, 4003, 8009, 16007, 32009, 63997};
    cfg.R = 16;
    cfg.s_reference = 256;
    cfg.s_list = {2, 4, 8, 16, 32, 64};
    cfg.n_trunc = 63997;
    cfg.n_fem = 63997;
}

}  // namespace gevqmc
