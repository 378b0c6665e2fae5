#include "multigibbs/config.hpp"

#include "multigibbs/errors.hpp"

#include <toml.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace multigibbs {

namespace {

// "name(a, b)" -> {"name", {"a", "b"}}
std::pair<std::string, std::vector<std::string>> split_call(const std::string &text) {
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string s = trim(text);
    const auto open = s.find('(');
    if (open == std::string::npos) {
        return {s, {}};
    }
    if (s.back() != ')') {
        throw DomainError("config: malformed call '" + text + "'");
    }
    std::vector<std::string> args;
    std::stringstream body(s.substr(open + 1, s.size() - open - 2));
    std::string item;
    while (std::getline(body, item, ',')) {
        args.push_back(trim(item));
    }
    return {trim(s.substr(0, open)), args};
}

double to_number(const std::string &s) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw DomainError("config: '" + s + "' is not a number");
    }
    return x;
}

void expect_args(const std::string &name, const std::vector<std::string> &args, std::size_t count) {
    if (args.size() != count) {
        throw DomainError("config: '" + name + "' takes " + std::to_string(count) + " argument(s)");
    }
}

double as_double(const toml::node &node, const std::string &key) {
    if (auto v = node.value<double>()) {
        return *v;
    }
    throw DomainError("config: '" + key + "' must be a number");
}

std::int64_t as_int(const toml::node &node, const std::string &key) {
    if (node.is_integer()) {
        return *node.value<std::int64_t>();
    }
    throw DomainError("config: '" + key + "' must be an integer");
}

std::string as_string(const toml::node &node, const std::string &key) {
    if (auto v = node.value<std::string>()) {
        return *v;
    }
    throw DomainError("config: '" + key + "' must be a string");
}

const toml::array &as_array(const toml::node &node, const std::string &key) {
    if (const auto *a = node.as_array()) {
        return *a;
    }
    throw DomainError("config: '" + key + "' must be an array");
}

std::vector<double> doubles(const toml::node &node, const std::string &key) {
    std::vector<double> out;
    for (const auto &x : as_array(node, key)) {
        out.push_back(as_double(x, key));
    }
    return out;
}

template <typename T>
void read(const toml::table &t, const char *key, T &dst) {
    const toml::node *node = t.get(key);
    if (!node) {
        return;
    }
    if constexpr (std::is_same_v<T, double>) {
        dst = as_double(*node, key);
    } else if constexpr (std::is_same_v<T, std::string>) {
        dst = as_string(*node, key);
    } else if constexpr (std::is_integral_v<T>) {
        dst = static_cast<T>(as_int(*node, key));
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        dst = doubles(*node, key);
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        dst.clear();
        for (const auto &x : as_array(*node, key)) {
            dst.push_back(as_string(x, key));
        }
    } else if constexpr (std::is_same_v<T, std::vector<int>> || std::is_same_v<T, std::vector<std::uint64_t>>) {
        dst.clear();
        for (const auto &x : as_array(*node, key)) {
            const auto v = as_int(x, key);
            if (v < 0) {
                throw DomainError(std::string("config: '") + key + "' entries must be non-negative");
            }
            dst.push_back(static_cast<typename T::value_type>(v));
        }
    }
}

const toml::table *section(const toml::table &root, const char *name) {
    const toml::node *node = root.get(name);
    if (!node) {
        return nullptr;
    }
    if (const auto *t = node->as_table()) {
        return t;
    }
    throw DomainError(std::string("config: [") + name + "] must be a table");
}

void check_keys(const toml::table &t, std::initializer_list<const char *> allowed, const std::string &where) {
    for (const auto &[k, v] : t) {
        bool ok = false;
        for (const char *a : allowed) {
            ok = ok || k.str() == a;
        }
        if (!ok) {
            throw DomainError("config: unknown key '" + std::string(k.str()) + "' in " + where);
        }
    }
}

toml::array to_array(const std::vector<double> &v) {
    toml::array a;
    for (double x : v) {
        a.push_back(x);
    }
    return a;
}

template <typename I>
toml::array to_int_array(const std::vector<I> &v) {
    toml::array a;
    for (I x : v) {
        a.push_back(static_cast<std::int64_t>(x));
    }
    return a;
}

void require(bool ok, const char *what) {
    if (!ok) {
        throw DomainError(std::string("config: ") + what);
    }
}

void validate(const ExperimentConfig &c) {
    require(c.n >= 1, "coupling n must be positive");
    require(c.solver.n_random >= 0 && c.solver.constant_grid >= 0, "solver start counts must be non-negative");
    require(c.solver.refine >= 1, "solver refine must be positive");
    require(c.solver.damping > 0.0 && c.solver.damping <= 1.0, "solver damping must lie in (0, 1]");
    require(c.solver.max_iter >= 1 && c.solver.tol > 0.0, "solver max_iter and tol must be positive");
    require(c.sampler.sweeps >= 0 && c.sampler.burn_in >= 0, "sampler sweeps and burn_in must be non-negative");
    require(c.sampler.thin >= 1, "sampler thin must be positive");
    require(c.scan.steps >= 1, "scan steps must be positive");
    require(c.weak_law.snapshots >= 1 && c.weak_law.subsample >= 1 && c.weak_law.repeats >= 1,
            "weak_law snapshots, subsample and repeats must be positive");
    require(c.weak_law.p_prime >= 1.0, "weak_law p_prime must be at least 1");
    for (int n : c.weak_law.ns) {
        require(n >= 1, "weak_law ns must be positive");
    }
    require(c.critical.lo < c.critical.hi && c.critical.tol > 0.0, "critical needs lo < hi and tol > 0");
    require(c.exact.n_min >= 1 && c.exact.n_min <= c.exact.n_max, "exact needs 1 <= n_min <= n_max");
}

} // namespace

BaseMeasure make_base(const BaseSpec &spec) {
    if (spec.name.empty()) {
        return BaseMeasure(Eigen::Map<const Eigen::VectorXd>(spec.points.data(), static_cast<Eigen::Index>(spec.points.size())),
                           Eigen::Map<const Eigen::VectorXd>(spec.weights.data(), static_cast<Eigen::Index>(spec.weights.size())));
    }
    const auto [name, args] = split_call(spec.name);
    if (name == "ising" || name == "ising_pm1") {
        expect_args(name, args, 0);
        return BaseMeasure::ising_pm1();
    }
    if (name == "ising_tilted") {
        expect_args(name, args, 1);
        return BaseMeasure::ising_tilted(to_number(args[0]));
    }
    if (name == "bernoulli") {
        expect_args(name, args, 1);
        return BaseMeasure::bernoulli(to_number(args[0]));
    }
    if (name == "three_point") {
        expect_args(name, args, 1);
        return BaseMeasure::three_point(to_number(args[0]));
    }
    if (name == "quadrature") {
        if (args.size() != 3 && args.size() != 4) {
            throw DomainError("config: quadrature(density, a, b[, nodes])");
        }
        const int nodes = args.size() == 4 ? static_cast<int>(to_number(args[3])) : 64;
        return BaseMeasure::quadrature(args[0], to_number(args[1]), to_number(args[2]), nodes);
    }
    throw DomainError("config: unknown base measure '" + spec.name + "'");
}

MotifGraph make_motif(const MotifSpec &spec) {
    if (spec.name.empty()) {
        return MotifGraph(spec.v, spec.edges);
    }
    const auto [name, args] = split_call(spec.name);
    if (name == "K2" && args.empty()) {
        return MotifGraph::K2();
    }
    if (name == "K3" && args.empty()) {
        return MotifGraph::K3();
    }
    if (name == "K1_2" && args.empty()) {
        return MotifGraph::K1_2();
    }
    if (name == "Kv") {
        expect_args(name, args, 1);
        return MotifGraph::complete(static_cast<int>(to_number(args[0])));
    }
    throw DomainError("config: unknown motif '" + spec.name + "'");
}

StepKernel make_kernel(const KernelSpec &spec) {
    if (spec.name.empty()) {
        const auto k = static_cast<Eigen::Index>(spec.masses.size());
        Eigen::MatrixXd values(k, k);
        if (static_cast<Eigen::Index>(spec.values.size()) != k) {
            throw DomainError("config: kernel values must be k x k");
        }
        for (Eigen::Index a = 0; a < k; ++a) {
            if (static_cast<Eigen::Index>(spec.values[a].size()) != k) {
                throw DomainError("config: kernel values must be k x k");
            }
            for (Eigen::Index b = 0; b < k; ++b) {
                values(a, b) = spec.values[a][b];
            }
        }
        return StepKernel(Eigen::Map<const Eigen::VectorXd>(spec.masses.data(), k), values);
    }
    const auto [name, args] = split_call(spec.name);
    if (name == "constant") {
        expect_args(name, args, 1);
        return StepKernel::constant(to_number(args[0]));
    }
    if (name == "complete" && args.empty()) {
        return StepKernel::constant(1.0);
    }
    if (name == "tripartite" && args.empty()) {
        return StepKernel::tripartite();
    }
    if (name == "bipartite") {
        expect_args(name, args, 1);
        return StepKernel::bipartite(to_number(args[0]));
    }
    throw DomainError("config: unknown kernel '" + spec.name + "'");
}

ExperimentConfig parse_config(const std::string &text, std::optional<std::uint64_t> seed_override) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error &e) {
        throw DomainError(std::string("config: ") + std::string(e.description()));
    }
    check_keys(root,
               {"seed", "theta", "B", "base", "motif", "coupling", "out", "solver", "sampler", "scan", "weak_law",
                "critical", "exact"},
               "the top level");
    ExperimentConfig cfg;
    const toml::node *seed = root.get("seed");
    if (!seed && !seed_override) {
        throw DomainError("config: 'seed' is mandatory");
    }
    if (seed) {
        const auto s = as_int(*seed, "seed");
        if (s < 0) {
            throw DomainError("config: 'seed' must be non-negative");
        }
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (seed_override) {
        cfg.seed = *seed_override;
    }
    read(root, "theta", cfg.theta);
    read(root, "B", cfg.B);
    read(root, "out", cfg.out);

    if (const toml::node *b = root.get("base")) {
        if (const auto *t = b->as_table()) {
            check_keys(*t, {"points", "weights"}, "base");
            cfg.base.name.clear();
            read(*t, "points", cfg.base.points);
            read(*t, "weights", cfg.base.weights);
        } else {
            cfg.base.name = as_string(*b, "base");
        }
    }
    if (const toml::node *m = root.get("motif")) {
        if (const auto *t = m->as_table()) {
            check_keys(*t, {"v", "edges"}, "motif");
            cfg.motif.name.clear();
            read(*t, "v", cfg.motif.v);
            if (const toml::node *e = t->get("edges")) {
                for (const auto &pair : as_array(*e, "edges")) {
                    const auto &ab = as_array(pair, "edges");
                    if (ab.size() != 2) {
                        throw DomainError("config: motif edges are [a, b] pairs");
                    }
                    cfg.motif.edges.emplace_back(static_cast<int>(as_int(*ab.get(0), "edges")),
                                                 static_cast<int>(as_int(*ab.get(1), "edges")));
                }
            }
        } else {
            cfg.motif.name = as_string(*m, "motif");
        }
    }
    if (const toml::table *c = section(root, "coupling")) {
        check_keys(*c, {"kernel", "n"}, "[coupling]");
        read(*c, "n", cfg.n);
        if (const toml::node *k = c->get("kernel")) {
            if (const auto *t = k->as_table()) {
                check_keys(*t, {"masses", "values"}, "kernel");
                cfg.kernel.name.clear();
                read(*t, "masses", cfg.kernel.masses);
                if (const toml::node *vals = t->get("values")) {
                    for (const auto &row : as_array(*vals, "values")) {
                        cfg.kernel.values.push_back(doubles(row, "values"));
                    }
                }
            } else {
                cfg.kernel.name = as_string(*k, "kernel");
            }
        }
    }
    if (const toml::table *t = section(root, "solver")) {
        check_keys(*t, {"n_random", "constant_grid", "refine", "damping", "max_iter", "tol", "start"}, "[solver]");
        read(*t, "n_random", cfg.solver.n_random);
        read(*t, "constant_grid", cfg.solver.constant_grid);
        read(*t, "refine", cfg.solver.refine);
        read(*t, "damping", cfg.solver.damping);
        read(*t, "max_iter", cfg.solver.max_iter);
        read(*t, "tol", cfg.solver.tol);
        read(*t, "start", cfg.solver.start);
    }
    if (const toml::table *t = section(root, "sampler")) {
        check_keys(*t, {"sweeps", "burn_in", "thin", "scan", "stats", "moment_p", "moment_q"}, "[sampler]");
        read(*t, "sweeps", cfg.sampler.sweeps);
        read(*t, "burn_in", cfg.sampler.burn_in);
        read(*t, "thin", cfg.sampler.thin);
        read(*t, "scan", cfg.sampler.scan);
        read(*t, "stats", cfg.sampler.stats);
        read(*t, "moment_p", cfg.sampler.moment_p);
        read(*t, "moment_q", cfg.sampler.moment_q);
    }
    if (const toml::table *t = section(root, "scan")) {
        check_keys(*t, {"theta_min", "theta_max", "steps"}, "[scan]");
        read(*t, "theta_min", cfg.scan.theta_min);
        read(*t, "theta_max", cfg.scan.theta_max);
        read(*t, "steps", cfg.scan.steps);
    }
    if (const toml::table *t = section(root, "weak_law")) {
        check_keys(*t, {"ns", "seeds", "snapshots", "subsample", "repeats", "p_prime"}, "[weak_law]");
        read(*t, "ns", cfg.weak_law.ns);
        read(*t, "seeds", cfg.weak_law.seeds);
        read(*t, "snapshots", cfg.weak_law.snapshots);
        read(*t, "subsample", cfg.weak_law.subsample);
        read(*t, "repeats", cfg.weak_law.repeats);
        read(*t, "p_prime", cfg.weak_law.p_prime);
    }
    if (const toml::table *t = section(root, "critical")) {
        check_keys(*t, {"lo", "hi", "tol", "expected", "tolerance"}, "[critical]");
        read(*t, "lo", cfg.critical.lo);
        read(*t, "hi", cfg.critical.hi);
        read(*t, "tol", cfg.critical.tol);
        if (const toml::node *e = t->get("expected")) {
            cfg.critical.expected = as_double(*e, "expected");
        }
        read(*t, "tolerance", cfg.critical.tolerance);
    }
    if (const toml::table *t = section(root, "exact")) {
        check_keys(*t, {"n_min", "n_max"}, "[exact]");
        read(*t, "n_min", cfg.exact.n_min);
        read(*t, "n_max", cfg.exact.n_max);
    }

    validate(cfg);
    // Fail early on names that do not resolve.
    make_base(cfg.base);
    make_motif(cfg.motif);
    make_kernel(cfg.kernel);
    return cfg;
}

ExperimentConfig load_config(const std::string &path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) {
        throw DomainError("config: cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), seed_override);
}

std::string serialize_config(const ExperimentConfig &cfg) {
    if (cfg.seed > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        throw DomainError("config: seed does not fit a TOML integer");
    }
    toml::table root;
    root.insert("seed", static_cast<std::int64_t>(cfg.seed));
    root.insert("theta", cfg.theta);
    root.insert("B", cfg.B);
    root.insert("out", cfg.out);
    if (cfg.base.name.empty()) {
        root.insert("base", toml::table{{"points", to_array(cfg.base.points)}, {"weights", to_array(cfg.base.weights)}});
    } else {
        root.insert("base", cfg.base.name);
    }
    if (cfg.motif.name.empty()) {
        toml::array edges;
        for (auto [a, b] : cfg.motif.edges) {
            edges.push_back(toml::array{static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)});
        }
        root.insert("motif", toml::table{{"v", static_cast<std::int64_t>(cfg.motif.v)}, {"edges", edges}});
    } else {
        root.insert("motif", cfg.motif.name);
    }
    toml::table coupling{{"n", static_cast<std::int64_t>(cfg.n)}};
    if (cfg.kernel.name.empty()) {
        toml::array values;
        for (const auto &row : cfg.kernel.values) {
            values.push_back(to_array(row));
        }
        coupling.insert("kernel", toml::table{{"masses", to_array(cfg.kernel.masses)}, {"values", values}});
    } else {
        coupling.insert("kernel", cfg.kernel.name);
    }
    root.insert("coupling", coupling);

    const auto &so = cfg.solver;
    root.insert("solver", toml::table{{"n_random", so.n_random},
                                      {"constant_grid", so.constant_grid},
                                      {"refine", so.refine},
                                      {"damping", so.damping},
                                      {"max_iter", static_cast<std::int64_t>(so.max_iter)},
                                      {"tol", so.tol},
                                      {"start", to_array(so.start)}});
    const auto &sa = cfg.sampler;
    toml::array stats;
    for (const auto &s : sa.stats) {
        stats.push_back(s);
    }
    root.insert("sampler", toml::table{{"sweeps", static_cast<std::int64_t>(sa.sweeps)},
                                       {"burn_in", static_cast<std::int64_t>(sa.burn_in)},
                                       {"thin", static_cast<std::int64_t>(sa.thin)},
                                       {"scan", sa.scan},
                                       {"stats", stats},
                                       {"moment_p", sa.moment_p},
                                       {"moment_q", sa.moment_q}});
    root.insert("scan", toml::table{{"theta_min", cfg.scan.theta_min},
                                    {"theta_max", cfg.scan.theta_max},
                                    {"steps", cfg.scan.steps}});
    const auto &wl = cfg.weak_law;
    root.insert("weak_law", toml::table{{"ns", to_int_array(wl.ns)},
                                        {"seeds", to_int_array(wl.seeds)},
                                        {"snapshots", wl.snapshots},
                                        {"subsample", wl.subsample},
                                        {"repeats", wl.repeats},
                                        {"p_prime", wl.p_prime}});
    toml::table critical{{"lo", cfg.critical.lo}, {"hi", cfg.critical.hi}, {"tol", cfg.critical.tol},
                         {"tolerance", cfg.critical.tolerance}};
    if (cfg.critical.expected) {
        critical.insert("expected", *cfg.critical.expected);
    }
    root.insert("critical", critical);
    root.insert("exact", toml::table{{"n_min", cfg.exact.n_min}, {"n_max", cfg.exact.n_max}});

    std::ostringstream out;
    out << root << '\n';
    return out.str();
}

MultistartSpec multistart_of(const ExperimentConfig &cfg) {
    MultistartSpec m;
    m.n_random = cfg.solver.n_random;
    m.constant_grid = cfg.solver.constant_grid;
    m.refine = cfg.solver.refine;
    m.seed = cfg.seed;
    m.fixed_point.damping = cfg.solver.damping;
    m.fixed_point.max_iter = cfg.solver.max_iter;
    m.fixed_point.tol = cfg.solver.tol;
    return m;
}

ModelSpec model_of(const ExperimentConfig &cfg) {
    return ModelSpec(make_motif(cfg.motif), make_kernel(cfg.kernel), cfg.n, make_base(cfg.base), cfg.theta, cfg.B);
}

ChainOptions chain_options_of(const ExperimentConfig &cfg) {
    ChainOptions c;
    c.sweeps = cfg.sampler.sweeps;
    c.burn_in = cfg.sampler.burn_in;
    c.thin = cfg.sampler.thin;
    c.seed = cfg.seed;
    c.stats = cfg.sampler.stats;
    if (cfg.sampler.scan == "random") {
        c.scan = ScanOrder::random;
    } else if (cfg.sampler.scan == "sequential") {
        c.scan = ScanOrder::sequential;
    } else {
        throw DomainError("config: scan must be 'random' or 'sequential'");
    }
    c.moment_p = cfg.sampler.moment_p;
    c.moment_q = cfg.sampler.moment_q;
    return c;
}

} // namespace multigibbs
