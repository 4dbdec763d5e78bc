#include "blockggm/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "blockggm/common.hpp"
#include "blockggm/dcsbm.hpp"
#include "blockggm/gwishart.hpp"
#include "blockggm/io.hpp"
#include "blockggm/multigraph.hpp"
#include "blockggm/posterior.hpp"
#include "blockggm/sics.hpp"
#include "blockggm/sun.hpp"

namespace fs = std::filesystem;

namespace blockggm {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string trim_copy(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

long parse_count(const std::string& value, const std::string& what) {
    const std::string s = trim_copy(value);
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size())
        throw input_error("config: cannot parse " + what + " '" + value + "'");
    return v;
}

double parse_real(const std::string& value, const std::string& what) {
    const std::string s = trim_copy(value);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw input_error("config: cannot parse " + what + " '" + value + "'");
    return v;
}

std::uint64_t parse_seed(const std::string& value) {
    const std::string s = trim_copy(value);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size())
        throw input_error("config: cannot parse seed '" + value + "'");
    return static_cast<std::uint64_t>(v);
}

bool parse_flag(const std::string& value, const std::string& what) {
    const std::string s = trim_copy(value);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw input_error("config: cannot parse " + what + " '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim_copy(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::vector<int> parse_labels(const std::string& value, const std::string& what) {
    const std::vector<std::string> items = split_list(value);
    if (items.empty())
        throw input_error("config: " + what + " needs a comma-separated label list");
    std::vector<int> labels(items.size());
    for (std::size_t i = 0; i < items.size(); ++i)
        labels[i] = static_cast<int>(parse_count(items[i], what));
    return labels;
}

std::string join_labels(const std::vector<int>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(labels[i]);
    }
    return out;
}

std::string join_edges(const std::vector<std::pair<int, int>>& edges) {
    std::string out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(edges[i].first) + "-" +
               std::to_string(edges[i].second);
    }
    return out;
}

/* Manifest for multigraph input: one CSV path per line, '#' comments,
   relative paths resolved against the manifest's directory. */
std::vector<std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open manifest: " + path);
    std::vector<std::string> paths;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string entry = trim_copy(line);
        if (entry.empty()) continue;
        fs::path p(entry);
        if (p.is_relative()) p = fs::path(path).parent_path() / p;
        paths.push_back(p.string());
    }
    if (paths.empty())
        throw input_error("manifest lists no data files: " + path);
    return paths;
}

std::vector<DataMatrix> load_data(const RunConfig& config) {
    if (config.data_paths.empty())
        throw input_error("config: no data file given");
    std::vector<std::string> paths = config.data_paths;
    if (config.model == ModelKind::multi && paths.size() == 1 &&
        !paths[0].ends_with(".csv"))
        paths = read_manifest(paths[0]);
    if (config.model != ModelKind::multi && paths.size() != 1)
        throw input_error("config: model " + model_name(config.model) +
                          " takes exactly one data file");
    std::vector<DataMatrix> data;
    data.reserve(paths.size());
    for (const std::string& path : paths) {
        Eigen::MatrixXd y = read_csv_matrix(path);
        if (config.normalize) y = quantile_normalize_columns(y);
        data.emplace_back(std::move(y));
        if (data.back().cols() != data.front().cols())
            throw input_error(path + ": has " +
                              std::to_string(data.back().cols()) +
                              " columns, expected " +
                              std::to_string(data.front().cols()));
    }
    return data;
}

struct TraceRow {
    int k = 0;
    double nu = kNan;
    double alpha = kNan;
    double rho = kNan;
};

/* Uniform face over the four chains so the record loop can treat them
   alike: sweep, snapshot the partition/graph state, and (when the model
   carries a precision matrix) draw a likelihood value for the trace. */
class ChainAdapter {
public:
    virtual ~ChainAdapter() = default;
    virtual int n_groups() const = 0;
    virtual void sweep(Rng& rng) = 0;
    virtual bool has_loglik() const { return true; }
    virtual double draw_loglik(Rng& rng) = 0;
    virtual TraceRow trace_row() const = 0;
    /* Canonical labels per group; for the multigraph model the groups are
       canonicalized jointly so labels stay comparable across groups. */
    virtual std::vector<std::vector<int>> canonical_partitions() const = 0;
    virtual std::vector<const Graph*> graphs() const = 0;
    virtual std::vector<std::vector<int>> tie_flags() const { return {}; }
};

class DcsbmAdapter : public ChainAdapter {
public:
    DcsbmAdapter(DataMatrix data, const Hyperparameters& hyper,
                 const std::optional<std::vector<int>>& fixed_z)
        : data_(std::move(data)), sampler_(data_, hyper, options(fixed_z)) {
        if (fixed_z) {
            DcsbmState& s = sampler_.state();
            s.z = Partition::from_labels(*fixed_z);
            s.params.beta_star.assign(s.z.block_count(), 0.0);
        }
    }

    int n_groups() const override { return 1; }
    void sweep(Rng& rng) override { sampler_.sweep(rng); }
    double draw_loglik(Rng& rng) override { return sampler_.sample_loglik(rng); }
    TraceRow trace_row() const override {
        const DcsbmState& s = sampler_.state();
        return {s.z.block_count(), s.nu, s.params.alpha, kNan};
    }
    std::vector<std::vector<int>> canonical_partitions() const override {
        return {sampler_.state().z.canonical_key()};
    }
    std::vector<const Graph*> graphs() const override {
        return {&sampler_.state().graph};
    }

private:
    static DcsbmOptions options(const std::optional<std::vector<int>>& fixed_z) {
        DcsbmOptions o;
        if (fixed_z) o.update_blocks = false;
        return o;
    }

    DataMatrix data_;
    DcsbmSampler sampler_;
};

class SicsAdapter : public ChainAdapter {
public:
    SicsAdapter(DataMatrix data, const Hyperparameters& hyper,
                const std::optional<std::vector<int>>& fixed_z)
        : data_(std::move(data)), sampler_(data_, hyper, options(fixed_z)) {
        if (fixed_z) sampler_.set_partition(Partition::from_labels(*fixed_z));
    }

    int n_groups() const override { return 1; }
    void sweep(Rng& rng) override { sampler_.sweep(rng); }
    double draw_loglik(Rng& rng) override { return sampler_.sample_loglik(rng); }
    TraceRow trace_row() const override {
        const SicsState& s = sampler_.state();
        return {s.z.block_count(), s.nu, kNan, s.rho};
    }
    std::vector<std::vector<int>> canonical_partitions() const override {
        return {sampler_.state().z.canonical_key()};
    }
    std::vector<const Graph*> graphs() const override {
        return {&sampler_.state().graph};
    }

private:
    static SicsOptions options(const std::optional<std::vector<int>>& fixed_z) {
        SicsOptions o;
        if (fixed_z) o.update_joint = false;
        return o;
    }

    DataMatrix data_;
    SicsSampler sampler_;
};

class MultiAdapter : public ChainAdapter {
public:
    MultiAdapter(std::vector<DataMatrix> data, const Hyperparameters& hyper,
                 const std::optional<std::vector<int>>& fixed_z)
        : data_(std::move(data)), sampler_(data_, hyper, options(fixed_z)) {
        if (fixed_z) {
            MultiState& s = sampler_.state();
            const Partition z = Partition::from_labels(*fixed_z);
            for (int x = 0; x < s.n_groups(); ++x) {
                s.zs[x] = z.labels();
                s.g[x].assign(s.order(), 1);
            }
            s.beta_star.assign(z.block_count(), 0.0);
        }
    }

    int n_groups() const override { return sampler_.state().n_groups(); }
    void sweep(Rng& rng) override { sampler_.sweep(rng); }
    double draw_loglik(Rng& rng) override { return sampler_.sample_loglik(rng); }
    TraceRow trace_row() const override {
        const MultiState& s = sampler_.state();
        return {s.n_labels(), s.nu, s.alpha, kNan};
    }
    std::vector<std::vector<int>> canonical_partitions() const override {
        const MultiState& s = sampler_.state();
        const int q = s.n_groups();
        const int p = s.order();
        std::vector<int> concat;
        concat.reserve(static_cast<std::size_t>(q) * p);
        for (int x = 0; x < q; ++x)
            concat.insert(concat.end(), s.zs[x].begin(), s.zs[x].end());
        const std::vector<int> key = Partition::from_labels(concat).canonical_key();
        std::vector<std::vector<int>> parts(q);
        for (int x = 0; x < q; ++x)
            parts[x].assign(key.begin() + static_cast<std::ptrdiff_t>(x) * p,
                            key.begin() + static_cast<std::ptrdiff_t>(x + 1) * p);
        return parts;
    }
    std::vector<const Graph*> graphs() const override {
        std::vector<const Graph*> gs;
        for (const Graph& g : sampler_.state().graphs) gs.push_back(&g);
        return gs;
    }
    std::vector<std::vector<int>> tie_flags() const override {
        const MultiState& s = sampler_.state();
        std::vector<std::vector<int>> flags(s.n_groups());
        for (int x = 0; x < s.n_groups(); ++x)
            flags[x].assign(s.g[x].begin(), s.g[x].end());
        return flags;
    }

private:
    static MultiOptions options(const std::optional<std::vector<int>>& fixed_z) {
        MultiOptions o;
        if (fixed_z) {
            o.update_baseline = false;
            o.update_genealogy = false;
        }
        return o;
    }

    std::vector<DataMatrix> data_;
    MultiSampler sampler_;
};

class SunAdapter : public ChainAdapter {
public:
    SunAdapter(DataMatrix data, const Hyperparameters& hyper,
               const std::optional<std::vector<int>>& fixed_z)
        : data_(std::move(data)), sampler_(data_, hyper, options(fixed_z)) {
        if (fixed_z) sampler_.state().z = Partition::from_labels(*fixed_z);
    }

    int n_groups() const override { return 1; }
    void sweep(Rng& rng) override { sampler_.sweep(rng); }
    bool has_loglik() const override { return false; }
    double draw_loglik(Rng&) override { return kNan; }
    TraceRow trace_row() const override {
        const SunState& s = sampler_.state();
        return {s.z.block_count(), s.nu, kNan, kNan};
    }
    std::vector<std::vector<int>> canonical_partitions() const override {
        return {sampler_.state().z.canonical_key()};
    }
    std::vector<const Graph*> graphs() const override { return {}; }

private:
    static SunOptions options(const std::optional<std::vector<int>>& fixed_z) {
        SunOptions o;
        if (fixed_z) o.update_z = false;
        return o;
    }

    DataMatrix data_;
    SunSampler sampler_;
};

std::unique_ptr<ChainAdapter> make_chain(const RunConfig& config,
                                         std::vector<DataMatrix> data) {
    const int p = data.front().cols();
    if (config.fixed_z && static_cast<int>(config.fixed_z->size()) != p)
        throw input_error("config: fixed z has " +
                          std::to_string(config.fixed_z->size()) +
                          " labels, data has " + std::to_string(p) +
                          " columns");
    switch (config.model) {
        case ModelKind::dcsbm:
            return std::make_unique<DcsbmAdapter>(std::move(data.front()),
                                                  config.hyper, config.fixed_z);
        case ModelKind::sics:
            return std::make_unique<SicsAdapter>(std::move(data.front()),
                                                 config.hyper, config.fixed_z);
        case ModelKind::multi:
            return std::make_unique<MultiAdapter>(std::move(data), config.hyper,
                                                  config.fixed_z);
        case ModelKind::sun:
            return std::make_unique<SunAdapter>(std::move(data.front()),
                                                config.hyper, config.fixed_z);
    }
    throw input_error("config: unknown model");
}

/* Suffix for per-group artifact names: empty for single-graph models. */
std::string group_suffix(int q, int x) {
    return q == 1 ? std::string() : "_" + std::to_string(x);
}

void write_posterior_artifacts(
    const std::string& out_dir,
    const std::vector<std::vector<std::vector<int>>>& partitions,
    const std::vector<Eigen::MatrixXd>& edge_probs,
    const std::vector<std::pair<std::string, std::string>>& header_lines,
    double runtime_seconds) {
    const int q = static_cast<int>(partitions.size());
    std::ofstream summary(fs::path(out_dir) / "summary.txt");
    if (!summary) throw input_error("cannot write summary in: " + out_dir);
    for (const auto& [key, value] : header_lines)
        summary << key << ": " << value << "\n";
    summary << "groups: " << q << "\n";
    for (int x = 0; x < q; ++x) {
        const std::string sfx = group_suffix(q, x);
        const Eigen::MatrixXd sim = similarity_matrix(partitions[x]);
        write_csv_matrix((fs::path(out_dir) / ("similarity" + sfx + ".csv")).string(),
                         sim);
        const Partition binder = binder_estimate(partitions[x], sim);
        summary << "binder_partition" << sfx << ": "
                << join_labels(binder.canonical_key()) << "\n";
        summary << "binder_blocks" << sfx << ": " << binder.block_count() << "\n";
        if (x < static_cast<int>(edge_probs.size())) {
            write_csv_matrix(
                (fs::path(out_dir) / ("edge_probs" + sfx + ".csv")).string(),
                edge_probs[x]);
            const Graph median = median_probability_graph(edge_probs[x]);
            summary << "median_edge_count" << sfx << ": " << median.edge_count()
                    << "\n";
            summary << "median_edges" << sfx << ": " << join_edges(median.edges())
                    << "\n";
        }
    }
    for (int x = 0; x < q; ++x)
        for (int y = x + 1; y < q; ++y) {
            const Eigen::MatrixXd cross =
                cross_similarity_matrix(partitions[x], partitions[y]);
            write_csv_matrix((fs::path(out_dir) /
                              ("cross_similarity_" + std::to_string(x) + "_" +
                               std::to_string(y) + ".csv"))
                                 .string(),
                             cross);
        }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", runtime_seconds);
    summary << "runtime_seconds: " << buf << "\n";
}

}  // namespace

ModelKind parse_model(const std::string& name) {
    if (name == "dcsbm") return ModelKind::dcsbm;
    if (name == "sics") return ModelKind::sics;
    if (name == "multi") return ModelKind::multi;
    if (name == "sun") return ModelKind::sun;
    throw input_error("unknown model '" + name +
                      "' (expected dcsbm, sics, multi, or sun)");
}

std::string model_name(ModelKind model) {
    switch (model) {
        case ModelKind::dcsbm: return "dcsbm";
        case ModelKind::sics: return "sics";
        case ModelKind::multi: return "multi";
        case ModelKind::sun: return "sun";
    }
    return "?";
}

void RunConfig::validate() const {
    if (iterations < 1)
        throw input_error("config: iterations must be positive");
    if (burn_in < 0)
        throw input_error("config: burn-in must be nonnegative");
    if (burn_in >= iterations)
        throw input_error("config: burn-in must be smaller than iterations");
    if (thin < 1)
        throw input_error("config: thin must be at least 1");
    if (threads < 1)
        throw input_error("config: threads must be at least 1");
}

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
    if (key == "model") config.model = parse_model(trim_copy(value));
    else if (key == "iterations" || key == "iters")
        config.iterations = parse_count(value, "iterations");
    else if (key == "burn_in" || key == "burnin")
        config.burn_in = parse_count(value, "burn-in");
    else if (key == "thin") config.thin = parse_count(value, "thin");
    else if (key == "seed") config.seed = parse_seed(value);
    else if (key == "data") {
        for (const std::string& path : split_list(value))
            config.data_paths.push_back(path);
    } else if (key == "out") config.out_dir = trim_copy(value);
    else if (key == "normalize")
        config.normalize = parse_flag(value, "normalize");
    else if (key == "threads")
        config.threads = static_cast<int>(parse_count(value, "threads"));
    else if (key == "fixed_z") config.fixed_z = parse_labels(value, "fixed_z");
    else if (key == "tie_prob") config.hyper.tie_prob = parse_real(value, key);
    else if (key == "s2_beta") config.hyper.s2_beta = parse_real(value, key);
    else if (key == "s2_theta") config.hyper.s2_theta = parse_real(value, key);
    else if (key == "a_nu") config.hyper.a_nu = parse_real(value, key);
    else if (key == "b_nu") config.hyper.b_nu = parse_real(value, key);
    else if (key == "a_alpha") config.hyper.a_alpha = parse_real(value, key);
    else if (key == "b_alpha") config.hyper.b_alpha = parse_real(value, key);
    else if (key == "a_rho") config.hyper.a_rho = parse_real(value, key);
    else if (key == "b_rho") config.hyper.b_rho = parse_real(value, key);
    else if (key == "gwish_df") config.hyper.gwish_df = parse_real(value, key);
    else throw input_error("config: unknown key '" + key + "'");
}

Simulation simulate_dataset(const SimulateConfig& config, Rng& rng) {
    const bool karate = config.graph_model == "karate";
    const int p = karate ? 34 : config.p;
    if (p < 1) throw input_error("simulate: p must be positive");
    if (config.n < 0) throw input_error("simulate: n must be nonnegative");
    Simulation sim(p);

    if (config.z) {
        if (static_cast<int>(config.z->size()) != p)
            throw input_error("simulate: explicit z must have " +
                              std::to_string(p) + " labels");
        sim.z = Partition::from_labels(*config.z).canonical_key();
    } else if (karate) {
        sim.z = karate_factions();
    } else {
        if (config.n_blocks < 1)
            throw input_error("simulate: need at least one block");
        sim.z.resize(p);
        for (int i = 0; i < p; ++i)
            sim.z[i] = runif_int(rng, 0, config.n_blocks - 1);
    }

    if (karate) {
        sim.graph = karate_graph();
    } else if (config.graph_model == "sics") {
        if (config.rho < 0.0 || config.rho > 1.0)
            throw input_error("simulate: rho must lie in [0,1]");
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                sim.graph.set_edge(i, j, sim.z[i] == sim.z[j] ||
                                             runif(rng) < config.rho);
    } else if (config.graph_model == "dcsbm") {
        /* one draw from the effect base measures, then independent probit
           edges */
        int n_blocks = 0;
        for (int label : sim.z) n_blocks = std::max(n_blocks, label + 1);
        std::vector<double> beta(n_blocks), theta(p);
        for (double& b : beta) b = rnorm(rng);
        for (double& t : theta) t = rnorm(rng);
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                double mu = theta[i] + theta[j];
                if (sim.z[i] == sim.z[j]) mu += beta[sim.z[i]];
                sim.graph.set_edge(i, j, runif(rng) < edge_probability(mu));
            }
    } else {
        throw input_error("simulate: unknown graph model '" +
                          config.graph_model + "'");
    }

    GWishartParams params;
    params.df = config.gwish_df;
    sim.omega = sample_gwishart(rng, sim.graph, params, 100);

    Eigen::LLT<Eigen::MatrixXd> llt(sim.omega);
    if (llt.info() != Eigen::Success)
        throw numeric_error("simulate: sampled precision lost positive definiteness");
    sim.y.resize(config.n, p);
    Eigen::VectorXd noise(p);
    for (int r = 0; r < config.n; ++r) {
        for (int j = 0; j < p; ++j) noise(j) = rnorm(rng);
        sim.y.row(r) = llt.matrixU().solve(noise).transpose();
    }
    return sim;
}

void run_simulate(const SimulateConfig& config) {
    Rng rng(config.seed);
    Rng sim_rng = rng.substream(0x51);
    const Simulation sim = simulate_dataset(config, sim_rng);
    fs::create_directories(config.out_dir);
    const int p = sim.graph.order();

    Eigen::MatrixXd z(p, 1);
    for (int i = 0; i < p; ++i) z(i, 0) = sim.z[i];
    write_csv_matrix((fs::path(config.out_dir) / "z_true.csv").string(), z);

    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(p, p);
    for (const auto& [i, j] : sim.graph.edges()) adj(i, j) = adj(j, i) = 1.0;
    write_csv_matrix((fs::path(config.out_dir) / "graph_true.csv").string(), adj);

    write_csv_matrix((fs::path(config.out_dir) / "omega_true.csv").string(),
                     sim.omega);
    write_csv_matrix((fs::path(config.out_dir) / "y.csv").string(), sim.y);
}

FitResult run_fit(const RunConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    std::vector<DataMatrix> data = load_data(config);
    const int p = data.front().cols();
    config.hyper.validate(p);

    fs::create_directories(config.out_dir);
    Rng root(config.seed);
    Rng chain_rng = root.substream(0x11);
    Rng loglik_rng = root.substream(0x22);

    std::unique_ptr<ChainAdapter> chain = make_chain(config, std::move(data));
    const int q = chain->n_groups();
    const bool with_graphs = !chain->graphs().empty();

    std::ofstream jsonl(fs::path(config.out_dir) / "samples.jsonl");
    std::ofstream trace(fs::path(config.out_dir) / "trace.csv");
    if (!jsonl || !trace)
        throw input_error("cannot write artifacts in: " + config.out_dir);
    trace << "iteration,loglik,k,nu,alpha,rho\n";

    FitResult result;
    result.partitions.resize(q);
    std::vector<Eigen::MatrixXd> edge_counts(
        with_graphs ? q : 0, Eigen::MatrixXd::Zero(p, p));

    long n_recorded = 0;
    for (long t = 1; t <= config.iterations; ++t) {
        chain->sweep(chain_rng);
        if (t <= config.burn_in || (t - config.burn_in - 1) % config.thin != 0)
            continue;
        ++n_recorded;

        const std::vector<std::vector<int>> parts = chain->canonical_partitions();
        const std::vector<const Graph*> graphs = chain->graphs();
        const std::vector<std::vector<int>> ties = chain->tie_flags();

        nlohmann::json obj;
        obj["iteration"] = t;
        if (q == 1) {
            obj["z"] = parts[0];
            if (with_graphs) obj["edges"] = graphs[0]->edges();
        } else {
            obj["z"] = parts;
            nlohmann::json edge_arr = nlohmann::json::array();
            for (const Graph* g : graphs) edge_arr.push_back(g->edges());
            obj["edges"] = edge_arr;
            obj["g"] = ties;
        }
        jsonl << obj.dump() << '\n';

        double loglik = kNan;
        if (chain->has_loglik()) {
            loglik = chain->draw_loglik(loglik_rng);
            result.loglik.push_back(loglik);
        }
        const TraceRow row = chain->trace_row();
        trace << t << ',' << format_double(loglik) << ',' << row.k << ','
              << format_double(row.nu) << ',' << format_double(row.alpha) << ','
              << format_double(row.rho) << '\n';

        for (int x = 0; x < q; ++x)
            result.partitions[x].push_back(parts[x]);
        for (std::size_t x = 0; x < edge_counts.size(); ++x)
            for (const auto& [i, j] : graphs[x]->edges()) {
                edge_counts[x](i, j) += 1.0;
                edge_counts[x](j, i) += 1.0;
            }
    }

    for (Eigen::MatrixXd& counts : edge_counts)
        result.edge_probs.push_back(counts / static_cast<double>(n_recorded));

    std::vector<std::pair<std::string, std::string>> header = {
        {"model", model_name(config.model)},
        {"seed", std::to_string(config.seed)},
        {"iterations", std::to_string(config.iterations)},
        {"burn_in", std::to_string(config.burn_in)},
        {"thin", std::to_string(config.thin)},
        {"recorded", std::to_string(n_recorded)},
    };
    if (config.fixed_z)
        header.emplace_back("fixed_z", join_labels(*config.fixed_z));

    const auto stop = std::chrono::steady_clock::now();
    result.runtime_seconds =
        std::chrono::duration<double>(stop - start).count();
    write_posterior_artifacts(config.out_dir, result.partitions,
                              result.edge_probs, header,
                              result.runtime_seconds);
    return result;
}

BfResult run_bf(const RunConfig& config, const std::vector<int>& z_star) {
    config.validate();
    if (config.model == ModelKind::sun || config.model == ModelKind::multi)
        throw input_error(
            "bf: Bayes factors are supported for the single-graph models "
            "(dcsbm, sics)");

    /* cheap dimension/prior checks before the long chains */
    {
        const std::vector<DataMatrix> probe = load_data(config);
        if (static_cast<int>(z_star.size()) != probe.front().cols())
            throw input_error("bf: z_star has " +
                              std::to_string(z_star.size()) +
                              " labels, data has " +
                              std::to_string(probe.front().cols()) +
                              " columns");
    }
    const Partition star = Partition::from_labels(z_star);
    const double prior =
        prior_partition_marginal(star, config.hyper.a_nu, config.hyper.b_nu);
    if (prior < 1e-12)
        throw input_error(
            "bf: p(z*) too small for a stable density ratio");

    fs::create_directories(config.out_dir);

    RunConfig free_cfg = config;
    free_cfg.fixed_z.reset();
    free_cfg.out_dir = (fs::path(config.out_dir) / "free").string();

    RunConfig fixed_cfg = config;
    fixed_cfg.fixed_z = z_star;
    Rng seed_rng(config.seed);
    fixed_cfg.seed = seed_rng.substream(0x77)();
    fixed_cfg.out_dir = (fs::path(config.out_dir) / "fixed").string();

    const FitResult free_fit = run_fit(free_cfg);
    const FitResult fixed_fit = run_fit(fixed_cfg);

    const std::vector<std::vector<int>>& samples = free_fit.partitions[0];
    const std::vector<int> star_key = star.canonical_key();
    const long n_samples = static_cast<long>(samples.size());

    BfResult result;
    result.prior_mass = prior;
    result.bf_sd =
        savage_dickey_bf(samples, star, config.hyper.a_nu, config.hyper.b_nu);
    long matches = 0;
    for (const std::vector<int>& z : samples)
        if (z == star_key) ++matches;
    result.frequency = static_cast<double>(matches) / n_samples;
    result.log_bf_sd = std::log(result.frequency) - std::log(prior);
    result.log_ml_free = harmonic_mean_log_ml(free_fit.loglik);
    result.log_ml_fixed = harmonic_mean_log_ml(fixed_fit.loglik);
    result.log_bf_hm = result.log_ml_fixed - result.log_ml_free;

    /* running estimates over the recorded sweeps */
    std::ofstream running(fs::path(config.out_dir) / "bf_running.csv");
    if (!running)
        throw input_error("cannot write artifacts in: " + config.out_dir);
    running << "iteration,log_bf_sd,log_bf_hm\n";
    const double kInf = std::numeric_limits<double>::infinity();
    double lse_free = -kInf, lse_fixed = -kInf;
    long cum_matches = 0;
    for (long r = 0; r < n_samples; ++r) {
        if (samples[r] == star_key) ++cum_matches;
        const auto fold = [](double lse, double value) {
            const double hi = std::max(lse, -value);
            return hi + std::log(std::exp(lse - hi) + std::exp(-value - hi));
        };
        lse_free = fold(lse_free, free_fit.loglik[r]);
        lse_fixed = fold(lse_fixed, fixed_fit.loglik[r]);
        const double log_t = std::log(static_cast<double>(r + 1));
        const double sd =
            std::log(static_cast<double>(cum_matches)) - log_t - std::log(prior);
        const double hm = (-(lse_fixed - log_t)) - (-(lse_free - log_t));
        const long iteration = config.burn_in + 1 + r * config.thin;
        running << iteration << ',' << format_double(sd) << ','
                << format_double(hm) << '\n';
    }

    std::ofstream report(fs::path(config.out_dir) / "bf_report.txt");
    if (!report)
        throw input_error("cannot write artifacts in: " + config.out_dir);
    report << "model: " << model_name(config.model) << "\n"
           << "seed: " << config.seed << "\n"
           << "iterations: " << config.iterations << "\n"
           << "burn_in: " << config.burn_in << "\n"
           << "thin: " << config.thin << "\n"
           << "recorded: " << n_samples << "\n"
           << "z_star: " << join_labels(star_key) << "\n"
           << "prior_mass: " << format_double(result.prior_mass) << "\n"
           << "posterior_frequency: " << format_double(result.frequency) << "\n"
           << "bf_savage_dickey: " << format_double(result.bf_sd) << "\n"
           << "log_bf_savage_dickey: " << format_double(result.log_bf_sd) << "\n"
           << "log_ml_free_hm: " << format_double(result.log_ml_free) << "\n"
           << "log_ml_fixed_hm: " << format_double(result.log_ml_fixed) << "\n"
           << "log_bf_harmonic_mean: " << format_double(result.log_bf_hm)
           << "\n";
    return result;
}

void run_summarize(const std::string& samples_path, const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    std::ifstream in(samples_path);
    if (!in) throw input_error("cannot open samples file: " + samples_path);

    std::vector<std::vector<std::vector<int>>> partitions;
    std::vector<Eigen::MatrixXd> edge_counts;
    bool with_graphs = false;
    long n_recorded = 0;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw input_error(samples_path + ": line " +
                              std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.contains("z"))
            throw input_error(samples_path + ": line " +
                              std::to_string(line_no) + ": missing 'z'");
        const bool multi = obj["z"].is_array() && !obj["z"].empty() &&
                           obj["z"][0].is_array();
        std::vector<std::vector<int>> parts;
        if (multi)
            parts = obj["z"].get<std::vector<std::vector<int>>>();
        else
            parts = {obj["z"].get<std::vector<int>>()};
        const int q = static_cast<int>(parts.size());
        const int p = static_cast<int>(parts[0].size());
        if (partitions.empty()) {
            partitions.resize(q);
            with_graphs = obj.contains("edges");
            if (with_graphs)
                edge_counts.assign(q, Eigen::MatrixXd::Zero(p, p));
        }
        if (static_cast<int>(partitions.size()) != q)
            throw input_error(samples_path + ": line " +
                              std::to_string(line_no) +
                              ": group count changed mid-file");
        for (int x = 0; x < q; ++x)
            partitions[x].push_back(parts[x]);
        if (with_graphs) {
            std::vector<std::vector<std::pair<int, int>>> edges;
            if (multi)
                edges = obj["edges"]
                            .get<std::vector<std::vector<std::pair<int, int>>>>();
            else
                edges = {obj["edges"].get<std::vector<std::pair<int, int>>>()};
            for (int x = 0; x < q; ++x)
                for (const auto& [i, j] : edges[x]) {
                    edge_counts[x](i, j) += 1.0;
                    edge_counts[x](j, i) += 1.0;
                }
        }
        ++n_recorded;
    }
    if (n_recorded == 0)
        throw input_error(samples_path + ": no recorded sweeps");

    std::vector<Eigen::MatrixXd> edge_probs;
    for (Eigen::MatrixXd& counts : edge_counts)
        edge_probs.push_back(counts / static_cast<double>(n_recorded));

    fs::create_directories(out_dir);
    const std::vector<std::pair<std::string, std::string>> header = {
        {"source", samples_path},
        {"recorded", std::to_string(n_recorded)},
    };
    const auto stop = std::chrono::steady_clock::now();
    write_posterior_artifacts(out_dir, partitions, edge_probs, header,
                              std::chrono::duration<double>(stop - start).count());
}

}  // namespace blockggm
