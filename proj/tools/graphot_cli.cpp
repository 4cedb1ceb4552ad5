// Command-line front end: dataset generation, loss evaluation, graph
// matching, edit distance, solver benchmarking, matcher training and the
// coloring corruption study.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical divergence.
// GRAPHOT_LOG={error,info,debug} controls stderr logging.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <graphot/graphot.hpp>

namespace {

using namespace graphot;

// ---------------------------------------------------------------------------
// logging
// ---------------------------------------------------------------------------

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("GRAPHOT_LOG");
        if (!env) return 0;
        const std::string v(env);
        if (v == "debug") return 2;
        if (v == "info") return 1;
        return 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

// ---------------------------------------------------------------------------
// output plumbing
// ---------------------------------------------------------------------------

// locale-independent shortest round-trip formatting
std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
    } else {
        write_text_file(out_path, content);
        log_info("wrote " + out_path);
    }
}

// Graph files hold either the sparse wire format or a dense (h, F, C) object.
DenseGraph load_graph_as_dense(const std::string& path, int capacity) {
    const json j = read_json_file(path);
    if (j.contains("h")) return dense_from_json(j);
    return dense_from_sparse(sparse_from_json(j), capacity);
}

int sparse_size_of(const std::string& path) {
    const json j = read_json_file(path);
    if (j.contains("h")) {
        int n = 0;
        for (const auto& v : j.at("h"))
            if (v.get<double>() > 0.5) ++n;
        return static_cast<int>(j.at("h").size());  // dense files fix their own capacity
    }
    return sparse_from_json(j).size();
}

struct WeightFlags {
    double alpha_h = -1, alpha_f_d = -1, alpha_f_c = -1, alpha_c_d = -1, alpha_c_c = -1;

    LossWeights resolve(int capacity) const {
        LossWeights w = LossWeights::defaults(capacity);
        if (alpha_h >= 0) w.alpha_h = alpha_h;
        if (alpha_f_d >= 0) w.alpha_F_d = alpha_f_d;
        if (alpha_f_c >= 0) w.alpha_F_c = alpha_f_c;
        if (alpha_c_d >= 0) w.alpha_C_d = alpha_c_d;
        if (alpha_c_c >= 0) w.alpha_C_c = alpha_c_c;
        return w;
    }
};

GroundLossSet resolve_ground(const std::string& name) {
    if (name == "l2") return GroundLossSet::all_l2();
    if (name == "ce") return GroundLossSet::defaults();
    throw CLI::ValidationError("--ground must be l2 or ce");
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
    std::string flavor = "coloring";
    int n_min = 5, n_max = 12, count = 100;
    std::uint64_t seed = 0;
    std::string out;
    int n_f = 4, n_c = 1;
    double edge_density = 0.3, dominant_frac = 0.6;
};

int run_gen(const GenArgs& a) {
    GenConfig cfg;
    cfg.flavor = flavor_from_string(a.flavor);
    cfg.n_min = a.n_min;
    cfg.n_max = a.n_max;
    cfg.seed = a.seed;
    cfg.n_f = a.n_f;
    cfg.n_c = a.n_c;
    cfg.edge_density = a.edge_density;
    cfg.dominant_frac = a.dominant_frac;
    cfg.validate();
    const auto graphs = generate_dataset(cfg, a.count);
    std::string lines;
    for (const auto& g : graphs) lines += sparse_to_json(g).dump() + "\n";
    emit(a.out, lines);
    log_info("generated " + std::to_string(graphs.size()) + " graphs");
    return 0;
}

// ---------------------------------------------------------------------------
// loss
// ---------------------------------------------------------------------------

struct LossArgs {
    std::string a, b;
    std::string plan = "exhaustive";
    std::string plan_file;
    std::string loss = "ot";
    std::string ground = "l2";
    double lambda = 10.0;
    int capacity = 0;
    bool naive = false;
    bool grad_norms = false;
    WeightFlags weights;
    int sinkhorn_iters = 100;
    double epsilon = 0.1;
    int fw_iters = 100;
    double fw_tol = 1e-6;
    std::string out;
};

int run_loss(const LossArgs& a) {
    int capacity = a.capacity;
    if (capacity == 0) capacity = std::max(sparse_size_of(a.a), sparse_size_of(a.b));
    const DenseGraph g = load_graph_as_dense(a.a, capacity);
    const DenseGraph g_hat = load_graph_as_dense(a.b, capacity);
    if (!g.same_shape(g_hat))
        throw std::invalid_argument("loss: the two graphs resolve to different shapes; use --capacity");

    const GroundLossSet gl = resolve_ground(a.ground);
    const LossWeights w = a.weights.resolve(g.size());

    TransportPlan plan;
    if (a.plan == "exhaustive") {
        plan = plan_from_permutation(exhaustive_min(g, g_hat, gl, w).first);
    } else if (a.plan == "fw") {
        FWConfig fw;
        fw.max_iters = a.fw_iters;
        fw.tol = a.fw_tol;
        plan = frank_wolfe_qap(g, g_hat, gl, w, fw).plan;
    } else if (a.plan == "file") {
        const json pj = read_json_file(a.plan_file);
        plan = matrix_from_json(pj.contains("T") ? pj.at("T") : pj);
        if (plan.rows() != g.size() || plan.cols() != g.size())
            throw std::invalid_argument("loss: plan file dimensions do not match the padded graphs");
    } else {
        throw CLI::ValidationError("--plan must be exhaustive, fw or file");
    }

    double value = 0.0;
    if (a.loss == "ot") {
        value = a.naive ? lot_naive(g, g_hat, plan, gl, w) : lot_fast(g, g_hat, plan, gl, w);
    } else if (a.loss == "pigvae") {
        value = l_pigvae(g, g_hat, plan, gl, w);
    } else if (a.loss == "pigvae-plus") {
        value = pigvae_plus(g, g_hat, plan, gl, w, a.lambda);
    } else {
        throw CLI::ValidationError("--loss must be ot, pigvae or pigvae-plus");
    }
    if (!std::isfinite(value)) throw std::domain_error("loss: non-finite value");

    json record{{"loss", a.loss}, {"plan", a.plan}, {"value", value}, {"capacity", g.size()}};
    if (a.grad_norms) {
        const LossGradients lg = lot_gradients(g, g_hat, plan, gl, w);
        double c_norm = 0.0;
        for (const auto& ch : lg.d_C_hat) c_norm += ch.squaredNorm();
        record["grad_norms"] = {{"d_h_hat", lg.d_h_hat.norm()},
                                {"d_F_hat", lg.d_F_hat.norm()},
                                {"d_C_hat", std::sqrt(c_norm)},
                                {"d_T", lg.d_T.norm()}};
    }
    emit(a.out, record.dump() + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// match
// ---------------------------------------------------------------------------

struct MatchArgs {
    std::string a, b;
    std::string model;
    std::uint64_t seed = 0;
    int k = 2, pe_dim = 16;
    int hidden = 32, d_embed = 16;
    std::string out;
};

int run_match(const MatchArgs& a) {
    const json ja = read_json_file(a.a), jb = read_json_file(a.b);
    const SparseGraph sa = sparse_from_json(ja), sb = sparse_from_json(jb);
    const int capacity = std::max(sa.size(), sb.size());
    const DenseGraph da = dense_from_sparse(sa, capacity), db = dense_from_sparse(sb, capacity);

    FeaturizerConfig feat;
    feat.k = a.k;
    feat.pe_dim = a.pe_dim;
    feat.noise_sigma = 0.0;

    AffinityModel model;
    if (!a.model.empty()) {
        model = load_model(a.model);
    } else {
        model = init_affinity_model(sa.n_f * (feat.k + 1), a.hidden, a.d_embed, a.seed);
        log_info("no --model given, using a seed-initialized affinity model");
    }
    const MatchGraphsResult res = match_graphs(model, da, db, featurizer_embedding(feat));

    json record{{"permutation", res.permutation.perm}, {"upper_bound", res.edit_upper_bound},
                {"capacity", capacity}};
    emit(a.out, record.dump() + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// editdist
// ---------------------------------------------------------------------------

struct EditArgs {
    std::string a, b;
    bool exact = false;
    std::string perm_file;
    std::string out;
};

int run_editdist(const EditArgs& a) {
    const SparseGraph sa = sparse_from_json(read_json_file(a.a));
    const SparseGraph sb = sparse_from_json(read_json_file(a.b));
    EditResult res;
    if (!a.perm_file.empty()) {
        const json pj = read_json_file(a.perm_file);
        Permutation p;
        p.perm = pj.get<std::vector<int>>();
        p.validate();
        res = upper_bound(sa, sb, p);
    } else {
        res = edit_exact(sa, sb);
    }
    json record{{"distance", res.distance}, {"permutation", res.permutation.perm}};
    emit(a.out, record.dump() + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string data;
    std::string solvers = "exhaustive,frank-wolfe,hungarian-affinity,matcher,random";
    int pairs = 50;
    std::uint64_t seed = 0;
    std::string model;
    int threads = 0;
    std::string format = "csv";
    std::string out;
    int k = 2, pe_dim = 16;
};

struct BenchCell {
    bool ran = false;
    int bound = 0;
    double seconds = 0.0;
};

int run_bench(const BenchArgs& a) {
    const auto dataset = read_jsonl(a.data);
    if (dataset.empty()) throw std::invalid_argument("bench: dataset is empty");
    if (a.pairs < 1) throw std::invalid_argument("bench: pairs must be >= 1");

    std::vector<std::string> solvers;
    {
        std::stringstream ss(a.solvers);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item != "exhaustive" && item != "frank-wolfe" && item != "hungarian-affinity" &&
                item != "matcher" && item != "random")
                throw std::invalid_argument("bench: unknown solver " + item);
            solvers.push_back(item);
        }
    }

    FeaturizerConfig feat;
    feat.k = a.k;
    feat.pe_dim = a.pe_dim;
    feat.noise_sigma = 0.0;
    const int d_in = dataset.front().n_f * (feat.k + 1);
    AffinityModel model = a.model.empty() ? init_affinity_model(d_in, 32, 16, a.seed) : load_model(a.model);
    const NodeEmbedding embed = featurizer_embedding(feat);

    // pair sampling is sequential so the pair list only depends on the seed
    Rng pair_rng(a.seed);
    struct Pair {
        int i, j;
        std::uint64_t seed;
    };
    std::vector<Pair> picked(static_cast<std::size_t>(a.pairs));
    for (auto& p : picked) {
        p.i = pair_rng.uniform_int(0, static_cast<int>(dataset.size()) - 1);
        p.j = pair_rng.uniform_int(0, static_cast<int>(dataset.size()) - 1);
        p.seed = pair_rng.next_u64();
    }

    auto solve_pair = [&](const std::string& solver, const Pair& pr, BenchCell& cell) {
        const SparseGraph& ga = dataset[static_cast<std::size_t>(pr.i)];
        const SparseGraph& gb = dataset[static_cast<std::size_t>(pr.j)];
        const int capacity = std::max(ga.size(), gb.size());
        const DenseGraph da = dense_from_sparse(ga, capacity), db = dense_from_sparse(gb, capacity);

        auto timed = [&](auto&& fn) {
            // median of 3 runs on a monotonic clock
            double best[3];
            Permutation perm;
            for (int r = 0; r < 3; ++r) {
                const auto t0 = std::chrono::steady_clock::now();
                perm = fn();
                const auto t1 = std::chrono::steady_clock::now();
                best[r] = std::chrono::duration<double>(t1 - t0).count();
            }
            std::sort(best, best + 3);
            cell.seconds = best[1];
            cell.bound = align_cost(ga, gb, perm);
            cell.ran = true;
        };

        if (solver == "exhaustive") {
            if (capacity > 8) return;  // N.A. for this pair
            timed([&] { return edit_exact(ga, gb).permutation; });
        } else if (solver == "frank-wolfe") {
            const GroundLossSet gl = GroundLossSet::all_l2();
            const LossWeights w = LossWeights::defaults(capacity);
            timed([&] {
                const FWResult res = frank_wolfe_qap(da, db, gl, w);
                return hungarian((-res.plan).eval());
            });
        } else if (solver == "hungarian-affinity") {
            timed([&] {
                const Mat xa = pad_embedding(embed(da), Vec::Zero(d_in), da);
                const Mat xb = pad_embedding(embed(db), Vec::Zero(d_in), db);
                Mat cost(capacity, capacity);
                for (int i = 0; i < capacity; ++i)
                    for (int j = 0; j < capacity; ++j) cost(i, j) = (xa.row(i) - xb.row(j)).cwiseAbs().sum();
                return hungarian(cost);
            });
        } else if (solver == "matcher") {
            timed([&] { return match_graphs(model, da, db, embed).permutation; });
        } else {  // random
            timed([&] {
                Rng r(pr.seed);
                return Permutation::random(capacity, r);
            });
        }
    };

    // one row of cells per solver; pair-level work fans out to a small pool
    std::vector<std::vector<BenchCell>> cells(solvers.size(), std::vector<BenchCell>(picked.size()));
    const int n_threads = a.threads > 0 ? a.threads : static_cast<int>(std::thread::hardware_concurrency());
    for (std::size_t s = 0; s < solvers.size(); ++s) {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t p = next.fetch_add(1); p < picked.size(); p = next.fetch_add(1))
                solve_pair(solvers[s], picked[p], cells[s][p]);
        };
        if (n_threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        log_info("solver " + solvers[s] + " done");
    }

    // aggregate rows, order-stabilized by pair index
    json jrows = json::array();
    std::string csv = "solver,pairs,mean_edit,std_edit,mean_time_s,std_time_s\n";
    for (std::size_t s = 0; s < solvers.size(); ++s) {
        int count = 0;
        double sum_b = 0, sum_b2 = 0, sum_t = 0, sum_t2 = 0;
        for (const auto& c : cells[s]) {
            if (!c.ran) continue;
            ++count;
            sum_b += c.bound;
            sum_b2 += static_cast<double>(c.bound) * c.bound;
            sum_t += c.seconds;
            sum_t2 += c.seconds * c.seconds;
        }
        if (count == 0) {
            csv += solvers[s] + ",0,na,na,na,na\n";
            jrows.push_back({{"solver", solvers[s]}, {"pairs", 0}});
            continue;
        }
        const double mean_b = sum_b / count;
        const double std_b = std::sqrt(std::max(0.0, sum_b2 / count - mean_b * mean_b));
        const double mean_t = sum_t / count;
        const double std_t = std::sqrt(std::max(0.0, sum_t2 / count - mean_t * mean_t));
        csv += solvers[s] + "," + std::to_string(count) + "," + fmt_double(mean_b) + "," + fmt_double(std_b) +
               "," + fmt_double(mean_t) + "," + fmt_double(std_t) + "\n";
        jrows.push_back({{"solver", solvers[s]},
                         {"pairs", count},
                         {"mean_edit", mean_b},
                         {"std_edit", std_b},
                         {"mean_time_s", mean_t},
                         {"std_time_s", std_t}});
    }
    emit(a.out, a.format == "json" ? json{{"rows", jrows}}.dump() + "\n" : csv);
    return 0;
}

// ---------------------------------------------------------------------------
// train-matcher
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string data;
    int steps = 500;
    double lr = 1e-3;
    int batch = 8;
    std::uint64_t seed = 0;
    std::string out = "model.json";
    int capacity = 0;
    int k = 2, pe_dim = 16;
    double noise_sigma = 0.01;
    int sinkhorn_iters = 100;
    double epsilon = 0.1;
    int hidden = 32, d_embed = 16;
};

int run_train(const TrainArgs& a) {
    const auto dataset = read_jsonl(a.data);
    if (dataset.empty()) throw std::invalid_argument("train-matcher: dataset is empty");

    int capacity = a.capacity;
    for (const auto& g : dataset) capacity = std::max(capacity, g.size());

    FeaturizerConfig feat;
    feat.k = a.k;
    feat.pe_dim = a.pe_dim;
    feat.noise_sigma = a.noise_sigma;

    std::vector<FeaturizedPair> pairs;
    pairs.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        FeaturizerConfig fc = feat;
        fc.seed = a.seed * 0x9e3779b97f4a7c15ULL + i;
        pairs.push_back(featurize(dataset[i], capacity, fc));
    }

    TrainConfig cfg;
    cfg.lr = a.lr;
    cfg.steps = a.steps;
    cfg.batch = a.batch;
    cfg.seed = a.seed;
    cfg.sinkhorn.n_iters = a.sinkhorn_iters;
    cfg.sinkhorn.epsilon = a.epsilon;

    const int d_in = dataset.front().n_f * (feat.k + 1);
    const AffinityModel m0 = init_affinity_model(d_in, a.hidden, a.d_embed, a.seed);
    log_info("training on " + std::to_string(dataset.size()) + " graphs, capacity " + std::to_string(capacity));
    const TrainResult res = train_matcher(m0, pairs, cfg);
    save_model(a.out, res.model);

    double head = 0.0, tail = 0.0;
    const int window = std::max(1, a.steps / 10);
    for (int i = 0; i < window; ++i) {
        head += res.trace[static_cast<std::size_t>(i)];
        tail += res.trace[res.trace.size() - 1 - static_cast<std::size_t>(i)];
    }
    json record{{"steps", a.steps},
                {"first_window_loss", head / window},
                {"final_window_loss", tail / window},
                {"model", a.out}};
    std::fputs((record.dump() + "\n").c_str(), stdout);
    return 0;
}

// ---------------------------------------------------------------------------
// denoise-eval
// ---------------------------------------------------------------------------

struct DenoiseArgs {
    std::string data;
    std::string noise_levels = "0,0.1,0.2,0.3,0.4,0.5,0.7,1.0";
    std::uint64_t seed = 0;
    std::string out;
};

int run_denoise(const DenoiseArgs& a) {
    const auto dataset = read_jsonl(a.data);
    if (dataset.empty()) throw std::invalid_argument("denoise-eval: dataset is empty");
    std::vector<double> levels;
    {
        std::stringstream ss(a.noise_levels);
        std::string item;
        while (std::getline(ss, item, ',')) levels.push_back(std::stod(item));
    }
    std::string csv = "noise_p,valid_fraction\n";
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double p = levels[li];
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("denoise-eval: noise level outside [0,1]");
        int valid = 0;
        for (std::size_t gi = 0; gi < dataset.size(); ++gi) {
            const std::uint64_t s = a.seed * 0x9e3779b97f4a7c15ULL + li * 1000003ULL + gi;
            if (coloring_valid(corrupt_labels(dataset[gi], p, s))) ++valid;
        }
        csv += fmt_double(p) + "," + fmt_double(static_cast<double>(valid) / static_cast<double>(dataset.size())) + "\n";
        log_debug("level " + fmt_double(p) + " done");
    }
    emit(a.out, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph transport losses, matching solvers and benchmarks"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* cgen = app.add_subcommand("gen", "generate a synthetic graph dataset (jsonl)");
    cgen->add_option("--flavor", gen.flavor, "coloring or molecule");
    cgen->add_option("--n-min", gen.n_min);
    cgen->add_option("--n-max", gen.n_max);
    cgen->add_option("--count", gen.count);
    cgen->add_option("--seed", gen.seed);
    cgen->add_option("--out", gen.out, "output path (default: stdout)");
    cgen->add_option("--n-f", gen.n_f, "node label alphabet (molecule flavor)");
    cgen->add_option("--n-c", gen.n_c, "edge label alphabet (molecule flavor)");
    cgen->add_option("--edge-density", gen.edge_density);
    cgen->add_option("--dominant-frac", gen.dominant_frac);

    LossArgs loss;
    auto* closs = app.add_subcommand("loss", "evaluate reconstruction losses between two graphs");
    closs->add_option("--a", loss.a)->required();
    closs->add_option("--b", loss.b)->required();
    closs->add_option("--plan", loss.plan, "exhaustive, fw or file");
    closs->add_option("--plan-file", loss.plan_file);
    closs->add_option("--loss", loss.loss, "ot, pigvae or pigvae-plus");
    closs->add_option("--ground", loss.ground, "l2 or ce");
    closs->add_option("--lambda", loss.lambda, "entropy weight for pigvae-plus");
    closs->add_option("--capacity", loss.capacity, "padded size (default: max graph size)");
    closs->add_flag("--naive", loss.naive, "use the quartic reference evaluation");
    closs->add_flag("--grad-norms", loss.grad_norms);
    closs->add_option("--alpha-h", loss.weights.alpha_h);
    closs->add_option("--alpha-f-d", loss.weights.alpha_f_d);
    closs->add_option("--alpha-f-c", loss.weights.alpha_f_c);
    closs->add_option("--alpha-c-d", loss.weights.alpha_c_d);
    closs->add_option("--alpha-c-c", loss.weights.alpha_c_c);
    closs->add_option("--sinkhorn-iters", loss.sinkhorn_iters);
    closs->add_option("--epsilon", loss.epsilon);
    closs->add_option("--fw-iters", loss.fw_iters);
    closs->add_option("--fw-tol", loss.fw_tol);
    closs->add_option("--out", loss.out);

    MatchArgs match_args;
    auto* cmatch = app.add_subcommand("match", "match two graphs and bound their edit distance");
    cmatch->add_option("--a", match_args.a)->required();
    cmatch->add_option("--b", match_args.b)->required();
    cmatch->add_option("--model", match_args.model, "trained affinity model json");
    cmatch->add_option("--seed", match_args.seed);
    cmatch->add_option("--k", match_args.k);
    cmatch->add_option("--pe-dim", match_args.pe_dim);
    cmatch->add_option("--hidden", match_args.hidden);
    cmatch->add_option("--d-embed", match_args.d_embed);
    cmatch->add_option("--out", match_args.out);

    EditArgs edit;
    auto* cedit = app.add_subcommand("editdist", "exact edit distance or a permutation upper bound");
    cedit->add_option("--a", edit.a)->required();
    cedit->add_option("--b", edit.b)->required();
    cedit->add_flag("--exact", edit.exact, "exhaustive search (default)");
    cedit->add_option("--perm", edit.perm_file, "json permutation file for an upper bound");
    cedit->add_option("--out", edit.out);

    BenchArgs bench;
    auto* cbench = app.add_subcommand("bench", "edit-distance upper bounds and timings per solver");
    cbench->add_option("--data", bench.data)->required();
    cbench->add_option("--solvers", bench.solvers, "comma list of exhaustive,frank-wolfe,hungarian-affinity,matcher,random");
    cbench->add_option("--pairs", bench.pairs);
    cbench->add_option("--seed", bench.seed);
    cbench->add_option("--model", bench.model);
    cbench->add_option("--threads", bench.threads, "worker threads (default: hardware)");
    cbench->add_option("--format", bench.format, "csv or json");
    cbench->add_option("--out", bench.out);
    cbench->add_option("--k", bench.k);
    cbench->add_option("--pe-dim", bench.pe_dim);

    TrainArgs train;
    auto* ctrain = app.add_subcommand("train-matcher", "fit the affinity matcher on a dataset");
    ctrain->add_option("--data", train.data)->required();
    ctrain->add_option("--steps", train.steps);
    ctrain->add_option("--lr", train.lr);
    ctrain->add_option("--batch", train.batch);
    ctrain->add_option("--seed", train.seed);
    ctrain->add_option("--out", train.out, "model output path");
    ctrain->add_option("--capacity", train.capacity);
    ctrain->add_option("--k", train.k);
    ctrain->add_option("--pe-dim", train.pe_dim);
    ctrain->add_option("--noise-sigma", train.noise_sigma);
    ctrain->add_option("--sinkhorn-iters", train.sinkhorn_iters);
    ctrain->add_option("--epsilon", train.epsilon);
    ctrain->add_option("--hidden", train.hidden);
    ctrain->add_option("--d-embed", train.d_embed);

    DenoiseArgs denoise;
    auto* cden = app.add_subcommand("denoise-eval", "coloring validity rate under label corruption");
    cden->add_option("--data", denoise.data)->required();
    cden->add_option("--noise-levels", denoise.noise_levels, "comma list of probabilities");
    cden->add_option("--seed", denoise.seed);
    cden->add_option("--out", denoise.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cgen) return run_gen(gen);
        if (*closs) return run_loss(loss);
        if (*cmatch) return run_match(match_args);
        if (*cedit) return run_editdist(edit);
        if (*cbench) return run_bench(bench);
        if (*ctrain) return run_train(train);
        if (*cden) return run_denoise(denoise);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        std::fprintf(stderr, "error: %s\n", msg.c_str());
        return msg.find("diverged") != std::string::npos || msg.find("non-finite") != std::string::npos ? 4 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
