// Command-line surface for the meaning-representation parsing toolkit:
// convert / validate / stats / oracle / train / parse / evaluate.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "mrparse/companion.hpp"
#include "mrparse/evaluator.hpp"
#include "mrparse/graph_io.hpp"
#include "mrparse/model.hpp"
#include "mrparse/oracle.hpp"
#include "mrparse/validate.hpp"

namespace {

using namespace mrparse;

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;

std::string resolve_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("MRPARSE_DATA_DIR")) {
        fs::path alt = fs::path(dir) / path;
        if (fs::exists(alt)) return alt.string();
    }
    return path;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(resolve_path(path));
    if (!in) throw Error("cannot open input file: " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    return out;
}

std::vector<Graph> load_mrp(const std::string& path) {
    auto in = open_input(path);
    return read_mrp(in);
}

std::vector<IGraph> load_irep(const std::string& path) {
    auto in = open_input(path);
    std::vector<IGraph> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(igraph_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            throw Error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::map<std::string, const Graph*> by_id(const std::vector<Graph>& graphs) {
    std::map<std::string, const Graph*> m;
    for (const auto& g : graphs)
        if (!m.emplace(g.id, &g).second) throw Error("duplicate graph id: " + g.id);
    return m;
}

// Ordered parallel map: results land at their input index.
template <typename T, typename F>
auto parallel_map(const std::vector<T>& items, int jobs, F fn) {
    std::vector<decltype(fn(items[0]))> results(items.size());
    if (jobs <= 1 || items.size() <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            results[i] = fn(items[i]);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

FrameworkProfile profile_or_graph(const std::string& framework, const std::string& config,
                                  const std::vector<Graph>& graphs) {
    if (!framework.empty()) return profile_for(framework, config);
    if (!graphs.empty() && !graphs[0].framework.empty()) return profile_for(graphs[0].framework, config);
    throw Error("no --framework given and the input does not name one");
}

void print_score_table(const ScoreReport& r, std::ostream& out, bool macro) {
    out << "class        gold  system matched       P       R       F\n";
    char line[160];
    for (const auto& name : tuple_class_names()) {
        const ClassScore& c = r.classes.at(name);
        std::snprintf(line, sizeof line, "%-10s %6zu  %6zu  %6zu  %6.4f  %6.4f  %6.4f\n", name.c_str(), c.gold,
                      c.system, c.matched, c.precision, c.recall, c.f1);
        out << line;
    }
    const ClassScore& a = r.overall;
    std::snprintf(line, sizeof line, "%-10s %6zu  %6zu  %6zu  %6.4f  %6.4f  %6.4f\n", "all", a.gold, a.system,
                  a.matched, a.precision, a.recall, a.f1);
    out << line;
    if (macro) out << "macro F: " << r.macro_f1 << "\n";
}

struct SentenceBatch {
    std::vector<std::string> ids;
    std::vector<std::string> inputs;
    std::vector<std::vector<TokenRow>> rows;
};

SentenceBatch load_tokens(const std::string& path) {
    SentenceBatch batch;
    if (path.size() > 7 && path.substr(path.size() - 7) == ".conllu") {
        auto in = open_input(path);
        for (auto& sent : read_conllu(in)) {
            batch.ids.push_back(sent.sent_id);
            std::string input;
            for (const auto& r : sent.rows) {
                while (static_cast<std::int64_t>(utf8_length(input)) < r.anchor.from) input += ' ';
                input += r.form;
            }
            batch.inputs.push_back(input);
            batch.rows.push_back(std::move(sent.rows));
        }
        return batch;
    }
    for (const auto& g : load_mrp(path)) {
        batch.ids.push_back(g.id);
        batch.inputs.push_back(g.input);
        batch.rows.push_back(companion_to_rows(g));
    }
    return batch;
}

std::vector<TrainItem> pair_with_companion(const std::vector<Graph>& golds, const std::string& companion_path) {
    auto companion = load_mrp(companion_path);
    auto cmap = by_id(companion);
    std::vector<TrainItem> items;
    for (const auto& g : golds) {
        auto it = cmap.find(g.id);
        if (it == cmap.end()) throw Error("no companion graph for id " + g.id);
        items.push_back({g, companion_to_rows(*it->second)});
    }
    return items;
}

std::vector<Graph> parse_corpus(const Model& model, const SentenceBatch& batch, int jobs) {
    std::vector<std::size_t> idx(batch.ids.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return parallel_map(idx, jobs, [&](std::size_t i) {
        return parse(model, batch.rows[i], batch.ids[i], batch.inputs[i]).graph;
    });
}

int cmd_convert(const std::string& input, const std::string& companion_path, const std::string& output,
                std::string direction, const std::string& format, const std::string& framework,
                const std::string& profile_config) {
    if (direction.empty()) {
        if (format.empty()) throw Error("convert needs --direction or --format");
        std::ifstream probe(resolve_path(input));
        if (!probe) throw Error("cannot open input file: " + input);
        std::string first_line;
        std::getline(probe, first_line);
        bool is_irep = first_line.find("\"virtual-root\"") != std::string::npos;
        if (format == "irep")
            direction = "mrp2irep";
        else if (format == "conllu")
            direction = "companion2conllu";
        else if (format == "dot")
            direction = "mrp2dot";
        else if (format == "mrp")
            direction = is_irep ? "irep2mrp" : "mrp2mrp";
        else
            throw Error("unknown --format: " + format);
    }
    auto out = open_output(output);
    int failures = 0;

    if (direction == "companion2conllu") {
        for (const auto& g : load_mrp(input)) {
            try {
                write_conllu(companion_to_rows(g), out, g.id);
            } catch (const Error& e) {
                ++failures;
                std::cerr << "error: " << e.what() << '\n';
            }
        }
    } else if (direction == "mrp2dot") {
        for (const auto& g : load_mrp(input)) out << to_dot(g);
    } else if (direction == "mrp2mrp") {
        write_mrp(load_mrp(input), out);
    } else if (direction == "mrp2irep") {
        if (companion_path.empty()) throw Error("mrp2irep needs --companion");
        auto golds = load_mrp(input);
        FrameworkProfile profile = profile_or_graph(framework, profile_config, golds);
        auto companion = load_mrp(companion_path);
        auto cmap = by_id(companion);
        for (const auto& g : golds) {
            try {
                auto it = cmap.find(g.id);
                if (it == cmap.end()) throw Error("no companion graph for id " + g.id);
                IGraph ig = to_intermediate(g, companion_to_rows(*it->second), profile);
                out << igraph_to_json(ig).dump() << '\n';
            } catch (const Error& e) {
                ++failures;
                std::cerr << "error: graph " << g.id << ": " << e.what() << '\n';
            }
        }
    } else if (direction == "irep2mrp") {
        if (companion_path.empty()) throw Error("irep2mrp needs --companion");
        auto igraphs = load_irep(input);
        auto companion = load_mrp(companion_path);
        auto cmap = by_id(companion);
        std::vector<Graph> graphs;
        for (const auto& ig : igraphs) {
            try {
                auto it = cmap.find(ig.id);
                if (it == cmap.end()) throw Error("no companion graph for id " + ig.id);
                graphs.push_back(from_intermediate(ig, companion_to_rows(*it->second), it->second->input));
            } catch (const Error& e) {
                ++failures;
                std::cerr << "error: graph " << ig.id << ": " << e.what() << '\n';
            }
        }
        write_mrp(graphs, out);
    } else {
        throw Error("unknown --direction: " + direction);
    }
    if (failures) {
        std::cerr << failures << " graph(s) failed to convert\n";
        return kExitFindings;
    }
    return kExitOk;
}

int cmd_validate(const std::string& input, const std::string& framework, const std::string& profile_config) {
    auto graphs = load_mrp(input);
    int findings = 0;
    for (const auto& g : graphs) {
        FrameworkProfile profile = profile_for(framework.empty() ? g.framework : framework, profile_config);
        auto report = validate(g, profile);
        for (const auto& f : report.findings) {
            std::cout << g.id << "\t" << f.code << "\t" << f.message << "\n";
            ++findings;
        }
    }
    std::cout << graphs.size() << " graph(s), " << findings << " finding(s)\n";
    return findings ? kExitFindings : kExitOk;
}

int cmd_stats(const std::string& input, const std::string& output) {
    auto stats = corpus_stats(load_mrp(input));
    Json j = stats.to_json();
    if (!output.empty()) {
        auto out = open_output(output);
        out << j.dump(1) << '\n';
    }
    std::cout << j.dump(1) << '\n';
    return kExitOk;
}

int cmd_oracle(const std::string& input, const std::string& companion_path, const std::string& framework,
               const std::string& output, bool verify, const std::string& profile_config) {
    auto golds = load_mrp(input);
    FrameworkProfile profile = profile_or_graph(framework, profile_config, golds);
    auto items = pair_with_companion(golds, companion_path);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!output.empty()) {
        file = open_output(output);
        out = &file;
    }
    int failures = 0;
    double total_f = 0;
    std::size_t scored = 0;
    for (const auto& item : items) {
        try {
            IGraph gold = to_intermediate(item.graph, item.rows, profile);
            OracleResult result = gold_parse(gold, item.rows);
            *out << "# " << item.graph.id << "\n";
            for (const auto& t : result.sequence) *out << t.encode() << "\n";
            *out << "\n";
            if (verify) {
                IGraph replayed = replay(item.rows, result.sequence);
                std::map<NodeId, NodeId> ids;
                for (const auto& [ref, gid] : result.node_ids) ids[static_cast<NodeId>(ref)] = gid;
                replayed = renumber_igraph(replayed, ids);
                replayed.id = gold.id;
                replayed.framework = gold.framework;
                Graph gold_readout = from_intermediate(gold, item.rows, item.graph.input);
                Graph replay_readout = from_intermediate(replayed, item.rows, item.graph.input);
                double f = score_pair(gold_readout, replay_readout).overall.f1;
                total_f += f;
                ++scored;
                std::cerr << item.graph.id << "\treplay F = " << f << "\n";
                if (f < 1.0) ++failures;
            }
        } catch (const Error& e) {
            ++failures;
            std::cerr << "error: graph " << item.graph.id << ": " << e.what() << "\n";
        }
    }
    if (verify && scored)
        std::cerr << "verified " << scored << " graph(s), mean replay F = " << total_f / double(scored) << "\n";
    return failures ? kExitFindings : kExitOk;
}

int cmd_train(const std::string& input, const std::string& companion_path, const std::string& framework,
              const std::string& model_path, const std::string& pretrained, int epochs, std::uint64_t seed,
              const std::string& val_input, const std::string& val_companion, bool multitask,
              const std::string& profile_config, int jobs) {
    auto golds = load_mrp(input);
    FrameworkProfile profile = profile_or_graph(framework, profile_config, golds);
    auto items = pair_with_companion(golds, companion_path);

    std::optional<Model> base;
    if (!pretrained.empty()) {
        auto in = open_input(pretrained);
        base = load_model(in);
    }

    std::vector<Graph> val_golds;
    SentenceBatch val_batch;
    if (!val_input.empty()) {
        val_golds = load_mrp(val_input);
        val_batch = load_tokens(val_companion.empty() ? val_input : val_companion);
    }

    std::ofstream metrics = open_output(model_path + ".metrics");
    Model best_model;
    double best_f = -1;
    int best_epoch = -1;
    std::optional<Model> current = base;
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        TrainConfig config;
        config.epochs = 1;
        config.seed = derive_seed(seed, "epoch-" + std::to_string(epoch));
        config.multitask = multitask;
        config.log = &std::cerr;
        Model m = train(items, profile, config, current ? &*current : nullptr);
        current = m;

        double f;
        std::string which;
        if (!val_golds.empty()) {
            auto parsed = parse_corpus(m, val_batch, jobs);
            f = score_corpus(val_golds, parsed, 10, 5000, derive_seed(seed, "val")).overall.f1;
            which = "validation";
        } else {
            SentenceBatch train_batch;
            for (std::size_t i = 0; i < items.size(); ++i) {
                train_batch.ids.push_back(items[i].graph.id);
                train_batch.inputs.push_back(items[i].graph.input);
                train_batch.rows.push_back(items[i].rows);
            }
            auto parsed = parse_corpus(m, train_batch, jobs);
            f = score_corpus(golds, parsed, 10, 5000, derive_seed(seed, "train-eval")).overall.f1;
            which = "train";
        }
        metrics << Json{{"epoch", epoch}, {which + "-f", f}}.dump() << '\n';
        std::cerr << "epoch " << epoch << ": " << which << " F = " << f << "\n";
        if (f > best_f) {
            best_f = f;
            best_epoch = epoch;
            best_model = m;
        }
    }
    best_model.metadata["best-epoch"] = best_epoch;
    best_model.metadata["best-f"] = best_f;
    best_model.metadata["epochs-run"] = epochs;
    best_model.metadata["cli-seed"] = seed;
    auto out = open_output(model_path);
    save_model(best_model, out);
    metrics << Json{{"best-epoch", best_epoch}, {"best-f", best_f}}.dump() << '\n';
    std::cerr << "best epoch " << best_epoch << " (F = " << best_f << "), model written to " << model_path
              << "\n";
    return kExitOk;
}

int cmd_parse(const std::string& tokens_path, const std::string& model_path, const std::string& output,
              int jobs) {
    auto in = open_input(model_path);
    Model model = load_model(in);
    SentenceBatch batch = load_tokens(tokens_path);
    auto graphs = parse_corpus(model, batch, jobs);
    auto out = open_output(output);
    write_mrp(graphs, out);
    return kExitOk;
}

int cmd_evaluate(const std::string& gold_path, const std::string& system_path, int restarts, int iterations,
                 std::uint64_t seed, bool macro, const std::string& output, int jobs) {
    auto golds = load_mrp(gold_path);
    auto systems = load_mrp(system_path);
    auto smap = by_id(systems);
    auto gmap = by_id(golds);
    for (const auto& [id, s] : smap)
        if (!gmap.count(id)) throw Error("system graph id not present in gold corpus: " + id);

    // same per-graph sub-seeds as score_corpus, parallelized over pairs
    ScoreReport totals;
    totals.restarts = restarts;
    totals.iterations = iterations;
    totals.seed = seed;
    for (const auto& name : tuple_class_names()) totals.classes[name] = ClassScore{};
    static const Graph empty_graph{};
    auto reports = parallel_map(golds, jobs, [&](const Graph& g) {
        auto it = smap.find(g.id);
        const Graph& sys = it != smap.end() ? *it->second : empty_graph;
        return score_pair(g, sys, restarts, iterations, derive_seed(seed, "graph-" + g.id));
    });
    double macro_sum = 0;
    for (const auto& r : reports)
        for (const auto& name : tuple_class_names()) {
            totals.classes[name].gold += r.classes.at(name).gold;
            totals.classes[name].system += r.classes.at(name).system;
            totals.classes[name].matched += r.classes.at(name).matched;
        }
    for (const auto& name : tuple_class_names()) {
        auto& c = totals.classes[name];
        c.finish();
        macro_sum += c.f1;
        totals.overall.gold += c.gold;
        totals.overall.system += c.system;
        totals.overall.matched += c.matched;
    }
    totals.overall.finish();
    totals.macro_f1 = macro_sum / double(tuple_class_names().size());

    print_score_table(totals, std::cout, macro);
    if (!output.empty()) {
        auto out = open_output(output);
        out << totals.to_json().dump(1) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meaning-representation graph parsing toolkit"};
    app.require_subcommand(1);

    std::string input, companion, output, direction, format, framework, profile_config, model_path;
    std::string pretrained, val_input, val_companion, gold_path, system_path;
    int epochs = 20, restarts = 10, iterations = 5000, jobs = 1;
    std::uint64_t seed = 1;
    bool verify = false, macro = false, multitask = false;

    auto* convert = app.add_subcommand("convert", "convert between mrp, irep, conllu and dot");
    convert->add_option("--input", input)->required();
    convert->add_option("--companion", companion);
    convert->add_option("--output", output)->required();
    convert->add_option("--direction", direction,
                        "mrp2irep | irep2mrp | companion2conllu | mrp2dot | mrp2mrp");
    convert->add_option("--format", format, "target format: mrp | irep | conllu | dot");
    convert->add_option("--framework", framework);
    convert->add_option("--profile", profile_config);

    auto* validate_cmd = app.add_subcommand("validate", "check graphs against a framework profile");
    validate_cmd->add_option("--input", input)->required();
    validate_cmd->add_option("--framework", framework);
    validate_cmd->add_option("--profile", profile_config);

    auto* stats = app.add_subcommand("stats", "corpus and cyclicity statistics");
    stats->add_option("--input", input)->required();
    stats->add_option("--output", output);

    auto* oracle_cmd = app.add_subcommand("oracle", "dump gold transition sequences");
    oracle_cmd->add_option("--input", input)->required();
    oracle_cmd->add_option("--companion", companion)->required();
    oracle_cmd->add_option("--framework", framework);
    oracle_cmd->add_option("--output", output);
    oracle_cmd->add_option("--profile", profile_config);
    oracle_cmd->add_flag("--verify", verify, "replay each sequence and score it against gold");

    auto* train_cmd = app.add_subcommand("train", "train a parser");
    train_cmd->add_option("--input", input)->required();
    train_cmd->add_option("--companion", companion)->required();
    train_cmd->add_option("--framework", framework);
    train_cmd->add_option("--model", model_path)->required();
    train_cmd->add_option("--pretrained", pretrained, "continue training from an existing model");
    train_cmd->add_option("--epochs", epochs);
    train_cmd->add_option("--seed", seed);
    train_cmd->add_option("--val", val_input);
    train_cmd->add_option("--val-companion", val_companion);
    train_cmd->add_option("--profile", profile_config);
    train_cmd->add_option("--jobs", jobs);
    train_cmd->add_flag("--multitask", multitask, "add the framework identity feature");

    auto* parse_cmd = app.add_subcommand("parse", "parse companion tokens into graphs");
    parse_cmd->add_option("--input", input, "companion .mrp or .conllu token file")->required();
    parse_cmd->add_option("--model", model_path)->required();
    parse_cmd->add_option("--output", output)->required();
    parse_cmd->add_option("--jobs", jobs);

    auto* evaluate = app.add_subcommand("evaluate", "MRP F-score of system graphs against gold");
    evaluate->add_option("--gold", gold_path)->required();
    evaluate->add_option("--system", system_path)->required();
    evaluate->add_option("--restarts", restarts);
    evaluate->add_option("--iterations", iterations);
    evaluate->add_option("--seed", seed);
    evaluate->add_option("--output", output);
    evaluate->add_option("--jobs", jobs);
    evaluate->add_flag("--macro", macro, "report the per-class macro average as well");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (convert->parsed())
            return cmd_convert(input, companion, output, direction, format, framework, profile_config);
        if (validate_cmd->parsed()) return cmd_validate(input, framework, profile_config);
        if (stats->parsed()) return cmd_stats(input, output);
        if (oracle_cmd->parsed())
            return cmd_oracle(input, companion, framework, output, verify, profile_config);
        if (train_cmd->parsed())
            return cmd_train(input, companion, framework, model_path, pretrained, epochs, seed, val_input,
                             val_companion, multitask, profile_config, jobs);
        if (parse_cmd->parsed()) return cmd_parse(input, model_path, output, jobs);
        if (evaluate->parsed())
            return cmd_evaluate(gold_path, system_path, restarts, iterations, seed, macro, output, jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
