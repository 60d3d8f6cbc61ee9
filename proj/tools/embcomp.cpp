// embcomp: command-line front end for the compression / evaluation pipeline.
//
// Exit codes: 0 ok, 1 I/O, 2 validation, 3 partial sweep failure,
// 4 infeasible budget.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "embcomp/codecs.hpp"
#include "embcomp/dimred.hpp"
#include "embcomp/error.hpp"
#include "embcomp/eval.hpp"
#include "embcomp/parallel.hpp"
#include "embcomp/report.hpp"
#include "embcomp/retrieval.hpp"
#include "embcomp/sweep.hpp"
#include "embcomp/synthetic.hpp"
#include "embcomp/vector_store.hpp"
#include "json.hpp"
#include "json_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace embcomp;

namespace {

enum Exit { kOk = 0, kIo = 1, kInvalid = 2, kPartial = 3, kInfeasible = 4 };

struct Globals {
    bool json = false;
    int threads = 0;
};

void emit(const Globals& g, const json& j, const std::string& text) {
    if (g.json) {
        std::cout << dump(j);
    } else {
        std::cout << text;
    }
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string magic_of(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    char m[4] = {};
    in.read(m, 4);
    return std::string(m, static_cast<std::size_t>(in.gcount()));
}

// --- info -------------------------------------------------------------------

struct InfoArgs {
    std::string path;
};

int run_info(const Globals& g, const InfoArgs& a) {
    const std::string magic = magic_of(a.path);
    json j;
    std::string text;
    if (magic == "EVRM") {
        const ReducerModel m = read_model(a.path);
        j = {{"kind", "model"},
             {"reducer", std::string(reducer_name(model_kind(m)))},
             {"input_dims", model_input_dims(m)},
             {"output_dims", model_output_dims(m)},
             {"file_bytes", fs::file_size(a.path)}};
        text = "model " + j["reducer"].get<std::string>() + ": " + std::to_string(model_input_dims(m)) + " -> " +
               std::to_string(model_output_dims(m)) + " dims\n";
    } else {
        const QuantizedMatrix m = read_matrix(a.path);
        j = {{"kind", "matrix"},
             {"rows", m.rows()},
             {"dims", m.dims},
             {"dtype", std::string(dtype_name(m.dtype))},
             {"bytes", m.payload.size()},
             {"file_bytes", fs::file_size(a.path)},
             {"calibration", m.calibration.has_value()},
             {"compression_ratio", compression_ratio(m.dtype, 1.0, m.dims)}};
        text = "matrix " + std::to_string(m.rows()) + " x " + std::to_string(m.dims) + " " +
               std::string(dtype_name(m.dtype)) + ", " + std::to_string(m.payload.size()) + " payload bytes\n";
    }
    emit(g, j, text);
    return kOk;
}

// --- ingest -----------------------------------------------------------------

struct IngestArgs {
    std::string input, output, id_field = "id", vector_field = "embedding";
};

int run_ingest(const Globals& g, const IngestArgs& a) {
    const EmbeddingMatrix m = ingest_jsonl(a.input, a.id_field, a.vector_field);
    write_matrix(m, a.output);
    const json j = {{"rows", m.rows()}, {"dims", m.dims}, {"dtype", "f32"}, {"bytes", m.data.size() * 4}};
    emit(g, j, "wrote " + std::to_string(m.rows()) + " x " + std::to_string(m.dims) + " to " + a.output + "\n");
    return kOk;
}

// --- quantize ---------------------------------------------------------------

struct QuantizeArgs {
    std::string input, output, dtype, calibration;
};

int run_quantize(const Globals&, const QuantizeArgs& a) {
    const DType dtype = parse_dtype(a.dtype);
    if (dtype == DType::int8 && a.calibration.empty()) {
        throw ValidationError("int8 quantization requires --calibration (an f32 EVEC reference matrix)");
    }
    const EmbeddingMatrix m = read_embeddings(a.input);
    std::optional<Calibration> c;
    if (dtype == DType::int8) {
        const EmbeddingMatrix ref = read_embeddings(a.calibration);
        if (ref.dims != m.dims) {
            throw ValidationError("calibration dims " + std::to_string(ref.dims) + " differ from input dims " +
                                  std::to_string(m.dims));
        }
        c = calibrate_int8(ref);
    }
    const QuantizedMatrix q = quantize(m, dtype, c ? &*c : nullptr);
    write_matrix(q, a.output);
    // The summary is always printed.
    std::cout << dump({{"rows", q.rows()},
                       {"dims", q.dims},
                       {"dtype", std::string(dtype_name(dtype))},
                       {"bytes", q.payload.size()},
                       {"compression_ratio", compression_ratio(dtype, 1.0, q.dims)}});
    return kOk;
}

// --- reduce -----------------------------------------------------------------

struct ReducerArgs {
    std::string method = "pca";
    std::uint64_t seed = 42;
    std::size_t kpca_samples = 1000;
    double gamma = 0.0;
    unsigned degree = 3;
    double coef0 = 1.0;

    ReducerOptions options() const {
        ReducerOptions o;
        o.seed = seed;
        o.kpca_max_samples = kpca_samples;
        o.kernel.gamma = gamma;
        o.kernel.degree = degree;
        o.kernel.coef0 = coef0;
        return o;
    }
};

void add_reducer_flags(CLI::App* app, ReducerArgs& r) {
    app->add_option("--seed", r.seed, "Random projection seed")->capture_default_str();
    app->add_option("--kpca-samples", r.kpca_samples, "Training rows used by kernel PCA")->capture_default_str();
    app->add_option("--gamma", r.gamma, "Kernel gamma (0: 1/D)")->capture_default_str();
    app->add_option("--degree", r.degree, "Polynomial kernel degree")->capture_default_str();
    app->add_option("--coef0", r.coef0, "Polynomial kernel offset")->capture_default_str();
}

struct ReduceFitArgs {
    std::string input, output;
    double ratio = 0.5;
    std::size_t k = 0;
    ReducerArgs reducer;
};

int run_reduce_fit(const Globals& g, const ReduceFitArgs& a) {
    const ReducerKind kind = parse_reducer(a.reducer.method);
    if (kind == ReducerKind::none) throw ValidationError("--method none does not produce a model");
    const EmbeddingMatrix train = read_embeddings(a.input);
    const std::size_t k = a.k > 0 ? a.k : retained_dims(a.ratio, train.dims);
    const ReducerModel model = fit_reducer(kind, train, k, a.reducer.options());
    write_model(model, a.output);
    const json j = {{"reducer", std::string(reducer_name(kind))},
                    {"input_dims", model_input_dims(model)},
                    {"output_dims", model_output_dims(model)},
                    {"training_rows", train.rows()}};
    emit(g, j,
         "fitted " + std::string(reducer_name(kind)) + " " + std::to_string(model_input_dims(model)) + " -> " +
             std::to_string(model_output_dims(model)) + " dims, wrote " + a.output + "\n");
    return kOk;
}

struct ReduceApplyArgs {
    std::string model, input, output;
};

int run_reduce_apply(const Globals& g, const ReduceApplyArgs& a) {
    const ReducerModel model = read_model(a.model);
    const EmbeddingMatrix m = read_embeddings(a.input);
    if (m.dims != model_input_dims(model)) {
        throw ValidationError("input has " + std::to_string(m.dims) + " dims but the model expects " +
                              std::to_string(model_input_dims(model)));
    }
    const EmbeddingMatrix y = apply_reducer(model, m);
    write_matrix(y, a.output);
    const json j = {{"rows", y.rows()}, {"input_dims", m.dims}, {"output_dims", y.dims}};
    emit(g, j, "reduced " + std::to_string(y.rows()) + " rows to " + std::to_string(y.dims) + " dims\n");
    return kOk;
}

// --- search -----------------------------------------------------------------

struct SearchArgs {
    std::string docs, queries, originals, output;
    std::size_t k = kNdcgDepth;
    std::size_t oversample = 0;
};

// Brings f32 queries into the document dtype; int8 reuses the document ranges.
QuantizedMatrix align_queries(const QuantizedMatrix& docs, const QuantizedMatrix& queries) {
    if (queries.dims != docs.dims) {
        throw ValidationError("query dims " + std::to_string(queries.dims) + " differ from document dims " +
                              std::to_string(docs.dims));
    }
    if (queries.dtype == docs.dtype) return queries;
    if (queries.dtype != DType::f32) {
        throw ValidationError("queries are " + std::string(dtype_name(queries.dtype)) + " but documents are " +
                              std::string(dtype_name(docs.dtype)) + "; pass f32 queries or matching dtypes");
    }
    const EmbeddingMatrix q = to_embeddings(queries);
    return quantize(q, docs.dtype, docs.calibration ? &*docs.calibration : nullptr);
}

int run_search(const Globals& g, const SearchArgs& a) {
    const QuantizedMatrix docs = read_matrix(a.docs);
    const QuantizedMatrix raw_queries = read_matrix(a.queries);
    std::vector<RankedList> runs;
    if (a.oversample > 0) {
        if (docs.dtype != DType::binary) throw ValidationError("--oversample applies to binary documents only");
        if (a.originals.empty()) throw ValidationError("--oversample requires --originals (f32 documents)");
        if (raw_queries.dtype != DType::f32) throw ValidationError("re-scoring needs f32 queries");
        const RetrievalIndex index(docs, read_embeddings(a.originals));
        runs = rescore_binary(index, to_embeddings(raw_queries), a.k, a.oversample);
    } else {
        const RetrievalIndex index(docs);
        runs = search(index, align_queries(docs, raw_queries), a.k);
    }

    json results = json::array();
    std::string tsv;
    for (const auto& r : runs) {
        json hits = json::array();
        for (std::size_t i = 0; i < r.hits.size(); ++i) {
            hits.push_back({{"doc_id", r.hits[i].first}, {"score", r.hits[i].second}});
            tsv += r.query_id + "\t" + r.hits[i].first + "\t" + std::to_string(i + 1) + "\t" +
                   fmt("%.6f", r.hits[i].second) + "\n";
        }
        results.push_back({{"query_id", r.query_id}, {"hits", hits}});
    }
    if (!a.output.empty()) write_text_file(a.output, tsv);
    emit(g, {{"k", a.k}, {"results", results}}, a.output.empty() ? tsv : "");
    return kOk;
}

// --- evaluate ---------------------------------------------------------------

struct PipelineArgs {
    std::string manifest, calibration, model = "model";
    std::string reducer_kind = "pca";
    ReducerArgs reducer;
    std::size_t k = kNdcgDepth;
    std::size_t oversample = 0;
};

void add_pipeline_flags(CLI::App* app, PipelineArgs& p) {
    app->add_option("--manifest", p.manifest, "Dataset manifest (JSON)")->required();
    app->add_option("--calibration", p.calibration, "f32 EVEC used to fit reducers and int8 ranges");
    app->add_option("--model", p.model, "Model label for reports")->capture_default_str();
    app->add_option("--reducer", p.reducer_kind, "pca, kpca-cosine, kpca-poly, kpca-rbf, random-projection")
        ->capture_default_str();
    app->add_option("--k", p.k, "Top-k retrieved per query")->capture_default_str();
    app->add_option("--oversample", p.oversample, "Binary re-scoring oversampling factor (0: off)")
        ->capture_default_str();
    add_reducer_flags(app, p.reducer);
}

std::vector<DatasetData> load_all(const std::string& manifest) {
    std::vector<DatasetData> out;
    for (const auto& m : read_manifest(manifest)) out.push_back(load_dataset(m));
    if (out.empty()) throw ValidationError("manifest lists no datasets");
    for (const auto& d : out) {
        if (d.docs.dims != out.front().docs.dims) {
            throw ValidationError("dataset '" + d.name + "' has " + std::to_string(d.docs.dims) + " dims, expected " +
                                  std::to_string(out.front().docs.dims));
        }
    }
    return out;
}

std::optional<EmbeddingMatrix> load_calibration(const std::string& path, std::size_t dims) {
    if (path.empty()) return std::nullopt;
    EmbeddingMatrix c = read_embeddings(path);
    if (c.dims != dims) {
        throw ValidationError("calibration has " + std::to_string(c.dims) + " dims, datasets have " +
                              std::to_string(dims));
    }
    return c;
}

struct EvaluateArgs {
    PipelineArgs pipeline;
    std::string dtype = "f32", csv, output;
    double ratio = 1.0;
    bool per_query = false;
};

int run_evaluate(const Globals& g, const EvaluateArgs& a) {
    const auto datasets = load_all(a.pipeline.manifest);
    const std::size_t dims = datasets.front().docs.dims;
    const auto calibration = load_calibration(a.pipeline.calibration, dims);

    PipelineConfig cfg;
    cfg.dtype = parse_dtype(a.dtype);
    cfg.ratio = a.ratio;
    cfg.reducer = parse_reducer(a.pipeline.reducer_kind);
    cfg.reducer_options = a.pipeline.reducer.options();
    cfg.k = a.pipeline.k;
    cfg.oversample = a.pipeline.oversample;
    if (cfg.reduces() && !calibration) throw ValidationError("--ratio below 1 requires --calibration");
    if (cfg.dtype == DType::int8 && !calibration) throw ValidationError("int8 requires --calibration");
    const Pipeline pipeline(cfg, calibration ? &*calibration : nullptr, dims);

    EvalReport r;
    r.model = a.pipeline.model;
    r.dtype = cfg.dtype;
    r.ratio = cfg.ratio;
    r.reducer = cfg.reduces() ? cfg.reducer : ReducerKind::none;
    r.original_dims = dims;
    r.dims_kept = pipeline.output_dims();
    r.compression_ratio = compression_ratio(cfg.dtype, cfg.ratio, dims);
    std::uint64_t rows = 0;
    std::vector<WeightedScore> weights;
    for (const auto& d : datasets) {
        r.datasets.push_back(evaluate_dataset(d, pipeline));
        rows += d.docs.rows();
        weights.push_back({d.name, r.datasets.back().mean, d.token_count});
    }
    r.storage_bytes = storage_bytes(rows, dims, cfg.ratio, cfg.dtype);
    r.weighted = weighted_average(weights);

    const json j = to_json(r, a.per_query);
    if (!a.output.empty()) write_text_file(a.output, dump(j));
    if (!a.csv.empty()) write_text_file(a.csv, eval_csv(r));
    std::string text;
    for (const auto& d : r.datasets) text += d.dataset + "\tndcg@10 " + fmt("%.6f", d.mean) + "\n";
    text += "weighted\tndcg@10 " + fmt("%.6f", r.weighted) + "\n";
    emit(g, j, text);
    return kOk;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
    PipelineArgs pipeline;
    std::vector<std::string> dtypes;
    std::vector<double> ratios;
    std::string output_dir = ".";
    std::uint64_t storage_rows = 0;
};

int run_sweep_cmd(const Globals& g, const SweepArgs& a) {
    const auto datasets = load_all(a.pipeline.manifest);
    const std::size_t dims = datasets.front().docs.dims;
    const auto calibration = load_calibration(a.pipeline.calibration, dims);

    SweepOptions o;
    o.model = a.pipeline.model;
    if (!a.dtypes.empty()) {
        o.dtypes.clear();
        for (const auto& d : a.dtypes) o.dtypes.push_back(parse_dtype(d));
    }
    if (!a.ratios.empty()) o.ratios = a.ratios;
    o.reducer = parse_reducer(a.pipeline.reducer_kind);
    o.reducer_options = a.pipeline.reducer.options();
    o.k = a.pipeline.k;
    o.oversample = a.pipeline.oversample;
    if (a.storage_rows > 0) o.storage_rows = a.storage_rows;
    if (!calibration) throw ValidationError("sweep requires --calibration");

    const SweepResult r = run_sweep(datasets, *calibration, o);
    const fs::path dir(a.output_dir);
    fs::create_directories(dir);
    write_text_file(dir / "sweep.csv", sweep_csv(r));
    const json j = to_json(r);
    write_text_file(dir / "sweep.json", dump(j));

    std::string text;
    for (const auto& p : r.points) {
        text += std::string(dtype_name(p.dtype)) + "@" + fmt("%.2f", p.ratio) + "\tCR " +
                fmt("%.2f", p.compression_ratio) + "\tndcg@10 " + fmt("%.6f", p.score) + "\t" +
                std::to_string(p.storage_bytes) + " bytes\n";
    }
    emit(g, j, text);
    for (const auto& f : r.failures) {
        std::cerr << "config " << dtype_name(f.dtype) << "@" << fmt("%.2f", f.ratio) << " failed: " << f.message
                  << "\n";
    }
    return r.failures.empty() ? kOk : kPartial;
}

// --- pareto / plot ----------------------------------------------------------

struct BudgetArgs {
    std::vector<std::string> budgets;
    std::string budgets_file;
};

void add_budget_flags(CLI::App* app, BudgetArgs& b) {
    app->add_option("--budget", b.budgets, "Memory budget label=bytes (K/M/G/T, KiB/MiB/GiB); repeatable");
    app->add_option("--budgets-file", b.budgets_file, "JSON object mapping label to bytes");
}

std::vector<Budget> collect_budgets(const BudgetArgs& a) {
    std::vector<Budget> out;
    for (const auto& b : a.budgets) out.push_back(parse_budget(b));
    if (!a.budgets_file.empty()) {
        json j;
        try {
            j = json::parse(read_text_file(a.budgets_file));
        } catch (const json::exception& e) {
            throw FormatError(a.budgets_file + ": " + e.what());
        }
        if (!j.is_object()) throw FormatError(a.budgets_file + ": expected an object of label -> bytes");
        for (const auto& [label, v] : j.items()) {
            const std::string bytes = v.is_string() ? v.get<std::string>() : v.dump();
            Budget b = parse_budget(label + "=" + bytes);
            out.push_back(b);
        }
    }
    return out;
}

std::vector<ConfigPoint> load_points(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    auto pts = points_from_json(j);
    if (pts.empty()) throw ValidationError(path + ": no configuration points");
    return pts;
}

struct ParetoArgs {
    std::string sweep, output_dir = ".";
    BudgetArgs budgets;
};

int run_pareto(const Globals& g, const ParetoArgs& a) {
    const auto points = load_points(a.sweep);
    const auto frontier = pareto_frontier(points);
    std::vector<BudgetSelection> selections;
    std::vector<std::string> infeasible;
    std::string text;
    for (const auto& b : collect_budgets(a.budgets)) {
        BudgetSelection s{b, std::nullopt, std::nullopt};
        try {
            s.choice = select_for_budget(points, b.bytes);
            text += b.label + "\t" + std::string(dtype_name(s.choice->dtype)) + "@" + fmt("%.2f", s.choice->ratio) +
                    "\tndcg@10 " + fmt("%.6f", s.choice->score) + "\t" + std::to_string(s.choice->storage_bytes) +
                    " bytes\n";
        } catch (const InfeasibleBudget& e) {
            s.smallest = frontier.front();
            infeasible.push_back("budget '" + b.label + "': " + e.what());
            text += b.label + "\tinfeasible\n";
        }
        selections.push_back(s);
    }
    for (const auto& p : frontier) {
        text += "frontier\t" + std::string(dtype_name(p.dtype)) + "@" + fmt("%.2f", p.ratio) + "\t" +
                std::to_string(p.storage_bytes) + " bytes\tndcg@10 " + fmt("%.6f", p.score) + "\n";
    }
    const fs::path dir(a.output_dir);
    fs::create_directories(dir);
    const json j = pareto_json(points, frontier, selections);
    write_text_file(dir / "pareto.json", dump(j));
    emit(g, j, text);
    for (const auto& msg : infeasible) std::cerr << "error: " << msg << "\n";
    return infeasible.empty() ? kOk : kInfeasible;
}

struct PlotArgs {
    std::string sweep, output_dir = ".", output, axis = "score", title;
    BudgetArgs budgets;
};

int run_plot(const Globals& g, const PlotArgs& a) {
    const auto points = load_points(a.sweep);
    const auto frontier = pareto_frontier(points);
    PlotOptions o;
    if (a.axis == "loss" || a.axis == "percent-loss") {
        o.axis = PlotAxis::percent_loss;
    } else if (a.axis != "score") {
        throw ValidationError("--axis must be 'score' or 'loss', got '" + a.axis + "'");
    }
    if (!a.title.empty()) o.title = a.title;
    fs::path out = a.output.empty() ? fs::path(a.output_dir) / "tradeoff.svg" : fs::path(a.output);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    const auto budgets = collect_budgets(a.budgets);
    emit_plot(points, frontier, budgets, out, o);
    const json j = {{"path", out.string()},
                    {"points", points.size()},
                    {"frontier", frontier.size()},
                    {"budgets", budgets.size()}};
    emit(g, j, "wrote " + out.string() + "\n");
    return kOk;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
    SyntheticSpec spec;
    std::string output_dir = ".";
};

int run_synth(const Globals& g, const SynthArgs& a) {
    const SyntheticCorpus c = make_synthetic_corpus(a.spec);
    const fs::path dir(a.output_dir);
    fs::create_directories(dir);
    write_matrix(c.dataset.docs, dir / "docs.evec");
    write_matrix(c.dataset.queries, dir / "queries.evec");
    write_matrix(c.calibration, dir / "calibration.evec");
    std::string qrels = "query-id\tcorpus-id\tscore\n";
    for (const auto& [q, rel] : c.dataset.qrels)
        for (const auto& [d, grade] : rel) qrels += q + "\t" + d + "\t" + std::to_string(grade) + "\n";
    write_text_file(dir / "qrels.tsv", qrels);
    const json manifest = {{"name", a.spec.name},
                           {"docs", "docs.evec"},
                           {"queries", "queries.evec"},
                           {"qrels", "qrels.tsv"},
                           {"token_count", c.dataset.token_count}};
    write_text_file(dir / "manifest.json", dump(manifest));
    const json j = {{"docs", c.dataset.docs.rows()},
                    {"queries", c.dataset.queries.rows()},
                    {"calibration", c.calibration.rows()},
                    {"dims", c.dataset.docs.dims},
                    {"manifest", (dir / "manifest.json").string()}};
    emit(g, j, "wrote synthetic corpus to " + dir.string() + "\n");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Embedding compression toolkit: quantize, reduce, retrieve, evaluate and sweep."};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "JSON config file; command-line flags take precedence");
    app.config_formatter(std::make_shared<cli::JsonConfig>(&app));

    Globals g;
    app.add_flag("--json", g.json, "Print machine-readable JSON to stdout");
    app.add_option("--threads", g.threads, "Worker threads (default: EMBCOMP_THREADS or all cores)")
        ->envname("EMBCOMP_THREADS")
        ->check(CLI::NonNegativeNumber);

    InfoArgs info;
    auto* info_cmd = app.add_subcommand("info", "Describe an EVEC matrix or EVRM model file");
    info_cmd->add_option("path", info.path, "File to inspect")->required();

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Convert JSON-lines embeddings to an f32 EVEC file");
    ingest_cmd->add_option("--input", ingest.input, "JSON-lines file")->required();
    ingest_cmd->add_option("--output", ingest.output, "EVEC output")->required();
    ingest_cmd->add_option("--id-field", ingest.id_field, "Id key")->capture_default_str();
    ingest_cmd->add_option("--vector-field", ingest.vector_field, "Vector key")->capture_default_str();

    QuantizeArgs quant;
    auto* quant_cmd = app.add_subcommand("quantize", "Convert an f32 EVEC file to another dtype");
    quant_cmd->add_option("--input", quant.input, "f32 EVEC input")->required();
    quant_cmd->add_option("--output", quant.output, "EVEC output")->required();
    quant_cmd->add_option("--dtype", quant.dtype, "f32, f16, bf16, f8e4m3, f8e5m2, f4e2m1, int8, binary")->required();
    quant_cmd->add_option("--calibration", quant.calibration, "f32 EVEC reference for int8 ranges");

    auto* reduce_cmd = app.add_subcommand("reduce", "Fit or apply a dimensionality reducer");
    reduce_cmd->require_subcommand(1);
    ReduceFitArgs fit;
    auto* fit_cmd = reduce_cmd->add_subcommand("fit", "Fit a reducer and write an EVRM model");
    fit_cmd->add_option("--input", fit.input, "f32 EVEC training matrix")->required();
    fit_cmd->add_option("--output", fit.output, "EVRM model output")->required();
    fit_cmd->add_option("--method", fit.reducer.method, "pca, kpca-cosine, kpca-poly, kpca-rbf, random-projection")
        ->capture_default_str();
    fit_cmd->add_option("--ratio", fit.ratio, "Fraction of dimensions kept")->capture_default_str();
    fit_cmd->add_option("--k", fit.k, "Output dimensions (overrides --ratio)");
    add_reducer_flags(fit_cmd, fit.reducer);
    ReduceApplyArgs apply;
    auto* apply_cmd = reduce_cmd->add_subcommand("apply", "Project a matrix with a fitted model");
    apply_cmd->add_option("--model", apply.model, "EVRM model")->required();
    apply_cmd->add_option("--input", apply.input, "f32 EVEC input")->required();
    apply_cmd->add_option("--output", apply.output, "f32 EVEC output")->required();

    SearchArgs srch;
    auto* search_cmd = app.add_subcommand("search", "Exhaustive top-k retrieval");
    search_cmd->add_option("--docs", srch.docs, "Document EVEC (any dtype)")->required();
    search_cmd->add_option("--queries", srch.queries, "Query EVEC (document dtype or f32)")->required();
    search_cmd->add_option("--k", srch.k, "Results per query")->capture_default_str();
    search_cmd->add_option("--oversample", srch.oversample, "Binary re-scoring oversampling factor");
    search_cmd->add_option("--originals", srch.originals, "f32 documents for binary re-scoring");
    search_cmd->add_option("--output", srch.output, "Write results as TSV (query, doc, rank, score)");

    EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "nDCG@10 of one compression configuration");
    add_pipeline_flags(eval_cmd, eval.pipeline);
    eval_cmd->add_option("--dtype", eval.dtype, "Storage dtype")->capture_default_str();
    eval_cmd->add_option("--ratio", eval.ratio, "Fraction of dimensions kept")->capture_default_str();
    eval_cmd->add_option("--csv", eval.csv, "Write per-dataset CSV");
    eval_cmd->add_option("--output", eval.output, "Write the JSON report");
    eval_cmd->add_flag("--per-query", eval.per_query, "Include per-query scores in JSON");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a dtype x ratio grid; writes sweep.csv and sweep.json");
    add_pipeline_flags(sweep_cmd, sweep.pipeline);
    sweep_cmd->add_option("--dtypes", sweep.dtypes, "Dtypes to sweep (default: all)")->delimiter(',');
    sweep_cmd->add_option("--ratios", sweep.ratios, "Ratios to sweep (default: 1,0.9,0.75,0.5,0.25)")->delimiter(',');
    sweep_cmd->add_option("--output-dir", sweep.output_dir, "Output directory")->capture_default_str();
    sweep_cmd->add_option("--storage-rows", sweep.storage_rows, "Row count for storage sizes (default: total docs)");

    ParetoArgs pareto;
    auto* pareto_cmd = app.add_subcommand("pareto", "Pareto frontier and budget selection; writes pareto.json");
    pareto_cmd->add_option("--sweep", pareto.sweep, "sweep.json or a JSON array of points")->required();
    pareto_cmd->add_option("--output-dir", pareto.output_dir, "Output directory")->capture_default_str();
    add_budget_flags(pareto_cmd, pareto.budgets);

    PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "Storage vs. score scatter plot; writes tradeoff.svg");
    plot_cmd->add_option("--sweep", plot.sweep, "sweep.json or a JSON array of points")->required();
    plot_cmd->add_option("--output-dir", plot.output_dir, "Output directory")->capture_default_str();
    plot_cmd->add_option("--output", plot.output, "SVG path (overrides --output-dir)");
    plot_cmd->add_option("--axis", plot.axis, "score or loss (percent below the f32 full-size point)")
        ->capture_default_str();
    plot_cmd->add_option("--title", plot.title, "Plot title");
    add_budget_flags(plot_cmd, plot.budgets);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic retrieval corpus");
    synth_cmd->add_option("--output-dir", synth.output_dir, "Output directory")->capture_default_str();
    synth_cmd->add_option("--docs", synth.spec.docs, "Documents")->capture_default_str();
    synth_cmd->add_option("--queries", synth.spec.queries, "Queries")->capture_default_str();
    synth_cmd->add_option("--calibration-rows", synth.spec.calibration, "Calibration rows")->capture_default_str();
    synth_cmd->add_option("--dims", synth.spec.dims, "Dimensions")->capture_default_str();
    synth_cmd->add_option("--decay", synth.spec.spectrum_decay, "Spectrum decay exponent")->capture_default_str();
    synth_cmd->add_option("--noise", synth.spec.noise, "Query noise scale")->capture_default_str();
    synth_cmd->add_option("--seed", synth.spec.seed, "Seed")->capture_default_str();
    synth_cmd->add_option("--name", synth.spec.name, "Dataset name")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        set_threads(g.threads);
        if (info_cmd->parsed()) return run_info(g, info);
        if (ingest_cmd->parsed()) return run_ingest(g, ingest);
        if (quant_cmd->parsed()) return run_quantize(g, quant);
        if (fit_cmd->parsed()) return run_reduce_fit(g, fit);
        if (apply_cmd->parsed()) return run_reduce_apply(g, apply);
        if (search_cmd->parsed()) return run_search(g, srch);
        if (eval_cmd->parsed()) return run_evaluate(g, eval);
        if (sweep_cmd->parsed()) return run_sweep_cmd(g, sweep);
        if (pareto_cmd->parsed()) return run_pareto(g, pareto);
        if (plot_cmd->parsed()) return run_plot(g, plot);
        if (synth_cmd->parsed()) return run_synth(g, synth);
    } catch (const InfeasibleBudget& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInfeasible;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kInvalid;
}
