#include "regressgan/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "regressgan/csv.hpp"
#include "regressgan/errors.hpp"
#include "regressgan/gp.hpp"

namespace regressgan {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kKnownDatasets = {"normal",  "heteroscedastic", "classification",
                                                 "tweedie", "car_insurance",   "health_insurance"};
const std::vector<std::string> kKnownModels = {"regressgan", "fnn_mse", "gp"};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
    out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
    return out;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (...) {
        throw ParseError("config: key '" + key + "': cannot parse '" + v + "' as integer");
    }
}

double parse_num(const std::string& key, const std::string& v) {
    try {
        return std::stod(v);
    } catch (...) {
        throw ParseError("config: key '" + key + "': cannot parse '" + v + "' as number");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_text(ss.str(), path);
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config: " + origin + ":" + std::to_string(lineno) +
                             ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "datasets") cfg.datasets = split_list(value);
        else if (key == "models") cfg.models = split_list(value);
        else if (key == "n_seeds") cfg.n_seeds = parse_size(key, value);
        else if (key == "seed") cfg.seed = parse_size(key, value);
        else if (key == "n_samples") cfg.n_samples = parse_size(key, value);
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "car_insurance_path") cfg.car_insurance_path = value;
        else if (key == "health_insurance_path") cfg.health_insurance_path = value;
        else if (key == "gp_subsample_cap") cfg.gp_subsample_cap = parse_size(key, value);
        else if (key == "k_samples") cfg.k_samples = parse_size(key, value);
        else if (key == "jobs") cfg.jobs = parse_size(key, value);
        else if (key == "gan.batch_size") cfg.gan.batch_size = parse_size(key, value);
        else if (key == "gan.learning_rate") cfg.gan.learning_rate = parse_num(key, value);
        else if (key == "gan.beta1") cfg.gan.beta1 = parse_num(key, value);
        else if (key == "gan.beta2") cfg.gan.beta2 = parse_num(key, value);
        else if (key == "gan.d_steps_per_g_step") cfg.gan.d_steps_per_g_step = parse_size(key, value);
        else if (key == "gan.max_steps") cfg.gan.max_steps = static_cast<long>(parse_size(key, value));
        else if (key == "gan.eval_every") cfg.gan.eval_every = static_cast<long>(parse_size(key, value));
        else if (key == "gan.patience") cfg.gan.patience = parse_size(key, value);
        else if (key == "gan.generator_loss") {
            if (value == "minimax") cfg.gan.generator_loss = GeneratorLossKind::minimax;
            else if (value == "non_saturating") cfg.gan.generator_loss = GeneratorLossKind::non_saturating;
            else throw ParseError("config: gan.generator_loss must be minimax or non_saturating");
        }
        else if (key == "gan.k_samples_eval") cfg.gan.k_samples_eval = parse_size(key, value);
        else if (key == "gan.k_samples_val") cfg.gan.k_samples_val = parse_size(key, value);
        else if (key == "gan.val_eval_rows") cfg.gan.val_eval_rows = parse_size(key, value);
        else if (key == "gan.noise_dim") cfg.gan.noise_dim = parse_size(key, value);
        else if (key == "gan.hidden") {
            cfg.gan.hidden.clear();
            for (const auto& h : split_list(value)) cfg.gan.hidden.push_back(parse_size(key, h));
        }
        else {
            throw ParseError("config: " + origin + ":" + std::to_string(lineno) +
                             ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (datasets.empty()) throw DomainError("config: at least one dataset required");
    if (models.empty()) throw DomainError("config: at least one model required");
    if (n_seeds < 1) throw DomainError("config: n_seeds >= 1 required");
    if (n_samples < 10) throw DomainError("config: n_samples too small to split");
    for (const auto& d : datasets) {
        if (std::find(kKnownDatasets.begin(), kKnownDatasets.end(), d) == kKnownDatasets.end()) {
            throw DomainError("config: unknown dataset '" + d + "'");
        }
    }
    for (const auto& m : models) {
        if (std::find(kKnownModels.begin(), kKnownModels.end(), m) == kKnownModels.end()) {
            throw DomainError("config: unknown model '" + m + "'");
        }
    }
    gan.validate();
}

std::string ExperimentConfig::config_hash() const {
    std::string dump;
    for (const auto& d : datasets) dump += d + ",";
    dump += ";";
    for (const auto& m : models) dump += m + ",";
    dump += ";n_seeds=" + std::to_string(n_seeds);
    dump += ";seed=" + std::to_string(seed);
    dump += ";n_samples=" + std::to_string(n_samples);
    dump += ";gp_cap=" + std::to_string(gp_subsample_cap);
    dump += ";k_samples=" + std::to_string(k_samples);
    dump += ";gan=" + gan.config_hash();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(stable_mix(0xcbf29ce484222325ull, dump)));
    return buf;
}

// ---------------------------------------------------------------------------
// Table
// ---------------------------------------------------------------------------

ResultsTable emit_results_table(const std::vector<CellOutcome>& outcomes,
                                const std::vector<std::string>& dataset_order,
                                const std::vector<std::string>& model_order) {
    if (outcomes.empty()) throw ContractError("emit_results_table: no outcomes");
    ResultsTable table;
    table.datasets = dataset_order;
    table.models = model_order;
    table.cells.assign(dataset_order.size(),
                       std::vector<ResultsTable::Cell>(model_order.size()));

    for (std::size_t di = 0; di < dataset_order.size(); ++di) {
        for (std::size_t mi = 0; mi < model_order.size(); ++mi) {
            std::vector<double> maes;
            std::string first_error;
            for (const auto& o : outcomes) {
                if (o.dataset != dataset_order[di] || o.model != model_order[mi]) continue;
                if (o.ok) maes.push_back(o.report.mae);
                else if (first_error.empty()) first_error = o.error;
            }
            auto& cell = table.cells[di][mi];
            cell.n_seeds = maes.size();
            if (maes.empty()) {
                cell.failed = true;
                cell.note = first_error.empty() ? "no runs" : first_error;
                continue;
            }
            double s = 0.0;
            for (double v : maes) s += v;
            cell.mean_mae = s / static_cast<double>(maes.size());
            if (maes.size() > 1) {
                double ss = 0.0;
                for (double v : maes) ss += (v - cell.mean_mae) * (v - cell.mean_mae);
                cell.std_mae = std::sqrt(ss / static_cast<double>(maes.size() - 1));
            }
            if (!first_error.empty()) cell.note = "partial: " + first_error;
        }
        // best = argmin of mean MAE; ties mark all minima
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : table.cells[di]) {
            if (!c.failed) best = std::min(best, c.mean_mae);
        }
        for (auto& c : table.cells[di]) {
            if (!c.failed && c.mean_mae == best) c.best = true;
        }
    }
    return table;
}

std::string ResultsTable::to_text() const {
    std::vector<std::string> header = {"dataset"};
    header.insert(header.end(), models.begin(), models.end());

    std::vector<std::vector<std::string>> rows;
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        std::vector<std::string> row = {datasets[di]};
        for (const auto& c : cells[di]) {
            if (c.failed) {
                row.push_back("FAILED");
                continue;
            }
            std::string s = c.best ? "*" : " ";
            s += format_double(c.mean_mae);
            if (c.n_seeds > 1) s += " +- " + format_double(c.std_mae);
            row.push_back(s);
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) {
        widths[j] = header[j].size();
        for (const auto& r : rows) widths[j] = std::max(widths[j], r[j].size());
    }
    std::string out;
    auto emit_row = [&](const std::vector<std::string>& r) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            out += r[j];
            if (j + 1 < r.size()) out += std::string(widths[j] - r[j].size() + 3, ' ');
        }
        out += "\n";
    };
    emit_row(header);
    for (const auto& r : rows) emit_row(r);
    out += "(* = best mean test MAE per row; mean +- sample std over seeds)\n";
    return out;
}

std::string ResultsTable::to_csv() const {
    std::string out = "dataset,model,mean_mae,std_mae,n_seeds,best,note\n";
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        for (std::size_t mi = 0; mi < models.size(); ++mi) {
            const auto& c = cells[di][mi];
            out += datasets[di] + "," + models[mi] + ",";
            if (!c.failed) out += format_double(c.mean_mae);
            out += ",";
            if (!c.failed) out += format_double(c.std_mae);
            out += "," + std::to_string(c.n_seeds) + "," + (c.best ? "1" : "0") + "," + c.note +
                   "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cell execution
// ---------------------------------------------------------------------------

namespace {

struct CellJob {
    std::string dataset;
    std::string model;          // regressgan|fnn_mse|gp
    std::string model_label;    // table column label (variant-qualified in ablation)
    std::size_t seed_index = 0;
    std::optional<GeneratorLossKind> loss_override;
};

TabularDataset build_dataset(const ExperimentConfig& cfg, const std::string& name,
                             std::size_t seed_index) {
    const std::uint64_t data_seed = derive_seed(cfg.seed, {"data", name}, seed_index);
    if (name == "normal") return gen_normal(cfg.n_samples, data_seed);
    if (name == "heteroscedastic") return gen_heteroscedastic(cfg.n_samples, data_seed);
    if (name == "classification") return gen_classification(cfg.n_samples, data_seed);
    if (name == "tweedie") return gen_tweedie(cfg.n_samples, data_seed);
    if (name == "car_insurance") {
        if (cfg.car_insurance_path.empty()) {
            throw ParseError("car_insurance selected but car_insurance_path is not set");
        }
        return load_csv_dataset(cfg.car_insurance_path, CsvSchema::car_insurance);
    }
    if (name == "health_insurance") {
        if (cfg.health_insurance_path.empty()) {
            throw ParseError("health_insurance selected but health_insurance_path is not set");
        }
        return load_csv_dataset(cfg.health_insurance_path, CsvSchema::health_insurance);
    }
    throw DomainError("unknown dataset '" + name + "'");
}

Matrix apply_feature_transform(const StandardizeRecord& rec, const Matrix& x) {
    Matrix out = x;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        for (std::size_t j = 0; j < out.cols(); ++j) {
            row[j] = (row[j] - rec.feature_mean[j]) / rec.feature_scale[j];
        }
    }
    return out;
}

std::string cell_tag(const CellJob& job) {
    std::string label = job.model_label;
    for (auto& c : label) {
        if (c == '[' || c == ']') c = '_';
    }
    return job.dataset + "_" + label + "_s" + std::to_string(job.seed_index);
}

CellOutcome run_cell(const ExperimentConfig& cfg, const CellJob& job) {
    CellOutcome out;
    out.dataset = job.dataset;
    out.model = job.model_label;
    out.seed_index = job.seed_index;
    try {
        const TabularDataset raw = build_dataset(cfg, job.dataset, job.seed_index);
        const std::uint64_t model_seed =
            derive_seed(cfg.seed, {"model", job.dataset, job.model_label}, job.seed_index);
        RngStream eval_rng(derive_seed(cfg.seed, {"eval", job.dataset, job.model_label},
                                       job.seed_index));
        const std::string tag = cell_tag(job);
        const fs::path dir(cfg.out_dir);

        ReportMeta meta;
        meta.dataset = job.dataset;
        meta.model = job.model_label;
        meta.seed = job.seed_index;
        meta.config_hash = cfg.config_hash();

        if (job.model == "gp") {
            auto [std_ds, rec] = standardize(raw, StandardizeMode::features_only);
            const TabularDataset sub = subsample_for_gp(std_ds, cfg.gp_subsample_cap, model_seed);
            const Matrix x_train = sub.split_features(SplitName::train);
            const std::vector<double> y_train = sub.split_targets(SplitName::train);
            const GpGrid grid = GpGrid::defaults(sub.n_features(), variance(y_train));
            const RbfKernelParams params = hyperparam_search(x_train, y_train, grid);
            const GpModel model = gp_fit(x_train, y_train, params);
            out.report = evaluate_predictor(
                [&](const Matrix& x) {
                    return gp_predict_mean(model, apply_feature_transform(rec, x));
                },
                raw, SplitName::test, meta);
            out.ok = true;
            return out;
        }

        GanTrainConfig gcfg = cfg.gan;
        gcfg.seed = model_seed;
        if (job.loss_override) gcfg.generator_loss = *job.loss_override;
        auto [std_ds, rec] = standardize(raw, StandardizeMode::features_and_target);

        if (job.model == "regressgan") {
            GanTrainResult res = train_gan(std_ds, gcfg);
            res.log.write_csv((dir / ("trainlog_" + tag + ".csv")).string());
            save_checkpoint((dir / ("checkpoint_" + tag)).string(), job.model_label,
                            gcfg.config_hash(), res.generator.net.named_parameters("generator."));
            out.report = evaluate_predictor(
                [&](const Matrix& x) {
                    std::vector<double> p = predict_point(res.generator,
                                                          apply_feature_transform(rec, x),
                                                          cfg.k_samples, eval_rng);
                    for (auto& v : p) v = rec.inverse_target(v);
                    return p;
                },
                raw, SplitName::test, meta);
        } else if (job.model == "fnn_mse") {
            FnnTrainResult res = train_fnn_mse(std_ds, gcfg);
            res.log.write_csv((dir / ("trainlog_" + tag + ".csv")).string());
            save_checkpoint((dir / ("checkpoint_" + tag)).string(), job.model_label,
                            gcfg.config_hash(), res.model.net.named_parameters("fnn."));
            out.report = evaluate_predictor(
                [&](const Matrix& x) {
                    std::vector<double> p = res.model.predict_values(apply_feature_transform(rec, x));
                    for (auto& v : p) v = rec.inverse_target(v);
                    return p;
                },
                raw, SplitName::test, meta);
        } else {
            throw DomainError("unknown model '" + job.model + "'");
        }
        out.ok = true;
    } catch (const TrainAbortError& e) {
        out.error = std::string("abort@") + std::to_string(e.step()) + ": " + e.what();
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::vector<CellOutcome> run_jobs(const ExperimentConfig& cfg, const std::vector<CellJob>& jobs) {
    std::vector<CellOutcome> outcomes(jobs.size());
    std::atomic<std::size_t> next{0};
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(jobs.size(), cfg.jobs ? cfg.jobs : hw);
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            outcomes[i] = run_cell(cfg, jobs[i]);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return outcomes;
}

void write_artifacts(const ExperimentConfig& cfg, const std::vector<CellOutcome>& outcomes,
                     const ResultsTable& table) {
    const fs::path dir(cfg.out_dir);
    std::ofstream metrics(dir / "metrics.csv");
    if (!metrics) throw ParseError("run_experiment: cannot write metrics.csv under " + cfg.out_dir);
    metrics << MetricsReport::csv_header() << "\n";
    for (const auto& o : outcomes) {
        if (o.ok) metrics << o.report.csv_row() << "\n";
    }
    std::ofstream t_txt(dir / "table.txt");
    t_txt << table.to_text();
    std::ofstream t_csv(dir / "table.csv");
    t_csv << table.to_csv();
}

}  // namespace

ResultsTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);

    std::vector<CellJob> jobs;
    for (const auto& d : cfg.datasets) {
        for (const auto& m : cfg.models) {
            for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
                jobs.push_back({d, m, m, s, std::nullopt});
            }
        }
    }
    const std::vector<CellOutcome> outcomes = run_jobs(cfg, jobs);
    ResultsTable table = emit_results_table(outcomes, cfg.datasets, cfg.models);
    write_artifacts(cfg, outcomes, table);
    return table;
}

ResultsTable run_ablation(const ExperimentConfig& cfg) {
    cfg.validate();
    if (std::find(cfg.models.begin(), cfg.models.end(), std::string("regressgan")) ==
        cfg.models.end()) {
        throw DomainError("run_ablation: regressgan must be among the selected models");
    }
    fs::create_directories(cfg.out_dir);

    const std::string label_mm = "regressgan[minimax]";
    const std::string label_ns = "regressgan[non_saturating]";
    std::vector<CellJob> jobs;
    for (const auto& d : cfg.datasets) {
        for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
            jobs.push_back({d, "regressgan", label_mm, s, GeneratorLossKind::minimax});
            jobs.push_back({d, "regressgan", label_ns, s, GeneratorLossKind::non_saturating});
        }
    }
    const std::vector<CellOutcome> outcomes = run_jobs(cfg, jobs);
    ResultsTable table = emit_results_table(outcomes, cfg.datasets, {label_mm, label_ns});
    write_artifacts(cfg, outcomes, table);
    return table;
}

ResultsTable report_from_metrics(const std::string& metrics_csv_path) {
    const CsvTable t = read_csv(metrics_csv_path);
    const std::size_t c_dataset = t.column("dataset");
    const std::size_t c_model = t.column("model");
    const std::size_t c_mae = t.column("mae");
    const std::size_t c_seed = t.column("seed");

    std::vector<CellOutcome> outcomes;
    std::vector<std::string> dataset_order;
    std::vector<std::string> model_order;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        CellOutcome o;
        o.dataset = t.cell(r, c_dataset);
        o.model = t.cell(r, c_model);
        o.seed_index = static_cast<std::size_t>(t.number_at(r, c_seed));
        o.ok = true;
        o.report.mae = t.number_at(r, c_mae);
        outcomes.push_back(std::move(o));
        if (std::find(dataset_order.begin(), dataset_order.end(), t.cell(r, c_dataset)) ==
            dataset_order.end()) {
            dataset_order.push_back(t.cell(r, c_dataset));
        }
        if (std::find(model_order.begin(), model_order.end(), t.cell(r, c_model)) ==
            model_order.end()) {
            model_order.push_back(t.cell(r, c_model));
        }
    }
    return emit_results_table(outcomes, dataset_order, model_order);
}

}  // namespace regressgan
