// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace fdms;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kOracleTol = 1e-8;
constexpr double kAlgebraTol = 1e-9;
constexpr double kSpectralTol = 1e-8;
constexpr double kEquivalenceTol = 1e-9;
constexpr double kTableSumTol = 0.05;
constexpr double kOracleBudgetSec = 5.0;
constexpr double kEvalBudgetSec = 60.0;

const fs::path kCli = FDMS_CLI_PATH;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

int run_cli(const std::string& args, const fs::path& log)
{
    const auto cmd = "\"" + kCli.string() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    return std::system(cmd.c_str());
}

/// Every fitted model the suite touches, for the projection-algebra check.
std::vector<SynergyModel>& fitted_models()
{
    static std::vector<SynergyModel> models;
    return models;
}

std::vector<PostureSequence> seeded_datasets()
{
    std::vector<PostureSequence> out;
    for (std::uint64_t seed = 1; seed <= 25; ++seed)
        out.push_back(test::random_dataset(seed, 50, 10));
    return out;
}

Outcome pca_oracle()
{
    const auto t0 = Clock::now();
    double worst_val = 0.0, worst_vec = 0.0;
    for (const auto& seq : seeded_datasets()) {
        const auto model = fit_pca(seq);
        fitted_models().push_back(model);
        const auto ref = oracle::jacobi_eigen(oracle::sample_covariance(test::to_rows(seq.data)));
        for (Eigen::Index k = 0; k < model.eigenvalues.size(); ++k) {
            worst_val = std::max(worst_val, std::abs(model.eigenvalues(k) - ref.values[k]));
            const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(ref.vectors[k].data(), model.eigenvalues.size());
            worst_vec = std::max(worst_vec, test::sign_free_distance(model.eigenvectors.col(k), v));
        }
    }
    const double elapsed = seconds_since(t0);
    return {worst_val <= kOracleTol && worst_vec <= kOracleTol && elapsed < kOracleBudgetSec,
            "25 datasets n=50 d=10; max |dlambda|=" + fmt(worst_val) + " max |dv|=" + fmt(worst_vec) + " (tol " +
                fmt(kOracleTol) + "), " + fmt(elapsed) + " s (budget " + fmt(kOracleBudgetSec) + " s)"};
}

Outcome projection_algebra()
{
    auto models = fitted_models();
    const auto hand = test::default_hand();
    const auto db = test::bundled_database(hand);
    for (const auto& [name, entry] : db.entries())
        models.push_back(entry.record->model);
    const auto datasets = seeded_datasets();
    double worst_orth = 0.0, worst_proj = 0.0, worst_idem = 0.0, worst_full = 0.0;
    std::size_t checks = 0;
    for (const auto& model : models) {
        for (std::size_t ns = 1; ns <= model.dim(); ++ns) {
            const auto s = synergy_matrix(model, ns);
            const Eigen::MatrixXd sts = s.basis.transpose() * s.basis;
            worst_orth = std::max(worst_orth, (sts - Eigen::MatrixXd::Identity(ns, ns)).cwiseAbs().maxCoeff());
            const Eigen::MatrixXd p = s.basis * s.basis.transpose();
            worst_proj = std::max(worst_proj, (p * p - p).cwiseAbs().maxCoeff());
            Eigen::VectorXd probe = model.mean;
            for (Eigen::Index i = 0; i < probe.size(); ++i)
                probe(i) += 0.1 * static_cast<double>(i + 1);
            const auto once = project_posture(s, probe);
            worst_idem = std::max(worst_idem, (project_posture(s, once) - once).cwiseAbs().maxCoeff());
            ++checks;
        }
    }
    for (const auto& seq : datasets) {
        const auto s = synergy_matrix(fit_pca(seq), seq.cols());
        worst_full = std::max(worst_full, (approximate_sequence(s, seq).data - seq.data).cwiseAbs().maxCoeff());
    }
    const bool ok = std::max({worst_orth, worst_proj, worst_idem, worst_full}) <= kAlgebraTol;
    return {ok, std::to_string(models.size()) + " models, " + std::to_string(checks) + " (model, n_s) pairs; StS-I " +
                    fmt(worst_orth) + ", P^2-P " + fmt(worst_proj) + ", idempotence " + fmt(worst_idem) +
                    ", n_s=f residual " + fmt(worst_full) + " (tol " + fmt(kAlgebraTol) + ")"};
}

Outcome spectral_identity()
{
    double worst = 0.0;
    for (const auto& seq : seeded_datasets()) {
        const auto model = fit_pca(seq);
        for (std::size_t ns = 1; ns <= model.dim(); ++ns) {
            const double tail = model.eigenvalues.tail(model.eigenvalues.size() - static_cast<Eigen::Index>(ns)).sum();
            worst = std::max(worst, std::abs(reconstruction_mse(synergy_matrix(model, ns), seq) - tail));
        }
    }
    return {worst <= kSpectralTol, "max |mse - sum(discarded)| = " + fmt(worst) + " (tol " + fmt(kSpectralTol) + ")"};
}

Outcome pca_optimality()
{
    std::size_t violations = 0, comparisons = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto seq = test::random_dataset(seed, 50, 10);
        const auto model = fit_pca(seq);
        const Eigen::MatrixXd centered = seq.data.rowwise() - model.mean.transpose();
        SeededRng rng(seed, 0xB0B);
        for (std::size_t ns : {1u, 2u, 3u}) {
            const double pca = reconstruction_mse(synergy_matrix(model, ns), seq);
            for (int trial = 0; trial < 20; ++trial) {
                Eigen::MatrixXd g(10, ns);
                for (Eigen::Index i = 0; i < g.rows(); ++i)
                    for (Eigen::Index j = 0; j < g.cols(); ++j)
                        g(i, j) = rng.normal();
                const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
                                          Eigen::MatrixXd::Identity(10, static_cast<Eigen::Index>(ns));
                const Eigen::MatrixXd resid = centered - centered * q * q.transpose();
                const double random_mse = resid.squaredNorm() / static_cast<double>(seq.rows() - 1);
                ++comparisons;
                if (pca > random_mse)
                    ++violations;
            }
        }
    }
    return {violations == 0,
            std::to_string(violations) + " violations in " + std::to_string(comparisons) + " random-basis comparisons"};
}

Outcome definitional_equivalence()
{
    const auto hand = test::default_hand();
    const auto grasp = load_posture_csv(test::kDataDir / "db" / "grasp_data.csv");
    const auto g = build_grasp_synergy(grasp);
    const auto f = build_fdms(grasp, FunctionAssignment::resolve(FunctionUnit::parse("MMMMM"), hand));
    double dl = (f.base.eigenvalues - g.eigenvalues).cwiseAbs().maxCoeff(), dv = 0.0;
    for (Eigen::Index k = 0; k < g.eigenvectors.cols(); ++k)
        dv = std::max(dv, test::sign_free_distance(f.base.eigenvectors.col(k), g.eigenvectors.col(k)));
    return {dl <= kEquivalenceTol && dv <= kEquivalenceTol,
            "MMMMM vs grasp: max |dlambda|=" + fmt(dl) + " max |dv|=" + fmt(dv) + " (tol " + fmt(kEquivalenceTol) + ")"};
}

Outcome notation_suite()
{
    std::vector<std::string> parts;
    for (const auto& u : decompose_unit(parse_movement_unit("OXYOO")))
        parts.push_back(u.str());
    const bool example = parts == std::vector<std::string>{"OXOOO", "OOXOO"};

    double total = 0.0;
    bool canonical = movement_unit_catalog().size() == 16, partition = true;
    for (const auto& e : movement_unit_catalog()) {
        try {
            canonical = canonical && parse_movement_unit(e.unit.str()) == e.unit;
        }
        catch (const Error&) {
            canonical = false;
        }
        total += e.frequency_percent;
        std::vector<int> cover(kUnitLength, 0);
        for (const auto& part : decompose_unit(e.unit)) {
            partition = partition && part.groups().size() <= 1;
            for (std::size_t i = 0; i < kUnitLength; ++i)
                cover[i] += part[i] != Motion::O;
        }
        for (std::size_t i = 0; i < kUnitLength; ++i)
            partition = partition && cover[i] == (e.unit[i] != Motion::O ? 1 : 0);
    }
    const std::vector<std::string> expected = {"MMMMM", "MFFFF", "FMMMM", "MMFFF", "FFMMM", "FFFMM",
                                               "FMFFF", "MMMFF", "FFMFF", "FFMMF", "MMMMF", "FMMMF"};
    std::vector<std::string> got;
    for (const auto& u : fdms_unit_catalog())
        got.push_back(u.str());
    const bool verbatim = got == expected;
    const bool sum_ok = std::abs(total - 68.4) <= kTableSumTol;
    return {example && canonical && sum_ok && verbatim && partition,
            std::string("decompose(OXYOO)=") + (parts.size() == 2 ? parts[0] + "," + parts[1] : "?") +
                "; 16 units canonical=" + (canonical ? "yes" : "no") + ", sum=" + fmt(total) +
                "; 12-unit catalog verbatim=" + (verbatim ? "yes" : "no") + "; partition=" + (partition ? "yes" : "no")};
}

Outcome freeze_semantics()
{
    const auto hand = test::default_hand();
    const auto db = test::bundled_database(hand);
    const auto script = script_from_json(read_json_file(test::kDataDir / "scripts" / "switch.json"), hand);
    std::size_t steps = 0, mismatches = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SeededRng rng(seed, 77);
        std::vector<PostureSequence> inputs;
        for (std::size_t k = 0; k < script.phases.size(); ++k) {
            Eigen::MatrixXd m(40, hand.dof());
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                for (Eigen::Index c = 0; c < m.cols(); ++c)
                    m(r, c) = rng.uniform(-3.0, 3.0);
            inputs.emplace_back(m, hand.joint_names());
        }
        const auto run = run_script(script, db, hand, inputs);
        const auto start = run.phase_starts.at(1);
        const Posture entry = run.trajectory.row(start - 1);
        for (std::size_t t = start; t < run.trajectory.rows(); ++t, ++steps)
            for (std::size_t j = 0; j < hand.dof(); ++j)
                if (hand.joint(j).finger != Finger::Thumb &&
                    run.trajectory.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) != entry(j))
                    ++mismatches;
    }
    return {mismatches == 0 && steps > 0,
            std::to_string(steps) + " phase-2 steps, " + std::to_string(mismatches) + " non-thumb joint changes"};
}

Outcome golden_eval()
{
    const auto out = fs::temp_directory_path() / "fdms_acceptance_eval";
    fs::remove_all(out);
    const auto t0 = Clock::now();
    for (const char* task : {"scissors", "switch"}) {
        const auto args = std::string("eval --task ") + task + " --db \"" + (test::kDataDir / "db").string() +
                          "\" --seed 7 --out \"" + out.string() + "\"";
        if (run_cli(args, out.parent_path() / "fdms_acceptance_eval.log") != 0)
            return {false, std::string("fdms eval failed for ") + task};
    }
    const double elapsed = seconds_since(t0);

    std::string detail;
    bool identical = true, a = true, b = true, c = true;
    for (const char* task : {"scissors", "switch"}) {
        for (const char* ext : {".csv", ".svg", ".json"}) {
            const auto name = std::string(task) + "_report" + ext;
            identical = identical && read_text_file(out / name) ==
                                         read_text_file(test::kDataDir / "golden" / "seed7" / name);
        }
        std::istringstream in(read_text_file(test::kDataDir / "golden" / "seed7" / (std::string(task) + "_report.csv")));
        std::string line;
        std::getline(in, line);
        std::size_t f = 0;
        bool reached = false, full = false, one_zero = true;
        std::vector<std::pair<std::size_t, double>> fdms_rows;
        while (std::getline(in, line)) {
            const auto cells = csv::split_row(line);
            if (cells[1] != "fdms")
                continue;
            const auto ns = std::stoul(std::string(cells[3]));
            const double rate = std::stod(std::string(cells[6]));
            fdms_rows.emplace_back(ns, rate);
            f = std::max<std::size_t>(f, ns);
        }
        for (const auto& [ns, rate] : fdms_rows) {
            reached = reached || rate == 1.0;
            if (ns == f)
                full = rate == 1.0;
            if (ns == 1)
                one_zero = rate == 0.0;
        }
        a = a && reached;
        b = b && full;
        if (std::string(task) == "switch")
            c = one_zero;
        detail += std::string(task) + ": f=" + std::to_string(f) + " reached1=" + (reached ? "yes" : "no") +
                  " rate(f)=" + (full ? "1" : "<1") + "; ";
    }
    const bool fast = elapsed < kEvalBudgetSec;
    return {identical && a && b && c && fast,
            std::string("byte-identical=") + (identical ? "yes" : "no") + "; " + detail +
                "switch fdms n_s=1 rate 0: " + (c ? "yes" : "no") + "; " + fmt(elapsed) + " s (budget " +
                fmt(kEvalBudgetSec) + " s)"};
}

Outcome threshold_counts()
{
    const auto hand = test::default_hand();
    const auto db = test::bundled_database(hand);
    bool ok = true;
    std::string detail;
    std::size_t units = 0;
    for (const auto& unit : fdms_unit_catalog()) {
        const auto& m = db.lookup(unit.str()).record->model;
        const auto c8 = min_components_for_ratio(m, 0.8), c9 = min_components_for_ratio(m, 0.9);
        const auto f = 2 * unit.manipulation_count();
        ok = ok && m.dim() == f && c8 <= f && c9 <= f && c9 >= c8;
        detail += unit.str() + "=" + std::to_string(c8) + "/" + std::to_string(c9) + " ";
        ++units;
    }
    return {ok && units == 12, "counts at 0.8/0.9: " + detail};
}

std::string tree_digest(const fs::path& root)
{
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().extension() != ".log")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& p : files)
        all += fs::relative(p, root).string() + ":" + content_hash(read_text_file(p)) + "\n";
    return content_hash(all);
}

Outcome round_trips()
{
    const auto hand = test::default_hand();
    const auto dir = test::scratch_dir("acceptance_rt");

    const auto seq = load_posture_csv(test::kDataDir / "db" / "grasp_data.csv");
    save_posture_csv(seq, dir / "p.csv");
    const bool csv_ok = load_posture_csv(dir / "p.csv").data == seq.data;

    const auto db = test::bundled_database(hand);
    bool json_ok = true;
    for (const auto& [name, entry] : db.entries()) {
        save_synergy(*entry.record, dir / (name + ".json"));
        const auto back = load_synergy(dir / (name + ".json"), hand);
        json_ok = json_ok && back.model.eigenvectors == entry.record->model.eigenvectors &&
                  back.model.eigenvalues == entry.record->model.eigenvalues &&
                  back.model.mean == entry.record->model.mean && to_json(back) == to_json(*entry.record);
    }
    db.save(dir / "db");
    const auto reloaded = SynergyDatabase::load(dir / "db", hand);
    bool db_ok = reloaded.names() == db.names();
    for (const auto& name : db.names())
        db_ok = db_ok && to_json(*reloaded.lookup(name).record) == to_json(*db.lookup(name).record);

    std::vector<std::string> digests;
    for (const char* run : {"a", "b"}) {
        const auto root = dir / run;
        fs::create_directories(root);
        const auto q = [&](const fs::path& p) { return "\"" + p.string() + "\""; };
        const auto log = root / "cli.log";
        const std::vector<std::string> steps = {
            "gen --kind grasp --seed 11 --out " + q(root / "grasp.csv"),
            "gen --kind switch --seed 11 --count 4 --out " + q(root / "switch"),
            "fit --data " + q(root / "grasp.csv") + " --assignment MMFFF --out " + q(root / "mmfff.json"),
            "approx --synergy " + q(root / "mmfff.json") + " --ns 2 --data " + q(root / "grasp.csv") + " --out " +
                q(root / "approx.csv"),
            "db init --db " + q(root / "db") + " --seed 11",
            "db register --db " + q(root / "db") + " --name custom --kind fdms --synergy " + q(root / "mmfff.json"),
            "eval --task switch --db " + q(root / "db") + " --seed 11 --count 6 --out " + q(root / "report"),
        };
        for (const auto& s : steps)
            if (run_cli(s, log) != 0)
                return {false, "CLI step failed: " + s};
        digests.push_back(tree_digest(root));
    }
    const bool cli_ok = digests[0] == digests[1];
    return {csv_ok && json_ok && db_ok && cli_ok,
            std::string("csv=") + (csv_ok ? "lossless" : "LOSSY") + " synergy-json=" + (json_ok ? "lossless" : "LOSSY") +
                " database=" + (db_ok ? "lossless" : "LOSSY") + " cli-pipeline=" +
                (cli_ok ? "byte-reproducible" : "DIFFERS")};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"PCA oracle equivalence", pca_oracle},
        {"Projection algebra", projection_algebra},
        {"Spectral identity", spectral_identity},
        {"PCA optimality witness", pca_optimality},
        {"All-M FDMS equals grasp synergy", definitional_equivalence},
        {"Notation suite", notation_suite},
        {"Freeze semantics", freeze_semantics},
        {"Golden task evaluation", golden_eval},
        {"Contribution threshold counts", threshold_counts},
        {"Round-trips and reproducibility", round_trips},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        }
        catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failures == 0 ? 0 : 1;
}
