// Command-line front end: fitting, approximation, evaluation, database
// management, data generation and the steering server.

#include <sys/socket.h>

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fdms/fdms.hpp"
#include "fdms/server.hpp"

namespace fs = std::filesystem;
using namespace fdms;

namespace {

const fs::path kDataDir = FDMS_DATA_DIR;

HandModel hand_or_default(const std::string& path)
{
    return load_hand_model_file(path.empty() ? kDataDir / "hand_default.json" : fs::path(path));
}

/// Hand model stored with a database, falling back to the bundled default.
HandModel database_hand(const fs::path& db_dir)
{
    const auto stored = db_dir / "hand_model.json";
    return load_hand_model_file(fs::exists(stored) ? stored : kDataDir / "hand_default.json");
}

/// A unit string such as "MMMFF", or a JSON file holding an assignment.
FunctionAssignment assignment_arg(const std::string& arg, const HandModel& hand)
{
    if (fs::is_regular_file(arg))
        return assignment_from_json(read_json_file(arg), hand);
    return FunctionAssignment::resolve(FunctionUnit::parse(arg), hand);
}

TaskSpec task_spec_for(const std::string& task, const fs::path& db_dir, const std::string& spec_path)
{
    if (!spec_path.empty())
        return task_spec_from_json(read_json_file(spec_path));
    const auto in_db = db_dir / "tasks" / (task + ".json");
    return task_spec_from_json(read_json_file(fs::exists(in_db) ? in_db : kDataDir / "tasks" / (task + ".json")));
}

/// Output path for the k-th generated file. "{}" in the pattern is replaced
/// by the index; otherwise the pattern is a directory.
fs::path numbered_path(const std::string& pattern, const std::string& stem, std::size_t k)
{
    if (auto pos = pattern.find("{}"); pos != std::string::npos)
        return std::string(pattern).replace(pos, 2, std::to_string(k));
    return fs::path(pattern) / (stem + "_" + std::to_string(k) + ".csv");
}

std::string ns_list(const SynergyModel& m)
{
    std::string out;
    for (std::size_t j : m.subset.indices())
        out += (out.empty() ? "" : ",") + std::to_string(j);
    return out;
}

volatile std::sig_atomic_t g_listen_fd = -1;

// Only shutdown(2) here: it is async-signal-safe and makes accept() return.
void on_signal(int)
{
    if (g_listen_fd >= 0)
        ::shutdown(g_listen_fd, SHUT_RDWR);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Functionally divided manipulation synergies"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a synergy on a subset of joints of posture data");
    std::string fit_data, fit_assignment = "MMMMM", fit_centering = "centered", fit_out, fit_model, fit_label;
    fit->add_option("--data", fit_data, "Posture CSV")->required();
    fit->add_option("--assignment", fit_assignment, "Function unit (e.g. MMMFF) or assignment JSON file");
    fit->add_option("--centering", fit_centering, "centered | uncentered");
    fit->add_option("--out", fit_out, "Synergy JSON to write")->required();
    fit->add_option("--model", fit_model, "Hand model JSON");
    fit->add_option("--label", fit_label, "Label stored with the synergy");

    // approx
    auto* approx = app.add_subcommand("approx", "Project posture data onto the first n_s components");
    std::string ap_synergy, ap_data, ap_out, ap_model;
    std::size_t ap_ns = 1;
    approx->add_option("--synergy", ap_synergy, "Synergy JSON")->required();
    approx->add_option("--ns", ap_ns, "Number of components")->required();
    approx->add_option("--data", ap_data, "Posture CSV")->required();
    approx->add_option("--out", ap_out, "Approximated CSV to write")->required();
    approx->add_option("--model", ap_model, "Hand model JSON");

    // eval
    auto* eval = app.add_subcommand("eval", "Success rate versus component count for a simulated task");
    std::string ev_task, ev_db, ev_out, ev_spec;
    std::uint64_t ev_seed = 7;
    std::size_t ev_count = kDefaultTaskSequences;
    eval->add_option("--task", ev_task, "scissors | switch")->required();
    eval->add_option("--db", ev_db, "Synergy database directory")->required();
    eval->add_option("--seed", ev_seed, "Seed for the demonstration sequences");
    eval->add_option("--count", ev_count, "Number of demonstration sequences");
    eval->add_option("--out", ev_out, "Report directory")->required();
    eval->add_option("--spec", ev_spec, "Task spec JSON (default: <db>/tasks/<task>.json)");

    // units
    auto* units = app.add_subcommand("units", "Manipulation unit catalogs");
    auto* units_list = units->add_subcommand("list", "List catalog units");
    bool units_json = false, units_movement = false;
    units_list->add_flag("--json", units_json, "JSON output");
    units_list->add_flag("--movement", units_movement, "Movement units with observed frequencies");
    units->require_subcommand(1);

    // decompose
    auto* decompose = app.add_subcommand("decompose", "Split a movement unit into single-group units");
    std::string dec_unit;
    decompose->add_option("unit", dec_unit, "Movement unit, e.g. OXYOO")->required();

    // db
    auto* db = app.add_subcommand("db", "Synergy database");
    db->require_subcommand(1);
    auto* db_init = db->add_subcommand("init", "Build the standard database from a seeded grasp dataset");
    std::string dbi_dir, dbi_model, dbi_centering = "centered";
    std::uint64_t dbi_seed = 7;
    db_init->add_option("--db", dbi_dir, "Database directory")->required();
    db_init->add_option("--seed", dbi_seed, "Grasp dataset seed");
    db_init->add_option("--model", dbi_model, "Hand model JSON");
    db_init->add_option("--centering", dbi_centering, "centered | uncentered");
    auto* db_register = db->add_subcommand("register", "Add a synergy file to a database");
    std::string dbr_dir, dbr_name, dbr_kind = "fdms", dbr_synergy;
    db_register->add_option("--db", dbr_dir, "Database directory")->required();
    db_register->add_option("--name", dbr_name, "Entry name")->required();
    db_register->add_option("--kind", dbr_kind, "grasp | task-specific | fdms");
    db_register->add_option("--synergy", dbr_synergy, "Synergy JSON")->required();
    auto* db_list = db->add_subcommand("list", "List database entries");
    std::string dbl_dir;
    bool dbl_json = false;
    db_list->add_option("--db", dbl_dir, "Database directory")->required();
    db_list->add_flag("--json", dbl_json, "JSON output");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate seeded synthetic posture data");
    std::string gen_kind, gen_out, gen_model, gen_spec;
    std::uint64_t gen_seed = 7;
    std::size_t gen_count = kDefaultTaskSequences;
    gen->add_option("--kind", gen_kind, "grasp | scissors | switch")->required();
    gen->add_option("--seed", gen_seed, "Seed");
    gen->add_option("--count", gen_count, "Number of task sequences");
    gen->add_option("--out", gen_out, "CSV path (grasp), or directory / pattern with {} (tasks)")->required();
    gen->add_option("--model", gen_model, "Hand model JSON");
    gen->add_option("--spec", gen_spec, "Task spec JSON");

    // run
    auto* run = app.add_subcommand("run", "Replay posture inputs through a task script");
    std::string run_script_path, run_db, run_out;
    std::vector<std::string> run_inputs;
    run->add_option("--script", run_script_path, "Task script JSON")->required();
    run->add_option("--db", run_db, "Synergy database directory")->required();
    run->add_option("--inputs", run_inputs, "One posture CSV per phase")->required();
    run->add_option("--out", run_out, "Trajectory CSV to write")->required();

    // serve
    auto* serve = app.add_subcommand("serve", "Run the steering service");
    std::string sv_db, sv_host = "127.0.0.1", sv_static;
    unsigned short sv_port = 8080;
    serve->add_option("--db", sv_db, "Synergy database directory")->required();
    serve->add_option("--host", sv_host, "Bind address");
    serve->add_option("--port", sv_port, "Port (0 picks a free one)");
    serve->add_option("--static", sv_static, "Directory of static UI files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) {
            const auto hand = hand_or_default(fit_model);
            const auto data = select_columns(load_posture_csv(fit_data), hand.joint_names());
            const auto assignment = assignment_arg(fit_assignment, hand);
            auto m = build_fdms(data, assignment, parse_centering(fit_centering));
            if (!fit_label.empty())
                m.label = fit_label;
            save_synergy(SynergyRecord::from(m), fit_out);
            std::cout << "fit " << m.label << " on joints [" << ns_list(m.base) << "], "
                      << data.rows() << " samples -> " << fit_out << "\n";
        }
        else if (*approx) {
            const auto hand = hand_or_default(ap_model);
            const auto rec = load_synergy(ap_synergy, hand);
            const auto data = select_columns(load_posture_csv(ap_data), rec.model.joint_names);
            const auto s = synergy_matrix(rec.model, ap_ns);
            save_posture_csv(approximate_sequence(s, data), ap_out);
            std::cout << "mse " << csv::format_double(reconstruction_mse(s, data)) << "\n";
        }
        else if (*eval) {
            const fs::path db_dir = ev_db;
            const auto hand = database_hand(db_dir);
            const auto database = SynergyDatabase::load(db_dir, hand);
            const auto spec = task_spec_for(ev_task, db_dir, ev_spec);
            const auto seqs = synthesize_task_sequences(spec, hand, ev_seed, ev_count);
            const auto report = sweep_components(spec, database, hand, seqs, ev_seed);
            write_report(report, ev_out);
            std::cout << report_csv(report);
        }
        else if (*units) {
            if (units_movement) {
                nlohmann::json out = nlohmann::json::array();
                for (const auto& e : movement_unit_catalog()) {
                    if (units_json)
                        out.push_back({{"unit", e.unit.str()}, {"frequency_percent", e.frequency_percent}});
                    else
                        std::cout << e.unit.str() << " " << csv::format_double(e.frequency_percent) << "\n";
                }
                if (units_json)
                    std::cout << out.dump(2) << "\n";
            }
            else {
                nlohmann::json out = nlohmann::json::array();
                for (const auto& u : fdms_unit_catalog()) {
                    if (units_json)
                        out.push_back(u.str());
                    else
                        std::cout << u.str() << "\n";
                }
                if (units_json)
                    std::cout << out.dump(2) << "\n";
            }
        }
        else if (*decompose) {
            std::string line;
            for (const auto& u : decompose_unit(parse_movement_unit(dec_unit)))
                line += (line.empty() ? "" : " ") + u.str();
            std::cout << line << "\n";
        }
        else if (*db_init) {
            const fs::path dir = dbi_dir;
            const auto hand = hand_or_default(dbi_model);
            const auto grasp = synthesize_grasp_dataset(hand, dbi_seed);
            const auto database = standard_database(grasp, hand, parse_centering(dbi_centering));
            database.save(dir);
            save_posture_csv(grasp, dir / "grasp_data.csv");
            write_json_file(dir / "hand_model.json", to_json(hand));
            for (const char* task : {"scissors", "switch"})
                write_json_file(dir / "tasks" / (std::string(task) + ".json"),
                                to_json(task_spec_from_json(read_json_file(kDataDir / "tasks" / (std::string(task) + ".json")))));
            std::cout << "database " << dir.string() << ": " << database.size() << " synergies\n";
        }
        else if (*db_register) {
            const fs::path dir = dbr_dir;
            const auto hand = database_hand(dir);
            auto database = fs::exists(dir / "index.json") ? SynergyDatabase::load(dir, hand) : SynergyDatabase{};
            database.register_synergy(dbr_name, parse_synergy_kind(dbr_kind), load_synergy(dbr_synergy, hand));
            database.save(dir);
            std::cout << "registered " << dbr_name << "\n";
        }
        else if (*db_list) {
            const fs::path dir = dbl_dir;
            const auto database = SynergyDatabase::load(dir, database_hand(dir));
            nlohmann::json out = nlohmann::json::array();
            for (const auto& [name, entry] : database.entries()) {
                const auto& m = entry.record->model;
                if (dbl_json)
                    out.push_back({{"name", name}, {"kind", to_string(entry.kind)}, {"f", m.dim()},
                                   {"subset", m.subset.indices()}});
                else
                    std::cout << name << " " << to_string(entry.kind) << " f=" << m.dim() << " joints=["
                              << ns_list(m) << "]\n";
            }
            if (dbl_json)
                std::cout << out.dump(2) << "\n";
        }
        else if (*gen) {
            const auto hand = hand_or_default(gen_model);
            if (gen_kind == "grasp") {
                save_posture_csv(synthesize_grasp_dataset(hand, gen_seed), gen_out);
                std::cout << gen_out << "\n";
            }
            else {
                const auto spec = gen_spec.empty()
                                      ? task_spec_from_json(read_json_file(kDataDir / "tasks" / (gen_kind + ".json")))
                                      : task_spec_from_json(read_json_file(gen_spec));
                require(to_string(spec.kind) == gen_kind, ErrorCode::InvalidArgument,
                        "spec is for task '" + std::string(to_string(spec.kind)) + "', not '" + gen_kind + "'");
                const auto seqs = synthesize_task_sequences(spec, hand, gen_seed, gen_count);
                for (std::size_t k = 0; k < seqs.size(); ++k) {
                    const auto path = numbered_path(gen_out, gen_kind, k);
                    save_posture_csv(seqs[k], path);
                    std::cout << path.string() << "\n";
                }
            }
        }
        else if (*run) {
            const fs::path dir = run_db;
            const auto hand = database_hand(dir);
            const auto database = SynergyDatabase::load(dir, hand);
            const auto script = script_from_json(read_json_file(run_script_path), hand);
            validate_script(script, database);
            std::vector<PostureSequence> inputs;
            for (const auto& path : run_inputs)
                inputs.push_back(select_columns(load_posture_csv(path), hand.joint_names()));
            const auto result = run_script(script, database, hand, inputs);
            save_posture_csv(result.trajectory, run_out);
            for (std::size_t k = 0; k < result.phase_starts.size(); ++k)
                std::cout << "phase " << k << " starts at row " << result.phase_starts[k] << "\n";
        }
        else if (*serve) {
            const fs::path dir = sv_db;
            auto hand = std::make_shared<const HandModel>(database_hand(dir));
            auto database = std::make_shared<const SynergyDatabase>(SynergyDatabase::load(dir, *hand));
            SteeringService service(database, hand);
            SteeringServer server(service, sv_host, sv_port, sv_static);
            g_listen_fd = server.listen_handle();
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "listening on " << sv_host << ":" << server.port() << std::endl;
            server.run();
            g_listen_fd = -1;
            server.stop();
        }
    }
    catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << to_string(ErrorCode::IoError) << ": " << e.what() << "\n";
        return 2;
    }
    return 0;
}
