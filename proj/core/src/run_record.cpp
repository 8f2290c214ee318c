#include "cornn/run_record.hpp"

#include "cornn/csv.hpp"
#include "cornn/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <string>

namespace cornn {

namespace {

std::filesystem::path with_ext(std::filesystem::path stem, const char* ext) {
    stem += ext;
    return stem;
}

// JSON cannot carry inf/nan as numbers; store those as strings.
nlohmann::json encode_double(double v) {
    if (std::isfinite(v)) return v;
    return csv::format_double(v);
}

double decode_double(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    throw ParseError("bad number '" + s + "' in run metadata");
}

} // namespace

void write_checkpoints_csv(const RunRecord& record, std::ostream& out) {
    out << "fe,best_train_mse,test_mse\n";
    for (const auto& c : record.checkpoints) {
        out << c.fe << ',' << csv::format_double(c.best_train_mse) << ','
            << csv::format_double(c.test_mse) << '\n';
    }
}

std::vector<Checkpoint> read_checkpoints_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || csv::chomp(line) != "fe,best_train_mse,test_mse") {
        throw ParseError("checkpoint CSV header must be fe,best_train_mse,test_mse", 1, 1);
    }
    std::vector<Checkpoint> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const auto text = csv::chomp(line);
        if (text.empty()) continue;
        const auto cells = csv::split(text);
        if (cells.size() != 3) throw ParseError("checkpoint CSV: expected 3 columns", row, 1);
        const auto fe = csv::parse_uint(cells[0]);
        if (!fe) throw ParseError("checkpoint CSV: bad fe", row, 1);
        const auto tr = csv::parse_double(cells[1]);
        if (!tr) throw ParseError("checkpoint CSV: bad best_train_mse", row, 2);
        const auto te = csv::parse_double(cells[2]);
        if (!te) throw ParseError("checkpoint CSV: bad test_mse", row, 3);
        out.push_back({static_cast<std::size_t>(*fe), *tr, *te});
    }
    return out;
}

std::string run_metadata_json(const RunRecord& record) {
    nlohmann::ordered_json j;
    j["instance"] = record.instance_label;
    j["algorithm"] = to_string(record.algorithm);
    j["seed"] = record.seed;
    j["budget"] = record.budget;
    j["fe_consumed"] = record.fe_consumed;
    j["status"] = record.status == RunStatus::Completed ? "completed" : "aborted";
    j["diagnostic"] = record.diagnostic;
    j["covariance_resets"] = record.covariance_resets;
    j["hyperparameters"] = record.hyperparameters;
    j["scored_quantity"] = "test MSE of the best-so-far candidate by train MSE";
    auto params = nlohmann::json::array();
    for (double v : record.final_params) params.push_back(encode_double(v));
    j["final_params"] = std::move(params);
    return j.dump(2);
}

void save_run(const RunRecord& record, const std::filesystem::path& stem) {
    {
        std::ofstream out(with_ext(stem, ".csv"), std::ios::binary);
        if (!out) throw Error("cannot write " + with_ext(stem, ".csv").string());
        write_checkpoints_csv(record, out);
    }
    std::ofstream meta(with_ext(stem, ".json"), std::ios::binary);
    if (!meta) throw Error("cannot write " + with_ext(stem, ".json").string());
    meta << run_metadata_json(record) << '\n';
}

RunRecord load_run(const std::filesystem::path& stem) {
    RunRecord rec;
    {
        std::ifstream in(with_ext(stem, ".csv"), std::ios::binary);
        if (!in) throw Error("missing checkpoint file " + with_ext(stem, ".csv").string());
        rec.checkpoints = read_checkpoints_csv(in);
    }
    std::ifstream meta_in(with_ext(stem, ".json"), std::ios::binary);
    if (!meta_in) throw Error("missing metadata file " + with_ext(stem, ".json").string());
    try {
        const auto j = nlohmann::json::parse(meta_in);
        rec.instance_label = j.at("instance").get<std::string>();
        rec.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        rec.seed = j.at("seed").get<std::uint64_t>();
        rec.budget = j.at("budget").get<std::size_t>();
        rec.fe_consumed = j.at("fe_consumed").get<std::size_t>();
        rec.status = j.at("status").get<std::string>() == "completed" ? RunStatus::Completed
                                                                     : RunStatus::Aborted;
        rec.diagnostic = j.at("diagnostic").get<std::string>();
        rec.covariance_resets = j.at("covariance_resets").get<std::size_t>();
        rec.hyperparameters = j.at("hyperparameters").get<std::map<std::string, std::string>>();
        for (const auto& v : j.at("final_params")) rec.final_params.push_back(decode_double(v));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad run metadata " + with_ext(stem, ".json").string() + ": " + e.what());
    }
    return rec;
}

} // namespace cornn
