#include "lfkit/records.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <json.hpp>

namespace lfkit {

std::string to_jsonl(const ZeroRecord& r) {
    nlohmann::ordered_json j;
    j["source"] = r.source;
    j["beta"] = r.beta;
    j["gamma"] = r.gamma;
    j["certificate"] = r.certificate;
    j["deriv_re"] = r.derivative.real();
    j["deriv_im"] = r.derivative.imag();
    j["refinement"] = r.refinement;
    j["lemma31_ratio"] = r.lemma31_ratio;
    j["simple"] = r.simple;
    return j.dump();
}

ZeroRecord zero_from_jsonl(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    ZeroRecord r;
    r.source = j.at("source").get<std::string>();
    r.beta = j.at("beta").get<double>();
    r.gamma = j.at("gamma").get<double>();
    r.certificate = j.at("certificate").get<std::string>();
    r.derivative = {j.at("deriv_re").get<double>(), j.at("deriv_im").get<double>()};
    r.refinement = j.value("refinement", 0.0);
    r.lemma31_ratio = j.at("lemma31_ratio").get<double>();
    r.simple = j.at("simple").get<bool>();
    return r;
}

void write_zero_records(const std::string& path, const std::vector<ZeroRecord>& recs) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (const auto& r : recs) out << to_jsonl(r) << '\n';
    if (!out) throw Error("write failed: " + path);
}

std::vector<ZeroRecord> read_zero_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::vector<ZeroRecord> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(zero_from_jsonl(line));
    return out;
}

PlotRow plot_row(const ZeroRecord& r) { return {r.gamma, r.beta, std::abs(r.derivative), r.lemma31_ratio}; }

void emit_plotdata(const std::vector<ZeroRecord>& recs, const std::string& path) {
    if (recs.empty()) throw Error("emit_plotdata: no records");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "gamma,beta,abs_deriv,ratio\n";
    char buf[160];
    for (const auto& r : recs) {
        const auto p = plot_row(r);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.gamma, p.beta, p.abs_deriv, p.ratio);
        out << buf;
    }
    if (!out) throw Error("write failed: " + path);
}

std::vector<PlotRow> read_plotdata(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "gamma,beta,abs_deriv,ratio") throw Error(path + ": unexpected CSV header");
    std::vector<PlotRow> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        PlotRow p;
        char c1, c2, c3;
        std::istringstream ls(line);
        if (!(ls >> p.gamma >> c1 >> p.beta >> c2 >> p.abs_deriv >> c3 >> p.ratio) || c1 != ',' || c2 != ',' || c3 != ',')
            throw Error(path + ": bad CSV row '" + line + "'");
        out.push_back(p);
    }
    return out;
}

}  // namespace lfkit
