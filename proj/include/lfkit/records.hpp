#pragma once

#include <string>
#include <vector>

#include "lfkit/common.hpp"

namespace lfkit {

struct ZeroRecord {
    std::string source;
    double beta = 0.5;
    double gamma = 0.0;
    std::string certificate = "sign-change";  // or "winding"
    cplx derivative = 0.0;                    // Lambda'(rho)
    double refinement = 0.0;                  // relative change of the derivative under r -> r/2
    double lemma31_ratio = 0.0;
    bool simple = false;
};

struct PoleRecord {
    ZeroRecord zero;
    cplx residue = 0.0;
    int chi = -1;  // -1: untwisted source, otherwise the character index
};

std::string to_jsonl(const ZeroRecord& r);
ZeroRecord zero_from_jsonl(const std::string& line);
void write_zero_records(const std::string& path, const std::vector<ZeroRecord>& recs);
std::vector<ZeroRecord> read_zero_records(const std::string& path);

// One CSV row per zero: gamma,beta,abs_deriv,ratio, printed with 17 significant digits.
struct PlotRow {
    double gamma = 0.0, beta = 0.0, abs_deriv = 0.0, ratio = 0.0;
    bool operator==(const PlotRow&) const = default;
};
PlotRow plot_row(const ZeroRecord& r);
void emit_plotdata(const std::vector<ZeroRecord>& recs, const std::string& path);
std::vector<PlotRow> read_plotdata(const std::string& path);

}  // namespace lfkit
