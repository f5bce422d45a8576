#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lfkit/common.hpp"

namespace lfkit {

// Character mod N stored as a residue table; xi(n) = 0 when gcd(n, N) > 1.
struct Nebentypus {
    long modulus = 1;
    std::vector<cplx> values{cplx(1.0)};
    std::string label = "trivial";

    cplx operator()(long long n) const {
        long long r = n % modulus;
        if (r < 0) r += modulus;
        return values[static_cast<std::size_t>(r)];
    }
    static Nebentypus trivial(long N);
    // Kronecker symbol (D/.) restricted to residues coprime to N
    static Nebentypus kronecker_symbol(long D, long N);
    static Nebentypus from_label(const std::string& label, long N);
    Nebentypus conj() const;
};

enum class CoefficientSource { BuiltinEta, IngestedFile };

struct FormDescriptor {
    std::string name;
    int weight = 0;
    long level = 1;
    Nebentypus xi;
    std::optional<cplx> root_number;
    CoefficientSource source = CoefficientSource::BuiltinEta;
    bool is_dual = false;
};

// Arrays are 1-indexed; slot 0 is unused and zero.
struct CoefficientTable {
    std::vector<mpz_class> exact;  // empty unless the a_f(n) are known integers
    std::vector<cplx> arithmetic;  // a_f(n)
    std::vector<cplx> lambda;      // a_f(n) n^{-(k-1)/2}
    long length() const { return lambda.empty() ? 0 : static_cast<long>(lambda.size()) - 1; }
};

struct Form {
    FormDescriptor desc;
    CoefficientTable table;
    const cplx& lam(long n) const { return table.lambda[static_cast<std::size_t>(n)]; }
    long length() const { return table.length(); }
    double shift() const { return 0.5 * (desc.weight - 1); }
};

// eta(d z)^r factors; the q-shift is sum d r / 24, which must be a positive integer.
struct EtaFactor {
    int d;
    int r;
};
using EtaSpec = std::vector<EtaFactor>;
const EtaSpec& delta_eta_spec();
const EtaSpec& level11_eta_spec();

// a_f(0..M), slot 0 zero.  Only the two built-in products are accepted.
std::vector<mpz_class> eta_product_coefficients(const EtaSpec& spec, long M);

CoefficientTable table_from_integers(std::vector<mpz_class> a, int weight);
CoefficientTable table_from_arithmetic(std::vector<cplx> a, int weight);

// Validates weight, level and parity; rejects k = 1.
Form make_form(FormDescriptor desc, CoefficientTable table);

// "delta" (level 1, weight 12) or "11a" (level 11, weight 2); results are memoized per (name, M).
Form builtin_form(std::string_view name, long M);
bool is_builtin_name(std::string_view name);

cplx normalized_lambda(const Form& f, long n);

struct HeckeReport {
    long checked_pairs = 0;
    long checked_recurrences = 0;
    double max_multiplicative_dev = 0.0;
    double max_recurrence_dev = 0.0;
    double max_ramanujan_ratio = 0.0;  // max |lambda(n)| / d(n)
    bool lambda_one_exact = false;
    bool ok(double tol = 1e-12) const {
        return lambda_one_exact && max_multiplicative_dev <= tol && max_recurrence_dev <= tol && max_ramanujan_ratio <= 1.0 + tol;
    }
};
HeckeReport hecke_report(const Form& f);

Form dual_form(const Form& f);

// Header `k N chi_label M [tags...]`, then M lines `n re im`.
struct CoefficientFile {
    int weight = 0;
    long level = 1;
    std::string chi_label;
    std::vector<std::string> tags;
    std::vector<std::string> re_text, im_text;  // as written, 1-indexed
    std::vector<cplx> values;                   // 1-indexed
};
void write_coefficient_file(const std::string& path, const Form& f, long M);
void write_series_file(const std::string& path, const Form& f, const std::vector<cplx>& values, long M,
                       const std::vector<std::string>& tags);
CoefficientFile read_coefficient_file(const std::string& path);
Form form_from_file(const std::string& path, const std::string& name);

}  // namespace lfkit
