#include "lfkit/formspace.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "lfkit/arith.hpp"

namespace lfkit {

Nebentypus Nebentypus::trivial(long N) {
    Nebentypus x;
    x.modulus = N;
    x.values.assign(static_cast<std::size_t>(N), cplx(0.0));
    for (long r = 0; r < N; ++r)
        if (std::gcd(r, N) == 1) x.values[static_cast<std::size_t>(r)] = 1.0;
    x.label = "trivial";
    return x;
}

Nebentypus Nebentypus::kronecker_symbol(long D, long N) {
    Nebentypus x;
    x.modulus = N;
    x.values.assign(static_cast<std::size_t>(N), cplx(0.0));
    for (long r = 0; r < N; ++r)
        if (std::gcd(r, N) == 1) x.values[static_cast<std::size_t>(r)] = static_cast<double>(kronecker(D, r));
    x.label = "kron:" + std::to_string(D);
    return x;
}

Nebentypus Nebentypus::from_label(const std::string& label, long N) {
    if (label == "trivial" || label == "1") return trivial(N);
    if (label.rfind("kron:", 0) == 0) return kronecker_symbol(std::stol(label.substr(5)), N);
    throw Error("unsupported nebentypus label '" + label + "' (trivial or kron:D only)");
}

Nebentypus Nebentypus::conj() const {
    Nebentypus x = *this;
    for (auto& v : x.values) v = std::conj(v);
    // real characters only are representable by label, so the label is kept
    return x;
}

const EtaSpec& delta_eta_spec() {
    static const EtaSpec s{{1, 24}};
    return s;
}

const EtaSpec& level11_eta_spec() {
    static const EtaSpec s{{1, 2}, {11, 2}};
    return s;
}

namespace {

bool same_spec(const EtaSpec& a, const EtaSpec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].d != b[i].d || a[i].r != b[i].r) return false;
    return true;
}

// In place: s <- s * prod_{n>=1} (1 - q^{d n}) truncated at degree len-1, via Euler's pentagonal series.
void mul_euler(std::vector<mpz_class>& s, int d) {
    const long len = static_cast<long>(s.size());
    std::vector<std::pair<long, int>> terms;  // (exponent, sign), exponent > 0
    for (long m = 1;; ++m) {
        const long e1 = d * (m * (3 * m - 1) / 2);
        const long e2 = d * (m * (3 * m + 1) / 2);
        if (e1 >= len) break;
        const int sg = (m % 2) ? -1 : 1;
        terms.emplace_back(e1, sg);
        if (e2 < len) terms.emplace_back(e2, sg);
    }
    for (long i = len - 1; i > 0; --i) {
        for (auto [e, sg] : terms) {
            if (e > i) break;
            if (sg > 0)
                s[i] += s[i - e];
            else
                s[i] -= s[i - e];
        }
    }
}

}  // namespace

std::vector<mpz_class> eta_product_coefficients(const EtaSpec& spec, long M) {
    if (M < 1) throw Error("eta_product_coefficients: M must be >= 1");
    if (!same_spec(spec, delta_eta_spec()) && !same_spec(spec, level11_eta_spec()))
        throw Error("eta_product_coefficients: unknown eta product");
    long shift24 = 0;
    for (const auto& f : spec) shift24 += static_cast<long>(f.d) * f.r;
    const long shift = shift24 / 24;
    std::vector<mpz_class> s(static_cast<std::size_t>(M + 1 - shift), mpz_class(0));
    s[0] = 1;
    for (const auto& f : spec)
        for (int j = 0; j < f.r; ++j) mul_euler(s, f.d);
    std::vector<mpz_class> a(static_cast<std::size_t>(M + 1), mpz_class(0));
    for (long n = shift; n <= M; ++n) a[n] = s[n - shift];
    return a;
}

CoefficientTable table_from_integers(std::vector<mpz_class> a, int weight) {
    CoefficientTable t;
    const long M = static_cast<long>(a.size()) - 1;
    t.arithmetic.assign(a.size(), cplx(0.0));
    t.lambda.assign(a.size(), cplx(0.0));
    const double h = 0.5 * (weight - 1);
    for (long n = 1; n <= M; ++n) {
        const double v = a[n].get_d();
        t.arithmetic[n] = v;
        t.lambda[n] = n == 1 ? v : v / std::pow(static_cast<double>(n), h);
    }
    t.exact = std::move(a);
    return t;
}

CoefficientTable table_from_arithmetic(std::vector<cplx> a, int weight) {
    CoefficientTable t;
    const long M = static_cast<long>(a.size()) - 1;
    t.lambda.assign(a.size(), cplx(0.0));
    const double h = 0.5 * (weight - 1);
    for (long n = 1; n <= M; ++n) t.lambda[n] = n == 1 ? a[n] : a[n] / std::pow(static_cast<double>(n), h);
    t.arithmetic = std::move(a);
    return t;
}

Form make_form(FormDescriptor desc, CoefficientTable table) {
    if (desc.weight == 1) throw Error("weight 1 forms are not supported");
    if (desc.weight < 1) throw Error("weight must be a positive integer");
    if (desc.level < 1) throw Error("level must be positive");
    if (desc.xi.modulus != desc.level) throw Error("nebentypus modulus must equal the level");
    const cplx xm1 = desc.xi(-1);
    const double parity = desc.weight % 2 == 0 ? 1.0 : -1.0;
    if (std::abs(xm1 - parity) > 1e-12) throw Error("nebentypus parity xi(-1) != (-1)^k");
    if (table.length() < 1 || table.lambda[1] != cplx(1.0)) throw Error("coefficient table must start with lambda(1) = 1");
    return Form{std::move(desc), std::move(table)};
}

bool is_builtin_name(std::string_view name) {
    return name == "delta" || name == "level1" || name == "1.12.a.a" || name == "11a" || name == "level11" || name == "11.2.a.a";
}

Form builtin_form(std::string_view name, long M) {
    static std::mutex mu;
    static std::map<std::pair<std::string, long>, Form> memo;
    const bool delta = name == "delta" || name == "level1" || name == "1.12.a.a";
    const bool eleven = name == "11a" || name == "level11" || name == "11.2.a.a";
    if (!delta && !eleven) throw Error("unknown built-in form '" + std::string(name) + "' (delta or 11a)");
    const std::string key = delta ? "delta" : "11a";
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find({key, M});
        if (it != memo.end()) return it->second;
    }
    FormDescriptor d;
    d.name = key;
    d.weight = delta ? 12 : 2;
    d.level = delta ? 1 : 11;
    d.xi = Nebentypus::trivial(d.level);
    d.source = CoefficientSource::BuiltinEta;
    auto a = eta_product_coefficients(delta ? delta_eta_spec() : level11_eta_spec(), M);
    Form f = make_form(std::move(d), table_from_integers(std::move(a), delta ? 12 : 2));
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(std::make_pair(key, M), f);
    return f;
}

cplx normalized_lambda(const Form& f, long n) {
    if (n < 1 || n > f.length())
        throw RangeError("lambda(" + std::to_string(n) + ") needs a table of length M >= " + std::to_string(n) + " (have " +
                             std::to_string(f.length()) + ")",
                         n);
    return f.lam(n);
}

HeckeReport hecke_report(const Form& f) {
    HeckeReport r;
    const long M = f.length();
    r.lambda_one_exact = M >= 1 && f.lam(1) == cplx(1.0);
    const auto d = divisor_counts(M);
    for (long n = 1; n <= M; ++n) r.max_ramanujan_ratio = std::max(r.max_ramanujan_ratio, std::abs(f.lam(n)) / d[n]);
    for (long m = 1; m <= M; ++m)
        for (long n = m; n * m <= M; ++n) {
            if (std::gcd(m, n) != 1) continue;
            r.max_multiplicative_dev = std::max(r.max_multiplicative_dev, rel_diff(f.lam(m * n), f.lam(m) * f.lam(n)));
            ++r.checked_pairs;
        }
    const auto spf = spf_sieve(M);
    for (long p = 2; p <= M; ++p) {
        if (spf[p] != p || f.desc.level % p == 0) continue;
        const cplx xp = f.desc.xi(p);
        long pr = p, prev = 1;
        while (pr <= M / p) {
            const long next = pr * p;
            const cplx rhs = f.lam(p) * f.lam(pr) - xp * f.lam(prev);
            r.max_recurrence_dev = std::max(r.max_recurrence_dev, rel_diff(f.lam(next), rhs));
            ++r.checked_recurrences;
            prev = pr;
            pr = next;
        }
    }
    return r;
}

Form dual_form(const Form& f) {
    Form g = f;
    g.desc.is_dual = !f.desc.is_dual;
    g.desc.xi = f.desc.xi.conj();
    if (f.desc.root_number) g.desc.root_number = std::conj(*f.desc.root_number);
    for (auto& v : g.table.arithmetic) v = std::conj(v);
    for (auto& v : g.table.lambda) v = std::conj(v);
    return g;
}

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void write_series_file(const std::string& path, const Form& f, const std::vector<cplx>& values, long M,
                       const std::vector<std::string>& tags) {
    if (M > static_cast<long>(values.size()) - 1) throw RangeError("series shorter than requested count", M);
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << f.desc.weight << ' ' << f.desc.level << ' ' << f.desc.xi.label << ' ' << M;
    for (const auto& t : tags) out << ' ' << t;
    out << '\n';
    for (long n = 1; n <= M; ++n) out << n << ' ' << fmt17(values[n].real()) << ' ' << fmt17(values[n].imag()) << '\n';
    if (!out) throw Error("write failed: " + path);
}

void write_coefficient_file(const std::string& path, const Form& f, long M) {
    if (M > f.length()) throw RangeError("coefficient table shorter than requested count " + std::to_string(M), M);
    if (f.table.exact.empty()) {
        write_series_file(path, f, f.table.arithmetic, M, {});
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << f.desc.weight << ' ' << f.desc.level << ' ' << f.desc.xi.label << ' ' << M << '\n';
    for (long n = 1; n <= M; ++n) out << n << ' ' << f.table.exact[n].get_str() << " 0\n";
    if (!out) throw Error("write failed: " + path);
}

CoefficientFile read_coefficient_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    CoefficientFile cf;
    std::string header;
    if (!std::getline(in, header)) throw Error(path + ": empty file");
    std::istringstream hs(header);
    long M = 0;
    if (!(hs >> cf.weight >> cf.level >> cf.chi_label >> M) || M < 1) throw Error(path + ": bad header");
    for (std::string t; hs >> t;) cf.tags.push_back(t);
    cf.values.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    cf.re_text.assign(static_cast<std::size_t>(M + 1), "");
    cf.im_text.assign(static_cast<std::size_t>(M + 1), "");
    for (long n = 1; n <= M; ++n) {
        long idx = 0;
        std::string re, im;
        if (!(in >> idx >> re >> im) || idx != n) throw Error(path + ": malformed line " + std::to_string(n + 1));
        cf.values[n] = {std::stod(re), std::stod(im)};
        cf.re_text[n] = re;
        cf.im_text[n] = im;
    }
    return cf;
}

Form form_from_file(const std::string& path, const std::string& name) {
    auto cf = read_coefficient_file(path);
    const long M = static_cast<long>(cf.values.size()) - 1;
    bool integral = true;
    for (long n = 1; n <= M && integral; ++n) {
        const auto& re = cf.re_text[n];
        integral = cf.im_text[n] == "0" && !re.empty() && re.find_first_not_of("-0123456789") == std::string::npos;
    }
    FormDescriptor d;
    d.name = name;
    d.weight = cf.weight;
    d.level = cf.level;
    d.xi = Nebentypus::from_label(cf.chi_label, cf.level);
    d.source = CoefficientSource::IngestedFile;
    if (integral) {
        std::vector<mpz_class> a(static_cast<std::size_t>(M + 1), mpz_class(0));
        for (long n = 1; n <= M; ++n) a[n] = mpz_class(cf.re_text[n]);
        return make_form(std::move(d), table_from_integers(std::move(a), cf.weight));
    }
    return make_form(std::move(d), table_from_arithmetic(std::move(cf.values), cf.weight));
}

}  // namespace lfkit
