#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "psl2/classes.hpp"
#include "psl2/cover.hpp"
#include "psl2/homotopy.hpp"
#include "psl2/square.hpp"

namespace psl2::cli {
namespace {

constexpr double pi = std::numbers::pi;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

std::string read_text(const std::string& path) {
    std::ostringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
    } else {
        std::ifstream f(path);
        if (!f) throw Error(Fault::ParseError, "cannot open " + path);
        ss << f.rdbuf();
    }
    return ss.str();
}

// Writes to the named file, or to `fallback` when the name is empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error(Fault::ParseError, "cannot write " + path);
            os_ = file_.get();
        }
    }
    std::ostream& get() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

std::vector<double> parse_numbers(const std::string& line) {
    std::istringstream ss(line);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') throw Error(Fault::ParseError, "not a number: '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

// "a b c d" (a matrix, classified through its canonical lift) or "a b c d lift" (a cover element).
CoverElement parse_element(const std::string& text) {
    std::istringstream ss(text);
    std::string line;
    std::optional<std::vector<double>> nums;
    while (std::getline(ss, line)) {
        auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (nums) throw Error(Fault::ParseError, "expected a single element");
        nums = parse_numbers(line);
    }
    if (!nums || (nums->size() != 4 && nums->size() != 5))
        throw Error(Fault::ParseError, "expected 'a b c d' or 'a b c d lift'");
    const auto& v = *nums;
    PSL2 base(make_unit_det(v[0], v[1], v[2], v[3]));
    if (v.size() == 5) return CoverElement(base, v[4]);
    return conj_type(base) == ConjugacyType::Hyperbolic ? canonical_hyperbolic_lift(base) : lift_base(base);
}

std::vector<Representation> parse_representations(const std::string& text) {
    std::vector<std::string> blocks;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        auto start = line.find_first_not_of(" \t");
        if (start != std::string::npos && line.compare(start, 7, "surface") == 0) blocks.emplace_back();
        else if (blocks.empty() && start != std::string::npos && line[start] != '#' &&
                 line.find_first_not_of(" \t\r", start) != std::string::npos)
            throw Error(Fault::ParseError, "content before the first 'surface' header");
        if (!blocks.empty()) blocks.back() += line + "\n";
    }
    if (blocks.empty()) throw Error(Fault::ParseError, "no representation found");
    std::vector<Representation> out;
    for (const auto& b : blocks) {
        std::istringstream bs(b);
        out.push_back(read_representation(bs));
    }
    return out;
}

Representation single_representation(const std::string& path) {
    auto reps = parse_representations(read_text(path));
    if (reps.size() != 1) throw Error(Fault::ParseError, path + ": expected exactly one representation");
    return reps.front();
}

std::string class_key(const ClassValue& v) { return v.kind == ClassKind::SWMod2 ? "sw" : "euler"; }

// ---- commands

int cmd_classify(const std::string& input, std::ostream& out) {
    CoverElement x = parse_element(read_text(input));
    ConjugacyType t = conj_type(x.base());
    Region reg = classify_region(x);
    auto [lo, hi] = displacement_extrema(x);
    out << "type=" << to_string(t) << "\n";
    out << "trace=" << num(x.base().trace()) << "\n";
    out << "lift=" << num(x.lift()) << "\n";
    out << "region=" << to_string(reg) << "\n";
    out << "m_lower=" << num(lo) << "\n";
    out << "m_upper=" << num(hi) << "\n";
    out << "summary=" << to_string(t) << " " << to_string(reg);
    if (t != ConjugacyType::Identity) out << " m=(" << short_num(lo) << ", " << short_num(hi) << ")";
    out << "\n";
    return 0;
}

// Textual stand-in for a picture of the regions: sampled elements with their extrema and region tags.
int cmd_region_table(std::uint64_t seed, int samples, std::ostream& out) {
    Rng rng(seed);
    std::uniform_int_distribution<int> shift(-2, 2);
    for (int i = 0; i < samples; ++i) {
        CoverElement x = cover_mul(z_power(shift(rng)), lift_base(random_psl2(rng)));
        auto [lo, hi] = displacement_extrema(x);
        std::string reg;
        try {
            reg = to_string(classify_region(x));
        } catch (const Error& e) {
            if (e.fault() != Fault::AmbiguousRegion) throw;
            reg = "ambiguous";
        }
        out << "record=region index=" << i << " type=" << to_string(conj_type(x.base())) << " trace=" << num(x.base().trace())
            << " lift=" << num(x.lift()) << " m_lower=" << num(lo) << " m_upper=" << num(hi) << " region=" << reg << "\n";
    }
    return 0;
}

int cmd_invariants(const std::string& input, std::ostream& out, std::ostream& err) {
    auto reps = parse_representations(read_text(input));
    int code = 0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const auto& r = reps[i];
        if (reps.size() > 1) out << "rep=" << i << "\n";
        out << "surface=" << describe(r.presentation) << "\n";
        double res = relation_residual(r);
        out << "residual=" << num(res) << "\n";
        bool w = in_W(r);
        out << "in_w=" << (w ? "true" : "false") << "\n";
        try {
            if (res > tol::rel) throw Error(Fault::RelationViolated, "relator residual " + num(res));
            if (!w) throw Error(Fault::NotInW, "a boundary image is not hyperbolic");
            ClassValue v = surface_class(r);
            out << class_key(v) << "=" << v.value << "\n";
            if (r.presentation.is_orientable() && !r.presentation.closed())
                out << "milnor_wood=" << (milnor_wood_check(r) ? "true" : "false") << "\n";
        } catch (const Error& e) {
            out << "error=" << e.what() << "\n";
            err << e.what() << "\n";
            code = std::max(code, exit_code(e.fault()));
        }
    }
    return code;
}

SurfacePresentation presentation_of(int genus, int boundary, bool orientable) {
    if (genus < 0 || boundary < 0) throw Error(Fault::ParseError, "genus and boundary must be non-negative");
    if (!orientable && genus < 1) throw Error(Fault::ParseError, "non-orientable genus must be at least 1");
    return orientable ? SurfacePresentation::orientable(genus, boundary) : SurfacePresentation::nonorientable(genus, boundary);
}

int cmd_sample(const SurfacePresentation& p, std::uint64_t seed, int samples, std::optional<long> cls, std::ostream& out) {
    for (int i = 0; i < samples; ++i) write_representation(out, sample_representation(p, seed + static_cast<std::uint64_t>(i), cls));
    return 0;
}

PathBounds bounds_of(double tol_rel, double step) {
    PathBounds b;
    b.residual = tol_rel;
    b.step = step;
    return b;
}

int report_exit(const PathReport& r) {
    if (r.pass) return 0;
    if (r.start_class && r.end_class && !(*r.start_class == *r.end_class)) return 4;
    return 5;
}

int cmd_connect(const std::string& from, const std::string& to, const std::string& route, const PathBounds& bounds,
                const std::string& path_out, std::ostream& out) {
    Representation r1 = single_representation(from), r2 = single_representation(to);
    ConnectRoute rt = route == "mobius" ? ConnectRoute::Mobius : route == "roots" ? ConnectRoute::Roots : ConnectRoute::Automatic;
    RepPath p = connect_representations(r1, r2, rt);
    if (!path_out.empty()) {
        Sink s(path_out, out);
        write_rep_path(s.get(), p);
    }
    PathReport rep = verify_rep_path(p, bounds);
    write_report(out, rep);
    return report_exit(rep);
}

int cmd_verify_path(const std::string& input, const PathBounds& bounds, std::ostream& out) {
    std::istringstream ss(read_text(input));
    RepPath p = read_rep_path(ss);
    PathReport rep = verify_rep_path(p, bounds);
    write_report(out, rep);
    return report_exit(rep);
}

int cmd_counterexample(int samples, std::ostream& out) {
    // K_t on a log grid from t = 1 down to 1e-4
    for (int j = 0; j < samples; ++j) {
        double t = samples == 1 ? 1e-4 : std::pow(1e-4, static_cast<double>(j) / (samples - 1));
        SL2 k = remark_element(t);
        PSL2 root = remark_root(t);
        out << "record=kpath t=" << num(t) << " k=" << num(k.a) << "," << num(k.b) << "," << num(k.c) << "," << num(k.d)
            << " trace=" << num(k.trace()) << " dist_neg_identity=" << num(frobenius(k, -SL2::identity()))
            << " root=" << num(root.rep().a) << "," << num(root.rep().b) << "," << num(root.rep().c) << "," << num(root.rep().d) << "\n";
    }
    for (int n : {10, 100, 1000}) {
        double t1 = 1 / (2 * pi * n + pi / 2), t2 = 1 / (2 * pi * n + 3 * pi / 2);
        PSL2 a1 = psl_sqrt(remark_element(t1)), a2 = psl_sqrt(remark_element(t2));
        out << "record=oscillation n=" << n << " t=" << num(t1) << " t_alt=" << num(t2) << " root_distance=" << num(distance(a1, a2))
            << " k_distance=" << num(frobenius(remark_element(t1), remark_element(t2)))
            << " dist_neg_identity=" << num(frobenius(remark_element(t1), -SL2::identity())) << "\n";
    }
    return 0;
}

// ---- certify

struct Leg {
    std::optional<RepPath> path;
    std::string fault;
};

RepPath join_through_hub(const SurfacePresentation& p, const Leg* a, const Leg* b) {
    // a: i -> hub (null when i is the hub), b: j -> hub likewise
    std::vector<Representation> s;
    if (a) s = a->path->samples;
    if (b) {
        const auto& bs = b->path->samples;
        for (auto it = bs.rbegin() + (s.empty() ? 0 : 1); it != bs.rend(); ++it) s.push_back(*it);
    }
    return RepPath{p, std::move(s)};
}

int cmd_certify(int genus, int samples, std::uint64_t seed, const PathBounds& bounds, int threads, std::ostream& out,
                std::ostream& err) {
    if (genus <= 2) {
        err << "certify: the two-component statement concerns closed non-orientable surfaces of genus k >= 3; got genus "
            << genus << "\n";
        return 2;
    }
    if (genus > 4) {
        err << "certify: connection is implemented for genus 3 and 4\n";
        return 2;
    }
    if (samples < 1) {
        err << "certify: --samples must be at least 1\n";
        return 2;
    }
    auto t0 = std::chrono::steady_clock::now();
    const SurfacePresentation p = SurfacePresentation::nonorientable(genus, 0);
    out << "command=certify\ngenus=" << genus << "\nsamples=" << samples << "\nseed=" << seed << "\n";
    out << "tol_rel=" << num(bounds.residual) << "\nstep=" << num(bounds.step) << "\n";

    // class-targeted sampling alternates the target so that both classes can appear
    std::vector<Representation> reps;
    std::vector<long> cls;
    for (int i = 0; i < samples; ++i) {
        std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        reps.push_back(sample_representation(p, s, i % 2));
        cls.push_back(sw_class_closed(reps.back()).value);
        out << "record=sample index=" << i << " seed=" << s << " sw=" << cls.back()
            << " residual=" << num(relation_residual(reps.back())) << "\n";
    }
    std::map<long, std::vector<int>> buckets;
    for (int i = 0; i < samples; ++i) buckets[cls[i]].push_back(i);

    // legs member -> hub, the hub being the first member of its bucket
    std::vector<int> hub_of(samples);
    std::vector<int> jobs;
    for (const auto& [c, members] : buckets) {
        for (int m : members) hub_of[m] = members.front();
        for (std::size_t k = 1; k < members.size(); ++k) jobs.push_back(members[k]);
        out << "record=bucket sw=" << c << " size=" << members.size() << " hub=" << members.front() << "\n";
    }
    std::vector<Leg> legs(samples);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < jobs.size();) {
            int m = jobs[k];
            try {
                legs[m].path = connect_representations(reps[m], reps[hub_of[m]]);
            } catch (const Error& e) {
                legs[m].fault = e.what();
            }
        }
    };
    int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (int m : jobs) {
        out << "record=leg member=" << m << " hub=" << hub_of[m];
        if (legs[m].path) {
            PathReport r = verify_rep_path(*legs[m].path, bounds);
            out << " samples=" << r.samples << " max_residual=" << num(r.max_residual) << " max_step=" << num(r.max_step)
                << " pass=" << (r.pass ? "true" : "false") << "\n";
        } else {
            out << " fault=\"" << legs[m].fault << "\" pass=false\n";
        }
    }

    std::size_t same = 0, passed = 0;
    for (const auto& [c, members] : buckets)
        for (std::size_t x = 0; x < members.size(); ++x)
            for (std::size_t y = x + 1; y < members.size(); ++y) {
                int i = members[x], j = members[y];
                ++same;
                const Leg* a = i == hub_of[i] ? nullptr : &legs[i];
                const Leg* b = j == hub_of[j] ? nullptr : &legs[j];
                out << "record=pair sw=" << c << " i=" << i << " j=" << j;
                if ((a && !a->path) || (b && !b->path)) {
                    out << " pass=false reason=leg_failed\n";
                    continue;
                }
                PathReport r = verify_rep_path(join_through_hub(p, a, b), bounds);
                bool ok = r.pass && r.start_class && r.end_class && *r.start_class == *r.end_class;
                passed += ok;
                out << " samples=" << r.samples << " max_residual=" << num(r.max_residual) << " max_step=" << num(r.max_step)
                    << " start_class=" << (r.start_class ? to_string(*r.start_class) : "none")
                    << " end_class=" << (r.end_class ? to_string(*r.end_class) : "none") << " pass=" << (ok ? "true" : "false")
                    << "\n";
            }

    // cross-class pairs are only checked for rejection; no path is attempted
    std::size_t cross = 0, rejected = 0;
    for (int i = 0; i < samples; ++i)
        for (int j = i + 1; j < samples; ++j) {
            if (cls[i] == cls[j]) continue;
            ++cross;
            std::string outcome = "accepted";
            try {
                connect_representations(reps[i], reps[j]);
            } catch (const Error& e) {
                outcome = fault_name(e.fault());
                rejected += e.fault() == Fault::DifferentClasses;
            }
            out << "record=cross i=" << i << " j=" << j << " outcome=" << outcome << "\n";
        }

    bool all_pairs = passed == same && rejected == cross;
    bool both = buckets.size() == 2;
    out << "classes_realized=" << buckets.size() << "\n";
    out << "same_class_pairs=" << same << "\npairs_passed=" << passed << "\n";
    out << "cross_class_pairs=" << cross << "\ncross_class_rejected=" << rejected << "\n";
    if (!both) out << "warning=single class observed; certification incomplete\n";
    const char* status = !all_pairs ? "failed" : both ? "certified" : "incomplete";
    out << "certified=" << (all_pairs && both ? "true" : "false") << "\nstatus=" << status << "\n";
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << "certify: " << status << " in " << secs << " s\n";
    return all_pairs ? 0 : 5;
}

}  // namespace

int exit_code(Fault f) {
    switch (f) {
    case Fault::ParseError:
    case Fault::NonPositiveDeterminant:
    case Fault::NonFinite:
    case Fault::DeterminantDrift:
    case Fault::TemplateUnsupported: return 2;
    case Fault::AmbiguousRegion: return 3;
    case Fault::NotCentral:
    case Fault::RelationViolated:
    case Fault::NotInW:
    case Fault::DifferentClasses:
    case Fault::WrongStartClass:
    case Fault::ClassTooHigh: return 4;
    default: return 5;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Representation spaces of surface groups in PSL(2,R)", "psl2"};
    app.require_subcommand(1);

    std::string input = "-", input2, out_path, route = "automatic";
    std::uint64_t seed = 0;
    int genus = 3, boundary = 0, samples = 1;
    long cls = 0;
    double tol_rel = 1e-6, step = 0.05;
    bool orientable = false, table = false;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto* classify = app.add_subcommand("classify", "conjugacy type and region of a matrix or cover element");
    classify->add_option("input", input, "file with 'a b c d' or 'a b c d lift' (default stdin)");
    classify->add_flag("--table", table, "print a table of sampled elements and their regions instead");
    classify->add_option("--seed", seed, "seed for --table");
    classify->add_option("--samples", samples, "rows for --table");
    classify->add_option("--out", out_path);

    auto* invariants = app.add_subcommand("invariants", "residual, W membership and class of representations");
    invariants->add_option("input", input, "representation file (default stdin)");
    invariants->add_option("--out", out_path);

    auto* sample = app.add_subcommand("sample", "sample representations");
    sample->add_option("--genus", genus)->required();
    sample->add_option("--boundary", boundary);
    sample->add_flag("--orientable", orientable);
    auto* cls_opt = sample->add_option("--class", cls, "target class (sw or Euler)");
    sample->add_option("--seed", seed)->required();
    sample->add_option("--samples", samples);
    sample->add_option("--out", out_path);

    auto* connect = app.add_subcommand("connect", "path between two closed genus-3 or genus-4 representations");
    connect->add_option("from", input)->required();
    connect->add_option("to", input2)->required();
    connect->add_option("--route", route)->check(CLI::IsMember({"automatic", "mobius", "roots"}));
    connect->add_option("--tol-rel", tol_rel, "residual bound for the report");
    connect->add_option("--step", step, "step bound for the report");
    connect->add_option("--out", out_path, "write the path here");

    auto* verify = app.add_subcommand("verify-path", "check residuals, steps and classes along a path file");
    verify->add_option("input", input)->required();
    verify->add_option("--tol-rel", tol_rel);
    verify->add_option("--step", step);
    verify->add_option("--out", out_path);

    auto* counter = app.add_subcommand("counterexample", "elliptic path to -I whose square roots oscillate");
    int kpath = 25;
    counter->add_option("--samples", kpath, "points on the K path");
    counter->add_option("--out", out_path);

    auto* certify = app.add_subcommand("certify", "sample, bucket by sw and connect every same-class pair");
    certify->add_option("--genus", genus)->required();
    certify->add_option("--samples", samples)->required();
    certify->add_option("--seed", seed)->required();
    certify->add_option("--tol-rel", tol_rel);
    certify->add_option("--step", step);
    certify->add_option("--threads", threads);
    certify->add_option("--out", out_path, "report file (default stdout)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (*connect) return cmd_connect(input, input2, route, bounds_of(tol_rel, step), out_path, out);
        Sink sink(out_path, out);
        std::ostream& os = sink.get();
        if (*classify) return table ? cmd_region_table(seed, samples, os) : cmd_classify(input, os);
        if (*invariants) return cmd_invariants(input, os, err);
        if (*sample) {
            std::optional<long> target;
            if (*cls_opt) target = cls;
            return cmd_sample(presentation_of(genus, boundary, orientable), seed, samples, target, os);
        }
        if (*verify) return cmd_verify_path(input, bounds_of(tol_rel, step), os);
        if (*counter) return cmd_counterexample(kpath, os);
        if (*certify) return cmd_certify(genus, samples, seed, bounds_of(tol_rel, step), threads, os, err);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_code(e.fault());
    }
    return 2;
}

}  // namespace psl2::cli
