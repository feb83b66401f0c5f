#include "phibvp/problem_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace phibvp {

namespace {

using json = nlohmann::json;

// JSON value together with its key path, for diagnostics
class Node {
public:
    Node(const json& value, std::string path, const std::string& source)
        : v_(value), path_(std::move(path)), source_(source)
    {
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ProblemFileError(source_ + ": key '" + (path_.empty() ? "<root>" : path_) + "': " + what);
    }

    const json& raw() const { return v_; }
    const std::string& path() const { return path_; }

    Node at(const std::string& key) const
    {
        if (!v_.is_object())
            fail("expected an object");
        const auto it = v_.find(key);
        if (it == v_.end())
            Node(v_, join(key), source_).fail("missing");
        return Node(*it, join(key), source_);
    }

    Node at(std::size_t i) const { return Node(v_.at(i), path_ + "[" + std::to_string(i) + "]", source_); }

    bool has(const std::string& key) const { return v_.is_object() && v_.contains(key); }

    void only_keys(std::initializer_list<const char*> allowed) const
    {
        if (!v_.is_object())
            fail("expected an object");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, value] : v_.items()) {
            if (!ok.count(key))
                Node(value, join(key), source_).fail("unknown key");
        }
    }

    double number() const
    {
        if (!v_.is_number())
            fail("expected a number");
        const double x = v_.get<double>();
        if (!std::isfinite(x))
            fail("expected a finite number");
        return x;
    }

    std::string string() const
    {
        if (!v_.is_string())
            fail("expected a string");
        return v_.get<std::string>();
    }

    std::size_t array_size() const
    {
        if (!v_.is_array())
            fail("expected an array");
        return v_.size();
    }

    std::vector<double> numbers() const
    {
        std::vector<double> out(array_size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = at(i).number();
        return out;
    }

private:
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& v_;
    std::string path_;
    const std::string& source_;
};

using Expr = std::function<double(double)>;

Expr parse_expr(const Node& e, double a)
{
    if (!e.raw().is_object() || e.raw().size() != 1)
        e.fail("expected exactly one of constant, power, indicator, product");
    const std::string kind = e.raw().begin().key();
    const Node body = e.at(kind);
    if (kind == "constant") {
        const double c = body.number();
        return [c](double) { return c; };
    }
    if (kind == "power") {
        body.only_keys({"coef", "exponent"});
        const double c = body.at("coef").number();
        const double p = body.at("exponent").number();
        if (p < 0.0)
            body.at("exponent").fail("exponent >= 0");
        return [c, p, a](double x) { return p == 0.0 ? c : c * std::pow(std::max(0.0, x - a), p); };
    }
    if (kind == "indicator") {
        if (body.array_size() != 2)
            body.fail("expected [l, r]");
        const double l = body.at(std::size_t{0}).number(), r = body.at(std::size_t{1}).number();
        if (!(l < r))
            body.fail("l < r");
        return [l, r](double x) { return (x > l && x < r) ? 1.0 : 0.0; };
    }
    if (kind == "product") {
        const std::size_t n = body.array_size();
        if (n == 0)
            body.fail("empty product");
        std::vector<Expr> factors;
        for (std::size_t i = 0; i < n; ++i)
            factors.push_back(parse_expr(body.at(i), a));
        return [factors](double x) {
            double p = 1.0;
            for (const auto& f : factors)
                p *= f(x);
            return p;
        };
    }
    e.at(kind).fail("unknown weight expression");
}

GridFunction parse_weight(const Node& w, const GridPtr& grid)
{
    if (w.raw().is_number())
        return GridFunction::constant(grid, w.number());
    if (w.has("expr")) {
        w.only_keys({"expr"});
        return GridFunction::sample(grid, parse_expr(w.at("expr"), grid->a()));
    }
    w.only_keys({"nodes", "values"});
    const std::vector<double> x = w.at("nodes").numbers();
    const std::vector<double> y = w.at("values").numbers();
    if (x.size() != y.size())
        w.at("values").fail("same length as nodes");
    if (x.size() < 2)
        w.at("nodes").fail("at least two nodes");
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1]))
            w.at("nodes").fail("strictly increasing");
    }
    const double span = grid->length();
    if (x.front() > grid->a() + 1e-12 * span || x.back() < grid->b() - 1e-12 * span)
        w.at("nodes").fail("nodes must cover the interval");
    const GridFunction table(Grid::make(x), y);
    return GridFunction::sample(grid, [&table](double s) { return table(s); });
}

Nonlinearity parse_nonlinearity(const Node& f)
{
    if (f.raw().is_string()) {
        const std::string s = f.string();
        if (s.rfind("power:", 0) != 0)
            f.fail("expected \"power:q\" or a table");
        try {
            std::size_t used = 0;
            const std::string tail = s.substr(6);
            const double q = std::stod(tail, &used);
            if (used != tail.size())
                throw std::invalid_argument(tail);
            return power_nonlinearity(q);
        } catch (const ProblemFileError&) {
            throw;
        } catch (const std::exception& e) {
            f.fail(std::string("bad power exponent (") + e.what() + ")");
        }
    }
    f.only_keys({"table"});
    const Node t = f.at("table");
    t.only_keys({"t", "values"});
    try {
        return table_nonlinearity(t.at("t").numbers(), t.at("values").numbers());
    } catch (const ProblemFileError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        t.fail(e.what());
    }
}

template <class T>
T parse_block(const Node& b, const char* k1, const char* k2, const char* k3)
{
    b.only_keys({k1, k2, k3});
    return T{b.at(k1).number(), b.at(k2).number(), b.at(k3).number()};
}

} // namespace

ProblemFile parse_problem_text(const std::string& text, const std::string& source,
                               std::optional<std::size_t> grid_size_override)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ProblemFileError(source + ": " + e.what());
    }
    const Node root(doc, "", source);
    root.only_keys({"interval", "grid_size", "phi", "m", "n", "h", "lambda", "mu", "f", "g", "F", "G1", "G2"});

    const Node iv = root.at("interval");
    if (iv.array_size() != 2)
        iv.fail("expected [a, b]");
    const double a = iv.at(std::size_t{0}).number(), b = iv.at(std::size_t{1}).number();
    if (!(a < b))
        iv.fail("a < b");

    std::size_t nodes = 0;
    {
        const Node gs = root.at("grid_size");
        if (!gs.raw().is_number_integer() || gs.raw().get<long long>() < 3)
            gs.fail("integer >= 3");
        nodes = static_cast<std::size_t>(gs.raw().get<long long>());
    }
    if (grid_size_override) {
        if (*grid_size_override < 3)
            throw ProblemFileError(source + ": grid size override must be >= 3");
        nodes = *grid_size_override;
    }
    const GridPtr grid = Grid::uniform(a, b, nodes);

    const Node phi_node = root.at("phi");
    std::optional<Homeomorphism> phi;
    try {
        phi = parse_phi(phi_node.string());
    } catch (const ProblemFileError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        phi_node.fail(e.what());
    }

    ProblemFile out{ProblemSpec{*phi, parse_weight(root.at("m"), grid), parse_weight(root.at("n"), grid),
                                root.at("lambda").number(), root.at("mu").number(),
                                parse_nonlinearity(root.at("f")), parse_nonlinearity(root.at("g")),
                                std::nullopt, std::nullopt, std::nullopt},
                    std::nullopt};
    if (root.has("h")) {
        out.h = parse_weight(root.at("h"), grid);
        if (!out.h->is_nonnegative())
            root.at("h").fail("h >= 0");
    }
    if (root.has("F"))
        out.spec.F = parse_block<ConditionF>(root.at("F"), "c0", "t0", "q");
    if (root.has("G1"))
        out.spec.G1 = parse_block<ConditionG1>(root.at("G1"), "c1", "t1", "r1");
    if (root.has("G2"))
        out.spec.G2 = parse_block<ConditionG2>(root.at("G2"), "c2", "t2", "r2");

    try {
        out.spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ProblemFileError(source + ": " + e.what());
    }
    return out;
}

ProblemFile parse_problem(const std::string& path, std::optional<std::size_t> grid_size_override)
{
    std::ifstream in(path);
    if (!in)
        throw ProblemFileError(path + ": cannot open problem file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str(), path, grid_size_override);
}

} // namespace phibvp
